"""Pytest configuration and shared fixtures for all tests.

This module provides:
- A small rig configuration covering every property kind
- Rig handles in process
- Forged corpora on disk
"""

from collections.abc import Callable, Generator
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from apps.rig.main import create_rig_app
from apps.rig.models import RigConfig
from apps.rig.server import RigHandle, start_rig
from apps.tester.corpus.forge import Corpus, forge


def climate_rig_config(**overrides) -> RigConfig:
    """Gateway with one endpoint carrying an enum, a number, a boolean and a time."""
    data = {
        "endpoints": [
            {
                "path": "/climate",
                "methods": ["GET", "PUT"],
                "properties": [
                    {
                        "api_key": "acMode",
                        "kind": "enum",
                        "can_key": "AcMode",
                        "value_map": {"STANDARD": 0, "ECONOMY": 1},
                    },
                    {"api_key": "fanLevel", "kind": "numeric", "can_key": "FanLevel", "scale": "10", "integer": True},
                    {
                        "api_key": "seatHeat",
                        "kind": "boolean",
                        "can_key": "SeatHeat",
                        "value_map": {"TRUE": 1, "FALSE": 0},
                    },
                    {
                        "api_key": "departure",
                        "kind": "datetime",
                        "hour_can_key": "DepartureHr",
                        "minute_can_key": "DepartureMin",
                    },
                ],
            }
        ],
        "vv_bindings": [
            {"can_key": "AcMode", "vv_key": "VvAc", "raw_map": {0: 10, 1: 11}, "default": 10},
            {"can_key": "FanLevel", "vv_key": "VvFan"},
            {"can_key": "SeatHeat", "vv_key": "VvSeat", "raw_map": {1: 1, 0: 0}},
            {"can_key": "DepartureHr", "vv_key": "VvDepHr"},
            {"can_key": "DepartureMin", "vv_key": "VvDepMin"},
        ],
        **overrides,
    }
    return RigConfig.model_validate(data)


@pytest.fixture
def rig_config() -> RigConfig:
    """Rig configuration for /climate."""
    return climate_rig_config()


@pytest.fixture
def rig_client(rig_config) -> Generator[TestClient, None, None]:
    """TestClient on a fresh rig app."""
    with TestClient(create_rig_app(rig_config)) as client:
        yield client


@pytest.fixture
def in_process_rig(rig_config) -> Generator[RigHandle, None, None]:
    """Rig reachable through ASGITransport, no socket."""
    with start_rig(rig_config, mode="in_process") as handle:
        yield handle


@pytest.fixture
def forged(tmp_path) -> Callable[..., tuple[Corpus, Path]]:
    """Factory writing a forged corpus under tmp_path."""

    def make(seed: int, profile: str, size: int, *, clean: bool = False, faults: int = 0) -> tuple[Corpus, Path]:
        out = tmp_path / f"{profile}-{seed}-{size}-{int(clean)}-{faults}"
        corpus = forge(seed, profile, size, out, clean=clean, fault_count=faults)
        return corpus, out

    return make
