"""In-memory Virtual Vehicle table, CAN trace and fault registry.

Reads and writes of one VV key are serialized by a per-key lock, so every
key behaves linearizably under concurrent gateway and admin traffic.
"""

import itertools
import threading
from typing import Literal

import structlog

from apps.rig.models import (
    ENDPOINT_FAULTS,
    CanFrame,
    FaultKind,
    FaultSpec,
    RigConfig,
    VvBinding,
)
from apps.tester.core.exceptions import UnknownKeyError, UnknownTargetError

logger = structlog.get_logger(__name__)

Direction = Literal["tx", "rx", "mock"]

# Reads served stale after each write to a stale_state target
STALE_READS = 1


class RigState:
    """Mutable rig state shared by the gateway and admin routers."""

    def __init__(self, config: RigConfig) -> None:
        self.config = config
        self._by_can = {binding.can_key: binding for binding in config.vv_bindings}
        self._by_vv = {binding.vv_key: binding for binding in config.vv_bindings}
        self._values = {binding.vv_key: float(binding.default) for binding in config.vv_bindings}
        self._previous = dict(self._values)
        self._stale_reads: dict[str, int] = {}
        self._locks = {key: threading.Lock() for key in self._values}

        self._ticks = itertools.count(1)
        self._trace: list[CanFrame] = []
        self._trace_lock = threading.Lock()

        self._faults: list[FaultSpec] = []
        self._fault_lock = threading.Lock()
        for fault in config.faults:
            self.inject(fault)

    # VV table

    def binding_for_vv(self, vv_key: str) -> VvBinding:
        binding = self._by_vv.get(vv_key)
        if binding is None:
            raise UnknownKeyError(f"VV key {vv_key} is not bound", {"key": vv_key})
        return binding

    def binding_for_can(self, can_key: str) -> VvBinding:
        binding = self._by_can.get(can_key)
        if binding is None:
            raise UnknownKeyError(f"CAN signal {can_key} is not bound", {"key": can_key})
        return binding

    def vv_set(self, vv_key: str, raw: float) -> None:
        """Admin write, bypassing the gateway.

        Raises:
            UnknownKeyError: Key not bound
        """
        binding = self.binding_for_vv(vv_key)
        self._store(vv_key, raw)
        self.record(binding.can_key, raw, "mock")

    def vv_get(self, vv_key: str) -> float:
        """Admin read.

        Raises:
            UnknownKeyError: Key not bound
        """
        self.binding_for_vv(vv_key)
        return self._load(vv_key)

    def _store(self, vv_key: str, raw: float) -> None:
        with self._locks[vv_key]:
            self._previous[vv_key] = self._values[vv_key]
            self._values[vv_key] = float(raw)
            if self.has_fault(FaultKind.STALE_STATE, self._by_vv[vv_key].can_key):
                self._stale_reads[vv_key] = STALE_READS

    def _load(self, vv_key: str) -> float:
        with self._locks[vv_key]:
            if self._stale_reads.get(vv_key, 0) > 0:
                self._stale_reads[vv_key] -= 1
                return self._previous[vv_key]
            return self._values[vv_key]

    # CAN bus

    def write_can(self, can_key: str, raw: float) -> None:
        """Gateway write of one signal; lands in the bound VV state."""
        binding = self.binding_for_can(can_key)
        if self.has_fault(FaultKind.DEAD_SIGNAL, can_key):
            logger.debug("frame_dropped", key=can_key)
            return
        self.record(can_key, raw, "tx")
        vv_raw = binding.to_vv(raw)
        if vv_raw is None:
            logger.warning("frame_unmapped", key=can_key, raw=raw)
            return
        self._store(binding.vv_key, vv_raw)

    def read_can(self, can_key: str) -> float | None:
        """Gateway read of one signal from the bound VV state."""
        binding = self.binding_for_can(can_key)
        if self.has_fault(FaultKind.DEAD_SIGNAL, can_key):
            return None
        raw = binding.to_can(self._load(binding.vv_key))
        if raw is not None:
            self.record(can_key, raw, "rx")
        return raw

    def record(self, can_key: str, raw: float, direction: Direction) -> None:
        with self._trace_lock:
            self._trace.append(
                CanFrame(tick=next(self._ticks), key=can_key, raw=raw, direction=direction)
            )

    def trace(self) -> list[CanFrame]:
        with self._trace_lock:
            return list(self._trace)

    # Faults

    def inject(self, fault: FaultSpec) -> None:
        """Activate a fault.

        Raises:
            UnknownTargetError: Target endpoint or signal not configured, or
                swapped labels not offered by the endpoint
        """
        if fault.kind in ENDPOINT_FAULTS:
            endpoint = self.config.endpoint(fault.target)
            if endpoint is None:
                raise UnknownTargetError(
                    f"Fault target {fault.target} is not an endpoint", {"target": fault.target}
                )
            if fault.kind is FaultKind.SWAPPED_ENUM and not any(
                fault.label_a in binding.value_map and fault.label_b in binding.value_map
                for binding in endpoint.properties
            ):
                raise UnknownTargetError(
                    f"No property of {fault.target} offers {fault.label_a} and {fault.label_b}",
                    {"target": fault.target},
                )
        elif fault.target not in self._by_can:
            raise UnknownTargetError(
                f"Fault target {fault.target} is not a bound CAN signal", {"target": fault.target}
            )
        with self._fault_lock:
            self._faults.append(fault)
        logger.info("fault_injected", kind=str(fault.kind), target=fault.target)

    def faults(self, kind: FaultKind, target: str) -> list[FaultSpec]:
        with self._fault_lock:
            return [f for f in self._faults if f.kind is kind and f.target == target]

    def has_fault(self, kind: FaultKind, target: str) -> bool:
        return bool(self.faults(kind, target))
