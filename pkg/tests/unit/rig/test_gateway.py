"""Unit tests for the simulated rig: gateway routes, admin routes and faults."""

import httpx
import pytest

from apps.rig.models import FaultKind, FaultSpec
from apps.rig.server import load_rig_config, start_rig
from apps.tester.core.exceptions import ConfigError
from tests.conftest import climate_rig_config

FULL_PUT = {"acMode": "ECONOMY", "fanLevel": 5, "seatHeat": True, "departure": "07:45"}


def vv(client, key: str) -> float:
    response = client.get(f"/_vv/{key}")
    assert response.status_code == 200
    return response.json()["raw"]


@pytest.mark.unit
class TestGatewayRoutes:
    """Test suite for PUT and GET on configured endpoints."""

    def test_put_lands_in_vv_state(self, rig_client):
        """Test every property kind reaches its VV key."""
        response = rig_client.put("/climate", json=FULL_PUT)

        assert response.status_code == 200
        assert response.json()["written"]["fanLevel"] == {"FanLevel": 50.0}
        assert vv(rig_client, "VvAc") == 11
        assert vv(rig_client, "VvFan") == 50
        assert vv(rig_client, "VvSeat") == 1
        assert (vv(rig_client, "VvDepHr"), vv(rig_client, "VvDepMin")) == (7, 45)

    def test_iso_datetime_accepted(self, rig_client):
        """Test a full ISO datetime is reduced to hour and minute."""
        rig_client.put("/climate", json={"departure": "2024-01-01T23:59:00"})

        assert (vv(rig_client, "VvDepHr"), vv(rig_client, "VvDepMin")) == (23, 59)

    def test_get_renders_vv_state(self, rig_client):
        """Test GET reads the preset VV state back through the gateway."""
        rig_client.put("/_vv/VvAc", json={"raw": 11})
        rig_client.put("/_vv/VvFan", json={"raw": 30})
        rig_client.put("/_vv/VvSeat", json={"raw": 1})
        rig_client.put("/_vv/VvDepHr", json={"raw": 7})
        rig_client.put("/_vv/VvDepMin", json={"raw": 5})

        record = rig_client.get("/climate").json()

        assert record == {"acMode": "ECONOMY", "fanLevel": 3, "seatHeat": True, "departure": "07:05"}

    def test_unknown_endpoint(self, rig_client):
        """Test an unconfigured path answers 404."""
        assert rig_client.get("/doors").status_code == 404

    def test_unknown_property(self, rig_client):
        """Test a PUT naming an unknown property answers 400."""
        assert rig_client.put("/climate", json={"wiper": 1}).status_code == 400

    @pytest.mark.parametrize(
        "body",
        [{"acMode": "TURBO"}, {"seatHeat": "yes"}, {"fanLevel": "high"}, {"departure": "25:00"}],
    )
    def test_bad_values(self, rig_client, body):
        """Test values outside a property's encoding answer 400."""
        assert rig_client.put("/climate", json=body).status_code == 400

    def test_unknown_vv_key(self, rig_client):
        """Test admin access to an unbound VV key answers 404."""
        assert rig_client.get("/_vv/Nope").status_code == 404

    def test_trace_records_frames(self, rig_client):
        """Test gateway writes appear on the CAN trace in order."""
        rig_client.put("/climate", json={"acMode": "STANDARD", "fanLevel": 1})

        frames = rig_client.get("/_trace").json()

        assert [(f["key"], f["raw"], f["direction"]) for f in frames] == [
            ("AcMode", 0.0, "tx"),
            ("FanLevel", 10.0, "tx"),
        ]
        assert [f["tick"] for f in frames] == [1, 2]

    def test_health(self, rig_client):
        """Test the health check route."""
        assert rig_client.get("/health").json()["status"] == "healthy"


@pytest.mark.unit
class TestFaults:
    """Test suite for seeded gateway faults."""

    def inject(self, client, **fault):
        response = client.post("/_fault", json=fault)
        assert response.status_code == 200

    def test_swapped_enum(self, rig_client):
        """Test swapped labels are written as each other."""
        self.inject(rig_client, kind="swapped_enum", target="/climate", label_a="STANDARD", label_b="ECONOMY")

        rig_client.put("/climate", json={"acMode": "ECONOMY"})

        assert vv(rig_client, "VvAc") == 10

    def test_wrong_scale(self, rig_client):
        """Test numeric values are multiplied by the fault factor."""
        self.inject(rig_client, kind="wrong_scale", target="/climate", factor=1000)

        rig_client.put("/climate", json={"fanLevel": 5})

        assert vv(rig_client, "VvFan") == 50000

    def test_dead_signal(self, rig_client):
        """Test a dead signal drops writes and reads back as null."""
        self.inject(rig_client, kind="dead_signal", target="FanLevel")

        rig_client.put("/climate", json={"fanLevel": 5})

        assert vv(rig_client, "VvFan") == 0
        assert rig_client.get("/climate").json()["fanLevel"] is None

    def test_stale_state(self, rig_client):
        """Test the first read after a write returns the previous value."""
        self.inject(rig_client, kind="stale_state", target="AcMode")

        rig_client.put("/climate", json={"acMode": "ECONOMY"})

        assert vv(rig_client, "VvAc") == 10
        assert vv(rig_client, "VvAc") == 11

    def test_wrong_unit(self, rig_client):
        """Test the gateway forgets the unit conversion."""
        self.inject(rig_client, kind="wrong_unit", target="FanLevel")

        rig_client.put("/climate", json={"fanLevel": 5})

        assert vv(rig_client, "VvFan") == 5

    def test_unknown_target(self, rig_client):
        """Test a fault on an unknown target answers 404."""
        response = rig_client.post("/_fault", json={"kind": "dead_signal", "target": "Nope"})

        assert response.status_code == 404

    def test_swapped_labels_must_exist(self, rig_client):
        """Test swapping labels no property offers is rejected."""
        response = rig_client.post(
            "/_fault", json={"kind": "swapped_enum", "target": "/climate", "label_a": "A", "label_b": "B"}
        )

        assert response.status_code == 404


@pytest.mark.unit
class TestRigLaunch:
    """Test suite for rig configuration loading and launch."""

    def test_load_json(self, tmp_path, rig_config):
        """Test a dumped configuration loads back unchanged."""
        json_path = tmp_path / "rig.json"
        json_path.write_text(rig_config.model_dump_json(), encoding="utf-8")

        assert load_rig_config(json_path) == rig_config

    def test_invalid_config(self, tmp_path):
        """Test an unbound CAN signal is a configuration error."""
        path = tmp_path / "rig.yaml"
        path.write_text(
            "endpoints:\n  - path: /x\n    properties:\n"
            "      - {api_key: a, kind: numeric, can_key: Ghost}\n",
            encoding="utf-8",
        )

        with pytest.raises(ConfigError) as exc_info:
            load_rig_config(path)
        assert exc_info.value.details["errors"]

    def test_missing_config(self, tmp_path):
        """Test a missing file is a configuration error."""
        with pytest.raises(ConfigError):
            load_rig_config(tmp_path / "absent.json")

    def test_configured_fault_with_bad_target(self):
        """Test start_rig rejects a configured fault on an unknown signal."""
        config = climate_rig_config(faults=[{"kind": "dead_signal", "target": "Ghost"}])

        with pytest.raises(ConfigError):
            start_rig(config, mode="in_process")

    def test_configured_faults_are_active(self):
        """Test faults in the configuration apply from the start."""
        config = climate_rig_config(faults=[{"kind": "dead_signal", "target": "FanLevel"}])

        with start_rig(config, mode="in_process") as handle:
            assert handle.state.has_fault(FaultKind.DEAD_SIGNAL, "FanLevel")
            handle.inject_fault(FaultSpec(kind=FaultKind.STALE_STATE, target="AcMode"))
            assert handle.state.has_fault(FaultKind.STALE_STATE, "AcMode")

    @pytest.mark.integration
    def test_loopback_serves_health(self, rig_config):
        """Test a loopback rig answers on a real socket."""
        with start_rig(rig_config) as handle:
            assert handle.url.startswith("http://")
            assert httpx.get(f"{handle.url}/health").status_code == 200
