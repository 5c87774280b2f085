"""Unit tests for the remote backend, its transports and the replay store."""

import httpx
import pytest
from langchain_core.language_models.fake_chat_models import FakeListChatModel

from apps.matchers.factory import build_backend
from apps.matchers.remote_backend import RemoteMatcherBackend
from apps.matchers.replay import record_replay
from apps.matchers.schemas import UNIT_INFER_SCHEMA, BackendRequest, BackendTask
from apps.matchers.transports import ChatModelTransport, HttpTransport, RulesTransport
from apps.tester.core.exceptions import ConfigError, ReplayMissError, TransportError
from apps.tester.domain.entities.matching import Strictness
from apps.tester.domain.ports.matcher_port import (
    KeyMatchRequest,
    PseudocodeMatchRequest,
    UnitInferRequest,
    ValueMatchRequest,
)
from apps.tester.matching.rules_backend import RuleBasedBackend

MATCHER_URL = "http://matcher.test/v1/complete"

KEYS = KeyMatchRequest(
    left=("fanLevel", "acMode", "temp"),
    right=("FanLevel", "AcMode", "temperature"),
    strictness=Strictness.MODERATE,
)
VALUES = ValueMatchRequest(
    left_labels=("TRUE", "FALSE"), right_labels=("ON", "OFF"), strictness=Strictness.STRICT
)
PSEUDOCODE = PseudocodeMatchRequest(
    left_key="seatHeat",
    left_label="HIGH",
    alternatives=(("SeatHeatLvl", "HIGH"), ("SeatHeatLvl", "MAX")),
    strictness=Strictness.MODERATE,
)


def unit_request() -> BackendRequest:
    return BackendRequest(task=BackendTask.UNIT_INFER, inputs={"key": "speed"}, output_schema=UNIT_INFER_SCHEMA)


@pytest.mark.unit
class TestRemoteMatcherBackend:
    """Test suite for RemoteMatcherBackend."""

    def test_agrees_with_rules_over_wire(self):
        """Test the wire round trip preserves every answer of the rule engine."""
        rules = RuleBasedBackend()
        remote = RemoteMatcherBackend(RulesTransport(rules), parallelism=2)

        assert remote.match_keys(KEYS) == rules.match_keys(KEYS)
        assert remote.match_values(VALUES) == rules.match_values(VALUES)
        assert remote.match_pseudocode(PSEUDOCODE) == rules.match_pseudocode(PSEUDOCODE)
        request = UnitInferRequest(key="speed", description="Speed in km/h")
        assert remote.infer_unit(request) == rules.infer_unit(request)

    def test_suggest_values(self):
        """Test numeric suggestions come back as floats."""
        remote = RemoteMatcherBackend(RulesTransport())

        assert remote.suggest_values("fanLevel", 0, 10) == [0.0, 10.0, 5.0]

    def test_chat_model_reprompted_until_valid(self):
        """Test a chat model answering prose first is re-prompted."""
        llm = FakeListChatModel(responses=["The unit is kW.", '```json\n{"unit": "kW"}\n```'])
        remote = RemoteMatcherBackend(ChatModelTransport(llm), max_retries=2)

        response = remote.infer_unit(UnitInferRequest(key="power", description="Power (kW)"))

        assert response.unit == "kW"


@pytest.mark.unit
class TestHttpTransport:
    """Test suite for HttpTransport."""

    def test_returns_outputs(self, httpx_mock):
        """Test the outputs record of the reply is returned."""
        httpx_mock.add_response(url=MATCHER_URL, method="POST", json={"outputs": {"unit": "W"}})
        transport = HttpTransport(url=MATCHER_URL, token="secret")

        assert transport.send(unit_request()) == {"unit": "W"}
        sent = httpx_mock.get_request()
        assert sent.headers["Authorization"] == "Bearer secret"
        transport.close()

    def test_error_status(self, httpx_mock):
        """Test an error status becomes a TransportError."""
        httpx_mock.add_response(url=MATCHER_URL, method="POST", status_code=503)
        transport = HttpTransport(url=MATCHER_URL, token="")

        with pytest.raises(TransportError) as exc_info:
            transport.send(unit_request())

        assert exc_info.value.details["status_code"] == 503

    def test_reply_without_outputs(self, httpx_mock):
        """Test a reply lacking the outputs record is a TransportError."""
        httpx_mock.add_response(url=MATCHER_URL, method="POST", json={"answer": 1})

        with pytest.raises(TransportError):
            HttpTransport(url=MATCHER_URL, client=httpx.Client()).send(unit_request())


@pytest.mark.unit
class TestReplay:
    """Test suite for record/replay."""

    def test_record_then_replay(self, tmp_path):
        """Test recorded answers replay identically without the live side."""
        store = tmp_path / "store.json"
        recording = RemoteMatcherBackend(record_replay(store, "record", inner=RulesTransport()))
        recorded = recording.match_keys(KEYS)
        recording.close()

        replaying = build_backend("replay", replay_store=store)

        assert replaying.match_keys(KEYS) == recorded
        with pytest.raises(ReplayMissError):
            replaying.match_values(VALUES)

    def test_replay_needs_store(self, tmp_path):
        """Test replay without an existing store is a configuration error."""
        with pytest.raises(ConfigError):
            build_backend("replay")
        with pytest.raises(ConfigError):
            build_backend("replay", replay_store=tmp_path / "missing.json")

    def test_corrupt_store(self, tmp_path):
        """Test a store that is not JSON is a configuration error."""
        store = tmp_path / "store.json"
        store.write_text("{", encoding="utf-8")

        with pytest.raises(ConfigError):
            record_replay(store, "replay")

    def test_rules_kind(self):
        """Test the rules kind needs no transport."""
        assert build_backend("rules").name == "rules"
