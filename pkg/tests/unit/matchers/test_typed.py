"""Unit tests for typed-output completion and the request records."""

import pytest

from apps.matchers.schemas import (
    KEY_MATCH_SCHEMA,
    UNIT_INFER_SCHEMA,
    BackendRequest,
    BackendTask,
    output_model,
)
from apps.matchers.transports import Transport
from apps.matchers.typed import complete_typed
from apps.tester.core.exceptions import SchemaViolationError


class SequenceTransport(Transport):
    """Answers with the given outputs in turn and keeps every request."""

    name = "sequence"

    def __init__(self, *answers):
        self.answers = list(answers)
        self.requests = []

    def send(self, request):
        self.requests.append(request)
        return self.answers.pop(0)


def unit_request(max_retries: int = 2) -> BackendRequest:
    return BackendRequest(
        task=BackendTask.UNIT_INFER,
        inputs={"key": "speed", "description": "Speed in km/h"},
        output_schema=UNIT_INFER_SCHEMA,
        max_retries=max_retries,
    )


@pytest.mark.unit
class TestCompleteTyped:
    """Test suite for complete_typed."""

    def test_valid_first_answer(self):
        """Test a valid answer is accepted in one attempt."""
        transport = SequenceTransport({"unit": "km/h"})

        response = complete_typed(unit_request(), transport)

        assert response.outputs == {"unit": "km/h"}
        assert response.attempts_used == 1

    def test_reprompts_with_violation(self):
        """Test an invalid answer is retried with the violation in context."""
        transport = SequenceTransport({"unit": 5}, "not even json", {"unit": None})

        response = complete_typed(unit_request(), transport)

        assert response.outputs == {"unit": None}
        assert response.attempts_used == 3
        assert transport.requests[0].context == ()
        assert len(transport.requests[1].context) == 1
        assert transport.requests[1].context[0].startswith("unit")
        assert len(transport.requests[2].context) == 2

    def test_gives_up_after_max_retries(self):
        """Test SchemaViolationError after max_retries + 1 bad answers."""
        transport = SequenceTransport({"units": "km/h"}, {"unit": 1})

        with pytest.raises(SchemaViolationError) as exc_info:
            complete_typed(unit_request(max_retries=1), transport)

        assert exc_info.value.details["attempts"] == 2
        assert len(exc_info.value.details["violations"]) == 2

    def test_extra_fields_rejected(self):
        """Test outputs may not carry undeclared fields."""
        transport = SequenceTransport({"unit": "W", "confidence": 0.9})

        with pytest.raises(SchemaViolationError):
            complete_typed(unit_request(max_retries=0), transport)

    def test_no_attempt_is_a_violation(self, monkeypatch):
        """Test a retry loop that never calls the transport raises instead of returning."""
        monkeypatch.setattr("apps.matchers.typed.Retrying", lambda **_: iter(()))
        transport = SequenceTransport({"unit": "km/h"})

        with pytest.raises(SchemaViolationError) as exc_info:
            complete_typed(unit_request(), transport)

        assert exc_info.value.details["attempts"] == 0
        assert transport.requests == []


@pytest.mark.unit
class TestSchemas:
    """Test suite for the wire records."""

    def test_candidate_category_is_checked(self):
        """Test a candidate with an unknown category fails validation."""
        checker = output_model(KEY_MATCH_SCHEMA)
        good = {"left_key": "a", "right_key": "b", "category": "format", "score": 1}

        assert checker.model_validate({"candidates": [good]})
        with pytest.raises(ValueError):
            checker.model_validate({"candidates": [{**good, "category": "vibes"}]})
        with pytest.raises(ValueError):
            checker.model_validate({"candidates": [{**good, "score": 1.5}]})

    def test_fingerprint_ignores_retry_budget(self):
        """Test the fingerprint depends on content, not on max_retries."""
        assert unit_request(1).fingerprint() == unit_request(3).fingerprint()
        assert unit_request().fingerprint() != unit_request().model_copy(
            update={"context": ("x",)}
        ).fingerprint()
