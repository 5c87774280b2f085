"""Matcher backend talking to a language model through a transport."""

import threading
from typing import Any

import structlog

from apps.matchers.schemas import (
    KEY_MATCH_SCHEMA,
    PSEUDOCODE_MATCH_SCHEMA,
    TESTCASE_GEN_SCHEMA,
    UNIT_INFER_SCHEMA,
    VALUE_MATCH_SCHEMA,
    BackendRequest,
    BackendTask,
    OutputField,
)
from apps.matchers.transports import Transport
from apps.matchers.typed import complete_typed
from apps.tester.domain.entities.matching import MatchCandidate, Strictness
from apps.tester.domain.ports.matcher_port import (
    KeyMatchRequest,
    KeyMatchResponse,
    MatcherPort,
    PseudocodeMatchRequest,
    PseudocodeMatchResponse,
    UnitInferRequest,
    UnitInferResponse,
    ValueMatchRequest,
    ValueMatchResponse,
)
from apps.tester.settings import settings

logger = structlog.get_logger(__name__)


class RemoteMatcherBackend(MatcherPort):
    """MatcherPort over the typed-output contract.

    Shareable between threads; at most ``parallelism`` requests are in
    flight at once.
    """

    name = "remote"

    def __init__(
        self,
        transport: Transport,
        max_retries: int | None = None,
        parallelism: int | None = None,
    ) -> None:
        self.transport = transport
        self.max_retries = settings.BACKEND_MAX_RETRIES if max_retries is None else max_retries
        self._slots = threading.BoundedSemaphore(parallelism or settings.BACKEND_PARALLELISM)

    def _complete(
        self,
        task: BackendTask,
        inputs: dict[str, Any],
        schema: tuple[OutputField, ...],
        strictness: Strictness = Strictness.MODERATE,
    ) -> dict[str, Any]:
        request = BackendRequest(
            task=task,
            inputs=inputs,
            output_schema=schema,
            strictness=strictness,
            max_retries=self.max_retries,
        )
        with self._slots:
            response = complete_typed(request, self.transport)
        if response.attempts_used > 1:
            logger.info("backend_reprompted", task=str(task), attempts=response.attempts_used)
        return response.outputs

    def match_keys(self, request: KeyMatchRequest) -> KeyMatchResponse:
        outputs = self._complete(
            BackendTask.KEY_MATCH,
            {"left": list(request.left), "right": list(request.right)},
            KEY_MATCH_SCHEMA,
            request.strictness,
        )
        return KeyMatchResponse(
            candidates=[MatchCandidate.model_validate(item) for item in outputs["candidates"]]
        )

    def match_values(self, request: ValueMatchRequest) -> ValueMatchResponse:
        outputs = self._complete(
            BackendTask.VALUE_MATCH,
            {"left_labels": list(request.left_labels), "right_labels": list(request.right_labels)},
            VALUE_MATCH_SCHEMA,
            request.strictness,
        )
        return ValueMatchResponse(pairs=[(left, right) for left, right in outputs["pairs"]])

    def match_pseudocode(self, request: PseudocodeMatchRequest) -> PseudocodeMatchResponse:
        outputs = self._complete(
            BackendTask.PSEUDOCODE_MATCH,
            {
                "left_key": request.left_key,
                "left_label": request.left_label,
                "alternatives": [list(alt) for alt in request.alternatives],
            },
            PSEUDOCODE_MATCH_SCHEMA,
            request.strictness,
        )
        return PseudocodeMatchResponse(matches=[(key, label) for key, label in outputs["matches"]])

    def infer_unit(self, request: UnitInferRequest) -> UnitInferResponse:
        outputs = self._complete(
            BackendTask.UNIT_INFER,
            {
                "key": request.key,
                "description": request.description,
                "known_units": list(request.known_units),
            },
            UNIT_INFER_SCHEMA,
        )
        return UnitInferResponse(unit=outputs["unit"])

    def suggest_values(self, key: str, minimum: float, maximum: float) -> list[float]:
        """Boundary values the model proposes for a numeric range."""
        outputs = self._complete(
            BackendTask.TESTCASE_GEN,
            {"key": key, "minimum": minimum, "maximum": maximum},
            TESTCASE_GEN_SCHEMA,
        )
        return [float(value) for value in outputs["values"]]

    def close(self) -> None:
        self.transport.close()
