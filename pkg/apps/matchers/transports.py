"""Transports carrying a BackendRequest to something that answers it.

- HttpTransport: POSTs the request record to the matcher service, with
  retries, timeouts and a circuit breaker
- ChatModelTransport: renders the task prompt and asks a chat model
- RulesTransport: answers from the local rule engine, for hermetic
  recording and tests
"""

import json
import re
from abc import ABC, abstractmethod
from typing import Any

import httpx
import structlog
from langchain_core.language_models import BaseChatModel
from pybreaker import CircuitBreaker, CircuitBreakerError
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from apps.matchers.prompts import render_prompt
from apps.matchers.schemas import BackendRequest, BackendTask
from apps.tester.core.exceptions import TransportError
from apps.tester.domain.entities.matching import Strictness
from apps.tester.domain.ports.matcher_port import (
    KeyMatchRequest,
    PseudocodeMatchRequest,
    UnitInferRequest,
    ValueMatchRequest,
)
from apps.tester.settings import settings

logger = structlog.get_logger(__name__)

_FENCE = re.compile(r"^```(?:json)?\s*|\s*```$")


class Transport(ABC):
    """Sends one request and returns the raw, unvalidated outputs."""

    name: str = "transport"

    @abstractmethod
    def send(self, request: BackendRequest) -> Any:
        """Deliver a request.

        Returns:
            Whatever the other side produced as ``outputs``

        Raises:
            TransportError: Network or IO failure
        """
        pass

    def close(self) -> None:  # noqa: B027
        """Release connections; no-op by default."""


# Circuit breaker configuration
matcher_breaker = CircuitBreaker(
    fail_max=settings.CIRCUIT_BREAKER_FAILURE_THRESHOLD,
    reset_timeout=settings.CIRCUIT_BREAKER_RESET_TIMEOUT,
    name="matcher_backend",
)


class HttpTransport(Transport):
    """Resilient HTTP client for the remote matcher service."""

    name = "http"

    def __init__(
        self,
        url: str | None = None,
        token: str | None = None,
        client: httpx.Client | None = None,
    ) -> None:
        self.url = url or settings.MATCH_BACKEND_URL
        token = settings.MATCH_BACKEND_TOKEN if token is None else token
        headers = {"Authorization": f"Bearer {token}"} if token else {}
        self.client = client or httpx.Client(
            timeout=httpx.Timeout(
                connect=settings.HTTP_TIMEOUT_CONNECT,
                read=settings.HTTP_TIMEOUT_READ,
                write=settings.HTTP_TIMEOUT_CONNECT,
                pool=5.0,
            ),
            headers=headers,
        )

    def send(self, request: BackendRequest) -> Any:
        try:
            body = matcher_breaker.call(self._post, request.model_dump(mode="json"))
        except CircuitBreakerError as e:
            logger.error("matcher_circuit_open", url=self.url)
            raise TransportError("Matcher circuit is open", {"url": self.url}) from e
        except httpx.HTTPStatusError as e:
            raise TransportError(
                f"Matcher answered {e.response.status_code}",
                {"url": self.url, "status_code": e.response.status_code},
            ) from e
        except (httpx.RequestError, ValueError) as e:
            raise TransportError(f"Matcher request failed: {e}", {"url": self.url}) from e

        if not isinstance(body, dict) or "outputs" not in body:
            raise TransportError("Matcher reply carries no outputs record", {"url": self.url})
        return body["outputs"]

    @retry(
        stop=stop_after_attempt(settings.TRANSPORT_MAX_ATTEMPTS),
        wait=wait_exponential(multiplier=0.5, min=0.5, max=4),
        retry=retry_if_exception_type((httpx.TimeoutException, httpx.NetworkError)),
        reraise=True,
    )
    def _post(self, payload: dict[str, Any]) -> Any:
        logger.info("matcher_request", url=self.url, task=payload["task"])
        response = self.client.post(self.url, json=payload)
        response.raise_for_status()
        logger.info("matcher_response", status_code=response.status_code, task=payload["task"])
        return response.json()

    def close(self) -> None:
        self.client.close()


class ChatModelTransport(Transport):
    """Asks a LangChain chat model directly; the reply must be a JSON object."""

    name = "chat"

    def __init__(self, llm: BaseChatModel | None = None) -> None:
        if llm is None:
            from apps.matchers.config import get_llm

            llm = get_llm(temperature=0.0)
        self.llm = llm

    def send(self, request: BackendRequest) -> Any:
        prompt = render_prompt(request)
        try:
            message = self.llm.invoke(prompt)
        except Exception as e:
            raise TransportError(f"Chat model call failed: {e}", {"task": str(request.task)}) from e

        text = message.content if isinstance(message.content, str) else str(message.content)
        try:
            return json.loads(_FENCE.sub("", text.strip()))
        except json.JSONDecodeError:
            # Handed to the validator as is; the violation goes into the re-prompt
            return text


class RulesTransport(Transport):
    """Answers requests with the rule-based backend, in wire format."""

    name = "rules"

    def __init__(self, backend: Any = None) -> None:
        if backend is None:
            from apps.tester.matching.rules_backend import RuleBasedBackend

            backend = RuleBasedBackend()
        self.backend = backend

    def send(self, request: BackendRequest) -> Any:
        inputs = request.inputs
        strictness = Strictness(request.strictness)
        match request.task:
            case BackendTask.KEY_MATCH:
                response = self.backend.match_keys(
                    KeyMatchRequest(left=inputs["left"], right=inputs["right"], strictness=strictness)
                )
                return {"candidates": [c.model_dump(mode="json") for c in response.candidates]}
            case BackendTask.VALUE_MATCH:
                response = self.backend.match_values(
                    ValueMatchRequest(
                        left_labels=inputs["left_labels"],
                        right_labels=inputs["right_labels"],
                        strictness=strictness,
                    )
                )
                return {"pairs": [list(pair) for pair in response.pairs]}
            case BackendTask.PSEUDOCODE_MATCH:
                response = self.backend.match_pseudocode(
                    PseudocodeMatchRequest(
                        left_key=inputs["left_key"],
                        left_label=inputs["left_label"],
                        alternatives=tuple(tuple(alt) for alt in inputs["alternatives"]),
                        strictness=strictness,
                    )
                )
                return {"matches": [list(alt) for alt in response.matches]}
            case BackendTask.UNIT_INFER:
                response = self.backend.infer_unit(UnitInferRequest(**inputs))
                return {"unit": response.unit}
            case BackendTask.TESTCASE_GEN:
                low, high = inputs["minimum"], inputs["maximum"]
                return {"values": [low, high, (low + high) / 2]}
