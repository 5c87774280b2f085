"""Typed-output completion with re-prompting.

The answer of a transport is validated field by field against the request's
output schema. A violation is appended to the request context and the
request is sent again, up to ``max_retries`` more times.
"""

from typing import TYPE_CHECKING

import structlog
from pydantic import ValidationError
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from apps.matchers.schemas import BackendRequest, BackendResponse, output_model
from apps.tester.core.exceptions import SchemaViolationError

if TYPE_CHECKING:
    from apps.matchers.transports import Transport

logger = structlog.get_logger(__name__)


class _InvalidOutputError(Exception):
    """Internal retry signal carrying the violation text."""


def describe_violation(error: ValidationError) -> str:
    """One-line summary of a validation failure, fed back to the model."""
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "outputs"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def complete_typed(request: BackendRequest, transport: "Transport") -> BackendResponse:
    """Send a request until its answer validates.

    Args:
        request: Typed request; its max_retries bounds the re-prompts
        transport: Where the request goes

    Returns:
        Validated outputs and the attempts it took

    Raises:
        SchemaViolationError: No valid answer after max_retries + 1 attempts
        TransportError: Network or IO failure (not retried here)
    """
    checker = output_model(request.output_schema)
    context = list(request.context)
    attempts = 0
    validated = None

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(request.max_retries + 1),
            retry=retry_if_exception_type(_InvalidOutputError),
        ):
            with attempt:
                attempts = attempt.retry_state.attempt_number
                current = request.model_copy(update={"context": tuple(context)})
                raw = transport.send(current)
                try:
                    validated = checker.model_validate(raw)
                except ValidationError as e:
                    violation = describe_violation(e)
                    context.append(violation)
                    logger.warning(
                        "backend_output_rejected",
                        task=str(request.task),
                        attempt=attempts,
                        violation=violation,
                    )
                    raise _InvalidOutputError(violation) from e
    except RetryError as e:
        raise SchemaViolationError(
            f"{request.task} output failed validation after {attempts} attempts",
            {"task": str(request.task), "attempts": attempts, "violations": context[len(request.context):]},
        ) from e

    if validated is None:
        raise SchemaViolationError(
            f"{request.task} produced no output", {"task": str(request.task), "attempts": attempts}
        )
    logger.debug("backend_output_accepted", task=str(request.task), attempts=attempts)
    return BackendResponse(outputs=validated.model_dump(mode="json"), attempts_used=attempts)
