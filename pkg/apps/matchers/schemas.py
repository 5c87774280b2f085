"""Wire records of the typed-output matcher contract.

A BackendRequest names its task, carries the task inputs and declares the
fields the answer must have. The remote side answers with an ``outputs``
record; complete_typed checks it field by field before anyone uses it.
"""

import hashlib
import json
from enum import StrEnum
from typing import Annotated, Any, Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    StrictBool,
    StrictFloat,
    StrictInt,
    StrictStr,
    create_model,
)

from apps.tester.constants import CATEGORY_PRIORITY
from apps.tester.domain.entities.matching import Strictness


class BackendTask(StrEnum):
    KEY_MATCH = "key_match"
    VALUE_MATCH = "value_match"
    PSEUDOCODE_MATCH = "pseudocode_match"
    UNIT_INFER = "unit_infer"
    TESTCASE_GEN = "testcase_gen"


class CandidateOutput(BaseModel):
    """One key correspondence as the backend must spell it."""

    model_config = ConfigDict(extra="forbid")

    left_key: StrictStr
    right_key: StrictStr
    category: Literal[CATEGORY_PRIORITY]  # type: ignore[valid-type]
    score: Annotated[StrictFloat | StrictInt, Field(ge=0.0, le=1.0)]


Pair = Annotated[list[StrictStr], Field(min_length=2, max_length=2)]

FIELD_TYPES: dict[str, Any] = {
    "str": StrictStr,
    "int": StrictInt,
    "float": StrictFloat | StrictInt,
    "bool": StrictBool,
    "str|null": StrictStr | None,
    "list[str]": list[StrictStr],
    "list[float]": list[StrictFloat | StrictInt],
    "list[pair]": list[Pair],
    "list[candidate]": list[CandidateOutput],
}


class OutputField(BaseModel):
    """Declared output field: name plus a type from FIELD_TYPES."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1)
    type: Literal[tuple(FIELD_TYPES)]  # type: ignore[valid-type]


class BackendRequest(BaseModel):
    """Typed request to a matcher backend."""

    model_config = ConfigDict(frozen=True)

    task: BackendTask
    inputs: dict[str, Any]
    output_schema: tuple[OutputField, ...] = Field(..., min_length=1)
    strictness: Strictness = Strictness.MODERATE
    max_retries: int = Field(default=3, ge=0)
    context: tuple[str, ...] = Field(
        default=(),
        description="Violations of earlier attempts, appended on each re-prompt",
    )

    def fingerprint(self) -> str:
        """Stable hash of everything the answer may depend on."""
        payload = self.model_dump(mode="json", exclude={"max_retries"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class BackendResponse(BaseModel):
    """Validated answer plus the number of attempts it took."""

    outputs: dict[str, Any]
    attempts_used: int = Field(..., ge=1)


def output_model(schema: tuple[OutputField, ...]) -> type[BaseModel]:
    """Pydantic model checking an ``outputs`` record against its schema."""
    fields: dict[str, Any] = {field.name: (FIELD_TYPES[field.type], ...) for field in schema}
    return create_model(  # type: ignore[call-overload,no-any-return]
        "TaskOutputs",
        __config__=ConfigDict(extra="forbid"),
        **fields,
    )


# Output schemas per task
KEY_MATCH_SCHEMA = (OutputField(name="candidates", type="list[candidate]"),)
VALUE_MATCH_SCHEMA = (OutputField(name="pairs", type="list[pair]"),)
PSEUDOCODE_MATCH_SCHEMA = (OutputField(name="matches", type="list[pair]"),)
UNIT_INFER_SCHEMA = (OutputField(name="unit", type="str|null"),)
TESTCASE_GEN_SCHEMA = (OutputField(name="values", type="list[float]"),)
