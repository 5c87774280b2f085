"""Matching entities: strictness, key candidates, value maps and the
resolved API -> CAN -> VV chains.
"""

from enum import StrEnum
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from apps.tester.constants import (
    CATEGORY_PRIORITY,
    MODERATE_THRESHOLD,
    RELAXED_THRESHOLD,
    STRICT_THRESHOLD,
)
from apps.tester.domain.entities.spec import ApiProperty, HttpMethod
from apps.tester.domain.entities.tables import CanSignal, VvEntry
from apps.tester.domain.entities.units import ConversionPlan, InsufficientContext


class Strictness(StrEnum):
    """Matcher policy knob, ordered strict < moderate < relaxed."""

    STRICT = "strict"
    MODERATE = "moderate"
    RELAXED = "relaxed"

    @property
    def threshold(self) -> float:
        return _THRESHOLDS[self]

    @property
    def rank(self) -> int:
        return list(Strictness).index(self)


_THRESHOLDS = {
    Strictness.STRICT: STRICT_THRESHOLD,
    Strictness.MODERATE: MODERATE_THRESHOLD,
    Strictness.RELAXED: RELAXED_THRESHOLD,
}


class MatchCategory(StrEnum):
    """Which rule related two keys or labels."""

    EXACT = "exact"
    FORMAT = "format"
    SPELLING = "spelling"
    ABBREVIATION = "abbreviation"
    LOGICAL = "logical"
    SEMANTIC = "semantic"
    PSEUDOCODE = "pseudocode"
    NONE = "none"

    @property
    def priority(self) -> int:
        """Lower is preferred; NONE sorts last."""
        if self is MatchCategory.NONE:
            return len(CATEGORY_PRIORITY)
        return CATEGORY_PRIORITY.index(self.value)


class DatetimeRole(StrEnum):
    HOURS = "hours"
    MINUTES = "minutes"


class MatchCandidate(BaseModel):
    """A scored key correspondence emitted by a matcher."""

    model_config = ConfigDict(frozen=True)

    left_key: str
    right_key: str
    category: MatchCategory
    score: float = Field(..., ge=0.0, le=1.0)


class ValueMapping(BaseModel):
    """Label correspondence between two encodings."""

    model_config = ConfigDict(frozen=True)

    pairs: tuple[tuple[str, str], ...] = ()
    residual_left: tuple[str, ...] = ()
    residual_right: tuple[str, ...] = ()

    def targets(self, left_label: str) -> list[str]:
        return [right for left, right in self.pairs if left == left_label]

    def sources(self, right_label: str) -> list[str]:
        return [left for left, right in self.pairs if right == right_label]

    @property
    def is_one_to_one(self) -> bool:
        lefts = [left for left, _ in self.pairs]
        rights = [right for _, right in self.pairs]
        return len(set(lefts)) == len(lefts) and len(set(rights)) == len(rights)


class PartialMatch(BaseModel):
    """Result of the API -> CAN stage, awaiting its VV entry."""

    model_config = ConfigDict(frozen=True)

    endpoint: str
    method: HttpMethod
    property: ApiProperty
    can: CanSignal
    key_match: MatchCandidate
    value_mapping: ValueMapping | None = None
    api_unit: str | None = None
    role: DatetimeRole | None = None
    pseudocode_matches: tuple[tuple[str, str], ...] = ()
    foreign_alternatives: tuple[tuple[str, str], ...] = ()


class MatchResult(BaseModel):
    """A complete chain (k, v) -> (k', v') -> (k*, v*)."""

    model_config = ConfigDict(frozen=True)

    endpoint: str
    method: HttpMethod
    property: ApiProperty
    can: CanSignal
    vv: VvEntry
    key_chain: tuple[MatchCandidate, MatchCandidate]
    value_chain: tuple[ValueMapping | None, ValueMapping | None] = (None, None)
    conversion: ConversionPlan | InsufficientContext | None = None
    role: DatetimeRole | None = None
    pseudocode_matches: tuple[tuple[str, str], ...] = ()
    foreign_alternatives: tuple[tuple[str, str], ...] = ()
    rationale: str = ""

    @model_validator(mode="after")
    def _check_chain(self) -> Self:
        api_to_can, can_to_vv = self.key_chain
        if api_to_can.right_key != self.can.key or can_to_vv.left_key != self.can.key:
            raise ValueError("key chain does not pass through the CAN signal")
        if can_to_vv.right_key != self.vv.key:
            raise ValueError("key chain does not end at the VV entry")
        return self

    @property
    def id(self) -> str:
        """Stable identity: ``"PUT /climate#acMode"`` plus ``"/hours"`` for roles."""
        base = f"{self.method} {self.endpoint}#{self.property.key}"
        return f"{base}/{self.role}" if self.role else base

    @property
    def api_id(self) -> str:
        return f"{self.method} {self.endpoint}"


class SkippedAttribute(BaseModel):
    """A property left untested, with the stage and reason it fell out."""

    model_config = ConfigDict(frozen=True)

    api_id: str
    key: str
    stage: str
    reason: str = Field(..., min_length=1)
    detail: str = ""
