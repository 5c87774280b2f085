"""Verdicts, metrics and the run report."""

from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from apps.tester.domain.entities.matching import SkippedAttribute
from apps.tester.domain.entities.spec import HttpMethod
from apps.tester.domain.entities.testcase import TestOutcome, Verdict


class ApiVerdict(BaseModel):
    """Aggregate outcome of every case for one (endpoint, method).

    ``error`` marks an API whose cases could not run; it counts neither as a
    pass nor as a failure.
    """

    model_config = ConfigDict(frozen=True)

    endpoint: str
    method: HttpMethod
    outcome: Verdict
    case_outcomes: tuple[TestOutcome, ...] = ()

    @model_validator(mode="after")
    def _check_aggregation(self) -> Self:
        verdicts = {case.verdict for case in self.case_outcomes}
        if Verdict.FAIL in verdicts:
            expected = Verdict.FAIL
        elif Verdict.ERROR in verdicts:
            expected = Verdict.ERROR
        else:
            expected = Verdict.PASS
        if self.outcome is not expected:
            raise ValueError(f"{self.api_id} outcome {self.outcome} should be {expected}")
        return self

    @property
    def api_id(self) -> str:
        return f"{self.method} {self.endpoint}"


class Metrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    pass_rate: float | None = Field(default=None, ge=0.0, le=1.0)
    precision: float | None = Field(default=None, ge=0.0, le=1.0)
    recall: float | None = Field(default=None, ge=0.0, le=1.0)
    f1: float | None = Field(default=None, ge=0.0, le=1.0)


class MatchSummary(BaseModel):
    """One resolved chain as it appears in the report."""

    model_config = ConfigDict(frozen=True)

    id: str
    can_key: str
    vv_key: str
    categories: tuple[str, str]
    scores: tuple[float, float]
    value_pairs: int = 0
    conversion: str | None = None


class TraceEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    tick: int
    key: str
    raw: float
    direction: str


class RunReport(BaseModel):
    """Everything a run did, in a stable field order."""

    model_config = ConfigDict(frozen=True)

    strictness: str
    backend: str
    tested: tuple[str, ...] = Field(default=(), description="api_id#key of tested properties")
    skipped: tuple[SkippedAttribute, ...] = ()
    matches: tuple[MatchSummary, ...] = ()
    verdicts: tuple[ApiVerdict, ...] = ()
    metrics: Metrics = Field(default_factory=Metrics)
    can_log: tuple[TraceEntry, ...] = ()
    timings: dict[str, float] = Field(default_factory=dict)

    @property
    def failed_apis(self) -> list[str]:
        return [v.api_id for v in self.verdicts if v.outcome is Verdict.FAIL]

    @property
    def errored_apis(self) -> list[str]:
        return [v.api_id for v in self.verdicts if v.outcome is Verdict.ERROR]
