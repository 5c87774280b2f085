"""Executable PUT/GET checks and their outcomes."""

from enum import StrEnum
from typing import Any, ClassVar, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from apps.tester.domain.entities.spec import HttpMethod


class TestCase(BaseModel):
    """PUT: payload in, VV state expected. GET: VV preset, payload expected."""

    __test__: ClassVar[bool] = False

    model_config = ConfigDict(frozen=True)

    id: str
    method: HttpMethod
    endpoint: str
    api_payload: dict[str, Any] = Field(default_factory=dict)
    vv_preset: dict[str, float] = Field(default_factory=dict)
    expected_vv: dict[str, float] = Field(default_factory=dict)
    expected_api: dict[str, Any] = Field(default_factory=dict)
    provenance: tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_shape(self) -> Self:
        if self.method is HttpMethod.PUT:
            if not self.api_payload or not self.expected_vv:
                raise ValueError(f"PUT case {self.id} needs api_payload and expected_vv")
            if self.vv_preset or self.expected_api:
                raise ValueError(f"PUT case {self.id} carries GET fields")
        else:
            if not self.vv_preset or not self.expected_api:
                raise ValueError(f"GET case {self.id} needs vv_preset and expected_api")
            if self.api_payload or self.expected_vv:
                raise ValueError(f"GET case {self.id} carries PUT fields")
        return self

    @property
    def api_id(self) -> str:
        return f"{self.method} {self.endpoint}"

    @property
    def vv_keys(self) -> frozenset[str]:
        return frozenset(self.vv_preset) | frozenset(self.expected_vv)


class Verdict(StrEnum):
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


class FailedAssertion(BaseModel):
    model_config = ConfigDict(frozen=True)

    key: str
    expected: Any
    actual: Any


class TestOutcome(BaseModel):
    """Result of running one case against a rig."""

    __test__: ClassVar[bool] = False

    model_config = ConfigDict(frozen=True)

    case_id: str
    verdict: Verdict
    failed_assertions: tuple[FailedAssertion, ...] = ()
    log: str = ""

    @model_validator(mode="after")
    def _check_failures(self) -> Self:
        if self.verdict is Verdict.FAIL and not self.failed_assertions:
            raise ValueError(f"failing case {self.case_id} records no assertion")
        return self
