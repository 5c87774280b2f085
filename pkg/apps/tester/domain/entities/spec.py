"""API-side entities: parsed specification, endpoints, properties and the
per-(endpoint, method) test object sets extracted from them.
"""

import math
from enum import StrEnum
from typing import Any, ClassVar, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

BOOLEAN_LABELS: tuple[str, str] = ("TRUE", "FALSE")


class HttpMethod(StrEnum):
    """Methods the gateway exposes per endpoint."""

    GET = "GET"
    PUT = "PUT"


class DeclaredType(StrEnum):
    """Property types recognised in a spec document."""

    BOOLEAN = "boolean"
    INTEGER = "integer"
    NUMBER = "number"
    STRING = "string"
    ENUM = "enum"
    DATETIME = "datetime"


class DomainKind(StrEnum):
    """Shape of the values a property may take."""

    ENUMERATION = "enumeration"
    NUMERIC_RANGE = "numeric_range"
    BOOLEAN = "boolean"
    FREE_TEXT = "free_text"
    DATETIME = "datetime"


class ValueDomain(BaseModel):
    """Set of legal values for one API property."""

    model_config = ConfigDict(frozen=True)

    kind: DomainKind
    labels: tuple[str, ...] = ()
    minimum: float | None = None
    maximum: float | None = None

    @model_validator(mode="after")
    def _check_domain(self) -> Self:
        if self.kind is DomainKind.ENUMERATION:
            trimmed = [label.strip() for label in self.labels]
            if len(set(trimmed)) != len(trimmed):
                raise ValueError("enumeration labels must be distinct after trimming")
            if len(trimmed) < 2:
                raise ValueError("enumeration needs at least two labels")
        if self.minimum is not None and self.maximum is not None and self.minimum > self.maximum:
            raise ValueError(f"range minimum {self.minimum} exceeds maximum {self.maximum}")
        return self

    @property
    def is_enumerated(self) -> bool:
        """Whether values are drawn from a finite label set."""
        return self.kind in (DomainKind.ENUMERATION, DomainKind.BOOLEAN)

    @property
    def value_labels(self) -> tuple[str, ...]:
        """Labels used for value matching; booleans read as TRUE/FALSE."""
        if self.kind is DomainKind.BOOLEAN:
            return BOOLEAN_LABELS
        return self.labels

    def api_value(self, label: str) -> Any:
        """Translate a matched label into the JSON value the API transacts."""
        if self.kind is DomainKind.BOOLEAN:
            return label == BOOLEAN_LABELS[0]
        return label

    def contains(self, value: Any) -> bool:
        """Domain membership check used by the generator's safety net."""
        match self.kind:
            case DomainKind.BOOLEAN:
                return isinstance(value, bool)
            case DomainKind.ENUMERATION:
                return value in self.labels
            case DomainKind.NUMERIC_RANGE:
                if isinstance(value, bool) or not isinstance(value, int | float):
                    return False
                if not math.isfinite(value):
                    return False
                low_ok = self.minimum is None or value >= self.minimum
                high_ok = self.maximum is None or value <= self.maximum
                return low_ok and high_ok
            case _:
                return isinstance(value, str)


class ApiProperty(BaseModel):
    """One attribute (key, value domain) transacted by an endpoint."""

    model_config = ConfigDict(frozen=True)

    key: str = Field(..., min_length=1, description="Attribute name as written in the spec")
    domain: ValueDomain
    declared_type: DeclaredType
    unit_text: str | None = Field(default=None, description="Verbatim x-unit value")
    description: str | None = Field(default=None, description="Verbatim description")

    @property
    def is_numeric(self) -> bool:
        """Whether the property carries a magnitude that may need conversion."""
        return self.declared_type in (DeclaredType.INTEGER, DeclaredType.NUMBER)


class Endpoint(BaseModel):
    """REST endpoint of the gateway under test."""

    model_config = ConfigDict(frozen=True)

    path: str
    methods: tuple[HttpMethod, ...]
    properties: tuple[ApiProperty, ...] = ()
    sample_request: dict[str, Any] | None = None

    @model_validator(mode="after")
    def _check_endpoint(self) -> Self:
        if not self.path.startswith("/"):
            raise ValueError(f"endpoint path must begin with '/': {self.path!r}")
        if not self.methods:
            raise ValueError(f"endpoint {self.path} declares no method")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError(f"endpoint {self.path} repeats a method")
        if HttpMethod.PUT in self.methods and not self.properties:
            raise ValueError(f"PUT endpoint {self.path} has no properties")
        return self


class ApiSpec(BaseModel):
    """Parsed API specification document."""

    model_config = ConfigDict(frozen=True)

    endpoints: tuple[Endpoint, ...]
    source_path: str = ""

    @model_validator(mode="after")
    def _check_unique_paths(self) -> Self:
        paths = [endpoint.path for endpoint in self.endpoints]
        if len(set(paths)) != len(paths):
            raise ValueError("endpoint paths must be unique")
        return self

    def endpoint(self, path: str) -> Endpoint | None:
        """Find an endpoint by path."""
        return next((endpoint for endpoint in self.endpoints if endpoint.path == path), None)


class TestObjectSet(BaseModel):
    """Attribute set S transacted by one (endpoint, method)."""

    __test__: ClassVar[bool] = False

    model_config = ConfigDict(frozen=True)

    endpoint: str
    method: HttpMethod
    properties: tuple[ApiProperty, ...]

    @property
    def api_id(self) -> str:
        """API identity used in verdicts: ``"PUT /climate"``."""
        return f"{self.method} {self.endpoint}"
