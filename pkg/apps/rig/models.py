"""Pydantic models for the simulated test rig.

RigConfig is the gateway's ground truth: how each API property is carried
onto a CAN signal and how each CAN signal lands in the Virtual Vehicle
table. Faults perturb that mapping at run time.
"""

from enum import StrEnum
from fractions import Fraction
from typing import Any, Literal, Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class PropertyKind(StrEnum):
    """How the gateway encodes one API property."""

    ENUM = "enum"
    BOOLEAN = "boolean"
    NUMERIC = "numeric"
    DATETIME = "datetime"


def _check_scale(value: str) -> str:
    try:
        scale = Fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"scale {value!r} is not a rational number") from e
    if scale <= 0:
        raise ValueError(f"scale {value!r} must be positive")
    return value


class PropertyBinding(BaseModel):
    """API property -> CAN signal(s) on one endpoint."""

    model_config = ConfigDict(frozen=True)

    api_key: str = Field(..., min_length=1)
    kind: PropertyKind
    can_key: str | None = Field(default=None, description="Signal for enum/boolean/numeric")
    value_map: dict[str, int] = Field(
        default_factory=dict,
        description="API label -> CAN raw written on PUT (booleans use TRUE/FALSE)",
    )
    reverse_map: dict[int, str] = Field(
        default_factory=dict,
        description="CAN raw -> API label read on GET; defaults to the inverse of value_map",
    )
    scale: str = Field(default="1", description="CAN raw = API value * scale")
    integer: bool = Field(default=False, description="Report numeric GET values as integers")
    hour_can_key: str | None = None
    minute_can_key: str | None = None

    @field_validator("scale")
    @classmethod
    def _valid_scale(cls, value: str) -> str:
        return _check_scale(value)

    @model_validator(mode="after")
    def _check_binding(self) -> Self:
        if self.kind is PropertyKind.DATETIME:
            if not self.hour_can_key or not self.minute_can_key:
                raise ValueError(f"datetime property {self.api_key} needs hour and minute signals")
        elif not self.can_key:
            raise ValueError(f"property {self.api_key} has no CAN signal")
        if self.kind in (PropertyKind.ENUM, PropertyKind.BOOLEAN) and not self.value_map:
            raise ValueError(f"enumerated property {self.api_key} has no value map")
        return self

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.scale)

    @property
    def can_keys(self) -> tuple[str, ...]:
        if self.kind is PropertyKind.DATETIME:
            return (self.hour_can_key or "", self.minute_can_key or "")
        return (self.can_key or "",)

    def label_for(self, raw: int) -> str | None:
        """API label a CAN raw reads back as."""
        if self.reverse_map:
            return self.reverse_map.get(raw)
        return next((label for label, value in self.value_map.items() if value == raw), None)


class EndpointConfig(BaseModel):
    """One REST endpoint of the gateway."""

    model_config = ConfigDict(frozen=True)

    path: str
    methods: tuple[Literal["GET", "PUT"], ...] = ("GET", "PUT")
    properties: tuple[PropertyBinding, ...] = ()

    @model_validator(mode="after")
    def _check_endpoint(self) -> Self:
        if not self.path.startswith("/"):
            raise ValueError(f"endpoint path must begin with '/': {self.path!r}")
        keys = [binding.api_key for binding in self.properties]
        if len(set(keys)) != len(keys):
            raise ValueError(f"endpoint {self.path} repeats a property")
        return self

    def binding(self, api_key: str) -> PropertyBinding | None:
        return next((b for b in self.properties if b.api_key == api_key), None)


class VvBinding(BaseModel):
    """CAN signal -> Virtual Vehicle state."""

    model_config = ConfigDict(frozen=True)

    can_key: str = Field(..., min_length=1)
    vv_key: str = Field(..., min_length=1)
    raw_map: dict[int, float] = Field(
        default_factory=dict,
        description="CAN raw -> VV raw for enumerated signals",
    )
    scale: str = Field(default="1", description="VV raw = CAN raw * scale for numeric signals")
    default: float = 0.0

    @field_validator("scale")
    @classmethod
    def _valid_scale(cls, value: str) -> str:
        return _check_scale(value)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.scale)

    def to_vv(self, can_raw: float) -> float | None:
        if self.raw_map:
            return self.raw_map.get(int(can_raw))
        return float(Fraction(can_raw) * self.ratio)

    def to_can(self, vv_raw: float) -> float | None:
        if self.raw_map:
            return next(
                (float(can) for can, vv in self.raw_map.items() if vv == vv_raw),
                None,
            )
        return float(Fraction(vv_raw) / self.ratio)


class FaultKind(StrEnum):
    WRONG_SCALE = "wrong_scale"
    SWAPPED_ENUM = "swapped_enum"
    DEAD_SIGNAL = "dead_signal"
    STALE_STATE = "stale_state"
    WRONG_UNIT = "wrong_unit"


# wrong_scale and swapped_enum target an endpoint path, the rest a CAN key
ENDPOINT_FAULTS = frozenset({FaultKind.WRONG_SCALE, FaultKind.SWAPPED_ENUM})


class FaultSpec(BaseModel):
    """A seeded bug in the gateway."""

    model_config = ConfigDict(frozen=True)

    kind: FaultKind
    target: str = Field(..., min_length=1)
    factor: float = Field(default=1000.0, gt=0)
    label_a: str | None = None
    label_b: str | None = None

    @model_validator(mode="after")
    def _check_fault(self) -> Self:
        if self.kind is FaultKind.SWAPPED_ENUM and not (self.label_a and self.label_b):
            raise ValueError("swapped_enum needs label_a and label_b")
        return self


class RigConfig(BaseModel):
    """Complete gateway + VV configuration of a rig."""

    model_config = ConfigDict(frozen=True)

    endpoints: tuple[EndpointConfig, ...] = ()
    vv_bindings: tuple[VvBinding, ...] = ()
    faults: tuple[FaultSpec, ...] = ()

    @model_validator(mode="after")
    def _check_references(self) -> Self:
        paths = [endpoint.path for endpoint in self.endpoints]
        if len(set(paths)) != len(paths):
            raise ValueError("endpoint paths must be unique")
        can_keys = [binding.can_key for binding in self.vv_bindings]
        vv_keys = [binding.vv_key for binding in self.vv_bindings]
        if len(set(can_keys)) != len(can_keys) or len(set(vv_keys)) != len(vv_keys):
            raise ValueError("each CAN signal and VV key may be bound once")
        bound = set(can_keys)
        for endpoint in self.endpoints:
            for binding in endpoint.properties:
                missing = [key for key in binding.can_keys if key not in bound]
                if missing:
                    raise ValueError(
                        f"{endpoint.path}#{binding.api_key} uses unbound CAN signal {missing[0]}"
                    )
        return self

    def endpoint(self, path: str) -> EndpointConfig | None:
        return next((e for e in self.endpoints if e.path == path), None)

    def vv_binding(self, can_key: str) -> VvBinding | None:
        return next((b for b in self.vv_bindings if b.can_key == can_key), None)


class CanFrame(BaseModel):
    """One frame on the simulated bus."""

    model_config = ConfigDict(frozen=True)

    tick: int = Field(..., ge=1, description="Monotonic frame counter")
    key: str
    raw: float
    direction: Literal["tx", "rx", "mock"] = Field(
        ...,
        description="tx: gateway write, rx: gateway read, mock: admin VV write",
    )


class VvValue(BaseModel):
    """Admin route body: one VV raw value."""

    raw: float


class AckResponse(BaseModel):
    status: str = "ok"
    details: dict[str, Any] = Field(default_factory=dict)
