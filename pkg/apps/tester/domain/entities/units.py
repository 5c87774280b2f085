"""Units, quantities and the conversion plans that carry a value along an
API -> CAN -> VV chain.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from pydantic import BaseModel, ConfigDict, Field

Magnitude = float | int | Fraction


def scale(magnitude: Magnitude, factor: Fraction) -> Magnitude:
    """Multiply by a rational factor, exactly when the magnitude is rational."""
    if isinstance(magnitude, Rational):
        return Fraction(magnitude) * factor
    return magnitude * factor.numerator / factor.denominator


@dataclass(frozen=True, slots=True)
class Unit:
    """A registry unit; equal canonical names mean identical units."""

    canonical_name: str
    dimension: str
    scale_to_base: Fraction
    offset_to_base: Fraction = field(default=Fraction(0))

    def __post_init__(self) -> None:
        if self.scale_to_base <= 0:
            raise ValueError(f"unit {self.canonical_name} needs a positive scale")


@dataclass(frozen=True, slots=True)
class Quantity:
    """A magnitude expressed in a unit."""

    magnitude: Magnitude
    unit: Unit

    def __post_init__(self) -> None:
        if not math.isfinite(self.magnitude):
            raise ValueError("quantity magnitude must be finite")


class ConversionStep(BaseModel):
    """One hop of a conversion chain: ``target = source * factor``."""

    model_config = ConfigDict(frozen=True)

    source: str
    target: str
    factor: str = Field(..., description="Rational factor as text, e.g. '5/18'")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.factor)

    def apply(self, magnitude: Magnitude) -> Magnitude:
        return scale(magnitude, self.ratio)

    def invert(self, magnitude: Magnitude) -> Magnitude:
        return scale(magnitude, 1 / self.ratio)


class ConversionPlan(BaseModel):
    """Two-hop plan API -> CAN -> VV for one numeric property."""

    model_config = ConfigDict(frozen=True)

    api_to_can: ConversionStep
    can_to_vv: ConversionStep

    @property
    def steps(self) -> tuple[ConversionStep, ConversionStep]:
        return (self.api_to_can, self.can_to_vv)

    @property
    def factors(self) -> tuple[Fraction, Fraction]:
        return (self.api_to_can.ratio, self.can_to_vv.ratio)

    def api_to_vv(self, magnitude: Magnitude) -> Magnitude:
        return self.can_to_vv.apply(self.api_to_can.apply(magnitude))

    def vv_to_api(self, magnitude: Magnitude) -> Magnitude:
        return self.api_to_can.invert(self.can_to_vv.invert(magnitude))


class InsufficientContext(BaseModel):
    """Reconciliation could not proceed without guessing a unit."""

    model_config = ConfigDict(frozen=True)

    reason: str
    missing: tuple[str, ...] = ()
