"""Quantity conversion and API -> CAN -> VV unit reconciliation."""

import structlog

from apps.tester.core.exceptions import DimensionMismatchError, UnknownUnitError
from apps.tester.domain.entities.units import (
    ConversionPlan,
    ConversionStep,
    InsufficientContext,
    Quantity,
    Unit,
    scale,
)
from apps.tester.units.registry import UnitRegistry, default_registry

logger = structlog.get_logger(__name__)


def parse_unit(text: str, registry: UnitRegistry | None = None) -> Unit:
    """Canonical unit for a surface form such as ``"kW"`` or ``"km/h"``.

    Raises:
        UnknownUnitError: Not in the registry
    """
    return (registry or default_registry()).parse_unit(text)


def parse_optional_unit(text: str | None, registry: UnitRegistry | None = None) -> Unit | None:
    """Like parse_unit, but unknown or empty text reads as no unit."""
    if not text:
        return None
    try:
        return parse_unit(text, registry)
    except UnknownUnitError:
        logger.info("unit_unrecognised", unit=text)
        return None


def convert(quantity: Quantity, target: Unit) -> Quantity:
    """Express a quantity in another unit of the same dimension.

    Raises:
        DimensionMismatchError: Units measure different quantities
    """
    _require_same_dimension(quantity.unit, target)
    factor = quantity.unit.scale_to_base / target.scale_to_base
    return Quantity(scale(quantity.magnitude, factor), target)


def reconcile(
    api_unit: Unit | None,
    can_unit: Unit | None,
    vv_unit: Unit | None,
) -> ConversionPlan | InsufficientContext:
    """Plan the conversions a numeric value undergoes along its chain.

    A VV entry without a unit takes its CAN signal's unit and vice versa,
    since both describe the same vehicle quantity. The API unit is never
    inferred here.

    Returns:
        Plan of two steps, or InsufficientContext when a unit stays unknown

    Raises:
        DimensionMismatchError: Present units are incompatible
    """
    present = [unit for unit in (api_unit, can_unit, vv_unit) if unit is not None]
    for unit in present[1:]:
        _require_same_dimension(present[0], unit)

    can_unit = can_unit or vv_unit
    vv_unit = vv_unit or can_unit
    missing = tuple(
        name for name, unit in (("api", api_unit), ("can", can_unit), ("vv", vv_unit)) if unit is None
    )
    if api_unit is None or can_unit is None or vv_unit is None:
        return InsufficientContext(reason="missing_unit", missing=missing)

    return ConversionPlan(
        api_to_can=_step(api_unit, can_unit),
        can_to_vv=_step(can_unit, vv_unit),
    )


def _step(source: Unit, target: Unit) -> ConversionStep:
    factor = source.scale_to_base / target.scale_to_base
    return ConversionStep(source=source.canonical_name, target=target.canonical_name, factor=str(factor))


def _require_same_dimension(left: Unit, right: Unit) -> None:
    if left.dimension != right.dimension:
        raise DimensionMismatchError(
            f"{left.canonical_name} ({left.dimension}) vs {right.canonical_name} ({right.dimension})",
            {"left": left.canonical_name, "right": right.canonical_name},
        )
