"""Unit tests for the unit registry, conversion and chain reconciliation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apps.tester.core.exceptions import ConfigError, DimensionMismatchError, UnknownUnitError
from apps.tester.domain.entities.units import ConversionPlan, InsufficientContext, Quantity
from apps.tester.units.conversion import (
    convert,
    parse_optional_unit,
    parse_unit,
    reconcile,
)
from apps.tester.units.registry import UnitRegistry, default_registry

SPEEDS = ["m/s", "km/h", "mph"]
UNITS_BY_DIMENSION = {
    "speed": SPEEDS,
    "power": ["W", "kW"],
    "time": ["s", "min", "h"],
}
float_magnitudes = st.one_of(
    st.just(0.0),
    st.floats(min_value=1e-6, max_value=1e6),
    st.floats(min_value=-1e6, max_value=-1e-6),
)


@pytest.mark.unit
class TestUnitRegistry:
    """Test suite for the bundled and custom registries."""

    @pytest.mark.parametrize(
        ("text", "canonical"),
        [
            ("km/h", "kilometer_per_hour"),
            ("KM / H", "kilometer_per_hour"),
            ("kW", "kilowatt"),
            ("kw", "kilowatt"),
            ("%", "percent"),
            ("minutes", "minute"),
        ],
    )
    def test_aliases_fold_case_and_whitespace(self, text, canonical):
        """Test surface forms map to their canonical unit."""
        assert parse_unit(text).canonical_name == canonical

    def test_unknown_unit(self):
        """Test an unregistered unit raises UnknownUnitError."""
        with pytest.raises(UnknownUnitError):
            parse_unit("furlong")
        assert default_registry().knows("furlong") is False

    def test_optional_unit_tolerates_unknown_and_empty(self):
        """Test parse_optional_unit reads unknown or empty text as no unit."""
        assert parse_optional_unit(None) is None
        assert parse_optional_unit("") is None
        assert parse_optional_unit("furlong") is None
        assert parse_optional_unit("W").canonical_name == "watt"

    def test_inconsistent_alias_fails(self):
        """Test one alias pointing at two units raises ConfigError."""
        document = "x\ta\tspeed\t1\nx\tb\tspeed\t2\n"
        with pytest.raises(ConfigError):
            UnitRegistry.from_tsv(document)

    def test_malformed_row_fails(self):
        """Test a row without four fields raises ConfigError."""
        with pytest.raises(ConfigError):
            UnitRegistry.from_tsv("x\ta\tspeed\n")


@pytest.mark.unit
class TestConvert:
    """Test suite for convert."""

    def test_exact_rational_conversion(self):
        """Test 36 km/h is exactly 10 m/s."""
        result = convert(Quantity(36, parse_unit("km/h")), parse_unit("m/s"))

        assert result.magnitude == Fraction(10)
        assert result.unit.canonical_name == "meter_per_second"

    def test_dimension_mismatch(self):
        """Test converting speed into power raises."""
        with pytest.raises(DimensionMismatchError):
            convert(Quantity(1, parse_unit("km/h")), parse_unit("kW"))

    def test_non_finite_quantity_rejected(self):
        """Test a quantity must be finite."""
        with pytest.raises(ValueError):
            Quantity(float("inf"), parse_unit("W"))

    @given(
        magnitude=st.fractions(min_value=-10**6, max_value=10**6),
        source=st.sampled_from(SPEEDS),
        target=st.sampled_from(SPEEDS),
    )
    def test_round_trip_is_exact(self, magnitude, source, target):
        """Test converting there and back returns the original magnitude."""
        there = convert(Quantity(magnitude, parse_unit(source)), parse_unit(target))
        back = convert(there, parse_unit(source))

        assert back.magnitude == magnitude

    @pytest.mark.parametrize("dimension", sorted(UNITS_BY_DIMENSION))
    @settings(max_examples=1000, deadline=None)
    @given(magnitude=float_magnitudes, data=st.data())
    def test_float_round_trip_within_relative_error(self, dimension, magnitude, data):
        """Test float magnitudes survive a round trip within 1e-12 relative error."""
        units = UNITS_BY_DIMENSION[dimension]
        source = parse_unit(data.draw(st.sampled_from(units)))
        target = parse_unit(data.draw(st.sampled_from(units)))

        back = convert(convert(Quantity(magnitude, source), target), source).magnitude

        assert abs(back - magnitude) <= 1e-12 * abs(magnitude)

    @pytest.mark.parametrize(
        ("magnitude", "source", "target", "expected"),
        [
            (1, "kW", "W", 1000),
            (Fraction("3.6"), "km/h", "m/s", 1),
            (3.6, "km/h", "m/s", 1.0),
            (90, "min", "h", Fraction(3, 2)),
        ],
    )
    def test_reference_conversions_are_exact(self, magnitude, source, target, expected):
        """Test 1 kW is 1000 W and 3.6 km/h is 1 m/s with no rounding."""
        assert convert(Quantity(magnitude, parse_unit(source)), parse_unit(target)).magnitude == expected


@pytest.mark.unit
class TestReconcile:
    """Test suite for reconcile."""

    def test_full_chain(self):
        """Test factors of API km/h -> CAN m/s -> VV mph."""
        plan = reconcile(parse_unit("km/h"), parse_unit("m/s"), parse_unit("mph"))

        assert isinstance(plan, ConversionPlan)
        assert plan.factors == (Fraction(5, 18), Fraction(3125, 1397))
        assert plan.api_to_vv(Fraction(18)) == Fraction(5) * Fraction(3125, 1397)

    def test_vv_unit_taken_from_can(self):
        """Test a unitless VV entry inherits the CAN unit."""
        plan = reconcile(parse_unit("%"), parse_unit("permille"), None)

        assert plan.api_to_can.factor == "10"
        assert plan.can_to_vv.factor == "1"

    def test_can_unit_taken_from_vv(self):
        """Test a unitless CAN signal inherits the VV unit."""
        plan = reconcile(parse_unit("kW"), None, parse_unit("W"))

        assert plan.api_to_can.target == "watt"
        assert plan.api_to_can.factor == "1000"

    def test_api_unit_never_inferred(self):
        """Test a missing API unit yields InsufficientContext."""
        result = reconcile(None, parse_unit("W"), parse_unit("W"))

        assert isinstance(result, InsufficientContext)
        assert result.reason == "missing_unit"
        assert result.missing == ("api",)

    def test_incompatible_units(self):
        """Test units of different dimensions raise DimensionMismatchError."""
        with pytest.raises(DimensionMismatchError):
            reconcile(parse_unit("km/h"), parse_unit("W"), None)

    @given(
        magnitude=st.fractions(min_value=-1000, max_value=1000),
        api=st.sampled_from(SPEEDS),
        can=st.sampled_from(SPEEDS),
        vv=st.sampled_from(SPEEDS),
    )
    def test_plan_inverts(self, magnitude, api, can, vv):
        """Test vv_to_api undoes api_to_vv exactly."""
        plan = reconcile(parse_unit(api), parse_unit(can), parse_unit(vv))

        assert plan.vv_to_api(plan.api_to_vv(magnitude)) == magnitude
