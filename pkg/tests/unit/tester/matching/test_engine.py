"""Unit tests for backend-agnostic output checks and the rule backend."""

import random
from functools import lru_cache

import pytest

from apps.tester.domain.entities.matching import MatchCandidate, MatchCategory, Strictness
from apps.tester.domain.entities.spec import DomainKind, ValueDomain
from apps.tester.domain.entities.tables import PseudocodeAlternatives
from apps.tester.domain.ports.matcher_port import (
    KeyMatchResponse,
    MatcherPort,
    PseudocodeMatchResponse,
    UnitInferRequest,
    UnitInferResponse,
    ValueMatchResponse,
)
from apps.tester.matching.assignment import quantize
from apps.tester.matching.engine import match_keys, match_pseudocode, match_values
from apps.tester.matching.rules_backend import RuleBasedBackend
from apps.tester.matching.scoring import NO_MATCH, KeyScore


class ScriptedBackend(MatcherPort):
    """Backend answering with fixed responses, however wrong."""

    name = "scripted"

    def __init__(self, candidates=(), pairs=(), matches=()):
        self.candidates = list(candidates)
        self.pairs = list(pairs)
        self.matches = list(matches)

    def match_keys(self, request):
        return KeyMatchResponse(candidates=self.candidates)

    def match_values(self, request):
        return ValueMatchResponse(pairs=self.pairs)

    def match_pseudocode(self, request):
        return PseudocodeMatchResponse(matches=self.matches)

    def infer_unit(self, request):
        return UnitInferResponse(unit=None)


def candidate(left: str, right: str, score: float = 1.0) -> MatchCandidate:
    return MatchCandidate(left_key=left, right_key=right, category=MatchCategory.EXACT, score=score)


ALTERNATIVES = PseudocodeAlternatives(
    alternatives=(("SeatHeatLvl", "HIGH"), ("SeatHeatLvl", "MAX"), ("SeatHeatOn", "TRUE"))
)


@pytest.mark.unit
class TestMatchKeysChecks:
    """Test suite for the checks match_keys applies to backend output."""

    def test_drops_unknown_low_and_duplicate_candidates(self):
        """Test only valid one-to-one candidates above threshold survive."""
        backend = ScriptedBackend(
            candidates=[
                candidate("b", "y"),
                candidate("a", "x"),
                candidate("a", "z"),
                candidate("c", "y"),
                candidate("ghost", "x"),
                candidate("c", "z", score=0.5),
            ]
        )

        accepted = match_keys(["a", "b", "c"], ["x", "y", "z"], Strictness.MODERATE, backend)

        assert [(c.left_key, c.right_key) for c in accepted] == [("a", "x"), ("b", "y")]

    def test_empty_sides_skip_the_backend(self):
        """Test no request is made when a side is empty."""
        assert match_keys([], ["x"], Strictness.RELAXED, ScriptedBackend(candidates=[candidate("a", "x")])) == []


@pytest.mark.unit
class TestMatchValuesChecks:
    """Test suite for match_values."""

    DOMAIN = ValueDomain(kind=DomainKind.ENUMERATION, labels=("ON", "OFF"))

    def test_rejects_unknown_and_repeated_labels(self):
        """Test pairs naming unknown labels or reusing one are dropped."""
        backend = ScriptedBackend(pairs=[("ON", "1"), ("ON", "0"), ("DIM", "0"), ("OFF", "0")])

        mapping = match_values(self.DOMAIN, {"1": 1, "0": 0, "2": 2}, Strictness.RELAXED, backend)

        assert mapping.pairs == (("ON", "1"), ("OFF", "0"))
        assert mapping.residual_right == ("2",)
        assert mapping.residual_left == ()

    def test_boolean_domain_uses_true_false(self):
        """Test booleans match as TRUE/FALSE against the encoding."""
        domain = ValueDomain(kind=DomainKind.BOOLEAN)

        mapping = match_values(domain, {"ACTIVE": 1, "INACTIVE": 0}, Strictness.STRICT, RuleBasedBackend())

        assert mapping.pairs == (("TRUE", "ACTIVE"), ("FALSE", "INACTIVE"))
        assert mapping.is_one_to_one


@pytest.mark.unit
class TestMatchPseudocode:
    """Test suite for pseudocode alternative selection."""

    @pytest.mark.parametrize(
        ("strictness", "expected"),
        [
            (Strictness.STRICT, [("SeatHeatLvl", "HIGH")]),
            (Strictness.MODERATE, [("SeatHeatLvl", "HIGH"), ("SeatHeatLvl", "MAX")]),
            (
                Strictness.RELAXED,
                [("SeatHeatLvl", "HIGH"), ("SeatHeatLvl", "MAX"), ("SeatHeatOn", "TRUE")],
            ),
        ],
    )
    def test_selection_widens_with_strictness(self, strictness, expected):
        """Test strict keeps the anchor and looser levels add chain members."""
        result = match_pseudocode(("seatHeat", "HIGH"), ALTERNATIVES, strictness, RuleBasedBackend())

        assert result == expected

    def test_no_anchor_no_match(self):
        """Test a label matching no alternative directly selects nothing."""
        result = match_pseudocode(("seatHeat", "LOW"), ALTERNATIVES, Strictness.RELAXED, RuleBasedBackend())

        assert result == []

    def test_foreign_alternatives_dropped(self):
        """Test alternatives outside the chain are discarded."""
        backend = ScriptedBackend(matches=[("Other", "X"), ("SeatHeatLvl", "MAX")])

        result = match_pseudocode(("seatHeat", "HIGH"), ALTERNATIVES, Strictness.RELAXED, backend)

        assert result == [("SeatHeatLvl", "MAX")]


@pytest.mark.unit
class TestInferUnit:
    """Test suite for RuleBasedBackend.infer_unit."""

    @pytest.mark.parametrize(
        ("description", "unit"),
        [
            ("Vehicle speed in km/h.", "km/h"),
            ("Charging power (kW)", "kW"),
            ("Delay [minutes] before start", "minutes"),
            ("Level in steps", None),
            (None, None),
        ],
    )
    def test_reads_unit_from_description(self, description, unit):
        """Test registered units named in a description are recovered."""
        response = RuleBasedBackend().infer_unit(UnitInferRequest(key="k", description=description))

        assert response.unit == unit


class TableBackend(RuleBasedBackend):
    """Rule backend whose key scores come from a fixed table."""

    def __init__(self, table):
        super().__init__()
        self.table = table

    def score_pair(self, left, right):
        return self.table.get((left, right), NO_MATCH)


def exhaustive_best_total(units: list[list[int]]) -> int:
    """Best total over every one-to-one pairing, by subset search over right columns."""
    rows, cols = len(units), len(units[0])

    @lru_cache(maxsize=None)
    def best(i: int, used: int) -> int:
        if i == rows:
            return 0
        result = best(i + 1, used)
        for j in range(cols):
            if units[i][j] > 0 and not used & (1 << j):
                result = max(result, units[i][j] + best(i + 1, used | (1 << j)))
        return result

    return best(0, 0)


@pytest.mark.unit
class TestMatchKeysOptimality:
    """Test suite for match_keys against an exhaustive assignment."""

    def test_random_instances_match_exhaustive_optimum(self):
        """Test 200 random instances up to 8x8 reach the maximum total score."""
        rng = random.Random(20240601)
        levels = list(Strictness)

        for instance in range(200):
            rows, cols = rng.randint(1, 8), rng.randint(1, 8)
            strictness = levels[instance % len(levels)]
            left = [f"L{i}" for i in range(rows)]
            right = [f"R{j}" for j in range(cols)]
            table = {
                (a, b): KeyScore(MatchCategory.SPELLING, rng.randint(50, 100) / 100)
                for a in left
                for b in right
                if rng.random() < 0.6
            }
            floor = quantize(strictness.threshold)
            units = [
                [
                    quantize(table[(a, b)].score)
                    if (a, b) in table and quantize(table[(a, b)].score) >= floor
                    else 0
                    for b in right
                ]
                for a in left
            ]

            candidates = match_keys(left, right, strictness, TableBackend(table))

            assert sum(quantize(c.score) for c in candidates) == exhaustive_best_total(units), instance
            assert len({c.left_key for c in candidates}) == len(candidates)
            assert len({c.right_key for c in candidates}) == len(candidates)

    def test_looser_level_prefers_the_larger_total(self):
        """Test moderate gives up a strict pair when two pairs score more."""
        table = {
            ("a", "x"): KeyScore(MatchCategory.SPELLING, 0.96),
            ("a", "y"): KeyScore(MatchCategory.SPELLING, 0.90),
            ("b", "x"): KeyScore(MatchCategory.SPELLING, 0.90),
        }
        backend = TableBackend(table)

        strict = match_keys(["a", "b"], ["x", "y"], Strictness.STRICT, backend)
        moderate = match_keys(["a", "b"], ["x", "y"], Strictness.MODERATE, backend)

        assert [(c.left_key, c.right_key) for c in strict] == [("a", "x")]
        assert [(c.left_key, c.right_key) for c in moderate] == [("a", "y"), ("b", "x")]
