"""Unit tests for the integer assignment and its threshold filter."""

from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apps.tester.matching.assignment import (
    optimal_assignment,
    tie_break_weights,
    quantize,
    threshold_assignment,
)


def brute_force_total(weights: list[list[int]]) -> int:
    """Best total over every one-to-one pairing, zero pairs contributing nothing."""
    rows, cols = len(weights), len(weights[0])
    if rows <= cols:
        return max(sum(weights[i][p[i]] for i in range(rows)) for p in permutations(range(cols), rows))
    return max(sum(weights[p[j]][j] for j in range(cols)) for p in permutations(range(rows), cols))


matrices = st.integers(min_value=1, max_value=6).flatmap(
    lambda rows: st.integers(min_value=1, max_value=6).flatmap(
        lambda cols: st.lists(
            st.lists(st.integers(min_value=0, max_value=20), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
)


@pytest.mark.unit
class TestOptimalAssignment:
    """Test suite for optimal_assignment."""

    @settings(max_examples=200, deadline=None)
    @given(weights=matrices)
    def test_matches_brute_force(self, weights):
        """Test the total weight equals the exhaustive optimum."""
        pairs = optimal_assignment(weights)

        assert sum(weights[i][j] for i, j in pairs) == brute_force_total(weights)
        assert len({i for i, _ in pairs}) == len(pairs)
        assert len({j for _, j in pairs}) == len(pairs)
        assert all(weights[i][j] > 0 for i, j in pairs)

    def test_zero_weights_never_pair(self):
        """Test an all-zero matrix yields no pairs."""
        assert optimal_assignment([[0, 0], [0, 0]]) == []

    def test_prefers_total_over_greedy(self):
        """Test the assignment maximizes the sum, not the first row."""
        assert optimal_assignment([[10, 9], [9, 1]]) == [(0, 1), (1, 0)]


@pytest.mark.unit
class TestTieBreakWeights:
    """Test suite for tie_break_weights."""

    def test_smaller_right_key_wins_a_tie(self):
        """Test equal scores go to the lexicographically smaller right key."""
        weights = tie_break_weights([[1.0, 1.0]], [[0, 0]], right_ranks=[1, 0])

        assert optimal_assignment(weights) == [(0, 1)]

    def test_better_category_wins_a_tie(self):
        """Test equal scores go to the better-priority category first."""
        weights = tie_break_weights([[1.0, 1.0]], [[1, 0]], right_ranks=[0, 1])

        assert optimal_assignment(weights) == [(0, 1)]

    def test_zero_scores_stay_ineligible(self):
        """Test a zero score produces a zero weight."""
        assert tie_break_weights([[0.0, 0.5]], [[0, 0]], [0, 1])[0][0] == 0



@pytest.mark.unit
class TestThresholdAssignment:
    """Test suite for threshold_assignment."""

    def test_threshold_filters_pairs(self):
        """Test pairs under the floor never pair."""
        scores = [[0.97, 0.0, 0.7], [0.85, 0.9, 0.0], [0.0, 0.0, 0.65]]

        assert threshold_assignment(scores, [[0] * 3] * 3, [0, 1, 2], 0.95) == [(0, 0)]
        assert threshold_assignment(scores, [[0] * 3] * 3, [0, 1, 2], 0.6) == [(0, 0), (1, 1), (2, 2)]

    def test_maximizes_total_over_eligible_pairs(self):
        """Test a looser level trades one strong pair for two good ones."""
        scores = [[0.96, 0.90], [0.90, 0.0]]
        priorities = [[0, 0], [0, 0]]

        assert threshold_assignment(scores, priorities, [0, 1], 0.95) == [(0, 0)]
        assert threshold_assignment(scores, priorities, [0, 1], 0.80) == [(0, 1), (1, 0)]

    @settings(max_examples=200, deadline=None)
    @given(
        scores=st.lists(
            st.lists(st.integers(min_value=0, max_value=100), min_size=5, max_size=5),
            min_size=1,
            max_size=5,
        ),
        threshold=st.sampled_from([0.95, 0.8, 0.6]),
    )
    def test_total_equals_brute_force(self, scores, threshold):
        """Test the selected total equals the exhaustive optimum over eligible pairs."""
        scores = [[value / 100 for value in row] for row in scores]
        eligible = [[quantize(s) if quantize(s) >= quantize(threshold) else 0 for s in row] for row in scores]

        pairs = threshold_assignment(scores, [[0] * 5 for _ in scores], [0, 1, 2, 3, 4], threshold)

        assert sum(eligible[i][j] for i, j in pairs) == brute_force_total(eligible)
        assert all(eligible[i][j] > 0 for i, j in pairs)
