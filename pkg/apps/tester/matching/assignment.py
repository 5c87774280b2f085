"""Maximum-weight one-to-one assignment.

Scores are quantized to integers and a deterministic tie-break is folded
into the low-order part of each weight, so the Hungarian algorithm below
works in exact integer arithmetic and always returns the same pairing.
A strictness level only decides which pairs are eligible; the assignment
over the eligible pairs is always the maximum-score one.
"""

from collections.abc import Sequence

SCORE_QUANTUM = 10**6


def quantize(score: float) -> int:
    """Integer score units compared by the assignment."""
    return round(score * SCORE_QUANTUM)


def tie_break_weights(
    scores: Sequence[Sequence[float]],
    priorities: Sequence[Sequence[int]],
    right_ranks: Sequence[int],
) -> list[list[int]]:
    """Fold score, category priority and right-key rank into one integer.

    Higher score dominates; among equal totals the assignment prefers
    better-priority categories, then lexicographically smaller right keys.
    Zero scores stay zero (ineligible).

    Args:
        scores: scores[i][j] in [0, 1]
        priorities: category priority per pair, 0 is best
        right_ranks: lexicographic rank of each right key, 0 is smallest
    """
    rows = len(scores)
    cols = len(right_ranks)
    worst_priority = max((p for row in priorities for p in row), default=0) + 1
    per_pair = (worst_priority + 1) * (cols + 1)
    scale = per_pair * (max(rows, cols) + 1) + 1
    weights = []
    for i in range(rows):
        row = []
        for j in range(cols):
            units = quantize(scores[i][j])
            if units <= 0:
                row.append(0)
                continue
            bonus = (worst_priority - priorities[i][j]) * (cols + 1) + (cols - right_ranks[j])
            row.append(units * scale + bonus)
        weights.append(row)
    return weights


def optimal_assignment(weights: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Pairs (row, col) maximizing the total weight; zero weights never pair.

    Args:
        weights: Non-negative integer matrix, rows x cols

    Returns:
        Selected pairs sorted by row
    """
    live_rows = [i for i, row in enumerate(weights) if any(w > 0 for w in row)]
    if not live_rows:
        return []
    live_cols = [j for j in range(len(weights[0])) if any(weights[i][j] > 0 for i in live_rows)]

    transpose = len(live_rows) > len(live_cols)
    if transpose:
        cost = [[-weights[i][j] for i in live_rows] for j in live_cols]
    else:
        cost = [[-weights[i][j] for j in live_cols] for i in live_rows]

    pairs = []
    for r, c in enumerate(_hungarian(cost)):
        if c < 0:
            continue
        i, j = (live_rows[c], live_cols[r]) if transpose else (live_rows[r], live_cols[c])
        if weights[i][j] > 0:
            pairs.append((i, j))
    return sorted(pairs)


def _hungarian(cost: list[list[int]]) -> list[int]:
    """Minimum-cost assignment of every row (rows <= cols) to a column."""
    n = len(cost)
    m = len(cost[0])
    infinity = 10**40
    u = [0] * (n + 1)
    v = [0] * (m + 1)
    owner = [0] * (m + 1)
    way = [0] * (m + 1)

    for i in range(1, n + 1):
        owner[0] = i
        j0 = 0
        minv = [infinity] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = owner[j0]
            delta = infinity
            j1 = 0
            for j in range(1, m + 1):
                if used[j]:
                    continue
                reduced = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if reduced < minv[j]:
                    minv[j] = reduced
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[owner[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1

    assignment = [-1] * n
    for j in range(1, m + 1):
        if owner[j]:
            assignment[owner[j] - 1] = j - 1
    return assignment


def threshold_assignment(
    scores: Sequence[Sequence[float]],
    priorities: Sequence[Sequence[int]],
    right_ranks: Sequence[int],
    threshold: float,
) -> list[tuple[int, int]]:
    """Maximum-score one-to-one assignment over pairs clearing a threshold.

    Args:
        scores: scores[i][j] in [0, 1]
        priorities: category priority per pair, 0 is best
        right_ranks: lexicographic rank of each right key
        threshold: score floor; pairs below it never pair

    Returns:
        Selected pairs sorted by row
    """
    floor = quantize(threshold)
    eligible = [[score if quantize(score) >= floor else 0.0 for score in row] for row in scores]
    return optimal_assignment(tie_break_weights(eligible, priorities, right_ranks))
