"""Deterministic rule-based matcher backend.

Answers every matcher task from the scoring rules, the bundled lexicons
and the unit registry. Output is a pure function of request, lexicons and
strictness.
"""

import re

import structlog

from apps.tester.constants import PSEUDOCODE_FOREIGN_KEY_SCORE, PSEUDOCODE_SAME_KEY_SCORE
from apps.tester.domain.entities.matching import MatchCandidate, Strictness
from apps.tester.domain.ports.matcher_port import (
    KeyMatchRequest,
    KeyMatchResponse,
    MatcherPort,
    PseudocodeMatchRequest,
    PseudocodeMatchResponse,
    UnitInferRequest,
    UnitInferResponse,
    ValueMatchRequest,
    ValueMatchResponse,
)
from apps.tester.matching.assignment import threshold_assignment
from apps.tester.matching.lexicons import Lexicons, default_lexicons
from apps.tester.matching.scoring import KeyScore, label_score, score_keys
from apps.tester.units.registry import UnitRegistry, default_registry

logger = structlog.get_logger(__name__)

# "speed in km/h", "power (kW)", "[m/s]"
_UNIT_PHRASES = (
    re.compile(r"\bin\s+([A-Za-z][A-Za-z/_]*)"),
    re.compile(r"[(\[]\s*([A-Za-z][A-Za-z/_]*)\s*[)\]]"),
)


class RuleBasedBackend(MatcherPort):
    """Matcher backend driven by the local scoring rules."""

    name = "rules"

    def __init__(
        self,
        lexicons: Lexicons | None = None,
        registry: UnitRegistry | None = None,
    ) -> None:
        self.lexicons = lexicons or default_lexicons()
        self.registry = registry or default_registry()

    def match_keys(self, request: KeyMatchRequest) -> KeyMatchResponse:
        scored = [[self.score_pair(left, right) for right in request.right] for left in request.left]
        pairs = _assign(scored, request.right, request.strictness)
        return KeyMatchResponse(
            candidates=[
                MatchCandidate(
                    left_key=request.left[i],
                    right_key=request.right[j],
                    category=scored[i][j].category,
                    score=scored[i][j].score,
                )
                for i, j in pairs
            ]
        )

    def score_pair(self, left: str, right: str) -> KeyScore:
        """Key similarity used by match_keys."""
        return score_keys(left, right, self.lexicons)

    def match_values(self, request: ValueMatchRequest) -> ValueMatchResponse:
        scored = [
            [label_score(left, right, self.lexicons) for right in request.right_labels]
            for left in request.left_labels
        ]
        pairs = _assign(scored, request.right_labels, request.strictness)
        return ValueMatchResponse(
            pairs=[(request.left_labels[i], request.right_labels[j]) for i, j in pairs]
        )

    def match_pseudocode(self, request: PseudocodeMatchRequest) -> PseudocodeMatchResponse:
        """Score each alternative against the API label.

        The alternative whose label matches directly anchors the chain; the
        remaining alternatives score by membership, higher when they share
        the anchor's signal key. Without an anchor nothing matches.
        """
        alternatives = request.alternatives
        threshold = request.strictness.threshold
        direct = [label_score(request.left_label, label, self.lexicons).score for _, label in alternatives]
        best = max(range(len(alternatives)), key=lambda i: (direct[i], -i))
        if direct[best] < threshold:
            return PseudocodeMatchResponse(matches=[])

        anchor_key = alternatives[best][0]
        scores = [
            max(
                direct[i],
                PSEUDOCODE_SAME_KEY_SCORE if key == anchor_key else PSEUDOCODE_FOREIGN_KEY_SCORE,
            )
            for i, (key, _) in enumerate(alternatives)
        ]
        if request.strictness is Strictness.STRICT:
            top = max(range(len(alternatives)), key=lambda i: (scores[i], -i))
            chosen = [top] if scores[top] >= threshold else []
        else:
            chosen = [i for i, score in enumerate(scores) if score >= threshold]
        return PseudocodeMatchResponse(matches=[alternatives[i] for i in chosen])

    def infer_unit(self, request: UnitInferRequest) -> UnitInferResponse:
        """Pick up a unit named in the description ("... in km/h", "(kW)")."""
        if not request.description:
            return UnitInferResponse(unit=None)
        for pattern in _UNIT_PHRASES:
            for match in pattern.finditer(request.description):
                candidate = match.group(1)
                if self.registry.knows(candidate):
                    logger.debug("unit_inferred", key=request.key, unit=candidate)
                    return UnitInferResponse(unit=candidate)
        return UnitInferResponse(unit=None)


def _assign(
    scored: list[list[KeyScore]], right: tuple[str, ...], strictness: Strictness
) -> list[tuple[int, int]]:
    if not scored or not right:
        return []
    order = sorted(set(right))
    ranks = [order.index(key) for key in right]
    scores = [[s.score for s in row] for row in scored]
    priorities = [[s.category.priority for s in row] for row in scored]
    return threshold_assignment(scores, priorities, ranks, strictness.threshold)
