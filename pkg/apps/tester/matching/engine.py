"""Backend-agnostic matching operations.

Whatever backend answers, its output is checked here before the pipeline
sees it: candidates must name known keys, clear the strictness threshold
and stay one-to-one. Anything else is dropped with a warning.
"""

from collections.abc import Mapping, Sequence

import structlog

from apps.tester.domain.entities.matching import MatchCandidate, Strictness, ValueMapping
from apps.tester.domain.entities.spec import ValueDomain
from apps.tester.domain.entities.tables import PseudocodeAlternatives
from apps.tester.domain.ports.matcher_port import (
    KeyMatchRequest,
    MatcherPort,
    PseudocodeMatchRequest,
    ValueMatchRequest,
)
from apps.tester.matching.assignment import quantize

logger = structlog.get_logger(__name__)


def match_keys(
    left: Sequence[str],
    right: Sequence[str],
    strictness: Strictness,
    backend: MatcherPort,
) -> list[MatchCandidate]:
    """One-to-one key assignment at the given strictness.

    Args:
        left: Keys to resolve
        right: Keys to resolve them against
        strictness: Matching policy
        backend: Matcher answering the request

    Returns:
        Accepted candidates in left-key order; unmatched keys are omitted

    Raises:
        BackendError: Propagated from the backend
    """
    if not left or not right:
        return []
    response = backend.match_keys(
        KeyMatchRequest(left=tuple(left), right=tuple(right), strictness=strictness)
    )

    known_left, known_right = set(left), set(right)
    floor = quantize(strictness.threshold)
    used_left: set[str] = set()
    used_right: set[str] = set()
    accepted: list[MatchCandidate] = []
    for candidate in response.candidates:
        problem = None
        if candidate.left_key not in known_left or candidate.right_key not in known_right:
            problem = "unknown_key"
        elif quantize(candidate.score) < floor:
            problem = "below_threshold"
        elif candidate.left_key in used_left or candidate.right_key in used_right:
            problem = "not_one_to_one"
        if problem:
            logger.warning(
                "candidate_rejected",
                backend=backend.name,
                left=candidate.left_key,
                right=candidate.right_key,
                problem=problem,
            )
            continue
        used_left.add(candidate.left_key)
        used_right.add(candidate.right_key)
        accepted.append(candidate)

    order = {key: index for index, key in enumerate(left)}
    return sorted(accepted, key=lambda candidate: order[candidate.left_key])


def match_values(
    left_domain: ValueDomain,
    right_encoding: Mapping[str, int],
    strictness: Strictness,
    backend: MatcherPort,
    *,
    pseudocode_matches: Mapping[str, Sequence[tuple[str, str]]] | None = None,
    right_key: str = "",
) -> ValueMapping:
    """Pair the labels of an enumerated domain with an encoding's labels.

    The backend proposes a one-to-one pairing. When the right side carries
    pseudocode alternatives, the labels they realize on the same signal are
    added on top: under strict only for left labels still unpaired, under
    moderate and relaxed for every label, so one API label may then stand
    for several encoded labels.

    Args:
        left_domain: Enumeration or boolean domain
        right_encoding: label -> raw of the signal or VV entry
        strictness: Matching policy
        backend: Matcher answering the request
        pseudocode_matches: Left label -> alternatives match_pseudocode
            accepted for it, when the right side documents an OR-chain
        right_key: Signal key an alternative must name to count

    Returns:
        Pairs ordered by left label then encoding order, with residuals
    """
    left_labels = left_domain.value_labels
    right_labels = tuple(right_encoding)
    pairs: set[tuple[str, str]] = set()

    if left_labels and right_labels:
        response = backend.match_values(
            ValueMatchRequest(left_labels=left_labels, right_labels=right_labels, strictness=strictness)
        )
        used_left: set[str] = set()
        used_right: set[str] = set()
        for left, right in response.pairs:
            if left not in left_labels or right not in right_labels:
                logger.warning("value_pair_rejected", left=left, right=right, problem="unknown_label")
                continue
            if left in used_left or right in used_right:
                logger.warning("value_pair_rejected", left=left, right=right, problem="not_one_to_one")
                continue
            used_left.add(left)
            used_right.add(right)
            pairs.add((left, right))

    if pseudocode_matches:
        for label in left_labels:
            paired = any(left == label for left, _ in pairs)
            if strictness is Strictness.STRICT and paired:
                continue
            for alt_key, alt_label in pseudocode_matches.get(label, ()):
                if alt_key != right_key or alt_label not in right_encoding:
                    continue
                if any(right == alt_label and left != label for left, right in pairs):
                    continue
                pairs.add((label, alt_label))

    left_rank = {label: index for index, label in enumerate(left_labels)}
    right_rank = {label: index for index, label in enumerate(right_labels)}
    ordered = tuple(sorted(pairs, key=lambda pair: (left_rank[pair[0]], right_rank[pair[1]])))
    matched_left = {left for left, _ in ordered}
    matched_right = {right for _, right in ordered}
    return ValueMapping(
        pairs=ordered,
        residual_left=tuple(label for label in left_labels if label not in matched_left),
        residual_right=tuple(label for label in right_labels if label not in matched_right),
    )


def match_pseudocode(
    left: tuple[str, str],
    alts: PseudocodeAlternatives,
    strictness: Strictness,
    backend: MatcherPort,
) -> list[tuple[str, str]]:
    """Alternatives of an OR-chain that realize one API (key, label).

    Strict keeps at most the best alternative; looser levels keep every
    alternative above their threshold. Alternatives the chain does not
    contain are dropped.
    """
    key, label = left
    response = backend.match_pseudocode(
        PseudocodeMatchRequest(
            left_key=key, left_label=label, alternatives=alts.alternatives, strictness=strictness
        )
    )
    known = set(alts.alternatives)
    matches: list[tuple[str, str]] = []
    for alternative in response.matches:
        alternative = (alternative[0], alternative[1])
        if alternative not in known or alternative in matches:
            logger.warning("pseudocode_match_rejected", alternative=alternative)
            continue
        matches.append(alternative)
    if strictness is Strictness.STRICT:
        matches = matches[:1]
    return matches
