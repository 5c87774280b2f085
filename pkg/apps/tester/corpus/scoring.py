"""Score pipeline output against a corpus manifest."""

from collections.abc import Callable, Iterable, Sequence
from typing import Any

import structlog

from apps.tester.constants import STAGE_UNITS
from apps.tester.core.exceptions import ManifestMismatchError
from apps.tester.corpus.manifest import CorpusManifest
from apps.tester.domain.entities.matching import MatchCategory, MatchResult
from apps.tester.domain.entities.report import Metrics
from apps.tester.domain.entities.testcase import TestCase
from apps.tester.domain.entities.units import ConversionPlan
from apps.tester.execution.tracker import case_signature, precision_recall
from apps.tester.matching.lexicons import Lexicons, default_lexicons

logger = structlog.get_logger(__name__)


def score_against_manifest(
    items: Sequence[MatchResult] | Sequence[TestCase],
    manifest: CorpusManifest,
) -> dict[str, Metrics]:
    """Precision and recall of match results or test cases, per category.

    Match results yield ``overall``, one entry per mapping category,
    ``values``, ``units`` and ``units/<perturbation>``. Test cases yield
    ``cases`` plus one entry per category of the mapping a case derives
    from. Groups without ground truth are left out.

    Raises:
        ManifestMismatchError: A result names an API the corpus lacks
    """
    if items and all(isinstance(item, TestCase) for item in items):
        return score_cases([item for item in items if isinstance(item, TestCase)], manifest)
    return score_matches([item for item in items if isinstance(item, MatchResult)], manifest)


def score_matches(results: Sequence[MatchResult], manifest: CorpusManifest) -> dict[str, Metrics]:
    apis = set(manifest.apis)
    foreign = sorted({r.api_id for r in results} - apis)
    if foreign:
        raise ManifestMismatchError(
            f"Results name APIs outside the corpus: {', '.join(foreign)}",
            {"apis": foreign},
        )

    mappings = manifest.true_mappings
    metrics: dict[str, Metrics] = {}
    _put(metrics, "overall", [_chain(r) for r in results], [m.chain for m in mappings])

    categories = sorted({m.category for m in mappings})
    for category in categories:
        subset = [m for m in mappings if m.category == category]
        ids = {m.id for m in subset}
        _put(metrics, category, [_chain(r) for r in results if r.id in ids], [m.chain for m in subset])

    valued = {m.id for m in mappings if m.value_pairs}
    _put(
        metrics,
        "values",
        [(r.id, a, c) for r in results if r.id in valued for a, c in _value_pairs(r)],
        [(m.id, a, c) for m in mappings for a, c in m.value_pairs],
    )

    converted = {m.id: m.conversion for m in mappings if m.conversion is not None}
    _put(
        metrics,
        "units",
        [conversion for r in results if r.id in converted and (conversion := _conversion(r))],
        [(id_, *factors) for id_, factors in converted.items()],
    )
    unit_categories: dict[str, set[str]] = {}
    for perturbation in manifest.perturbations:
        if perturbation.stage == STAGE_UNITS:
            unit_categories.setdefault(perturbation.category, set()).add(perturbation.id)
    for category, ids in sorted(unit_categories.items()):
        _put(
            metrics,
            f"units/{category}",
            [conversion for r in results if r.id in ids and (conversion := _conversion(r))],
            [(id_, *factors) for id_, factors in converted.items() if id_ in ids],
        )

    logger.info("matches_scored", results=len(results), groups=len(metrics))
    return metrics


def score_cases(cases: Sequence[TestCase], manifest: CorpusManifest) -> dict[str, Metrics]:
    truth = manifest.ground_truth_cases
    metrics: dict[str, Metrics] = {}
    _put(metrics, "cases", cases, truth, key_fn=case_signature)

    category_of = {m.id: m.category for m in manifest.true_mappings}

    def category(case: TestCase) -> str | None:
        return category_of.get(case.provenance[0]) if case.provenance else None

    for name in sorted({c for case in truth if (c := category(case)) is not None}):
        _put(
            metrics,
            f"cases/{name}",
            [case for case in cases if category(case) == name],
            [case for case in truth if category(case) == name],
            key_fn=case_signature,
        )
    logger.info("cases_scored", cases=len(cases), truth=len(truth))
    return metrics


def semantic_coverage(manifest: CorpusManifest, lexicons: Lexicons | None = None) -> float:
    """Share of the corpus' synonym substitutions the lexicon knows."""
    lexicons = lexicons or default_lexicons()
    pairs = [
        p.substitution
        for p in manifest.perturbations
        if p.category == MatchCategory.SEMANTIC and p.substitution is not None
    ]
    return lexicons.coverage(pairs)


def _put(
    metrics: dict[str, Metrics],
    name: str,
    generated: Iterable[Any],
    truth: Iterable[Any],
    key_fn: Callable[[Any], Any] | None = None,
) -> None:
    expected = list(truth)
    if expected:
        metrics[name] = precision_recall(list(generated), expected, key_fn=key_fn or _identity)


def _identity(item: Any) -> Any:
    return item


def _chain(result: MatchResult) -> tuple[str, str, str]:
    return (result.id, result.can.key, result.vv.key)


def _value_pairs(result: MatchResult) -> tuple[tuple[str, str], ...]:
    api_to_can = result.value_chain[0]
    return api_to_can.pairs if api_to_can is not None else ()


def _conversion(result: MatchResult) -> tuple[str, str, str] | None:
    plan = result.conversion
    if not isinstance(plan, ConversionPlan):
        return None
    return (result.id, plan.api_to_can.factor, plan.can_to_vv.factor)
