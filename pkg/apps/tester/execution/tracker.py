"""Verdict aggregation and evaluation metrics."""

import json
from collections.abc import Callable, Iterable, Sequence
from typing import Any

import structlog

from apps.tester.core.exceptions import EmptyGroundTruthError, EmptyInputError
from apps.tester.domain.entities.report import ApiVerdict, Metrics
from apps.tester.domain.entities.spec import HttpMethod
from apps.tester.domain.entities.testcase import TestCase, TestOutcome, Verdict

logger = structlog.get_logger(__name__)


class TestTracker:
    """Collects case outcomes and folds them into per-API verdicts.

    Single writer: record from one task only.
    """

    __test__ = False

    def __init__(self) -> None:
        self._entries: list[tuple[TestCase, TestOutcome]] = []

    def record(self, case: TestCase, outcome: TestOutcome) -> None:
        if case.id != outcome.case_id:
            raise ValueError(f"outcome {outcome.case_id} recorded for case {case.id}")
        self._entries.append((case, outcome))

    def record_all(self, cases: Iterable[TestCase], outcomes: Iterable[TestOutcome]) -> None:
        for case, outcome in zip(cases, outcomes, strict=True):
            self.record(case, outcome)

    def __len__(self) -> int:
        return len(self._entries)

    def verdicts(self) -> list[ApiVerdict]:
        """One verdict per (endpoint, method), sorted by endpoint then method."""
        grouped: dict[tuple[str, HttpMethod], list[TestOutcome]] = {}
        for case, outcome in self._entries:
            grouped.setdefault((case.endpoint, case.method), []).append(outcome)

        verdicts = []
        for (endpoint, method), outcomes in sorted(grouped.items()):
            states = {outcome.verdict for outcome in outcomes}
            if Verdict.FAIL in states:
                verdict = Verdict.FAIL
            elif Verdict.ERROR in states:
                verdict = Verdict.ERROR
            else:
                verdict = Verdict.PASS
            verdicts.append(
                ApiVerdict(endpoint=endpoint, method=method, outcome=verdict, case_outcomes=tuple(outcomes))
            )
        return verdicts


def pass_rate(verdicts: Sequence[ApiVerdict]) -> float:
    """Share of APIs whose cases all passed.

    APIs that could not run (error) are left out of both counts.

    Raises:
        EmptyInputError: No verdict, or only errored ones
    """
    judged = [verdict for verdict in verdicts if verdict.outcome is not Verdict.ERROR]
    if not judged:
        raise EmptyInputError("pass rate needs at least one judged API", {"verdicts": len(verdicts)})
    return sum(verdict.outcome is Verdict.PASS for verdict in judged) / len(judged)


def _canonical(value: Any) -> Any:
    if isinstance(value, bool) or not isinstance(value, int | float):
        return value
    # 2, 2.0 and 2.0000000001 compare equal
    return float(f"{float(value):.9g}")


def case_signature(case: TestCase) -> str:
    """Comparable identity of a case, independent of its id and provenance."""
    body = {
        "endpoint": case.endpoint,
        "method": str(case.method),
        "api_payload": {k: _canonical(v) for k, v in case.api_payload.items()},
        "vv_preset": {k: _canonical(v) for k, v in case.vv_preset.items()},
        "expected_vv": {k: _canonical(v) for k, v in case.expected_vv.items()},
        "expected_api": {k: _canonical(v) for k, v in case.expected_api.items()},
    }
    return json.dumps(body, sort_keys=True)


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def precision_recall(
    generated: Sequence[Any],
    ground_truth: Sequence[Any],
    key_fn: Callable[[Any], Any] = case_signature,
) -> Metrics:
    """Precision, recall and F1 of generated items against ground truth.

    Items are compared through ``key_fn``; duplicates count once.

    Raises:
        EmptyGroundTruthError: Ground truth is empty
    """
    truth = {key_fn(item) for item in ground_truth}
    if not truth:
        raise EmptyGroundTruthError("recall is undefined without ground truth")
    produced = {key_fn(item) for item in generated}
    hits = len(produced & truth)
    precision = hits / len(produced) if produced else 0.0
    recall = hits / len(truth)
    return Metrics(precision=precision, recall=recall, f1=f1_score(precision, recall))
