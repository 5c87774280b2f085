"""Plan execution, verdict tracking, metrics and reports."""

from apps.tester.execution.report import build_report, emit_report, parse_report
from apps.tester.execution.runner import execute_cases, run_cases, run_plan
from apps.tester.execution.tracker import (
    TestTracker,
    case_signature,
    pass_rate,
    precision_recall,
)

__all__ = [
    "TestTracker",
    "build_report",
    "case_signature",
    "emit_report",
    "execute_cases",
    "parse_report",
    "pass_rate",
    "precision_recall",
    "run_cases",
    "run_plan",
]
