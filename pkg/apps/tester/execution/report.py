"""Assemble the run report and write it as record text or human text.

Record text is one ``<section>\\t<json>`` line per item, sections in a fixed
order, JSON with sorted keys; ``parse_report`` reads it back exactly.
"""

import json
from collections.abc import Sequence
from typing import Any, Literal

import structlog
from jinja2 import Environment, PackageLoader, StrictUndefined, select_autoescape
from pydantic import ValidationError

from apps.tester.constants import CAN_LOG_EXCERPT
from apps.tester.core.exceptions import ArtifactError, EmptyInputError
from apps.tester.domain.entities.matching import MatchResult, SkippedAttribute
from apps.tester.domain.entities.report import (
    ApiVerdict,
    MatchSummary,
    Metrics,
    RunReport,
    TraceEntry,
)
from apps.tester.domain.entities.units import ConversionPlan, InsufficientContext
from apps.tester.execution.tracker import pass_rate

logger = structlog.get_logger(__name__)

ReportFormat = Literal["record", "human"]

REPORT_HEADER = "# vehicle-api-tester report v1"

# Singular sections hold one record, plural ones any number
_SECTIONS: tuple[tuple[str, str], ...] = (
    ("run", ""),
    ("metrics", ""),
    ("timing", "timings"),
    ("tested", "tested"),
    ("skipped", "skipped"),
    ("match", "matches"),
    ("verdict", "verdicts"),
    ("can", "can_log"),
)

_env = Environment(
    loader=PackageLoader("apps.tester.execution", "templates"),
    autoescape=select_autoescape(enabled_extensions=("html",)),
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def summarize_match(result: MatchResult) -> MatchSummary:
    first, second = result.key_chain
    api_to_can, _ = result.value_chain
    conversion = None
    if isinstance(result.conversion, ConversionPlan):
        conversion = " -> ".join(
            [result.conversion.api_to_can.source]
            + [f"{step.target} (x{step.factor})" for step in result.conversion.steps]
        )
    elif isinstance(result.conversion, InsufficientContext):
        conversion = f"insufficient: {', '.join(result.conversion.missing)}"
    return MatchSummary(
        id=result.id,
        can_key=result.can.key,
        vv_key=result.vv.key,
        categories=(str(first.category), str(second.category)),
        scores=(first.score, second.score),
        value_pairs=len(api_to_can.pairs) if api_to_can else 0,
        conversion=conversion,
    )


def build_report(
    *,
    strictness: str,
    backend: str,
    tested: Sequence[str],
    skipped: Sequence[SkippedAttribute],
    results: Sequence[MatchResult],
    verdicts: Sequence[ApiVerdict],
    trace: Sequence[Any] = (),
    timings: dict[str, float] | None = None,
    metrics: Metrics | None = None,
) -> RunReport:
    """Fold one run into a RunReport.

    Args:
        tested: ``"METHOD /path#key"`` of every property some case covered
        trace: CAN frames (models or dicts); the last few are kept
        metrics: Precision/recall to merge in, when ground truth exists
    """
    try:
        rate: float | None = pass_rate(verdicts)
    except EmptyInputError:
        rate = None
    merged = (metrics or Metrics()).model_copy(update={"pass_rate": rate})
    frames = [
        TraceEntry.model_validate(frame if isinstance(frame, dict) else frame.model_dump())
        for frame in list(trace)[-CAN_LOG_EXCERPT:]
    ]
    return RunReport(
        strictness=strictness,
        backend=backend,
        tested=tuple(sorted(set(tested))),
        skipped=tuple(sorted(skipped, key=lambda s: (s.api_id, s.key, s.stage))),
        matches=tuple(summarize_match(result) for result in results),
        verdicts=tuple(verdicts),
        metrics=merged,
        can_log=tuple(frames),
        timings=dict(sorted((timings or {}).items())),
    )


def emit_report(report: RunReport, fmt: ReportFormat = "record") -> str:
    """Render a report as record text (machine) or human text."""
    if fmt == "human":
        return _env.get_template("report.j2").render(report=report)

    data = report.model_dump(mode="json")
    lines = [REPORT_HEADER]
    lines.append(_line("run", {"strictness": data["strictness"], "backend": data["backend"]}))
    lines.append(_line("metrics", data["metrics"]))
    for stage, seconds in data["timings"].items():
        lines.append(_line("timing", {"stage": stage, "seconds": seconds}))
    for section, field in _SECTIONS[3:]:
        lines.extend(_line(section, item) for item in data[field])
    return "\n".join(lines) + "\n"


def parse_report(document: str) -> RunReport:
    """Read record text back into a RunReport.

    Raises:
        ArtifactError: Unknown section or malformed record
    """
    data: dict[str, Any] = {field: [] for _, field in _SECTIONS if field}
    data["timings"] = {}
    for number, line in enumerate(document.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        section, _, payload = line.partition("\t")
        try:
            value = json.loads(payload)
        except ValueError as e:
            raise ArtifactError(f"Report line {number} is not valid JSON", {"line": number}) from e
        match section:
            case "run":
                data.update(value)
            case "metrics":
                data["metrics"] = value
            case "timing":
                data["timings"][value["stage"]] = value["seconds"]
            case _:
                field = dict(_SECTIONS).get(section)
                if not field:
                    raise ArtifactError(f"Report line {number} has unknown section {section!r}", {"line": number})
                data[field].append(value)
    try:
        return RunReport.model_validate(data)
    except ValidationError as e:
        raise ArtifactError("Report does not describe a valid run", {"errors": str(e)}) from e


def _line(section: str, value: Any) -> str:
    return f"{section}\t{json.dumps(value, sort_keys=True, ensure_ascii=False)}"
