"""The end-to-end test pipeline and its individual stages.

Each stage reads the artifact of the stage before it and writes its own
into the output directory, so running the stages one by one from the CLI
produces the same files as ``run_e2e``.
"""

import json
import time
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Literal

import structlog
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from apps.matchers.factory import BackendKind, build_backend
from apps.rig.models import CanFrame
from apps.rig.server import RigHandle, load_rig_config, start_rig
from apps.tester.constants import (
    CASES_FILE,
    CORPUS_RIG_FILE,
    MATCHES_FILE,
    PLAN_FILE,
    PYTEST_MODULE_FILE,
    REPORT_RECORD_FILE,
    REPORT_TEXT_FILE,
    RUN_FILE,
    SCORES_FILE,
    TEST_OBJECTS_FILE,
    TIMINGS_FILE,
)
from apps.tester.core.exceptions import AppError, ArtifactError, ConfigError, StageError
from apps.tester.corpus.manifest import CorpusManifest, parse_manifest
from apps.tester.corpus.scoring import score_cases, score_matches, semantic_coverage
from apps.tester.domain.entities.matching import MatchResult, SkippedAttribute, Strictness
from apps.tester.domain.entities.report import ApiVerdict, Metrics, RunReport
from apps.tester.domain.entities.spec import ApiSpec, TestObjectSet
from apps.tester.domain.entities.testcase import TestCase, TestOutcome, Verdict
from apps.tester.execution.report import build_report, emit_report
from apps.tester.execution.runner import run_plan
from apps.tester.execution.tracker import TestTracker
from apps.tester.generation.generator import GenerationConfig, ValueSuggester, generate_test_cases
from apps.tester.generation.plan import AUTO_RIG, render_pytest_module, render_test_plan
from apps.tester.ingest.spec_parser import extract_test_objects, load_spec
from apps.tester.matching.stages import match_test_objects
from apps.tester.settings import settings
from apps.tester.tables.parser import load_can_table, load_vv_table

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

Stage = Literal["ingest", "match", "gen", "run", "report"]

_objects_adapter = TypeAdapter(list[TestObjectSet])


class PipelineConfig(BaseModel):
    """Parameters of one pipeline run."""

    model_config = ConfigDict(frozen=True)

    spec: Path
    can_table: Path
    vv_table: Path
    out: Path
    strictness: Strictness = Field(default_factory=lambda: Strictness(settings.DEFAULT_STRICTNESS))
    backend: BackendKind = Field(default_factory=lambda: settings.DEFAULT_BACKEND)
    replay_store: Path | None = None
    record_to: Path | None = None
    rig: str = Field(default=AUTO_RIG, description="'auto' or the base URL of a running rig")
    rig_config: Path | None = Field(
        default=None, description="Rig configuration for --rig auto; defaults to rig.json beside the spec"
    )
    manifest: Path | None = Field(default=None, description="Corpus manifest to score against")

    def check_paths(self) -> None:
        """Raises ConfigError when an input file is missing."""
        inputs = {"spec": self.spec, "can table": self.can_table, "vv table": self.vv_table}
        if self.manifest is not None:
            inputs["manifest"] = self.manifest
        if self.rig == AUTO_RIG:
            inputs["rig config"] = self.resolved_rig_config
        for name, path in inputs.items():
            if not path.is_file():
                raise ConfigError(f"{name} not found: {path}", {"path": str(path)})

    @property
    def resolved_rig_config(self) -> Path:
        return self.rig_config or self.spec.parent / CORPUS_RIG_FILE


class RunResult(BaseModel):
    """What run_e2e hands back to the CLI."""

    report: RunReport
    exit_code: int
    scores: dict[str, Metrics] = Field(default_factory=dict)


# Artifact I/O


def write_json(path: Path, data: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ArtifactError(f"Cannot read {path}", {"path": str(path)}) from e
    except ValueError as e:
        raise ArtifactError(f"{path} is not valid JSON", {"path": str(path)}) from e


def _dump(models: Sequence[BaseModel]) -> list[Any]:
    return [model.model_dump(mode="json") for model in models]


def _load(model: type[BaseModel], items: Any, path: Path) -> list[Any]:
    try:
        return [model.model_validate(item) for item in items]
    except (ValidationError, TypeError) as e:
        raise ArtifactError(f"{path} does not hold {model.__name__} records", {"path": str(path)}) from e


# Stages


def ingest_stage(spec: ApiSpec, out: Path) -> list[TestObjectSet]:
    """Extract the test objects of a parsed spec and write them."""
    objects = extract_test_objects(spec)
    write_json(out / TEST_OBJECTS_FILE, _dump(objects))
    return objects


def load_test_objects(out: Path) -> list[TestObjectSet]:
    path = out / TEST_OBJECTS_FILE
    try:
        return _objects_adapter.validate_python(read_json(path))
    except ValidationError as e:
        raise ArtifactError(f"{path} does not hold test objects", {"path": str(path)}) from e


def match_stage(
    objects: Sequence[TestObjectSet],
    can_path: Path,
    vv_path: Path,
    out: Path,
    *,
    strictness: Strictness,
    backend: BackendKind,
    replay_store: Path | None = None,
    record_to: Path | None = None,
) -> tuple[list[MatchResult], list[SkippedAttribute]]:
    """Match test objects against the tables and write the chains."""
    can_table = load_can_table(can_path)
    vv_table = load_vv_table(vv_path)
    matcher = build_backend(backend, replay_store=replay_store, record_to=record_to)
    try:
        outcome = match_test_objects(
            list(objects),
            can_table,
            vv_table,
            strictness,
            matcher,
            parallelism=settings.BACKEND_PARALLELISM,
        )
    finally:
        matcher.close()
    write_json(
        out / MATCHES_FILE,
        {"results": _dump(outcome.results), "skipped": _dump(outcome.skipped)},
    )
    return outcome.results, outcome.skipped


def load_matches(out: Path) -> tuple[list[MatchResult], list[SkippedAttribute]]:
    path = out / MATCHES_FILE
    data = read_json(path)
    return _load(MatchResult, data.get("results", []), path), _load(SkippedAttribute, data.get("skipped", []), path)


def gen_stage(
    results: Sequence[MatchResult],
    out: Path,
    *,
    spec: ApiSpec | None = None,
    rig_url: str = AUTO_RIG,
    suggest_values: ValueSuggester | None = None,
) -> tuple[list[TestCase], list[SkippedAttribute]]:
    """Generate cases and write them with the plan and the pytest module."""
    samples = {e.path: e.sample_request for e in spec.endpoints if e.sample_request} if spec else {}
    cases, skipped = generate_test_cases(
        results,
        GenerationConfig(sample_requests=samples, suggest_values=suggest_values),
    )
    write_json(out / CASES_FILE, {"cases": _dump(cases), "skipped": _dump(skipped)})
    (out / PLAN_FILE).write_text(render_test_plan(cases, rig_url), encoding="utf-8")
    (out / PYTEST_MODULE_FILE).write_text(render_pytest_module(cases, rig_url), encoding="utf-8")
    return cases, skipped


def load_cases(out: Path) -> tuple[list[TestCase], list[SkippedAttribute]]:
    path = out / CASES_FILE
    data = read_json(path)
    return _load(TestCase, data.get("cases", []), path), _load(SkippedAttribute, data.get("skipped", []), path)


def run_stage(
    cases: Sequence[TestCase],
    rig: str | RigHandle,
    out: Path,
) -> tuple[list[TestOutcome], list[CanFrame]]:
    """Execute the cases and write the outcomes with the CAN trace."""
    outcomes = run_plan(list(cases), rig)
    trace = rig.can_trace() if isinstance(rig, RigHandle) else []
    write_json(
        out / RUN_FILE,
        {
            "rig": rig.url if isinstance(rig, RigHandle) else rig,
            "outcomes": _dump(outcomes),
            "trace": _dump(trace),
        },
    )
    return outcomes, trace


def load_run(out: Path) -> tuple[list[TestOutcome], list[CanFrame]]:
    path = out / RUN_FILE
    data = read_json(path)
    return _load(TestOutcome, data.get("outcomes", []), path), _load(CanFrame, data.get("trace", []), path)


def report_stage(
    out: Path,
    *,
    strictness: Strictness,
    backend: str,
    manifest: CorpusManifest | None = None,
) -> tuple[RunReport, dict[str, Metrics]]:
    """Fold the stored artifacts of a run into report.rec and report.txt.

    Reads only files in ``out``, so a stored run reports the same way twice.
    """
    results, match_skipped = load_matches(out)
    cases, gen_skipped = load_cases(out)
    outcomes, trace = load_run(out)
    timings = read_json(out / TIMINGS_FILE) if (out / TIMINGS_FILE).is_file() else {}

    tracker = TestTracker()
    tracker.record_all(cases, outcomes)
    skipped = [*match_skipped, *gen_skipped]

    scores: dict[str, Metrics] = {}
    if manifest is not None:
        scores = {**score_matches(results, manifest), **score_cases(cases, manifest)}
        write_json(
            out / SCORES_FILE,
            {
                "metrics": {name: m.model_dump(mode="json") for name, m in scores.items()},
                "semantic_coverage": semantic_coverage(manifest),
            },
        )

    tested = tested_properties(cases, skipped)
    if (out / TEST_OBJECTS_FILE).is_file():
        check_accounting(load_test_objects(out), tested, skipped)

    report = build_report(
        strictness=str(strictness),
        backend=backend,
        tested=tested,
        skipped=skipped,
        results=results,
        verdicts=tracker.verdicts(),
        trace=trace,
        timings=timings,
        metrics=scores.get("cases"),
    )
    write_report(out, report)
    return report, scores


def write_report(out: Path, report: RunReport) -> None:
    (out / REPORT_RECORD_FILE).write_text(emit_report(report, "record"), encoding="utf-8")
    (out / REPORT_TEXT_FILE).write_text(emit_report(report, "human"), encoding="utf-8")


def tested_properties(cases: Sequence[TestCase], skipped: Sequence[SkippedAttribute]) -> list[str]:
    """``"METHOD /path#key"`` of every property a case covers and no skip names."""
    left_out = {f"{s.api_id}#{s.key}" for s in skipped}
    covered = set()
    for case in cases:
        for origin in case.provenance:
            api_id, _, rest = origin.partition("#")
            # datetime roles add "/hours" or "/minutes" after the key
            covered.add(f"{api_id}#{rest.split('/', 1)[0]}")
    return sorted(covered - left_out)


def check_accounting(
    objects: Sequence[TestObjectSet], tested: Sequence[str], skipped: Sequence[SkippedAttribute]
) -> None:
    """Every extracted property is either tested or skipped, never both.

    Raises:
        ArtifactError: A property is unaccounted for, or tested and skipped at once
    """
    extracted = {f"{obj.api_id}#{prop.key}" for obj in objects for prop in obj.properties}
    left_out = {f"{s.api_id}#{s.key}" for s in skipped}
    covered = set(tested)
    unaccounted = sorted(extracted - covered - left_out)
    overlap = sorted(covered & left_out)
    unknown = sorted((covered | left_out) - extracted)
    if unaccounted or overlap or unknown:
        logger.error("accounting_failed", unaccounted=unaccounted, overlap=overlap, unknown=unknown)
        raise ArtifactError(
            "Tested and skipped properties do not partition the extracted ones",
            {"unaccounted": unaccounted, "overlap": overlap, "unknown": unknown},
        )


def exit_code(verdicts: Sequence[ApiVerdict]) -> int:
    """0 when every API passed and nothing errored; an empty run passes."""
    outcomes = {verdict.outcome for verdict in verdicts}
    return EXIT_OK if outcomes <= {Verdict.PASS} else EXIT_FAILED


@contextmanager
def rig_for(config: PipelineConfig) -> Iterator[str | RigHandle]:
    """The rig a run talks to; ``auto`` starts one on a free loopback port."""
    if config.rig != AUTO_RIG:
        yield config.rig
        return
    with start_rig(load_rig_config(config.resolved_rig_config)) as handle:
        yield handle


@contextmanager
def _timed(stage: Stage | str, timings: dict[str, float]) -> Iterator[None]:
    started = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except AppError as e:
        logger.error("stage_failed", stage=stage, error=e.message, details=e.details)
        raise StageError(str(stage), e.message, e.details) from e
    finally:
        timings[str(stage)] = round(time.perf_counter() - started, 6)


def run_e2e(config: PipelineConfig) -> RunResult:
    """Extract, match, generate, run and report in one go.

    Raises:
        ConfigError: An input file is missing
        StageError: A stage failed as a whole; carries the stage name
    """
    config.check_paths()
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    manifest = parse_manifest(config.manifest.read_text(encoding="utf-8")) if config.manifest else None
    timings: dict[str, float] = {}
    logger.info(
        "pipeline_started",
        spec=str(config.spec),
        strictness=str(config.strictness),
        backend=config.backend,
        rig=config.rig,
    )

    with _timed("understanding", timings):
        spec = load_spec(config.spec)
        objects = ingest_stage(spec, out)
    with _timed("matching", timings):
        results, _ = match_stage(
            objects,
            config.can_table,
            config.vv_table,
            out,
            strictness=config.strictness,
            backend=config.backend,
            replay_store=config.replay_store,
            record_to=config.record_to,
        )
    with _timed("generation", timings):
        cases, _ = gen_stage(results, out, spec=spec, rig_url=config.rig)
    with _timed("run", timings), rig_for(config) as rig:
        run_stage(cases, rig, out)
    write_json(out / TIMINGS_FILE, timings)

    with _timed("report", timings):
        report, scores = report_stage(
            out, strictness=config.strictness, backend=config.backend, manifest=manifest
        )
    # report.rec was folded before its own stage finished
    write_json(out / TIMINGS_FILE, timings)
    report = report.model_copy(update={"timings": dict(sorted(timings.items()))})
    write_report(out, report)
    code = exit_code(report.verdicts)
    logger.info(
        "pipeline_finished",
        pass_rate=report.metrics.pass_rate,
        failed=[f"{v.method} {v.endpoint}" for v in report.verdicts if v.outcome is Verdict.FAIL],
        exit_code=code,
    )
    return RunResult(report=report, exit_code=code, scores=scores)
