"""Command line: the full pipeline (``e2e``) and each stage on its own.

Every stage subcommand reads the artifact the stage before it wrote into
``--out`` and writes its own there.
"""

import argparse
import signal
import threading
from collections.abc import Callable, Sequence
from pathlib import Path

import structlog

from apps.rig.server import load_rig_config, start_rig
from apps.tester.constants import CORPUS_PROFILES
from apps.tester.core.exceptions import AppError, ConfigError, StageError
from apps.tester.core.logging import setup_logging
from apps.tester.corpus.forge import forge
from apps.tester.corpus.manifest import parse_manifest
from apps.tester.domain.entities.matching import Strictness
from apps.tester.domain.entities.testcase import Verdict
from apps.tester.execution.tracker import TestTracker
from apps.tester.generation.plan import AUTO_RIG
from apps.tester.ingest.spec_parser import load_spec
from apps.tester.pipeline import (
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    PipelineConfig,
    exit_code,
    gen_stage,
    ingest_stage,
    load_cases,
    load_matches,
    load_test_objects,
    match_stage,
    report_stage,
    run_e2e,
    run_stage,
)
from apps.tester.settings import settings

logger = structlog.get_logger(__name__)

Handler = Callable[[argparse.Namespace], int]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vehicle-api-tester",
        description="Test vehicle APIs against CAN and Virtual Vehicle tables on a simulated rig",
    )
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=None,
        help="Overrides LOG_LEVEL for this run",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="Extract test objects from a spec")
    _spec(ingest, required=True)
    _out(ingest)
    ingest.set_defaults(handler=_ingest)

    match = commands.add_parser("match", help="Match test objects against the CAN and VV tables")
    _tables(match)
    _matching(match)
    _out(match)
    match.set_defaults(handler=_match)

    gen = commands.add_parser("gen", help="Generate test cases, plan and pytest module")
    _spec(gen, required=False)
    _rig(gen)
    _out(gen)
    gen.set_defaults(handler=_gen)

    run = commands.add_parser("run", help="Execute the generated cases against a rig")
    _rig(run)
    _out(run)
    run.set_defaults(handler=_run)

    report = commands.add_parser("report", help="Write report.rec and report.txt for a stored run")
    _strictness(report)
    report.add_argument("--backend", default=settings.DEFAULT_BACKEND, help="Backend name recorded in the report")
    report.add_argument("--manifest", type=Path, default=None, help="Corpus manifest to score against")
    _out(report)
    report.set_defaults(handler=_report)

    rig = commands.add_parser("rig", help="Serve a standalone rig until interrupted")
    rig.add_argument("--config", type=Path, required=True, help="Rig configuration (JSON or YAML)")
    rig.add_argument("--port", type=int, default=settings.RIG_PORT, help="Loopback port; 0 picks a free one")
    rig.set_defaults(handler=_serve_rig)

    forge_cmd = commands.add_parser("forge", help="Generate a labeled evaluation corpus")
    forge_cmd.add_argument("--seed", type=int, required=True)
    forge_cmd.add_argument("--profile", choices=CORPUS_PROFILES, required=True)
    forge_cmd.add_argument("--size", type=int, required=True)
    forge_cmd.add_argument("--clean", action="store_true", help="No perturbations")
    forge_cmd.add_argument("--faults", type=int, default=0, help="Endpoints with a seeded gateway bug")
    _out(forge_cmd)
    forge_cmd.set_defaults(handler=_forge)

    e2e = commands.add_parser("e2e", help="Run the whole pipeline")
    _spec(e2e, required=True)
    _tables(e2e)
    _matching(e2e)
    _rig(e2e)
    e2e.add_argument("--manifest", type=Path, default=None, help="Corpus manifest to score against")
    _out(e2e)
    e2e.set_defaults(handler=_e2e)
    return parser


def _spec(parser: argparse.ArgumentParser, *, required: bool) -> None:
    parser.add_argument("--spec", type=Path, required=required, help="API spec (YAML or JSON)")


def _tables(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--can-table", type=Path, required=True)
    parser.add_argument("--vv-table", type=Path, required=True)


def _strictness(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--strictness",
        type=Strictness,
        choices=list(Strictness),
        default=Strictness(settings.DEFAULT_STRICTNESS),
    )


def _matching(parser: argparse.ArgumentParser) -> None:
    _strictness(parser)
    parser.add_argument("--backend", choices=["rules", "remote", "replay"], default=settings.DEFAULT_BACKEND)
    parser.add_argument("--replay-store", type=Path, default=None, help="Store served by --backend replay")
    parser.add_argument("--record-to", type=Path, default=None, help="Store --backend remote records into")


def _rig(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rig", default=AUTO_RIG, help="'auto' or the base URL of a running rig")
    parser.add_argument(
        "--rig-config",
        type=Path,
        default=None,
        help="Rig configuration for --rig auto (default: rig.json beside the spec)",
    )


def _out(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, required=True, help="Output directory")


def _require(*paths: Path | None) -> None:
    for path in paths:
        if path is not None and not path.is_file():
            raise ConfigError(f"File not found: {path}", {"path": str(path)})


# Handlers


def _ingest(args: argparse.Namespace) -> int:
    _require(args.spec)
    objects = ingest_stage(load_spec(args.spec), args.out)
    print(f"{len(objects)} test object sets -> {args.out}")
    return EXIT_OK


def _match(args: argparse.Namespace) -> int:
    _require(args.can_table, args.vv_table)
    results, skipped = match_stage(
        load_test_objects(args.out),
        args.can_table,
        args.vv_table,
        args.out,
        strictness=args.strictness,
        backend=args.backend,
        replay_store=args.replay_store,
        record_to=args.record_to,
    )
    print(f"{len(results)} chains matched, {len(skipped)} attributes skipped")
    return EXIT_OK


def _gen(args: argparse.Namespace) -> int:
    _require(args.spec)
    results, _ = load_matches(args.out)
    spec = load_spec(args.spec) if args.spec else None
    cases, skipped = gen_stage(results, args.out, spec=spec, rig_url=args.rig)
    print(f"{len(cases)} test cases, {len(skipped)} attributes skipped")
    return EXIT_OK


def _run(args: argparse.Namespace) -> int:
    cases, _ = load_cases(args.out)
    if args.rig != AUTO_RIG:
        outcomes, _ = run_stage(cases, args.rig, args.out)
    else:
        if args.rig_config is None:
            raise ConfigError("--rig auto needs --rig-config")
        _require(args.rig_config)
        with start_rig(load_rig_config(args.rig_config)) as handle:
            outcomes, _ = run_stage(cases, handle, args.out)
    tracker = TestTracker()
    tracker.record_all(cases, outcomes)
    failed = sum(outcome.verdict is not Verdict.PASS for outcome in outcomes)
    print(f"{len(outcomes)} cases run, {failed} not passed")
    return exit_code(tracker.verdicts())


def _report(args: argparse.Namespace) -> int:
    _require(args.manifest)
    manifest = parse_manifest(args.manifest.read_text(encoding="utf-8")) if args.manifest else None
    report, _ = report_stage(args.out, strictness=args.strictness, backend=args.backend, manifest=manifest)
    print(f"pass rate {report.metrics.pass_rate}; report -> {args.out}")
    return exit_code(report.verdicts)


def _serve_rig(args: argparse.Namespace) -> int:
    _require(args.config)
    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda *_: stop.set())
    signal.signal(signal.SIGTERM, lambda *_: stop.set())
    with start_rig(load_rig_config(args.config), port=args.port) as handle:
        print(f"rig listening on {handle.url}")
        stop.wait()
    return EXIT_OK


def _forge(args: argparse.Namespace) -> int:
    try:
        corpus = forge(args.seed, args.profile, args.size, args.out, clean=args.clean, fault_count=args.faults)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    manifest = corpus.manifest
    print(
        f"{len(manifest.apis)} APIs, {len(manifest.true_mappings)} mappings, "
        f"{len(manifest.perturbations)} perturbations, {len(manifest.faults)} faults -> {args.out}"
    )
    return EXIT_OK


def _e2e(args: argparse.Namespace) -> int:
    config = PipelineConfig(
        spec=args.spec,
        can_table=args.can_table,
        vv_table=args.vv_table,
        out=args.out,
        strictness=args.strictness,
        backend=args.backend,
        replay_store=args.replay_store,
        record_to=args.record_to,
        rig=args.rig,
        rig_config=args.rig_config,
        manifest=args.manifest,
    )
    result = run_e2e(config)
    report = result.report
    failed = [f"{v.method} {v.endpoint}" for v in report.verdicts if v.outcome is not Verdict.PASS]
    print(f"pass rate {report.metrics.pass_rate}; {len(failed)} APIs not passed")
    for api in failed:
        print(f"  {api}")
    if "cases" in result.scores:
        cases = result.scores["cases"]
        print(f"precision {cases.precision}; recall {cases.recall}")
    return result.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(level=args.log_level)
    handler: Handler = args.handler
    try:
        return handler(args)
    except ConfigError as e:
        logger.error("usage_error", command=args.command, error=e.message, details=e.details)
        print(f"error: {e.message}")
        return EXIT_USAGE
    except StageError as e:
        logger.error("stage_error", stage=e.stage, error=e.message)
        print(f"error in stage {e.stage}: {e.message}")
        return EXIT_FAILED
    except AppError as e:
        logger.error("command_failed", command=args.command, error=e.message, details=e.details)
        print(f"error: {e.message}")
        return EXIT_FAILED
