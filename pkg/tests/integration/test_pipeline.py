"""Integration tests for the full pipeline on forged corpora - happy and unhappy paths."""

import json

import pytest

from apps.matchers.transports import RulesTransport
from apps.tester.cli.main import main
from apps.tester.constants import (
    CASES_FILE,
    CORPUS_CAN_FILE,
    CORPUS_MANIFEST_FILE,
    CORPUS_RIG_FILE,
    CORPUS_SPEC_FILE,
    CORPUS_VV_FILE,
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
from apps.tester.core.exceptions import StageError
from apps.tester.domain.entities.matching import Strictness
from apps.tester.execution.report import parse_report
from apps.tester.pipeline import EXIT_FAILED, EXIT_OK, PipelineConfig, run_e2e


def pipeline_config(corpus, out, **overrides) -> PipelineConfig:
    fields = {
        "spec": corpus / CORPUS_SPEC_FILE,
        "can_table": corpus / CORPUS_CAN_FILE,
        "vv_table": corpus / CORPUS_VV_FILE,
        "out": out,
        "strictness": Strictness.MODERATE,
        "backend": "rules",
        "manifest": corpus / CORPUS_MANIFEST_FILE,
    }
    return PipelineConfig(**{**fields, **overrides})


@pytest.mark.e2e
@pytest.mark.slow
class TestHappyPaths:
    """Pipeline runs that should pass."""

    def test_clean_corpus_passes(self, forged, tmp_path):
        """Test a clean corpus on a correct rig passes with perfect scores - HAPPY PATH."""
        _, corpus = forged(17, "mixed", 20, clean=True)

        result = run_e2e(pipeline_config(corpus, tmp_path / "run"))

        assert result.exit_code == EXIT_OK
        assert result.report.metrics.pass_rate == 1.0
        assert result.report.failed_apis == []
        assert (result.scores["cases"].precision, result.scores["cases"].recall) == (1.0, 1.0)
        assert (result.scores["overall"].precision, result.scores["overall"].recall) == (1.0, 1.0)
        for name in (REPORT_RECORD_FILE, REPORT_TEXT_FILE, SCORES_FILE):
            assert (tmp_path / "run" / name).is_file()

    def test_report_file_matches_result(self, forged, tmp_path):
        """Test report.rec reads back to the report run_e2e returned."""
        _, corpus = forged(5, "units", 4, clean=True)

        result = run_e2e(pipeline_config(corpus, tmp_path / "run"))

        stored = parse_report((tmp_path / "run" / REPORT_RECORD_FILE).read_text(encoding="utf-8"))
        assert stored == result.report

    def test_every_stage_is_timed(self, forged, tmp_path):
        """Test timings.json and the report carry all five stages, report included."""
        _, corpus = forged(5, "units", 4, clean=True)

        result = run_e2e(pipeline_config(corpus, tmp_path / "run"))

        stages = {"understanding", "matching", "generation", "run", "report"}
        stored = json.loads((tmp_path / "run" / TIMINGS_FILE).read_text(encoding="utf-8"))
        assert set(stored) == stages
        assert set(result.report.timings) == stages
        assert all(seconds >= 0 for seconds in stored.values())
        assert "report" in (tmp_path / "run" / REPORT_TEXT_FILE).read_text(encoding="utf-8")


@pytest.mark.e2e
@pytest.mark.slow
class TestUnhappyPaths:
    """Pipeline runs against a faulty rig."""

    def test_faulted_apis_are_flagged(self, forged, tmp_path):
        """Test exactly the APIs with a seeded gateway bug fail - UNHAPPY PATH."""
        corpus, out = forged(17, "mixed", 20, clean=True, faults=7)

        result = run_e2e(pipeline_config(out, tmp_path / "run"))

        assert result.exit_code == EXIT_FAILED
        assert sorted(result.report.failed_apis) == list(corpus.manifest.faulted_apis)
        assert result.report.errored_apis == []

    def test_rig_config_beside_spec_is_required(self, forged, tmp_path):
        """Test --rig auto without a rig configuration is a usage error."""
        _, corpus = forged(2, "units", 2, clean=True)
        (corpus / CORPUS_RIG_FILE).unlink()

        code = main(
            [
                "e2e",
                "--spec", str(corpus / CORPUS_SPEC_FILE),
                "--can-table", str(corpus / CORPUS_CAN_FILE),
                "--vv-table", str(corpus / CORPUS_VV_FILE),
                "--out", str(tmp_path / "run"),
            ]
        )

        assert code == 2


@pytest.mark.integration
@pytest.mark.slow
class TestStagedRun:
    """Stage-by-stage CLI runs."""

    def test_stages_reproduce_e2e(self, forged, tmp_path):
        """Test running the stages one by one writes what e2e writes."""
        _, corpus = forged(23, "pseudocode", 4, clean=True)
        spec = str(corpus / CORPUS_SPEC_FILE)
        tables = ["--can-table", str(corpus / CORPUS_CAN_FILE), "--vv-table", str(corpus / CORPUS_VV_FILE)]
        staged = tmp_path / "staged"
        whole = tmp_path / "whole"

        assert main(["ingest", "--spec", spec, "--out", str(staged)]) == EXIT_OK
        assert main(["match", *tables, "--out", str(staged)]) == EXIT_OK
        assert main(["gen", "--spec", spec, "--out", str(staged)]) == EXIT_OK
        assert main(["run", "--rig-config", str(corpus / CORPUS_RIG_FILE), "--out", str(staged)]) == EXIT_OK
        assert main(["report", "--out", str(staged)]) == EXIT_OK
        assert main(["e2e", "--spec", spec, *tables, "--out", str(whole)]) == EXIT_OK

        for name in (MATCHES_FILE, CASES_FILE, PLAN_FILE):
            assert (staged / name).read_text(encoding="utf-8") == (whole / name).read_text(encoding="utf-8")
        staged_report = parse_report((staged / REPORT_RECORD_FILE).read_text(encoding="utf-8"))
        whole_report = parse_report((whole / REPORT_RECORD_FILE).read_text(encoding="utf-8"))
        assert staged_report.verdicts == whole_report.verdicts
        assert staged_report.tested == whole_report.tested

    def test_forge_then_e2e_with_manifest(self, tmp_path, capsys):
        """Test the CLI forges a corpus and scores a run against it."""
        corpus = tmp_path / "corpus"
        assert main(["forge", "--seed", "8", "--profile", "units", "--size", "3", "--clean", "--out", str(corpus)]) == EXIT_OK

        code = main(
            [
                "e2e",
                "--spec", str(corpus / CORPUS_SPEC_FILE),
                "--can-table", str(corpus / CORPUS_CAN_FILE),
                "--vv-table", str(corpus / CORPUS_VV_FILE),
                "--manifest", str(corpus / CORPUS_MANIFEST_FILE),
                "--out", str(tmp_path / "run"),
            ]
        )

        assert code == EXIT_OK
        assert "precision 1.0; recall 1.0" in capsys.readouterr().out
        scores = json.loads((tmp_path / "run" / SCORES_FILE).read_text(encoding="utf-8"))
        assert scores["metrics"]["cases"]["recall"] == 1.0
        assert scores["semantic_coverage"] == 1.0


@pytest.mark.e2e
@pytest.mark.slow
class TestReplayDeterminism:
    """Pipeline runs served from a recorded matcher store."""

    def test_replay_runs_are_bit_identical(self, forged, tmp_path, monkeypatch):
        """Test two replayed runs write the same artifacts as the recorded run - HAPPY PATH."""
        monkeypatch.setattr("apps.matchers.factory.live_transport", RulesTransport)
        _, corpus = forged(31, "mixed", 8)
        store = tmp_path / "store.json"
        recorded = tmp_path / "recorded"
        replays = [tmp_path / "replay-1", tmp_path / "replay-2"]

        run_e2e(pipeline_config(corpus, recorded, backend="remote", record_to=store))
        results = [
            run_e2e(pipeline_config(corpus, out, backend="replay", replay_store=store)) for out in replays
        ]

        for name in (TEST_OBJECTS_FILE, MATCHES_FILE, CASES_FILE, PLAN_FILE, PYTEST_MODULE_FILE):
            texts = {(out / name).read_bytes() for out in (recorded, *replays)}
            assert len(texts) == 1, name
        outcomes = [json.loads((out / RUN_FILE).read_text(encoding="utf-8"))["outcomes"] for out in replays]
        assert outcomes[0] == outcomes[1]
        # wall-clock timings and the interleaving of concurrent groups on the bus may differ
        first, second = (r.report.model_copy(update={"timings": {}, "can_log": ()}) for r in results)
        assert first == second
        assert results[0].exit_code == results[1].exit_code

    def test_unrecorded_request_fails_the_match_stage(self, forged, tmp_path):
        """Test replay against an empty store stops at matching - UNHAPPY PATH."""
        _, corpus = forged(31, "mixed", 2)
        store = tmp_path / "store.json"
        store.write_text("{}\n", encoding="utf-8")

        with pytest.raises(StageError) as exc_info:
            run_e2e(pipeline_config(corpus, tmp_path / "run", backend="replay", replay_store=store))

        assert exc_info.value.stage == "matching"
