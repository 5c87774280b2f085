"""Unit tests for executing cases against a rig."""

import pytest

from apps.rig.models import FaultKind, FaultSpec
from apps.rig.server import start_rig
from apps.tester.domain.entities.spec import HttpMethod
from apps.tester.domain.entities.testcase import TestCase, Verdict
from apps.tester.execution.runner import group_cases, run_cases, values_agree
from apps.tester.generation.plan import parse_plan, render_test_plan


def put_case(case_id: str, payload: dict, expected: dict, endpoint: str = "/climate") -> TestCase:
    return TestCase(
        id=case_id, method=HttpMethod.PUT, endpoint=endpoint, api_payload=payload, expected_vv=expected
    )


def get_case(case_id: str, preset: dict, expected: dict, endpoint: str = "/climate") -> TestCase:
    return TestCase(
        id=case_id, method=HttpMethod.GET, endpoint=endpoint, vv_preset=preset, expected_api=expected
    )


@pytest.mark.unit
class TestValuesAgree:
    """Test suite for values_agree."""

    @pytest.mark.parametrize(
        ("expected", "actual", "agree"),
        [
            (50.0, 50, True),
            (1.0, 1.0 + 1e-12, True),
            (50.0, 50.5, False),
            ("ECONOMY", "ECONOMY", True),
            ("ECONOMY", "STANDARD", False),
            (3, None, False),
        ],
    )
    def test_comparison(self, expected, actual, agree):
        """Test numbers compare within tolerance and the rest by equality."""
        assert values_agree(expected, actual) is agree


@pytest.mark.unit
class TestGroupCases:
    """Test suite for group_cases."""

    def test_shared_vv_key_joins_endpoints(self):
        """Test endpoints touching one VV key end up in one group."""
        a = put_case("a", {"x": 1}, {"Vv1": 1.0}, endpoint="/a")
        b = put_case("b", {"y": 1}, {"Vv2": 1.0}, endpoint="/b")
        c = get_case("c", {"Vv1": 1.0}, {"z": 1}, endpoint="/c")
        d = put_case("d", {"x": 2}, {"Vv3": 2.0}, endpoint="/a")

        groups = group_cases([a, b, c, d])

        assert [[case.id for case in group] for group in groups] == [["a", "c", "d"], ["b"]]


@pytest.mark.unit
class TestRunCases:
    """Test suite for run_cases against an in-process rig."""

    async def test_verdicts(self, in_process_rig):
        """Test pass, failed assertion, refused request and admin error."""
        cases = [
            put_case("ok-put", {"acMode": "ECONOMY"}, {"VvAc": 11.0}),
            put_case("bad-value", {"fanLevel": 5}, {"VvFan": 51.0}),
            put_case("refused", {"acMode": "TURBO"}, {"VvAc": 12.0}),
            get_case("ok-get", {"VvFan": 30.0}, {"fanLevel": 3}),
            get_case("no-key", {"Nope": 1.0}, {"fanLevel": 3}),
        ]

        outcomes = await run_cases(cases, in_process_rig)

        assert [(o.case_id, o.verdict) for o in outcomes] == [
            ("ok-put", Verdict.PASS),
            ("bad-value", Verdict.FAIL),
            ("refused", Verdict.FAIL),
            ("ok-get", Verdict.PASS),
            ("no-key", Verdict.ERROR),
        ]
        failure = outcomes[1].failed_assertions[0]
        assert (failure.key, failure.expected, failure.actual) == ("VvFan", 51.0, 50.0)
        assert outcomes[2].failed_assertions[0].actual == 400
        assert "admin route failed" in outcomes[4].log

    async def test_fault_is_caught(self, in_process_rig):
        """Test a seeded fault turns a passing case into a failure."""
        case = get_case("get-fan", {"VvFan": 30.0}, {"fanLevel": 3})
        in_process_rig.inject_fault(FaultSpec(kind=FaultKind.WRONG_SCALE, target="/climate", factor=1000))

        outcomes = await run_cases([case], in_process_rig)

        assert outcomes[0].verdict is Verdict.FAIL
        assert outcomes[0].failed_assertions[0].actual == 3000

    async def test_unreachable_rig_errors_every_case(self):
        """Test no rig means errors, never failures."""
        cases = [put_case("a", {"acMode": "ECONOMY"}, {"VvAc": 11.0})]

        outcomes = await run_cases(cases, "http://127.0.0.1:9")

        assert [o.verdict for o in outcomes] == [Verdict.ERROR]
        assert outcomes[0].log.startswith("rig unreachable")

    async def test_plan_text_runs_like_the_cases(self, in_process_rig, rig_config):
        """Test executing the rendered plan gives the verdicts of executing the cases."""
        cases = [
            put_case("put-ac", {"acMode": "STANDARD"}, {"VvAc": 10.0}),
            put_case("put-fan", {"fanLevel": 7}, {"VvFan": 70.0}),
            put_case("put-fan-wrong", {"fanLevel": 2}, {"VvFan": 2.0}),
            put_case("put-seat", {"seatHeat": True}, {"VvSeat": 1.0}),
            put_case("put-departure", {"departure": "2024-01-01T06:30:00"}, {"VvDepHr": 6.0, "VvDepMin": 30.0}),
            get_case("get-fan", {"VvFan": 40.0}, {"fanLevel": 4}),
            get_case("get-ac-wrong", {"VvAc": 11.0}, {"acMode": "STANDARD"}),
            get_case("get-departure", {"VvDepHr": 21.0, "VvDepMin": 5.0}, {"departure": "21:05"}),
            get_case("no-key", {"Nope": 1.0}, {"fanLevel": 3}),
        ]
        plan = parse_plan(render_test_plan(cases))

        direct = await run_cases(cases, in_process_rig)
        with start_rig(rig_config, mode="in_process") as fresh_rig:
            planned = await run_cases(plan.cases, fresh_rig)

        assert [c.id for c in plan.cases] == [c.id for c in cases]
        assert [(o.case_id, o.verdict, o.failed_assertions) for o in planned] == [
            (o.case_id, o.verdict, o.failed_assertions) for o in direct
        ]
        assert {o.verdict for o in direct} == {Verdict.PASS, Verdict.FAIL, Verdict.ERROR}
