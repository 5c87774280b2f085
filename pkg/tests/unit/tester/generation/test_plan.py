"""Unit tests for plan rendering and parsing."""

import ast

import pytest

from apps.tester.constants import PLAN_HEADER
from apps.tester.core.exceptions import ArtifactError
from apps.tester.domain.entities.spec import HttpMethod
from apps.tester.domain.entities.testcase import TestCase
from apps.tester.generation.plan import AUTO_RIG, parse_plan, render_pytest_module, render_test_plan

CASES = [
    TestCase(
        id="put/climate#acMode.1",
        method=HttpMethod.PUT,
        endpoint="/climate",
        api_payload={"acMode": "ECONOMY"},
        expected_vv={"VvAc": 11.0},
        provenance=("PUT /climate#acMode",),
    ),
    TestCase(
        id="get/climate#departure.2",
        method=HttpMethod.GET,
        endpoint="/climate",
        vv_preset={"VvDepMin": 45.0, "VvDepHr": 7.0},
        expected_api={"departure": "07:45"},
        provenance=("GET /climate#departure/hours", "GET /climate#departure/minutes"),
    ),
]


@pytest.mark.unit
class TestRenderTestPlan:
    """Test suite for render_test_plan."""

    def test_steps(self):
        """Test the plan lists one step per line, keys sorted."""
        document = render_test_plan(CASES, "http://127.0.0.1:8100")
        lines = [line for line in document.splitlines() if line]

        assert lines[0] == PLAN_HEADER
        assert lines[1] == "RIG http://127.0.0.1:8100"
        assert lines[2] == 'CASE put/climate#acMode.1 PUT /climate ["PUT /climate#acMode"]'
        assert lines[3] == 'PUT put/climate#acMode.1 /climate {"acMode": "ECONOMY"}'
        assert lines[4] == "VV_EXPECT put/climate#acMode.1 VvAc 11.0"
        assert lines[6:9] == [
            "VV_SET get/climate#departure.2 VvDepHr 7.0",
            "VV_SET get/climate#departure.2 VvDepMin 45.0",
            "GET get/climate#departure.2 /climate",
        ]
        assert lines[9] == 'API_EXPECT get/climate#departure.2 departure "07:45"'

    def test_stable_bytes(self):
        """Test identical input renders identical text."""
        assert render_test_plan(CASES) == render_test_plan(list(CASES))


@pytest.mark.unit
class TestParsePlan:
    """Test suite for parse_plan."""

    def test_reads_back_rendered_plan(self):
        """Test a rendered plan parses back to the same cases."""
        plan = parse_plan(render_test_plan(CASES, "http://rig:1"))

        assert plan.rig_url == "http://rig:1"
        assert plan.cases == CASES

    def test_auto_rig_default(self):
        """Test a plan without a RIG line targets the auto rig."""
        assert parse_plan(PLAN_HEADER + "\n").rig_url == AUTO_RIG

    @pytest.mark.parametrize(
        "document",
        [
            "VV_SET nowhere VvAc 1",
            'CASE c1 PUT /x ["p"]\nJUMP c1 /x',
            'CASE c1 PUT /x ["p"]\nPUT c1 /x {broken',
            "CASE c1 PUT /x",
        ],
    )
    def test_malformed_lines(self, document):
        """Test malformed steps raise ArtifactError."""
        with pytest.raises(ArtifactError):
            parse_plan(document)

    def test_incomplete_case(self):
        """Test a PUT case without expectations is rejected."""
        document = 'CASE c1 PUT /x ["p"]\nPUT c1 /x {"a": 1}\n'

        with pytest.raises(ArtifactError):
            parse_plan(document)


@pytest.mark.unit
class TestRenderPytestModule:
    """Test suite for render_pytest_module."""

    def test_valid_python_with_one_test_per_case(self):
        """Test the module parses and defines a test per case."""
        source = render_pytest_module(CASES, "http://127.0.0.1:8100")

        tree = ast.parse(source)
        tests = [node.name for node in tree.body if isinstance(node, ast.FunctionDef) and node.name.startswith("test_")]

        assert tests == ["test_put_climate_acMode_1", "test_get_climate_departure_2"]
        assert 'RIG_URL = "http://127.0.0.1:8100"' in source
