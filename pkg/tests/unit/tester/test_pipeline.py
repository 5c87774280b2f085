"""Unit tests for the pipeline's accounting and exit-code helpers."""

import pytest

from apps.tester.core.exceptions import ArtifactError
from apps.tester.domain.entities.matching import SkippedAttribute
from apps.tester.domain.entities.report import ApiVerdict
from apps.tester.domain.entities.spec import (
    ApiProperty,
    DeclaredType,
    DomainKind,
    HttpMethod,
    TestObjectSet,
    ValueDomain,
)
from apps.tester.domain.entities.testcase import FailedAssertion, TestCase, TestOutcome, Verdict
from apps.tester.pipeline import (
    EXIT_FAILED,
    EXIT_OK,
    check_accounting,
    exit_code,
    tested_properties,
)


def prop(key: str) -> ApiProperty:
    return ApiProperty(
        key=key,
        declared_type=DeclaredType.INTEGER,
        domain=ValueDomain(kind=DomainKind.NUMERIC_RANGE, minimum=0, maximum=10),
    )


OBJECTS = [
    TestObjectSet(endpoint="/climate", method=HttpMethod.PUT, properties=(prop("fanLevel"), prop("departure"))),
    TestObjectSet(endpoint="/seat", method=HttpMethod.GET, properties=(prop("heat"),)),
]


def skip(api_id: str, key: str) -> SkippedAttribute:
    return SkippedAttribute(api_id=api_id, key=key, stage="generation", reason="missing_range")


def verdict(outcome: Verdict, endpoint: str = "/climate") -> ApiVerdict:
    failures = (FailedAssertion(key="VvFan", expected=10.0, actual=0.0),) if outcome is Verdict.FAIL else ()
    cases = (TestOutcome(case_id=f"{endpoint}.1", verdict=outcome, failed_assertions=failures),)
    return ApiVerdict(endpoint=endpoint, method=HttpMethod.PUT, outcome=outcome, case_outcomes=cases)


@pytest.mark.unit
class TestTestedProperties:
    """Test suite for tested_properties."""

    def test_roles_fold_into_their_property(self):
        """Test datetime role provenance counts for the property itself."""
        case = TestCase(
            id="put/climate#departure.1",
            method=HttpMethod.PUT,
            endpoint="/climate",
            api_payload={"departure": "2024-01-01T07:45:00"},
            expected_vv={"VvDepHr": 7.0, "VvDepMin": 45.0},
            provenance=("PUT /climate#departure/hours", "PUT /climate#departure/minutes"),
        )

        assert tested_properties([case], []) == ["PUT /climate#departure"]

    def test_skipped_property_is_not_tested(self):
        """Test a property named by a skip is left out even when a case covers it."""
        case = TestCase(
            id="put/climate#fanLevel.1",
            method=HttpMethod.PUT,
            endpoint="/climate",
            api_payload={"fanLevel": 1},
            expected_vv={"VvFan": 10.0},
            provenance=("PUT /climate#fanLevel",),
        )

        assert tested_properties([case], [skip("PUT /climate", "fanLevel")]) == []


@pytest.mark.unit
class TestCheckAccounting:
    """Test suite for check_accounting."""

    def test_partition_passes(self):
        """Test tested and skipped covering every property without overlap."""
        check_accounting(
            OBJECTS,
            ["PUT /climate#departure", "PUT /climate#fanLevel"],
            [skip("GET /seat", "heat")],
        )

    def test_unaccounted_property_fails(self):
        """Test a property neither tested nor skipped raises ArtifactError."""
        with pytest.raises(ArtifactError) as exc_info:
            check_accounting(OBJECTS, ["PUT /climate#fanLevel"], [skip("GET /seat", "heat")])

        assert exc_info.value.details["unaccounted"] == ["PUT /climate#departure"]

    def test_overlap_fails(self):
        """Test a property both tested and skipped raises ArtifactError."""
        with pytest.raises(ArtifactError) as exc_info:
            check_accounting(
                OBJECTS,
                ["PUT /climate#departure", "PUT /climate#fanLevel", "GET /seat#heat"],
                [skip("GET /seat", "heat")],
            )

        assert exc_info.value.details["overlap"] == ["GET /seat#heat"]

    def test_unknown_property_fails(self):
        """Test a skip for a property nobody extracted raises ArtifactError."""
        with pytest.raises(ArtifactError) as exc_info:
            check_accounting(
                OBJECTS,
                ["PUT /climate#departure", "PUT /climate#fanLevel"],
                [skip("GET /seat", "heat"), skip("GET /seat", "ghost")],
            )

        assert exc_info.value.details["unknown"] == ["GET /seat#ghost"]


@pytest.mark.unit
class TestExitCode:
    """Test suite for exit_code."""

    def test_empty_run_passes(self):
        """Test no verdicts at all exits 0."""
        assert exit_code([]) == EXIT_OK

    def test_all_passed(self):
        """Test only passing APIs exit 0."""
        assert exit_code([verdict(Verdict.PASS), verdict(Verdict.PASS, "/seat")]) == EXIT_OK

    @pytest.mark.parametrize("outcome", [Verdict.FAIL, Verdict.ERROR])
    def test_any_failure_or_error(self, outcome):
        """Test one failed or errored API exits 1."""
        assert exit_code([verdict(Verdict.PASS), verdict(outcome, "/seat")]) == EXIT_FAILED
