"""Test-case generation and plan rendering."""

from apps.tester.generation.generator import (
    GenerationConfig,
    decompose_datetime,
    generate_test_cases,
)
from apps.tester.generation.plan import (
    TestPlan,
    parse_plan,
    render_pytest_module,
    render_test_plan,
)

__all__ = [
    "GenerationConfig",
    "TestPlan",
    "decompose_datetime",
    "generate_test_cases",
    "parse_plan",
    "render_pytest_module",
    "render_test_plan",
]
