"""Render test cases as a line-oriented plan or a pytest module, and read
plans back.

Plan steps (case id always second)::

    CASE <id> <METHOD> <endpoint> <provenance>
    PUT <id> <endpoint> <payload>
    GET <id> <endpoint>
    VV_SET <id> <key> <raw>
    VV_EXPECT <id> <key> <raw>
    API_EXPECT <id> <key> <value>

Payloads, raws and values are JSON.
"""

import json
import re
from dataclasses import dataclass, field
from typing import Any

import structlog
from jinja2 import Environment, PackageLoader, StrictUndefined, select_autoescape
from pydantic import ValidationError

from apps.tester.constants import PLAN_HEADER
from apps.tester.core.exceptions import ArtifactError
from apps.tester.domain.entities.testcase import TestCase
from apps.tester.settings import settings

logger = structlog.get_logger(__name__)

AUTO_RIG = "auto"


def _json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, ensure_ascii=False)


def _identifier(text: str) -> str:
    return re.sub(r"\W+", "_", text).strip("_")


_env = Environment(
    loader=PackageLoader("apps.tester.generation", "templates"),
    autoescape=select_autoescape(enabled_extensions=("html",)),
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)
_env.filters["json"] = _json
_env.filters["pyrepr"] = repr
_env.filters["identifier"] = _identifier


@dataclass
class TestPlan:
    """A parsed plan: where to run and what."""

    __test__ = False

    rig_url: str = AUTO_RIG
    cases: list[TestCase] = field(default_factory=list)


def render_test_plan(cases: list[TestCase], rig_url: str = AUTO_RIG) -> str:
    """Render cases into the plan document; identical input gives identical bytes."""
    return _env.get_template("plan.j2").render(header=PLAN_HEADER, rig_url=rig_url, cases=cases)


def render_pytest_module(cases: list[TestCase], rig_url: str) -> str:
    """Render cases into a self-contained pytest module talking to ``rig_url``."""
    return _env.get_template("pytest_module.j2").render(
        rig_url=rig_url,
        cases=cases,
        tolerance=settings.NUMERIC_TOLERANCE,
    )


def parse_plan(document: str) -> TestPlan:
    """Read a plan back into test cases.

    Raises:
        ArtifactError: Unknown step, malformed JSON, or a step for an
            undeclared case
    """
    plan = TestPlan()
    drafts: dict[str, dict[str, Any]] = {}

    for number, line in enumerate(document.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        step, _, rest = line.partition(" ")
        try:
            if step == "RIG":
                plan.rig_url = rest.strip()
            elif step == "CASE":
                case_id, method, endpoint, provenance = rest.split(" ", 3)
                drafts[case_id] = {
                    "id": case_id,
                    "method": method,
                    "endpoint": endpoint,
                    "provenance": tuple(json.loads(provenance)),
                }
            else:
                _apply_step(drafts, step, rest)
        except (ValueError, KeyError) as e:
            raise ArtifactError(f"Plan line {number} is malformed: {line}", {"line": number}) from e

    try:
        plan.cases = [TestCase.model_validate(draft) for draft in drafts.values()]
    except ValidationError as e:
        raise ArtifactError("Plan describes an invalid case", {"errors": str(e)}) from e
    logger.debug("plan_parsed", cases=len(plan.cases), rig=plan.rig_url)
    return plan


def _apply_step(drafts: dict[str, dict[str, Any]], step: str, rest: str) -> None:
    case_id, _, args = rest.partition(" ")
    draft = drafts[case_id]
    match step:
        case "PUT":
            _, payload = args.split(" ", 1)
            draft["api_payload"] = json.loads(payload)
        case "GET":
            pass
        case "VV_SET" | "VV_EXPECT" | "API_EXPECT":
            key, value = args.split(" ", 1)
            target = {"VV_SET": "vv_preset", "VV_EXPECT": "expected_vv", "API_EXPECT": "expected_api"}[step]
            draft.setdefault(target, {})[key] = json.loads(value)
        case _:
            raise ValueError(f"unknown step {step}")
