"""Execute test cases against a rig.

PUT cases send the payload and read every expected VV key back through
the admin route. GET cases preset VV state, call the endpoint and compare
the record. Cases that touch a common endpoint or VV key run one after
another; disjoint groups run concurrently.
"""

import asyncio
import math
from collections.abc import Sequence
from typing import Any

import httpx
import structlog

from apps.rig.server import RigHandle
from apps.tester.constants import HTTP_STATUS_OK
from apps.tester.core.exceptions import RigUnreachableError
from apps.tester.domain.entities.spec import HttpMethod
from apps.tester.domain.entities.testcase import FailedAssertion, TestCase, TestOutcome, Verdict
from apps.tester.execution.client import RigClient
from apps.tester.generation.plan import TestPlan
from apps.tester.settings import settings

logger = structlog.get_logger(__name__)


def values_agree(expected: Any, actual: Any, tolerance: float | None = None) -> bool:
    """Numbers within an absolute tolerance, anything else by equality."""
    tolerance = settings.NUMERIC_TOLERANCE if tolerance is None else tolerance
    if _is_number(expected) and _is_number(actual):
        return math.isclose(expected, actual, rel_tol=0.0, abs_tol=tolerance)
    return bool(expected == actual)


def _is_number(value: Any) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


def group_cases(cases: Sequence[TestCase]) -> list[list[TestCase]]:
    """Partition cases so no two groups share an endpoint or a VV key.

    Union-find over endpoints and VV keys; groups and the cases inside
    them keep input order.
    """
    parent: dict[str, str] = {}

    def find(node: str) -> str:
        parent.setdefault(node, node)
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    def union(a: str, b: str) -> None:
        parent[find(a)] = find(b)

    for case in cases:
        anchor = f"endpoint:{case.endpoint}"
        for key in sorted(case.vv_keys):
            union(anchor, f"vv:{key}")
        find(anchor)

    groups: dict[str, list[TestCase]] = {}
    for case in cases:
        groups.setdefault(find(f"endpoint:{case.endpoint}"), []).append(case)
    return list(groups.values())


async def execute_cases(cases: Sequence[TestCase], client: RigClient) -> list[TestOutcome]:
    """Run cases through an open client; outcomes follow input order.

    An unreachable rig turns every case into an error, never a failure.
    """
    try:
        await client.health()
    except RigUnreachableError as e:
        logger.error("rig_unreachable", error=e.message, cases=len(cases))
        return [
            TestOutcome(case_id=case.id, verdict=Verdict.ERROR, log=f"rig unreachable: {e.message}")
            for case in cases
        ]

    async def run_group(group: list[TestCase]) -> list[TestOutcome]:
        return [await _run_case(case, client) for case in group]

    groups = group_cases(cases)
    per_group = await asyncio.gather(*(run_group(group) for group in groups))
    by_id = {outcome.case_id: outcome for outcomes in per_group for outcome in outcomes}
    outcomes = [by_id[case.id] for case in cases]
    logger.info(
        "cases_executed",
        cases=len(outcomes),
        groups=len(groups),
        failed=sum(o.verdict is Verdict.FAIL for o in outcomes),
        errors=sum(o.verdict is Verdict.ERROR for o in outcomes),
    )
    return outcomes


async def run_cases(cases: Sequence[TestCase], rig: str | RigHandle) -> list[TestOutcome]:
    async with RigClient.connect(rig) as client:
        return await execute_cases(cases, client)


def run_plan(plan: TestPlan | Sequence[TestCase], rig: str | RigHandle) -> list[TestOutcome]:
    """Execute a plan against a rig address or handle.

    Args:
        plan: Parsed plan, or cases directly
        rig: Rig base URL or running handle; overrides the plan's RIG line

    Returns:
        One outcome per case, in plan order
    """
    cases = plan.cases if isinstance(plan, TestPlan) else list(plan)
    return asyncio.run(run_cases(cases, rig))


async def _run_case(case: TestCase, client: RigClient) -> TestOutcome:
    log: list[str] = []
    try:
        if case.method is HttpMethod.PUT:
            failures = await _run_put(case, client, log)
        else:
            failures = await _run_get(case, client, log)
    except _AdminError as e:
        log.append(f"admin route failed: {e}")
        return TestOutcome(case_id=case.id, verdict=Verdict.ERROR, log="\n".join(log))
    except (httpx.TransportError, ValueError) as e:
        log.append(f"transport failed: {e!r}")
        return TestOutcome(case_id=case.id, verdict=Verdict.ERROR, log="\n".join(log))

    verdict = Verdict.FAIL if failures else Verdict.PASS
    if failures:
        logger.info("case_failed", case=case.id, failures=len(failures))
    return TestOutcome(
        case_id=case.id,
        verdict=verdict,
        failed_assertions=tuple(failures),
        log="\n".join(log),
    )


class _AdminError(Exception):
    """Admin route refused a request the plan depends on."""


async def _run_put(case: TestCase, client: RigClient, log: list[str]) -> list[FailedAssertion]:
    try:
        await client.put(case.endpoint, case.api_payload)
    except httpx.HTTPStatusError as e:
        status = e.response.status_code
        log.append(f"PUT {case.endpoint} -> {status}")
        return [FailedAssertion(key="http_status", expected=HTTP_STATUS_OK, actual=status)]
    log.append(f"PUT {case.endpoint} {case.api_payload}")

    failures: list[FailedAssertion] = []
    for key, expected in sorted(case.expected_vv.items()):
        actual = await _admin(client.vv_get(key))
        log.append(f"VV {key} expected {expected} actual {actual}")
        if not values_agree(expected, actual):
            failures.append(FailedAssertion(key=key, expected=expected, actual=actual))
    return failures


async def _run_get(case: TestCase, client: RigClient, log: list[str]) -> list[FailedAssertion]:
    for key, raw in sorted(case.vv_preset.items()):
        await _admin(client.vv_set(key, raw))
        log.append(f"VV_SET {key} {raw}")
    try:
        record = await client.get(case.endpoint)
    except httpx.HTTPStatusError as e:
        status = e.response.status_code
        log.append(f"GET {case.endpoint} -> {status}")
        return [FailedAssertion(key="http_status", expected=HTTP_STATUS_OK, actual=status)]
    log.append(f"GET {case.endpoint} {record}")

    failures: list[FailedAssertion] = []
    for key, expected in sorted(case.expected_api.items()):
        actual = record.get(key)
        if not values_agree(expected, actual):
            failures.append(FailedAssertion(key=key, expected=expected, actual=actual))
    return failures


async def _admin(call: Any) -> Any:
    try:
        return await call
    except httpx.HTTPStatusError as e:
        raise _AdminError(f"{e.request.method} {e.request.url.path} -> {e.response.status_code}") from e
