"""Turn complete match chains into PUT and GET test cases.

PUT cases send an API payload and expect VV state; GET cases preset VV
state and expect the API record. Every property of the input either yields
at least one case or one SkippedAttribute.
"""

import math
from collections.abc import Callable, Iterable, Sequence
from datetime import datetime
from fractions import Fraction
from typing import Any

import structlog
from pydantic import BaseModel, ConfigDict, Field

from apps.tester.constants import (
    DATETIME_SAMPLE_DATE,
    DATETIME_SAMPLES,
    SKIP_DOMAIN_VIOLATION,
    SKIP_MISSING_RANGE,
    SKIP_MISSING_ROLE,
    SKIP_MISSING_UNIT,
    SKIP_NO_TEST_VALUES,
    SKIP_NO_VALUE_MATCH,
    SKIP_UNSUPPORTED_TYPE,
    STAGE_GENERATION,
)
from apps.tester.core.exceptions import RoleMissingError
from apps.tester.domain.entities.matching import DatetimeRole, MatchResult, SkippedAttribute
from apps.tester.domain.entities.spec import DeclaredType, DomainKind, HttpMethod
from apps.tester.domain.entities.testcase import TestCase
from apps.tester.domain.entities.units import ConversionPlan

logger = structlog.get_logger(__name__)

# (key, minimum, maximum) -> extra API values to try
ValueSuggester = Callable[[str, float, float], Sequence[float]]


class GenerationConfig(BaseModel):
    """Knobs of case generation; the defaults give the standard suite."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ranges: dict[str, tuple[float, float]] = Field(
        default_factory=dict,
        description="Range overrides keyed by property key or 'METHOD /path#key'",
    )
    datetime_samples: tuple[tuple[int, int], ...] = DATETIME_SAMPLES
    sample_requests: dict[str, dict[str, Any]] = Field(
        default_factory=dict,
        description="Endpoint path -> sample PUT record; each yields one smoke case",
    )
    suggest_values: ValueSuggester | None = Field(
        default=None,
        description="Extra numeric values proposed by a matcher backend",
    )


def decompose_datetime(
    value: datetime,
    targets: Sequence[tuple[str, DatetimeRole]],
) -> dict[str, int]:
    """Split a datetime onto hour and minute VV keys.

    Args:
        value: Source datetime; seconds are truncated
        targets: (vv_key, role) pairs

    Returns:
        vv_key -> hour in [0, 23] or minute in [0, 59]

    Raises:
        RoleMissingError: targets lack an hours or a minutes key

    Example:
        >>> decompose_datetime(datetime(2024, 1, 1, 7, 45), [("AlarmHr", DatetimeRole.HOURS),
        ...                                                   ("AlarmMin", DatetimeRole.MINUTES)])
        {'AlarmHr': 7, 'AlarmMin': 45}
    """
    roles = {role for _, role in targets}
    missing = [role.value for role in DatetimeRole if role not in roles]
    if missing:
        raise RoleMissingError(f"No VV key for {', '.join(missing)}", {"missing": missing})
    parts = {DatetimeRole.HOURS: value.hour, DatetimeRole.MINUTES: value.minute}
    return {key: parts[role] for key, role in targets}


def generate_test_cases(
    results: Sequence[MatchResult],
    config: GenerationConfig | None = None,
) -> tuple[list[TestCase], list[SkippedAttribute]]:
    """Generate the PUT/GET suite for a list of complete chains.

    Args:
        results: Match results, usually in pipeline order
        config: Generation knobs

    Returns:
        (cases, skipped), both deterministic in the order of ``results``
    """
    config = config or GenerationConfig()
    cases: list[TestCase] = []
    skipped: list[SkippedAttribute] = []

    for group in _group(results):
        head = group[0]
        try:
            built = _cases_for(group, config)
            if not built:
                raise _Skip(SKIP_NO_TEST_VALUES)
        except _Skip as skip:
            skipped.append(
                SkippedAttribute(
                    api_id=head.api_id,
                    key=head.property.key,
                    stage=STAGE_GENERATION,
                    reason=skip.reason,
                    detail=skip.detail,
                )
            )
            logger.info(
                "attribute_skipped",
                api=head.api_id,
                key=head.property.key,
                reason=skip.reason,
            )
            continue
        cases.extend(built)

    cases.extend(_smoke_cases(results, config))
    logger.info("test_cases_generated", cases=len(cases), skipped=len(skipped))
    return cases, skipped


class _Skip(Exception):  # noqa: N818
    def __init__(self, reason: str, detail: str = "") -> None:
        super().__init__(reason)
        self.reason = reason
        self.detail = detail


def _group(results: Iterable[MatchResult]) -> list[list[MatchResult]]:
    """Results per (api, property); datetime roles land in one group."""
    groups: dict[tuple[str, str], list[MatchResult]] = {}
    for result in results:
        groups.setdefault((result.api_id, result.property.key), []).append(result)
    return list(groups.values())


def _cases_for(group: list[MatchResult], config: GenerationConfig) -> list[TestCase]:
    head = group[0]
    domain = head.property.domain
    if domain.kind is DomainKind.DATETIME or head.role is not None:
        return _datetime_cases(group, config)
    if domain.is_enumerated:
        return _enum_cases(head)
    if domain.kind is DomainKind.NUMERIC_RANGE or head.property.is_numeric:
        return _numeric_cases(head, config)
    raise _Skip(SKIP_UNSUPPORTED_TYPE, f"{head.property.declared_type} values cannot be sampled")


def _case_id(result: MatchResult, index: int) -> str:
    return f"{result.method.lower()}{result.endpoint}#{result.property.key}.{index}"


def _enum_cases(result: MatchResult) -> list[TestCase]:
    api_to_can, can_to_vv = result.value_chain
    if api_to_can is None or can_to_vv is None:
        raise _Skip(SKIP_NO_VALUE_MATCH, "no value chain")
    domain = result.property.domain

    # (api label, can label, vv raw) through both mappings
    chains: list[tuple[str, str, int]] = []
    for api_label, can_label in api_to_can.pairs:
        for vv_label in can_to_vv.targets(can_label):
            if vv_label in result.vv.encoding:
                chains.append((api_label, can_label, result.vv.encoding[vv_label]))
    if not chains:
        raise _Skip(SKIP_NO_VALUE_MATCH, "no label reaches the VV encoding")

    cases: list[TestCase] = []
    if result.method is HttpMethod.PUT:
        seen: set[str] = set()
        for api_label, _, vv_raw in chains:
            # Mappings are in encoding order, so the first chain is the primary label
            if api_label in seen:
                continue
            seen.add(api_label)
            cases.append(
                TestCase(
                    id=_case_id(result, len(cases) + 1),
                    method=HttpMethod.PUT,
                    endpoint=result.endpoint,
                    api_payload={result.property.key: domain.api_value(api_label)},
                    expected_vv={result.vv.key: float(vv_raw)},
                    provenance=(result.id,),
                )
            )
    else:
        for api_label, _, vv_raw in chains:
            cases.append(
                TestCase(
                    id=_case_id(result, len(cases) + 1),
                    method=HttpMethod.GET,
                    endpoint=result.endpoint,
                    vv_preset={result.vv.key: float(vv_raw)},
                    expected_api={result.property.key: domain.api_value(api_label)},
                    provenance=(result.id,),
                )
            )
    return cases


def _numeric_cases(result: MatchResult, config: GenerationConfig) -> list[TestCase]:
    plan = result.conversion
    if not isinstance(plan, ConversionPlan):
        detail = ", ".join(plan.missing) if plan is not None else "no conversion plan"
        raise _Skip(SKIP_MISSING_UNIT, detail)

    values = _sample_values(result, config)
    prop = result.property
    if not values:
        raise _Skip(SKIP_NO_TEST_VALUES, f"no {prop.declared_type} value lies in the declared domain")
    cases: list[TestCase] = []
    for value in values:
        vv_raw = float(plan.api_to_vv(Fraction(value)))
        if result.method is HttpMethod.PUT:
            case = TestCase(
                id=_case_id(result, len(cases) + 1),
                method=HttpMethod.PUT,
                endpoint=result.endpoint,
                api_payload={prop.key: value},
                expected_vv={result.vv.key: vv_raw},
                provenance=(result.id,),
            )
        else:
            case = TestCase(
                id=_case_id(result, len(cases) + 1),
                method=HttpMethod.GET,
                endpoint=result.endpoint,
                vv_preset={result.vv.key: vv_raw},
                expected_api={prop.key: value},
                provenance=(result.id,),
            )
        cases.append(case)
    return cases


def _sample_values(result: MatchResult, config: GenerationConfig) -> list[int | float]:
    """{min, max, midpoint}, then any in-domain backend suggestions."""
    prop = result.property
    domain = prop.domain
    override = config.ranges.get(f"{result.api_id}#{prop.key}") or config.ranges.get(prop.key)
    if override is not None:
        low, high = override
        if low > high or not (domain.contains(low) and domain.contains(high)):
            raise _Skip(SKIP_DOMAIN_VIOLATION, f"range {low}..{high} leaves the declared domain")
    elif domain.minimum is not None and domain.maximum is not None:
        low, high = domain.minimum, domain.maximum
    else:
        raise _Skip(SKIP_MISSING_RANGE, "property declares no minimum and maximum")

    integral = prop.declared_type is DeclaredType.INTEGER
    mid = (Fraction(low) + Fraction(high)) / 2
    candidates: list[Any] = [low, high, math.floor(mid) if integral else float(mid)]
    if config.suggest_values is not None:
        candidates.extend(config.suggest_values(prop.key, low, high))

    values: list[int | float] = []
    for candidate in candidates:
        value: int | float = int(candidate) if integral else float(candidate)
        if integral and value != candidate:
            continue
        if not domain.contains(value) or not low <= value <= high:
            logger.warning("sample_value_rejected", key=prop.key, value=candidate)
            continue
        if value not in values:
            values.append(value)
    return values


def _datetime_cases(group: list[MatchResult], config: GenerationConfig) -> list[TestCase]:
    head = group[0]
    targets = [(result.vv.key, result.role) for result in group if result.role is not None]
    provenance = tuple(result.id for result in group)
    cases: list[TestCase] = []
    for hour, minute in config.datetime_samples:
        moment = datetime.fromisoformat(f"{DATETIME_SAMPLE_DATE}T{hour:02d}:{minute:02d}:00")
        try:
            parts = decompose_datetime(moment, targets)
        except RoleMissingError as e:
            raise _Skip(SKIP_MISSING_ROLE, e.message) from e
        state = {key: float(value) for key, value in parts.items()}
        if head.method is HttpMethod.PUT:
            case = TestCase(
                id=_case_id(head, len(cases) + 1),
                method=HttpMethod.PUT,
                endpoint=head.endpoint,
                api_payload={head.property.key: moment.isoformat()},
                expected_vv=state,
                provenance=provenance,
            )
        else:
            case = TestCase(
                id=_case_id(head, len(cases) + 1),
                method=HttpMethod.GET,
                endpoint=head.endpoint,
                vv_preset=state,
                expected_api={head.property.key: moment.strftime("%H:%M")},
                provenance=provenance,
            )
        cases.append(case)
    return cases


def _smoke_cases(results: Sequence[MatchResult], config: GenerationConfig) -> list[TestCase]:
    """One PUT per sample request, expecting the VV state its chains imply."""
    cases: list[TestCase] = []
    for path, sample in sorted(config.sample_requests.items()):
        chains = {
            r.property.key: r
            for r in results
            if r.endpoint == path and r.method is HttpMethod.PUT and r.role is None
        }
        payload: dict[str, Any] = {}
        expected: dict[str, float] = {}
        signals: dict[str, float] = {}
        for key, value in sample.items():
            result = chains.get(key)
            if result is None or not result.property.domain.contains(value):
                continue
            vv_raw, can_raw = _expected_state(result, value)
            if vv_raw is None:
                continue
            # Two properties on one signal must agree on its raw value
            if signals.get(result.can.key, can_raw) != can_raw:
                logger.warning("smoke_case_conflict", endpoint=path, signal=result.can.key)
                payload = {}
                break
            signals[result.can.key] = can_raw
            payload[key] = value
            expected[result.vv.key] = vv_raw
        if not payload:
            continue
        cases.append(
            TestCase(
                id=f"put{path}#smoke.1",
                method=HttpMethod.PUT,
                endpoint=path,
                api_payload=payload,
                expected_vv=expected,
                provenance=tuple(chains[key].id for key in payload),
            )
        )
    return cases


def _expected_state(result: MatchResult, value: Any) -> tuple[float | None, float]:
    """(VV raw, CAN raw) a sample value should produce; VV None when unknown."""
    api_to_can, can_to_vv = result.value_chain
    if result.property.domain.is_enumerated and api_to_can and can_to_vv:
        label = next(
            (
                label
                for label in result.property.domain.value_labels
                if result.property.domain.api_value(label) == value
            ),
            None,
        )
        for can_label in api_to_can.targets(label or ""):
            for vv_label in can_to_vv.targets(can_label):
                if vv_label in result.vv.encoding:
                    return float(result.vv.encoding[vv_label]), float(result.can.encoding[can_label])
        return None, 0.0
    if isinstance(result.conversion, ConversionPlan) and not isinstance(value, bool):
        plan = result.conversion
        can_raw = float(plan.api_to_can.apply(Fraction(value)))
        return float(plan.api_to_vv(Fraction(value))), can_raw
    return None, 0.0
