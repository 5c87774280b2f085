"""The two mapping stages: API properties -> CAN signals -> VV entries.

Every property of a test object set ends up either in a (partial) match or
in exactly one SkippedAttribute, never both.
"""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import structlog

from apps.tester.constants import (
    HOURS_SUFFIXES,
    MINUTES_SUFFIXES,
    SKIP_DIMENSION_MISMATCH,
    SKIP_NO_CANDIDATES,
    SKIP_NO_KEY_MATCH,
    SKIP_NO_VALUE_MATCH,
    SKIP_NO_VV_MATCH,
    SKIP_PSEUDOCODE_GRAMMAR,
    STAGE_API_TO_CAN,
    STAGE_CAN_TO_VV,
)
from apps.tester.core.exceptions import DimensionMismatchError, GrammarError
from apps.tester.domain.entities.matching import (
    DatetimeRole,
    MatchCandidate,
    MatchCategory,
    MatchResult,
    PartialMatch,
    SkippedAttribute,
    Strictness,
    ValueMapping,
)
from apps.tester.domain.entities.spec import ApiProperty, DomainKind, TestObjectSet, ValueDomain
from apps.tester.domain.entities.tables import CanSignal, CanTable, VvEntry, VvTable
from apps.tester.domain.entities.units import ConversionPlan, InsufficientContext
from apps.tester.domain.ports.matcher_port import MatcherPort, UnitInferRequest
from apps.tester.matching.engine import match_keys, match_pseudocode, match_values
from apps.tester.matching.scoring import tokenize
from apps.tester.tables.candidates import lookup_candidates
from apps.tester.tables.pseudocode import parse_pseudocode
from apps.tester.units.conversion import parse_optional_unit, reconcile
from apps.tester.units.registry import UnitRegistry, default_registry

logger = structlog.get_logger(__name__)

_ROLE_SUFFIXES = {
    DatetimeRole.HOURS: HOURS_SUFFIXES,
    DatetimeRole.MINUTES: MINUTES_SUFFIXES,
}
_TIME_WORDS = frozenset({"time", "datetime", "clock", "at"})


@dataclass
class MatchOutcome:
    """Results and skips of one or more test object sets, in input order."""

    results: list[MatchResult] = field(default_factory=list)
    skipped: list[SkippedAttribute] = field(default_factory=list)


def split_role(key: str) -> tuple[str, DatetimeRole] | None:
    """``"AlarmHr"`` -> ``("Alarm", hours)``; None without a role suffix."""
    for role, suffixes in _ROLE_SUFFIXES.items():
        for suffix in suffixes:
            stem = key.removesuffix(suffix).rstrip("_-")
            if key.endswith(suffix) and stem:
                return stem, role
    return None


def datetime_stem(key: str) -> str:
    """``"alarmTime"`` -> ``"alarm"``: the part a role signal shares."""
    tokens = tokenize(key)
    if len(tokens) > 1 and tokens[-1] in _TIME_WORDS:
        tokens = tokens[:-1]
    return "_".join(tokens)


def map_api_to_can(
    s: TestObjectSet,
    table: CanTable,
    strictness: Strictness,
    backend: MatcherPort,
    *,
    registry: UnitRegistry | None = None,
) -> tuple[list[PartialMatch], list[SkippedAttribute]]:
    """Resolve each property of S to a CAN signal and its value map.

    Args:
        s: Test object set of one (endpoint, method)
        table: Parsed CAN table
        strictness: Matching policy
        backend: Matcher answering key/value/pseudocode/unit requests
        registry: Unit registry, the bundled one by default

    Returns:
        (partial matches, skipped attributes)
    """
    registry = registry or default_registry()
    partials: list[PartialMatch] = []
    skipped: list[SkippedAttribute] = []

    def skip(prop: ApiProperty, reason: str, detail: str = "") -> None:
        skipped.append(
            SkippedAttribute(api_id=s.api_id, key=prop.key, stage=STAGE_API_TO_CAN, reason=reason, detail=detail)
        )

    candidates = lookup_candidates(s.endpoint, table)
    if not candidates:
        for prop in s.properties:
            skip(prop, SKIP_NO_CANDIDATES, f"no CAN signal documented for {s.endpoint}")
        return partials, skipped

    remaining = list(candidates)
    datetime_props = [p for p in s.properties if p.domain.kind is DomainKind.DATETIME]
    if datetime_props:
        claimed = _match_roles(datetime_props, remaining, strictness, backend)
        claimed_keys = {candidate.right_key for matches in claimed.values() for _, candidate in matches}
        remaining = [signal for signal in remaining if signal.key not in claimed_keys]
        by_key = {signal.key: signal for signal in candidates}
        for prop in datetime_props:
            matches = claimed.get(prop.key, [])
            if not matches:
                skip(prop, SKIP_NO_KEY_MATCH, "no hour/minute signal pair")
                continue
            for role, candidate in matches:
                partials.append(
                    PartialMatch(
                        endpoint=s.endpoint,
                        method=s.method,
                        property=prop,
                        can=by_key[candidate.right_key],
                        key_match=candidate,
                        role=role,
                    )
                )

    plain_props = [p for p in s.properties if p.domain.kind is not DomainKind.DATETIME]
    key_matches = {
        candidate.left_key: candidate
        for candidate in match_keys(
            [p.key for p in plain_props], [signal.key for signal in remaining], strictness, backend
        )
    }
    signals = {signal.key: signal for signal in remaining}

    for prop in plain_props:
        key_match = key_matches.get(prop.key)
        if key_match is None:
            skip(prop, SKIP_NO_KEY_MATCH)
            continue
        signal = signals[key_match.right_key]
        base = PartialMatch(
            endpoint=s.endpoint, method=s.method, property=prop, can=signal, key_match=key_match
        )

        if prop.domain.is_enumerated:
            if not signal.is_enumerated:
                skip(prop, SKIP_NO_VALUE_MATCH, f"{signal.key} carries no encoding")
                continue
            try:
                alternatives = _pseudocode_alternatives(prop, signal, strictness, backend)
            except GrammarError as e:
                skip(prop, SKIP_PSEUDOCODE_GRAMMAR, e.message)
                continue
            mapping = match_values(
                prop.domain,
                signal.encoding,
                strictness,
                backend,
                pseudocode_matches=alternatives,
                right_key=signal.key,
            )
            if not mapping.pairs:
                skip(prop, SKIP_NO_VALUE_MATCH, f"no label of {prop.key} pairs with {signal.key}")
                continue
            found = {alt for matches in alternatives.values() for alt in matches}
            partials.append(
                base.model_copy(
                    update={
                        "value_mapping": mapping,
                        "pseudocode_matches": tuple(sorted(a for a in found if a[0] == signal.key)),
                        "foreign_alternatives": tuple(sorted(a for a in found if a[0] != signal.key)),
                    }
                )
            )
        elif prop.is_numeric:
            api_unit = prop.unit_text or backend.infer_unit(
                UnitInferRequest(key=prop.key, description=prop.description, known_units=_known(signal))
            ).unit
            try:
                reconcile(
                    parse_optional_unit(api_unit, registry),
                    parse_optional_unit(signal.unit_text, registry),
                    None,
                )
            except DimensionMismatchError as e:
                skip(prop, SKIP_DIMENSION_MISMATCH, e.message)
                continue
            partials.append(base.model_copy(update={"api_unit": api_unit}))
        else:
            partials.append(base)

    logger.info(
        "api_to_can_mapped",
        api=s.api_id,
        candidates=len(candidates),
        matched=len(partials),
        skipped=len(skipped),
    )
    return partials, skipped


def map_can_to_vv(
    s_prime: Sequence[PartialMatch],
    table: VvTable,
    strictness: Strictness,
    backend: MatcherPort,
    *,
    registry: UnitRegistry | None = None,
) -> tuple[list[MatchResult], list[SkippedAttribute]]:
    """Complete partial matches with their VV entry.

    A VV entry bound to the CAN signal wins outright; the remaining signals
    are matched by key against the unbound entries.

    Returns:
        (complete chains, skipped attributes)
    """
    registry = registry or default_registry()
    results: list[MatchResult] = []
    failures: list[tuple[PartialMatch, str, str]] = []

    unbound_can = list(dict.fromkeys(p.can.key for p in s_prime if table.bound_to(p.can.key) is None))
    fuzzy = {
        candidate.left_key: candidate
        for candidate in match_keys(unbound_can, [entry.key for entry in table.unbound], strictness, backend)
    }

    for partial in s_prime:
        vv, key_match = _vv_entry(partial.can, table, fuzzy)
        if vv is None or key_match is None:
            failures.append((partial, SKIP_NO_VV_MATCH, f"no VV entry for {partial.can.key}"))
            continue
        value_chain: tuple[ValueMapping | None, ValueMapping | None] = (None, None)
        conversion: ConversionPlan | InsufficientContext | None = None

        if partial.property.domain.is_enumerated and partial.value_mapping is not None:
            mapping = _can_to_vv_values(partial, vv, strictness, backend)
            if mapping is None or not _chains_through(partial.value_mapping, mapping):
                failures.append((partial, SKIP_NO_VALUE_MATCH, f"no label of {partial.can.key} reaches {vv.key}"))
                continue
            value_chain = (partial.value_mapping, mapping)
        elif partial.property.is_numeric:
            try:
                conversion = reconcile(
                    parse_optional_unit(partial.api_unit, registry),
                    parse_optional_unit(partial.can.unit_text, registry),
                    parse_optional_unit(vv.unit_text, registry),
                )
            except DimensionMismatchError as e:
                failures.append((partial, SKIP_DIMENSION_MISMATCH, e.message))
                continue

        results.append(
            MatchResult(
                endpoint=partial.endpoint,
                method=partial.method,
                property=partial.property,
                can=partial.can,
                vv=vv,
                key_chain=(partial.key_match, key_match),
                value_chain=value_chain,
                conversion=conversion,
                role=partial.role,
                pseudocode_matches=partial.pseudocode_matches,
                foreign_alternatives=partial.foreign_alternatives,
                rationale=_rationale(partial.key_match, key_match),
            )
        )

    return results, _failures_to_skips(failures, results)


def match_test_objects(
    test_objects: Sequence[TestObjectSet],
    can_table: CanTable,
    vv_table: VvTable,
    strictness: Strictness,
    backend: MatcherPort,
    *,
    parallelism: int = 1,
    registry: UnitRegistry | None = None,
) -> MatchOutcome:
    """Run both stages for every test object set, endpoints in parallel.

    Output order follows the input order whatever the parallelism.
    """

    def run(s: TestObjectSet) -> tuple[list[MatchResult], list[SkippedAttribute]]:
        partials, skipped = map_api_to_can(s, can_table, strictness, backend, registry=registry)
        results, vv_skipped = map_can_to_vv(partials, vv_table, strictness, backend, registry=registry)
        return results, skipped + vv_skipped

    with ThreadPoolExecutor(max_workers=max(1, parallelism), thread_name_prefix="matcher") as pool:
        per_set = list(pool.map(run, test_objects))

    outcome = MatchOutcome()
    for results, skipped in per_set:
        outcome.results.extend(results)
        outcome.skipped.extend(skipped)
    logger.info(
        "matching_completed",
        test_objects=len(test_objects),
        results=len(outcome.results),
        skipped=len(outcome.skipped),
        strictness=str(strictness),
        backend=backend.name,
    )
    return outcome


def _match_roles(
    props: list[ApiProperty],
    signals: list[CanSignal],
    strictness: Strictness,
    backend: MatcherPort,
) -> dict[str, list[tuple[DatetimeRole, MatchCandidate]]]:
    claimed: dict[str, list[tuple[DatetimeRole, MatchCandidate]]] = {}
    stems = {datetime_stem(p.key): p.key for p in props}
    for role in DatetimeRole:
        role_signals: dict[str, str] = {}
        for signal in signals:
            split = split_role(signal.key)
            if split is not None and split[1] is role:
                role_signals.setdefault(split[0], signal.key)
        for candidate in match_keys(list(stems), list(role_signals), strictness, backend):
            prop_key = stems[candidate.left_key]
            claimed.setdefault(prop_key, []).append(
                (
                    role,
                    candidate.model_copy(
                        update={"left_key": prop_key, "right_key": role_signals[candidate.right_key]}
                    ),
                )
            )
    return claimed


def _pseudocode_alternatives(
    prop: ApiProperty,
    signal: CanSignal,
    strictness: Strictness,
    backend: MatcherPort,
) -> dict[str, list[tuple[str, str]]]:
    if not signal.pseudocode:
        return {}
    alternatives = parse_pseudocode(signal.pseudocode)
    return {
        label: match_pseudocode((prop.key, label), alternatives, strictness, backend)
        for label in prop.domain.value_labels
    }


def _known(signal: CanSignal) -> tuple[str, ...]:
    return (signal.unit_text,) if signal.unit_text else ()


def _vv_entry(
    can: CanSignal, table: VvTable, fuzzy: dict[str, MatchCandidate]
) -> tuple[VvEntry | None, MatchCandidate | None]:
    bound = table.bound_to(can.key)
    if bound is not None:
        return bound, MatchCandidate(
            left_key=can.key, right_key=bound.key, category=MatchCategory.EXACT, score=1.0
        )
    candidate = fuzzy.get(can.key)
    if candidate is None:
        return None, None
    return table.get(candidate.right_key), candidate


def _can_to_vv_values(
    partial: PartialMatch, vv: VvEntry, strictness: Strictness, backend: MatcherPort
) -> ValueMapping | None:
    if len(partial.can.encoding) < 2 or not vv.is_enumerated:
        return None
    domain = ValueDomain(kind=DomainKind.ENUMERATION, labels=tuple(partial.can.encoding))
    return match_values(domain, vv.encoding, strictness, backend)


def _chains_through(api_to_can: ValueMapping, can_to_vv: ValueMapping) -> bool:
    reached = {can for _, can in api_to_can.pairs}
    return any(can in reached for can, _ in can_to_vv.pairs)


def _rationale(first: MatchCandidate, second: MatchCandidate) -> str:
    return (
        f"{first.left_key}->{first.right_key} {first.category} {first.score:.2f}; "
        f"{second.left_key}->{second.right_key} {second.category} {second.score:.2f}"
    )


def _failures_to_skips(
    failures: list[tuple[PartialMatch, str, str]], results: list[MatchResult]
) -> list[SkippedAttribute]:
    # A datetime property with one resolved role stays in the results; the
    # generator reports the missing role.
    resolved = {(r.api_id, r.property.key) for r in results}
    skipped: list[SkippedAttribute] = []
    seen: set[tuple[str, str]] = set()
    for partial, reason, detail in failures:
        api_id = f"{partial.method} {partial.endpoint}"
        ident = (api_id, partial.property.key)
        if ident in resolved or ident in seen:
            continue
        seen.add(ident)
        skipped.append(
            SkippedAttribute(
                api_id=api_id, key=partial.property.key, stage=STAGE_CAN_TO_VV, reason=reason, detail=detail
            )
        )
    return skipped
