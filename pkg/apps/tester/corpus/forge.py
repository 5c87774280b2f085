"""Synthetic evaluation corpora with a ground-truth manifest.

A corpus is an API spec, CAN and VV tables, the rig configuration that
implements them and a manifest. The rig is always correct about how a
property travels; the documents deviate from it only where the manifest
records a perturbation. Every draw comes from one seeded generator, so a
corpus is a pure function of its parameters.
"""

import json
import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple

import structlog

from apps.rig.models import (
    EndpointConfig,
    FaultKind,
    FaultSpec,
    PropertyBinding,
    PropertyKind,
    RigConfig,
    VvBinding,
)
from apps.tester.constants import (
    CATEGORY_CLEAN,
    CATEGORY_DEPENDENCY,
    CORPUS_CAN_FILE,
    CORPUS_MANIFEST_FILE,
    CORPUS_PROFILES,
    CORPUS_RIG_FILE,
    CORPUS_SPEC_FILE,
    CORPUS_VV_FILE,
    HOURS_SUFFIXES,
    MINUTES_SUFFIXES,
    MODERATE_THRESHOLD,
    RELAXED_THRESHOLD,
    SEMANTIC_OUT_OF_LEXICON_RATE,
    SKIP_MISSING_RANGE,
    SKIP_MISSING_ROLE,
    SKIP_MISSING_UNIT,
    SKIP_NO_KEY_MATCH,
    STAGE_API_TO_CAN,
    STAGE_CAN_TO_VV,
    STAGE_GENERATION,
    STAGE_UNITS,
    STAGE_VALUES,
)
from apps.tester.corpus import vocabulary
from apps.tester.corpus.manifest import CorpusManifest, Perturbation, TrueMapping, emit_manifest
from apps.tester.corpus.perturb import camel, pascal, perturb
from apps.tester.corpus.vocabulary import EnumTemplate, NumericTemplate
from apps.tester.domain.entities.matching import (
    DatetimeRole,
    MatchCandidate,
    MatchCategory,
    MatchResult,
    SkippedAttribute,
    ValueMapping,
)
from apps.tester.domain.entities.spec import (
    ApiProperty,
    ApiSpec,
    DeclaredType,
    DomainKind,
    Endpoint,
    HttpMethod,
    ValueDomain,
)
from apps.tester.domain.entities.tables import CanSignal, CanTable, PseudocodeAlternatives, VvEntry, VvTable
from apps.tester.domain.entities.units import ConversionPlan, ConversionStep
from apps.tester.generation.generator import GenerationConfig, generate_test_cases
from apps.tester.ingest.spec_parser import serialize_spec
from apps.tester.matching.lexicons import Lexicons, default_lexicons
from apps.tester.matching.scoring import label_score, score_keys, tokenize
from apps.tester.matching.stages import split_role
from apps.tester.tables.parser import serialize_can_table, serialize_vv_table
from apps.tester.tables.pseudocode import serialize_pseudocode
from apps.tester.units.conversion import parse_unit, reconcile

logger = structlog.get_logger(__name__)

# Redraws of one endpoint before the forge gives up
MAX_DRAWS = 200

FUZZY_CATEGORIES: tuple[MatchCategory, ...] = (
    MatchCategory.SPELLING,
    MatchCategory.ABBREVIATION,
    MatchCategory.FORMAT,
    MatchCategory.LOGICAL,
    MatchCategory.SEMANTIC,
)

FAULT_ORDER: tuple[FaultKind, ...] = (
    FaultKind.WRONG_SCALE,
    FaultKind.SWAPPED_ENUM,
    FaultKind.DEAD_SIGNAL,
    FaultKind.STALE_STATE,
    FaultKind.WRONG_UNIT,
)

# Chance that an unperturbed mixed-profile VV entry is left unbound
UNBOUND_VV_RATE = 0.3
# Chance that a mixed-profile endpoint carries one unmappable property
UNMAPPABLE_RATE = 0.25
# Chance that a dependencies-profile endpoint documents no minute signal
MISSING_ROLE_RATE = 0.2


@dataclass(frozen=True)
class _Place:
    """Where an endpoint lives: its path, table hint and key prefix."""

    path: str
    hint: str
    prefix: tuple[str, ...]
    method: HttpMethod

    @property
    def api_id(self) -> str:
        return f"{self.method} {self.path}"


@dataclass(frozen=True)
class _Chain:
    """One true signal of a property: the CAN row and VV row the rig uses."""

    signal: CanSignal
    entry: VvEntry
    role: DatetimeRole | None = None
    documented: bool = True


class _KeyVariant(NamedTuple):
    """Documented CAN key of a property and how it deviates from the API key."""

    key: str
    category: str
    perturbation: Perturbation | None = None
    recoverable: bool = True


@dataclass
class _Draft:
    """One API property with everything the documents and the rig say about it."""

    prop: ApiProperty
    kind: PropertyKind
    binding: PropertyBinding | None = None
    chains: list[_Chain] = field(default_factory=list)
    vv_bindings: list[VvBinding] = field(default_factory=list)
    category: str = CATEGORY_CLEAN
    value_pairs: tuple[tuple[str, str], ...] = ()
    conversion: tuple[str, str] | None = None
    perturbations: list[Perturbation] = field(default_factory=list)
    unmappable: SkippedAttribute | None = None
    # Documented CAN key the property's key is expected to match; None when
    # no documented signal should match it
    can_key: str | None = None
    sample: Any = None

    @property
    def clean(self) -> bool:
        return not self.perturbations and self.unmappable is None


@dataclass
class Corpus:
    """A forged corpus held in memory."""

    spec: ApiSpec
    can_table: CanTable
    vv_table: VvTable
    rig_config: RigConfig
    manifest: CorpusManifest

    def documents(self) -> dict[str, str]:
        """File name -> text of every corpus file."""
        rig = json.dumps(self.rig_config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
        return {
            CORPUS_SPEC_FILE: serialize_spec(self.spec, "yaml"),
            CORPUS_CAN_FILE: serialize_can_table(self.can_table),
            CORPUS_VV_FILE: serialize_vv_table(self.vv_table),
            CORPUS_RIG_FILE: rig,
            CORPUS_MANIFEST_FILE: emit_manifest(self.manifest),
        }

    def write(self, out_dir: Path) -> dict[str, Path]:
        out_dir.mkdir(parents=True, exist_ok=True)
        written: dict[str, Path] = {}
        for name, text in self.documents().items():
            path = out_dir / name
            path.write_text(text, encoding="utf-8")
            written[name] = path
        return written


def forge(
    seed: int,
    profile: str,
    size: int,
    out_dir: Path | None = None,
    *,
    clean: bool = False,
    fault_count: int = 0,
) -> Corpus:
    """Generate a labeled corpus.

    Args:
        seed: Seed of the only random generator involved
        profile: fuzzy5, pseudocode, units, dependencies or mixed
        size: Pairs per category for fuzzy5, endpoints for the others
        out_dir: Directory to write the corpus files to, if any
        clean: Leave documents perfectly aligned with the rig
        fault_count: Endpoints to give a seeded gateway bug, kinds in turn

    Raises:
        ValueError: Unknown profile, size below 1, or more faults than
            eligible endpoints
    """
    if profile not in CORPUS_PROFILES:
        raise ValueError(f"unknown profile {profile!r}; expected one of {', '.join(CORPUS_PROFILES)}")
    if size < 1:
        raise ValueError("size must be at least 1")
    if fault_count < 0:
        raise ValueError("fault_count must not be negative")

    corpus = _Forge(seed, profile, size, clean=clean, fault_count=fault_count).build()
    if out_dir is not None:
        corpus.write(out_dir)
    logger.info(
        "corpus_forged",
        seed=seed,
        profile=profile,
        size=size,
        apis=len(corpus.manifest.apis),
        mappings=len(corpus.manifest.true_mappings),
        perturbations=len(corpus.manifest.perturbations),
        faults=len(corpus.manifest.faults),
    )
    return corpus


class _Forge:
    def __init__(self, seed: int, profile: str, size: int, *, clean: bool, fault_count: int) -> None:
        self.seed = seed
        self.profile = profile
        self.size = size
        self.clean = clean
        self.fault_count = fault_count
        self.rng = random.Random(seed)
        self.lexicons: Lexicons = default_lexicons()
        self.used_can: set[str] = set()
        self.used_vv: set[str] = set()

    # Assembly

    def build(self) -> Corpus:
        places = self._places(self.size)
        endpoints = [(place, self._draw_endpoint(place)) for place in places]
        faults, faulted = self._faults(endpoints)

        spec = ApiSpec(
            endpoints=tuple(
                Endpoint(
                    path=place.path,
                    methods=(place.method,),
                    properties=tuple(d.prop for d in drafts),
                    sample_request=self._sample_request(place, drafts),
                )
                for place, drafts in endpoints
            )
        )
        all_drafts = [d for _, drafts in endpoints for d in drafts]
        chains = [chain for d in all_drafts for chain in d.chains]
        can_table = CanTable(signals=tuple(c.signal for c in chains if c.documented))
        vv_table = VvTable(entries=tuple(c.entry for c in chains if c.documented))
        rig_config = RigConfig(
            endpoints=tuple(
                EndpointConfig(
                    path=place.path,
                    methods=(place.method.value,),
                    properties=tuple(d.binding for d in drafts if d.binding is not None),
                )
                for place, drafts in endpoints
            ),
            vv_bindings=tuple(b for d in all_drafts for b in d.vv_bindings),
            faults=tuple(faults),
        )

        mappings = [
            TrueMapping(
                endpoint=place.path,
                method=place.method,
                api_key=d.prop.key,
                can_key=chain.signal.key,
                vv_key=chain.entry.key,
                role=chain.role,
                category=d.category,
                value_pairs=d.value_pairs,
                conversion=d.conversion,
            )
            for place, drafts in endpoints
            for d in drafts
            for chain in d.chains
        ]
        ground_truth, _ = generate_test_cases(
            self._true_results(endpoints),
            GenerationConfig(
                sample_requests={e.path: e.sample_request for e in spec.endpoints if e.sample_request}
            ),
        )
        manifest = CorpusManifest(
            seed=self.seed,
            profile=self.profile,
            size=self.size,
            clean=self.clean,
            fault_count=self.fault_count,
            apis=tuple(place.api_id for place, _ in endpoints),
            true_mappings=tuple(mappings),
            perturbations=tuple(p for d in all_drafts for p in d.perturbations),
            unmappable=tuple(d.unmappable for d in all_drafts if d.unmappable is not None),
            faults=tuple(faults),
            faulted_apis=tuple(faulted),
            ground_truth_cases=tuple(ground_truth),
        )
        return Corpus(spec, can_table, vv_table, rig_config, manifest)

    def _places(self, size: int) -> list[_Place]:
        combos = [(q, s) for q in vocabulary.QUALIFIERS for s in vocabulary.SUBJECTS]
        self.rng.shuffle(combos)
        places = []
        for index in range(size):
            qualifier, subject = combos[index % len(combos)]
            round_ = index // len(combos)
            tokens = tuple(t for t in (qualifier, subject) if t) + ((str(round_ + 1),) if round_ else ())
            places.append(
                _Place(
                    path="/" + "-".join(tokens),
                    hint=pascal(tokens),
                    prefix=tokens,
                    method=HttpMethod.PUT if index % 2 == 0 else HttpMethod.GET,
                )
            )
        return places

    def _draw_endpoint(self, place: _Place) -> list[_Draft]:
        for _ in range(MAX_DRAWS):
            drafts = self._profile_drafts(place)
            if drafts is not None and self._valid(drafts):
                for d in drafts:
                    self.used_can.update(c.signal.key for c in d.chains)
                    self.used_vv.update(c.entry.key for c in d.chains)
                return drafts
        raise ValueError(f"could not draw a consistent endpoint for {place.path}")

    def _profile_drafts(self, place: _Place) -> list[_Draft] | None:
        match self.profile:
            case "fuzzy5":
                return self._fuzzy5(place)
            case "pseudocode":
                return self._pseudocode(place)
            case "units":
                return self._units(place)
            case "dependencies":
                return self._dependencies(place)
            case _:
                return self._mixed(place)

    def _valid(self, drafts: Sequence[_Draft]) -> bool:
        """Keys pair as intended and nothing else pairs above relaxed."""
        can_keys = [c.signal.key for d in drafts for c in d.chains if c.documented]
        vv_keys = [c.entry.key for d in drafts for c in d.chains]
        all_can = [c.signal.key for d in drafts for c in d.chains]
        if len(set(all_can)) != len(all_can) or self.used_can & set(all_can):
            return False
        if len(set(vv_keys)) != len(vv_keys) or self.used_vv & set(vv_keys):
            return False

        plain = [d for d in drafts if d.kind is not PropertyKind.DATETIME]
        documented_plain = [c.signal.key for d in plain for c in d.chains if c.documented]
        if any(split_role(key) is not None for key in documented_plain):
            return False
        role_keys = set(can_keys) - set(documented_plain)
        if any(split_role(key) is None for key in role_keys):
            return False

        for d in plain:
            for key in documented_plain:
                scored = score_keys(d.prop.key, key, self.lexicons)
                if key == d.can_key:
                    expected = _expected_category(d)
                    if expected is None:
                        if scored.score >= RELAXED_THRESHOLD:
                            return False
                    elif scored.category is not expected or scored.score < MODERATE_THRESHOLD:
                        return False
                elif scored.score >= RELAXED_THRESHOLD:
                    return False
        return True

    # Profiles

    def _fuzzy5(self, place: _Place) -> list[_Draft] | None:
        numeric = list(vocabulary.NUMERIC_TEMPLATES)
        enums = list(vocabulary.ENUM_TEMPLATES)
        states = list(vocabulary.BOOLEAN_STATES)
        self.rng.shuffle(numeric)
        self.rng.shuffle(enums)
        self.rng.shuffle(states)

        drafts = []
        for category in FUZZY_CATEGORIES:
            wanted = MatchCategory.EXACT if self.clean else category
            if category is MatchCategory.LOGICAL:
                draft = self._boolean(place, states.pop(), wanted)
            elif self.rng.random() < 0.5 and enums:
                draft = self._enum(place, enums.pop(), wanted)
            else:
                draft = self._numeric(place, numeric.pop(), wanted)
            if draft is None:
                return None
            drafts.append(draft)
        return drafts

    def _pseudocode(self, place: _Place) -> list[_Draft] | None:
        states = list(vocabulary.BOOLEAN_STATES)
        enums = list(vocabulary.ENUM_TEMPLATES)
        boolean = self._boolean(place, self.rng.choice(states), MatchCategory.EXACT)
        if boolean is None or boolean.can_key is None:
            return None
        foreign = (boolean.can_key, next(iter(boolean.chains[0].signal.encoding)))
        enum = self._enum(place, self.rng.choice(enums), MatchCategory.EXACT, pseudocode_foreign=foreign)
        if enum is None:
            return None
        return [boolean, enum]

    def _units(self, place: _Place) -> list[_Draft] | None:
        templates = self.rng.sample(vocabulary.NUMERIC_TEMPLATES, 2)
        drafts = [self._numeric(place, t, MatchCategory.EXACT, vary_units=not self.clean) for t in templates]
        return None if any(d is None for d in drafts) else [d for d in drafts if d is not None]

    def _dependencies(self, place: _Place) -> list[_Draft] | None:
        template = self.rng.choice(vocabulary.DATETIME_TEMPLATES)
        drop_minute = not self.clean and self.rng.random() < MISSING_ROLE_RATE
        datetime_draft = self._datetime(place, template, drop_minute=drop_minute)
        companion = self._enum(place, self.rng.choice(vocabulary.ENUM_TEMPLATES), MatchCategory.EXACT)
        if companion is None:
            return None
        return [datetime_draft, companion]

    def _mixed(self, place: _Place) -> list[_Draft] | None:
        numeric = self.rng.sample(vocabulary.NUMERIC_TEMPLATES, 3)
        drafts: list[_Draft | None] = [
            self._enum(place, self.rng.choice(vocabulary.ENUM_TEMPLATES), self._mixed_category()),
            self._numeric(place, numeric[0], self._mixed_category()),
        ]
        match self.rng.choice(("boolean", "datetime", "numeric")):
            case "boolean":
                category = self._mixed_category(allow_logical=True)
                drafts.append(self._boolean(place, self.rng.choice(vocabulary.BOOLEAN_STATES), category))
            case "datetime":
                drafts.append(self._datetime(place, self.rng.choice(vocabulary.DATETIME_TEMPLATES)))
            case _:
                drafts.append(self._numeric(place, numeric[1], self._mixed_category()))
        if not self.clean and self.rng.random() < UNMAPPABLE_RATE:
            drafts.append(self._unmappable(place, numeric[2]))
        if any(d is None for d in drafts):
            return None
        chosen = [d for d in drafts if d is not None]
        if not self.clean:
            for d in chosen:
                self._maybe_unbind(place, d)
        return chosen

    def _mixed_category(self, *, allow_logical: bool = False) -> MatchCategory:
        if self.clean or self.rng.random() < 0.5:
            return MatchCategory.EXACT
        pool = [c for c in FUZZY_CATEGORIES if allow_logical or c is not MatchCategory.LOGICAL]
        return self.rng.choice(pool)

    # Property builders

    def _key_variant(self, place: _Place, api_key: str, category: MatchCategory) -> _KeyVariant | None:
        """Documented CAN key for an API key.

        The mixed profile falls back to the unperturbed key when the key does
        not admit the drawn perturbation; the other profiles redraw.
        """
        in_lexicon = self.rng.random() >= SEMANTIC_OUT_OF_LEXICON_RATE
        variant = perturb(category, api_key, self.rng, self.lexicons, in_lexicon=in_lexicon)
        if variant is None and self.profile == "mixed":
            category, variant = MatchCategory.EXACT, perturb(MatchCategory.EXACT, api_key, self.rng, self.lexicons)
        if variant is None:
            return None
        if category is MatchCategory.EXACT:
            return _KeyVariant(variant.key, CATEGORY_CLEAN)
        perturbation = Perturbation(
            id=f"{place.api_id}#{api_key}",
            category=category.value,
            stage=STAGE_API_TO_CAN,
            original=api_key,
            perturbed=variant.key,
            substitution=variant.substitution,
        )
        recoverable = category is not MatchCategory.SEMANTIC or in_lexicon
        return _KeyVariant(variant.key, category.value, perturbation, recoverable)

    def _numeric(
        self,
        place: _Place,
        template: NumericTemplate,
        category: MatchCategory,
        *,
        vary_units: bool = False,
    ) -> _Draft | None:
        tokens = _tokens(place, template.words)
        api_key = camel(tokens)
        variant = self._key_variant(place, api_key, category)
        if variant is None:
            return None
        can_key, category_name, key_perturbation, recoverable = variant

        units = vocabulary.UNITS[template.dimension]
        api_unit = can_unit = vv_unit = units[0]
        api_doc, can_doc = "field", True
        unit_category = None
        if vary_units:
            api_unit, can_unit = self.rng.sample(units, 2)
            vv_unit = self.rng.choice(units)
            unit_category = "unit_mismatch"
            draw = self.rng.random()
            if draw < 0.15:
                api_doc, unit_category = "none", "unitless"
            elif draw < 0.35:
                api_doc, unit_category = "description", "unit_in_description"
            elif draw < 0.55:
                vv_unit, can_doc, unit_category = can_unit, False, "can_unit_from_vv"

        plan = reconcile(parse_unit(api_unit), parse_unit(can_unit), parse_unit(vv_unit))
        if not isinstance(plan, ConversionPlan):
            return None
        description = _sentence(template.words, place.prefix)
        if api_doc == "description":
            description += f" Expressed in {vocabulary.UNIT_PHRASES[api_unit]}."

        prop = ApiProperty(
            key=api_key,
            domain=ValueDomain(
                kind=DomainKind.NUMERIC_RANGE,
                minimum=float(template.minimum),
                maximum=float(template.maximum),
            ),
            declared_type=DeclaredType.INTEGER,
            unit_text=api_unit if api_doc == "field" else None,
            description=description,
        )
        vv_key = f"VV_{can_key}"
        chain = _Chain(
            signal=CanSignal(key=can_key, endpoint_hint=place.hint, unit_text=can_unit if can_doc else None),
            entry=VvEntry(key=vv_key, bound_can_key=can_key, unit_text=vv_unit),
        )
        draft = _Draft(
            prop=prop,
            kind=PropertyKind.NUMERIC,
            binding=PropertyBinding(
                api_key=api_key,
                kind=PropertyKind.NUMERIC,
                can_key=can_key,
                scale=plan.api_to_can.factor,
                integer=True,
            ),
            chains=[chain],
            vv_bindings=[VvBinding(can_key=can_key, vv_key=vv_key, scale=plan.can_to_vv.factor)],
            category=category_name,
            conversion=(plan.api_to_can.factor, plan.can_to_vv.factor),
            can_key=can_key if recoverable else None,
            sample=template.maximum,
        )
        _note_key(draft, place, key_perturbation, recoverable)
        if unit_category is not None:
            draft.perturbations.append(
                Perturbation(
                    id=f"{place.api_id}#{api_key}",
                    category=unit_category,
                    stage=STAGE_UNITS,
                    original=api_unit,
                    perturbed=f"{can_unit} -> {vv_unit}",
                )
            )
            if unit_category == "unitless":
                draft.unmappable = _skip(place, api_key, STAGE_GENERATION, SKIP_MISSING_UNIT)
        return draft

    def _enum(
        self,
        place: _Place,
        template: EnumTemplate,
        category: MatchCategory,
        *,
        pseudocode_foreign: tuple[str, str] | None = None,
    ) -> _Draft | None:
        api_key = camel(_tokens(place, template.words))
        variant = self._key_variant(place, api_key, category)
        if variant is None:
            return None
        can_key, category_name, key_perturbation, recoverable = variant

        labels = list(template.labels)
        can_labels = list(labels)
        reverse: dict[int, str] = {}
        pairs = [(label, label) for label in labels]
        cell = None
        if pseudocode_foreign is not None:
            extras = self.rng.sample(vocabulary.ALTERNATIVE_LABELS, 2)
            valid, decoy = extras
            anchor = labels[0]
            alternatives = [(can_key, anchor), (can_key, valid)]
            can_labels.append(valid)
            if not self.clean:
                alternatives.extend([(can_key, decoy), pseudocode_foreign])
                can_labels.append(decoy)
            if not _anchors_only(labels, anchor, alternatives, self.lexicons):
                return None
            cell = serialize_pseudocode(PseudocodeAlternatives(alternatives=tuple(alternatives)))
            pairs.append((anchor, valid))
            reverse[can_labels.index(valid)] = anchor

        encoding = {label: raw for raw, label in enumerate(can_labels)}
        vv_encoding = {label: raw + 1 for label, raw in encoding.items()}
        reverse.update({encoding[label]: label for label in labels})
        order = {label: i for i, label in enumerate(labels)}
        pairs.sort(key=lambda pair: (order[pair[0]], encoding[pair[1]]))

        vv_key = f"VV_{can_key}"
        prop = ApiProperty(
            key=api_key,
            domain=ValueDomain(kind=DomainKind.ENUMERATION, labels=tuple(labels)),
            declared_type=DeclaredType.ENUM,
            description=_sentence(template.words, place.prefix),
        )
        draft = _Draft(
            prop=prop,
            kind=PropertyKind.ENUM,
            binding=PropertyBinding(
                api_key=api_key,
                kind=PropertyKind.ENUM,
                can_key=can_key,
                value_map={label: encoding[label] for label in labels},
                reverse_map=dict(sorted(reverse.items())),
            ),
            chains=[
                _Chain(
                    signal=CanSignal(key=can_key, endpoint_hint=place.hint, encoding=encoding, pseudocode=cell),
                    entry=VvEntry(key=vv_key, bound_can_key=can_key, encoding=vv_encoding),
                )
            ],
            vv_bindings=[
                VvBinding(
                    can_key=can_key,
                    vv_key=vv_key,
                    raw_map={raw: float(vv_encoding[label]) for label, raw in encoding.items()},
                )
            ],
            category=category_name,
            value_pairs=tuple(pairs),
            can_key=can_key if recoverable else None,
            sample=labels[-1],
        )
        _note_key(draft, place, key_perturbation, recoverable)
        if cell is not None:
            draft.perturbations.append(
                Perturbation(
                    id=f"{place.api_id}#{api_key}",
                    category=MatchCategory.PSEUDOCODE.value,
                    stage=STAGE_VALUES,
                    original=labels[0],
                    perturbed=cell,
                )
            )
        return draft

    def _boolean(self, place: _Place, state: str, category: MatchCategory) -> _Draft | None:
        api_key = camel([*place.prefix, state])
        variant = self._key_variant(place, api_key, category)
        if variant is None:
            return None
        can_key, category_name, key_perturbation, recoverable = variant

        true_label, false_label = self.rng.choice(vocabulary.BOOLEAN_ENCODINGS)
        encoding = {true_label: 1, false_label: 0}
        vv_encoding = {true_label: 2, false_label: 1}
        vv_key = f"VV_{can_key}"
        draft = _Draft(
            prop=ApiProperty(
                key=api_key,
                domain=ValueDomain(kind=DomainKind.BOOLEAN),
                declared_type=DeclaredType.BOOLEAN,
                description=f"Whether the {' '.join(place.prefix)} is {state}.",
            ),
            kind=PropertyKind.BOOLEAN,
            binding=PropertyBinding(
                api_key=api_key,
                kind=PropertyKind.BOOLEAN,
                can_key=can_key,
                value_map={"TRUE": 1, "FALSE": 0},
            ),
            chains=[
                _Chain(
                    signal=CanSignal(key=can_key, endpoint_hint=place.hint, encoding=encoding),
                    entry=VvEntry(key=vv_key, bound_can_key=can_key, encoding=vv_encoding),
                )
            ],
            vv_bindings=[VvBinding(can_key=can_key, vv_key=vv_key, raw_map={1: 2.0, 0: 1.0})],
            category=category_name,
            value_pairs=(("TRUE", true_label), ("FALSE", false_label)),
            can_key=can_key if recoverable else None,
            sample=True,
        )
        _note_key(draft, place, key_perturbation, recoverable)
        return draft

    def _datetime(self, place: _Place, words: tuple[str, ...], *, drop_minute: bool = False) -> _Draft:
        tokens = _tokens(place, words)
        api_key = camel(tokens)
        stem = pascal(tokens[:-1] if tokens[-1] == "time" else tokens)
        hour_key = stem + self.rng.choice(HOURS_SUFFIXES)
        minute_key = stem + self.rng.choice(MINUTES_SUFFIXES)
        chains = [
            _Chain(
                signal=CanSignal(key=key, endpoint_hint=place.hint),
                entry=VvEntry(key=f"VV_{key}", bound_can_key=key),
                role=role,
                documented=not (drop_minute and role is DatetimeRole.MINUTES),
            )
            for key, role in ((hour_key, DatetimeRole.HOURS), (minute_key, DatetimeRole.MINUTES))
        ]
        draft = _Draft(
            prop=ApiProperty(
                key=api_key,
                domain=ValueDomain(kind=DomainKind.DATETIME),
                declared_type=DeclaredType.DATETIME,
                description=_sentence(words, place.prefix),
            ),
            kind=PropertyKind.DATETIME,
            binding=PropertyBinding(
                api_key=api_key,
                kind=PropertyKind.DATETIME,
                hour_can_key=hour_key,
                minute_can_key=minute_key,
            ),
            chains=chains,
            vv_bindings=[VvBinding(can_key=c.signal.key, vv_key=c.entry.key) for c in chains],
            category=CATEGORY_DEPENDENCY,
        )
        if drop_minute:
            draft.perturbations.append(
                Perturbation(
                    id=f"{place.api_id}#{api_key}/{DatetimeRole.MINUTES}",
                    category="missing_role",
                    stage=STAGE_API_TO_CAN,
                    original=minute_key,
                )
            )
            draft.unmappable = _skip(place, api_key, STAGE_GENERATION, SKIP_MISSING_ROLE)
        return draft

    def _unmappable(self, place: _Place, template: NumericTemplate) -> _Draft | None:
        """A numeric property the pipeline must skip, for one of three reasons."""
        reason = self.rng.choice((SKIP_NO_KEY_MATCH, SKIP_MISSING_UNIT, SKIP_MISSING_RANGE))
        api_key = camel(_tokens(place, template.words))
        ranged = reason != SKIP_MISSING_RANGE
        prop = ApiProperty(
            key=api_key,
            domain=ValueDomain(
                kind=DomainKind.NUMERIC_RANGE,
                minimum=float(template.minimum) if ranged else None,
                maximum=float(template.maximum) if ranged else None,
            ),
            declared_type=DeclaredType.INTEGER,
            unit_text=None if reason == SKIP_MISSING_UNIT else vocabulary.UNITS[template.dimension][0],
            description=_sentence(template.words, place.prefix),
        )
        if reason == SKIP_NO_KEY_MATCH:
            # Documented in the spec only; the rig does not serve it
            return _Draft(
                prop=prop,
                kind=PropertyKind.NUMERIC,
                unmappable=_skip(place, api_key, STAGE_API_TO_CAN, reason),
                perturbations=[
                    Perturbation(id=f"{place.api_id}#{api_key}", category="undocumented", original=api_key)
                ],
            )

        unit = None if reason == SKIP_MISSING_UNIT else prop.unit_text
        can_key = api_key
        vv_key = f"VV_{can_key}"
        return _Draft(
            prop=prop,
            kind=PropertyKind.NUMERIC,
            binding=PropertyBinding(api_key=api_key, kind=PropertyKind.NUMERIC, can_key=can_key, integer=True),
            chains=[
                _Chain(
                    signal=CanSignal(key=can_key, endpoint_hint=place.hint, unit_text=unit),
                    entry=VvEntry(key=vv_key, bound_can_key=can_key, unit_text=unit),
                )
            ],
            vv_bindings=[VvBinding(can_key=can_key, vv_key=vv_key)],
            conversion=("1", "1"),
            can_key=can_key,
            unmappable=_skip(place, api_key, STAGE_GENERATION, reason),
            perturbations=[
                Perturbation(
                    id=f"{place.api_id}#{api_key}",
                    category="unitless" if reason == SKIP_MISSING_UNIT else "rangeless",
                    stage=STAGE_UNITS if reason == SKIP_MISSING_UNIT else STAGE_GENERATION,
                    original=api_key,
                )
            ],
        )

    def _maybe_unbind(self, place: _Place, draft: _Draft) -> None:
        """Leave a VV entry unbound under a restyled key."""
        if draft.kind is PropertyKind.DATETIME or len(draft.chains) != 1 or not draft.clean:
            return
        if self.rng.random() >= UNBOUND_VV_RATE:
            return
        chain = draft.chains[0]
        restyled = "_".join(tokenize(chain.signal.key)).upper()
        draft.chains[0] = _Chain(
            signal=chain.signal,
            entry=chain.entry.model_copy(update={"key": restyled, "bound_can_key": None}),
        )
        draft.vv_bindings = [b.model_copy(update={"vv_key": restyled}) for b in draft.vv_bindings]
        draft.perturbations.append(
            Perturbation(
                id=f"{place.api_id}#{draft.prop.key}",
                category=MatchCategory.FORMAT.value,
                stage=STAGE_CAN_TO_VV,
                original=chain.signal.key,
                perturbed=restyled,
            )
        )

    # Faults and ground truth

    def _faults(self, endpoints: list[tuple[_Place, list[_Draft]]]) -> tuple[list[FaultSpec], list[str]]:
        eligible = [(place, drafts) for place, drafts in endpoints if all(d.clean for d in drafts)]
        faults: list[FaultSpec] = []
        faulted: list[str] = []
        taken: set[str] = set()
        for index in range(self.fault_count):
            kind = FAULT_ORDER[index % len(FAULT_ORDER)]
            options = [
                (place, fault)
                for place, drafts in eligible
                if place.path not in taken and (fault := _fault_for(kind, place, drafts)) is not None
            ]
            if not options:
                raise ValueError(f"no endpoint left that can carry a {kind} fault")
            place, fault = self.rng.choice(options)
            taken.add(place.path)
            faults.append(fault)
            faulted.append(place.api_id)
        return faults, sorted(faulted)

    def _true_results(self, endpoints: list[tuple[_Place, list[_Draft]]]) -> list[MatchResult]:
        results = []
        for place, drafts in endpoints:
            for d in drafts:
                for chain in d.chains:
                    value_chain: tuple[ValueMapping | None, ValueMapping | None] = (None, None)
                    if d.value_pairs:
                        value_chain = (
                            ValueMapping(pairs=d.value_pairs),
                            ValueMapping(pairs=tuple((label, label) for label in chain.signal.encoding)),
                        )
                    conversion = None
                    if d.conversion is not None:
                        conversion = _plan(chain, d.conversion)
                    results.append(
                        MatchResult(
                            endpoint=place.path,
                            method=place.method,
                            property=d.prop,
                            can=chain.signal,
                            vv=chain.entry,
                            key_chain=(
                                MatchCandidate(
                                    left_key=d.prop.key,
                                    right_key=chain.signal.key,
                                    category=MatchCategory.EXACT,
                                    score=1.0,
                                ),
                                MatchCandidate(
                                    left_key=chain.signal.key,
                                    right_key=chain.entry.key,
                                    category=MatchCategory.EXACT,
                                    score=1.0,
                                ),
                            ),
                            value_chain=value_chain,
                            conversion=conversion,
                            role=chain.role,
                        )
                    )
        return results

    def _sample_request(self, place: _Place, drafts: Sequence[_Draft]) -> dict[str, Any] | None:
        if self.profile != "mixed" or place.method is not HttpMethod.PUT:
            return None
        sample = {d.prop.key: d.sample for d in drafts if d.sample is not None and d.unmappable is None}
        return sample or None


def _expected_category(draft: _Draft) -> MatchCategory | None:
    if draft.can_key is None:
        return None
    try:
        return MatchCategory(draft.category)
    except ValueError:
        return MatchCategory.EXACT


def _note_key(draft: _Draft, place: _Place, perturbation: Perturbation | None, recoverable: bool) -> None:
    if perturbation is None:
        return
    draft.perturbations.append(perturbation)
    if not recoverable:
        draft.unmappable = _skip(place, draft.prop.key, STAGE_API_TO_CAN, SKIP_NO_KEY_MATCH)


def _anchors_only(
    labels: Sequence[str], anchor: str, alternatives: Sequence[tuple[str, str]], lexicons: Lexicons
) -> bool:
    """Only the anchor label may match an alternative directly, and only its own."""
    for label in labels:
        hits = [
            alternative
            for alternative in alternatives
            if label_score(label, alternative[1], lexicons).score >= RELAXED_THRESHOLD
        ]
        if hits != ([alternatives[0]] if label == anchor else []):
            return False
    return True


def _fault_for(kind: FaultKind, place: _Place, drafts: Sequence[_Draft]) -> FaultSpec | None:
    numeric = next((d for d in drafts if d.kind is PropertyKind.NUMERIC and d.binding), None)
    enum = next((d for d in drafts if d.kind is PropertyKind.ENUM and d.binding), None)
    match kind:
        case FaultKind.WRONG_SCALE if numeric is not None:
            return FaultSpec(kind=kind, target=place.path)
        case FaultKind.SWAPPED_ENUM if enum is not None:
            first, second = enum.prop.domain.labels[:2]
            return FaultSpec(kind=kind, target=place.path, label_a=first, label_b=second)
        case FaultKind.DEAD_SIGNAL | FaultKind.STALE_STATE if enum is not None and enum.binding:
            return FaultSpec(kind=kind, target=enum.binding.can_key or "")
        case FaultKind.WRONG_UNIT if numeric is not None and numeric.binding:
            return FaultSpec(kind=kind, target=numeric.binding.can_key or "")
    return None


def _plan(chain: _Chain, factors: tuple[str, str]) -> ConversionPlan:
    api_to_can, can_to_vv = factors
    return ConversionPlan(
        api_to_can=ConversionStep(source="api", target=chain.signal.key, factor=api_to_can),
        can_to_vv=ConversionStep(source=chain.signal.key, target=chain.entry.key, factor=can_to_vv),
    )


def _skip(place: _Place, key: str, stage: str, reason: str) -> SkippedAttribute:
    return SkippedAttribute(api_id=place.api_id, key=key, stage=stage, reason=reason)


def _sentence(words: Sequence[str], prefix: Sequence[str]) -> str:
    return f"{' '.join(words).capitalize()} of the {' '.join(prefix)}."


def _tokens(place: _Place, words: Sequence[str]) -> list[str]:
    """Key tokens under an endpoint prefix; a word repeating the prefix is dropped."""
    return [*place.prefix, *(w for i, w in enumerate(words) if i or w != place.prefix[-1])]
