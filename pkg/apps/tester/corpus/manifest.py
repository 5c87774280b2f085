"""Ground truth of a forged corpus and its record-text form.

The manifest is written as one ``<section>\\t<json>`` line per record,
sections in a fixed order and JSON keys sorted, so two forges of the same
parameters give byte-identical files.
"""

import json
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from apps.rig.models import FaultSpec
from apps.tester.constants import CATEGORY_CLEAN, STAGE_API_TO_CAN
from apps.tester.core.exceptions import ArtifactError
from apps.tester.domain.entities.matching import DatetimeRole, SkippedAttribute
from apps.tester.domain.entities.spec import HttpMethod
from apps.tester.domain.entities.testcase import TestCase

MANIFEST_HEADER = "# vehicle-api-tester corpus manifest v1"


class TrueMapping(BaseModel):
    """One correct API -> CAN -> VV chain, as the rig implements it."""

    model_config = ConfigDict(frozen=True)

    endpoint: str
    method: HttpMethod
    api_key: str
    can_key: str
    vv_key: str
    role: DatetimeRole | None = None
    category: str = CATEGORY_CLEAN
    value_pairs: tuple[tuple[str, str], ...] = ()
    conversion: tuple[str, str] | None = Field(
        default=None, description="True API->CAN and CAN->VV factors, documented or not"
    )

    @property
    def id(self) -> str:
        base = f"{self.method} {self.endpoint}#{self.api_key}"
        return f"{base}/{self.role}" if self.role else base

    @property
    def api_id(self) -> str:
        return f"{self.method} {self.endpoint}"

    @property
    def chain(self) -> tuple[str, str, str]:
        return (self.id, self.can_key, self.vv_key)


class Perturbation(BaseModel):
    """A deliberate deviation from clean alignment."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Mapping or property id the deviation applies to")
    category: str
    stage: str = STAGE_API_TO_CAN
    original: str = ""
    perturbed: str = ""
    substitution: tuple[str, str] | None = Field(
        default=None, description="(word, synonym) of a semantic substitution"
    )


class CorpusManifest(BaseModel):
    """Everything needed to score a run against a forged corpus."""

    model_config = ConfigDict(frozen=True)

    seed: int
    profile: str
    size: int = Field(..., ge=1)
    clean: bool = False
    fault_count: int = Field(default=0, ge=0)
    apis: tuple[str, ...] = ()
    true_mappings: tuple[TrueMapping, ...] = ()
    perturbations: tuple[Perturbation, ...] = ()
    unmappable: tuple[SkippedAttribute, ...] = ()
    faults: tuple[FaultSpec, ...] = ()
    faulted_apis: tuple[str, ...] = ()
    ground_truth_cases: tuple[TestCase, ...] = ()

    @property
    def parameters(self) -> dict[str, Any]:
        """Arguments that regenerate this corpus with ``forge``."""
        return {
            "seed": self.seed,
            "profile": self.profile,
            "size": self.size,
            "clean": self.clean,
            "fault_count": self.fault_count,
        }


# (section, manifest field); "corpus" holds the scalar parameters
_SECTIONS: tuple[tuple[str, str], ...] = (
    ("corpus", ""),
    ("api", "apis"),
    ("mapping", "true_mappings"),
    ("perturbation", "perturbations"),
    ("unmappable", "unmappable"),
    ("fault", "faults"),
    ("faulted", "faulted_apis"),
    ("case", "ground_truth_cases"),
)


def emit_manifest(manifest: CorpusManifest) -> str:
    data = manifest.model_dump(mode="json")
    lines = [MANIFEST_HEADER, _line("corpus", manifest.parameters)]
    for section, field in _SECTIONS[1:]:
        lines.extend(_line(section, item) for item in data[field])
    return "\n".join(lines) + "\n"


def parse_manifest(document: str) -> CorpusManifest:
    """Read a manifest back.

    Raises:
        ArtifactError: Malformed line, unknown section or invalid content
    """
    fields = dict(_SECTIONS)
    data: dict[str, Any] = {field: [] for field in fields.values() if field}
    for number, line in enumerate(document.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        section, _, payload = line.partition("\t")
        if section not in fields:
            raise ArtifactError(f"Manifest line {number} has unknown section {section!r}", {"line": number})
        try:
            value = json.loads(payload)
        except ValueError as e:
            raise ArtifactError(f"Manifest line {number} is not valid JSON", {"line": number}) from e
        if section == "corpus":
            data.update(value)
        else:
            data[fields[section]].append(value)
    try:
        return CorpusManifest.model_validate(data)
    except ValidationError as e:
        raise ArtifactError("Manifest does not describe a corpus", {"errors": str(e)}) from e


def _line(section: str, value: Any) -> str:
    return f"{section}\t{json.dumps(value, sort_keys=True, ensure_ascii=False)}"
