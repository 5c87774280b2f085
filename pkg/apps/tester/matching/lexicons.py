"""Bundled word lists behind the logical, semantic and boolean rules.

Three two-column tab-separated files: synonyms, antonyms and boolean
label truth values. Words are compared case-folded.
"""

from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from apps.tester.core.exceptions import ConfigError

SYNONYMS_FILE = "synonyms.tsv"
ANTONYMS_FILE = "antonyms.tsv"
BOOLEANS_FILE = "booleans.tsv"

_TRUTH = {"true": True, "false": False}


def _pairs(document: str, name: str) -> list[tuple[str, str]]:
    pairs = []
    for number, line in enumerate(document.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = [cell.strip() for cell in line.split("\t")]
        if len(cells) != 2 or not all(cells):
            raise ConfigError(f"{name} line {number}: expected 2 fields", {"line": number})
        pairs.append((cells[0], cells[1]))
    return pairs


@dataclass(frozen=True)
class Lexicons:
    """Read-only lexicon bundle shared by every matcher thread."""

    synonyms: dict[str, frozenset[str]] = field(default_factory=dict)
    antonyms: dict[str, str] = field(default_factory=dict)
    booleans: dict[str, bool] = field(default_factory=dict)

    @classmethod
    def from_documents(cls, synonyms: str, antonyms: str, booleans: str) -> "Lexicons":
        synonym_map: dict[str, set[str]] = {}
        for left, right in _pairs(synonyms, SYNONYMS_FILE):
            a, b = left.casefold(), right.casefold()
            synonym_map.setdefault(a, set()).add(b)
            synonym_map.setdefault(b, set()).add(a)

        antonym_map: dict[str, str] = {}
        for left, right in _pairs(antonyms, ANTONYMS_FILE):
            antonym_map[left.casefold()] = right.casefold()
            antonym_map[right.casefold()] = left.casefold()

        truth: dict[str, bool] = {}
        for label, value in _pairs(booleans, BOOLEANS_FILE):
            if value.casefold() not in _TRUTH:
                raise ConfigError(f"{BOOLEANS_FILE}: truth value {value!r} is not true/false")
            truth[label.casefold()] = _TRUTH[value.casefold()]

        return cls(
            synonyms={word: frozenset(others) for word, others in synonym_map.items()},
            antonyms=antonym_map,
            booleans=truth,
        )

    @classmethod
    def load(cls, directory: Path | None = None) -> "Lexicons":
        """Load from a directory holding the three files, or the bundled set."""
        if directory is not None:
            read = lambda name: (directory / name).read_text(encoding="utf-8")  # noqa: E731
        else:
            base = resources.files("apps.tester.matching").joinpath("data")
            read = lambda name: base.joinpath(name).read_text("utf-8")  # noqa: E731
        return cls.from_documents(read(SYNONYMS_FILE), read(ANTONYMS_FILE), read(BOOLEANS_FILE))

    def are_synonyms(self, a: str, b: str) -> bool:
        return b.casefold() in self.synonyms.get(a.casefold(), frozenset())

    def antonym(self, word: str) -> str | None:
        return self.antonyms.get(word.casefold())

    def truth(self, label: str) -> bool | None:
        return self.booleans.get(label.casefold())

    def coverage(self, pairs: Iterable[tuple[str, str]]) -> float:
        """Fraction of synonym pairs the lexicon knows; 1.0 for no pairs."""
        pairs = list(pairs)
        if not pairs:
            return 1.0
        return sum(self.are_synonyms(a, b) for a, b in pairs) / len(pairs)


@lru_cache(maxsize=1)
def default_lexicons() -> Lexicons:
    """The bundled lexicons, loaded once."""
    return Lexicons.load()
