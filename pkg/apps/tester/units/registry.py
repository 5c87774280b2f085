"""Unit registry: surface forms to canonical units.

Loaded from a tab-separated file of ``alias, canonical, dimension,
scale_to_base`` rows; the bundled ``data/units.tsv`` covers speed, power
and time. Lookups are case-insensitive and ignore whitespace.
"""

from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import structlog

from apps.tester.core.exceptions import ConfigError, UnknownUnitError
from apps.tester.domain.entities.units import Unit

logger = structlog.get_logger(__name__)


def _fold(text: str) -> str:
    return "".join(text.split()).casefold()


class UnitRegistry:
    """Immutable alias table; safe to share between threads."""

    def __init__(self, units: dict[str, Unit], aliases: dict[str, str]) -> None:
        self._units = dict(units)
        self._aliases = dict(aliases)

    @classmethod
    def from_tsv(cls, document: str) -> "UnitRegistry":
        """Build a registry from TSV text.

        Raises:
            ConfigError: Malformed row, or one alias/canonical defined twice
                inconsistently
        """
        units: dict[str, Unit] = {}
        aliases: dict[str, str] = {}
        for number, line in enumerate(document.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = [cell.strip() for cell in line.split("\t")]
            if len(cells) != 4:
                raise ConfigError(f"units line {number}: expected 4 fields", {"line": number})
            alias, canonical, dimension, scale_text = cells
            try:
                unit = Unit(canonical, dimension, Fraction(scale_text))
            except (ValueError, ZeroDivisionError) as e:
                raise ConfigError(f"units line {number}: {e}", {"line": number}) from e

            known = units.setdefault(canonical, unit)
            if known != unit:
                raise ConfigError(f"unit {canonical} defined inconsistently", {"line": number})
            folded = _fold(alias)
            if aliases.setdefault(folded, canonical) != canonical:
                raise ConfigError(f"alias {alias!r} maps to two units", {"line": number})
        return cls(units, aliases)

    @classmethod
    def from_path(cls, path: Path) -> "UnitRegistry":
        return cls.from_tsv(path.read_text(encoding="utf-8"))

    def parse_unit(self, text: str) -> Unit:
        """Map a surface form to its canonical unit.

        Raises:
            UnknownUnitError: Text is empty or not in the registry
        """
        canonical = self._aliases.get(_fold(text))
        if canonical is None:
            raise UnknownUnitError(f"Unknown unit {text!r}", {"unit": text})
        return self._units[canonical]

    def knows(self, text: str) -> bool:
        return _fold(text) in self._aliases

    @property
    def aliases(self) -> dict[str, str]:
        return dict(self._aliases)

    @property
    def units(self) -> list[Unit]:
        return list(self._units.values())


@lru_cache(maxsize=1)
def default_registry() -> UnitRegistry:
    """The bundled registry, loaded once."""
    text = resources.files("apps.tester.units").joinpath("data/units.tsv").read_text("utf-8")
    registry = UnitRegistry.from_tsv(text)
    logger.debug("unit_registry_loaded", units=len(registry.units))
    return registry
