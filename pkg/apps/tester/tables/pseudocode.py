"""Informal pseudocode cells: ``key:label OR key:label ...``."""

import re

from apps.tester.core.exceptions import GrammarError
from apps.tester.domain.entities.tables import PseudocodeAlternatives

_PAIR = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_.]*)\s*:\s*([A-Za-z0-9_.+\-]+)\s*")
_OR = re.compile(r"\s+OR\s+")


def parse_pseudocode(expr: str) -> PseudocodeAlternatives:
    """Parse an OR-chain into its alternatives, in source order.

    Raises:
        GrammarError: Anything other than ``pair ("OR" pair)*``
    """
    alternatives: list[tuple[str, str]] = []
    for chunk in _OR.split(expr.strip()):
        match = _PAIR.fullmatch(chunk)
        if match is None:
            raise GrammarError(f"Not an OR-chain of key:label pairs: {expr!r}", {"expr": expr})
        pair = (match.group(1), match.group(2))
        if pair in alternatives:
            raise GrammarError(f"Alternative {pair[0]}:{pair[1]} repeated", {"expr": expr})
        alternatives.append(pair)
    return PseudocodeAlternatives(alternatives=tuple(alternatives))


def serialize_pseudocode(alternatives: PseudocodeAlternatives) -> str:
    return " OR ".join(f"{key}:{label}" for key, label in alternatives.alternatives)
