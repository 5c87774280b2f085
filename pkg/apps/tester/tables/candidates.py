"""Candidate retrieval: CAN signals documented for an endpoint."""

import re

from apps.tester.domain.entities.tables import CanSignal, CanTable

_NON_ALNUM = re.compile(r"[^0-9a-z]")


def normalize_hint(text: str) -> str:
    return _NON_ALNUM.sub("", text.casefold())


def lookup_candidates(endpoint_path: str, table: CanTable) -> list[CanSignal]:
    """Signals whose endpoint hint names this endpoint, in table order.

    The comparison is exact after case folding and dropping
    non-alphanumerics, so ``"/climate"`` retrieves hint ``"Climate"``.
    """
    wanted = normalize_hint(endpoint_path)
    return [signal for signal in table.signals if normalize_hint(signal.endpoint_hint) == wanted]
