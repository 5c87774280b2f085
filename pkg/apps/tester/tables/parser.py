"""CAN and VV table files.

One record per line, ``|``-separated named columns, ``#`` comment lines:

    CAN: key | endpoint_hint | unit | encoding | pseudocode
    VV:  key | bound_can_key | unit | encoding

Encodings are written ``LABEL=INT;LABEL=INT``. Empty cells mean absent.
"""

from pathlib import Path

import structlog
from pydantic import ValidationError

from apps.tester.core.exceptions import DuplicateKeyError, TableSyntaxError
from apps.tester.domain.entities.tables import CanSignal, CanTable, VvEntry, VvTable

logger = structlog.get_logger(__name__)

CAN_COLUMNS = ("key", "endpoint_hint", "unit", "encoding", "pseudocode")
VV_COLUMNS = ("key", "bound_can_key", "unit", "encoding")


def parse_can_table(document: str) -> CanTable:
    """Parse a CAN signal table.

    Args:
        document: Table file contents

    Returns:
        Signals in file order; pseudocode cells kept unexpanded

    Raises:
        TableSyntaxError: Malformed record or encoding
        DuplicateKeyError: Same signal key twice
    """
    signals: list[CanSignal] = []
    seen: set[str] = set()
    for number, cells in _records(document, len(CAN_COLUMNS), optional_tail=1):
        key, hint, unit, encoding, pseudocode = cells
        _check_duplicate(key, seen, number)
        try:
            signals.append(
                CanSignal(
                    key=key,
                    endpoint_hint=hint,
                    encoding=_parse_encoding(encoding, number),
                    unit_text=unit or None,
                    pseudocode=pseudocode or None,
                )
            )
        except ValidationError as e:
            raise TableSyntaxError(f"Line {number}: {e}", {"line": number, "key": key}) from e
    logger.debug("can_table_parsed", signals=len(signals))
    return CanTable(signals=tuple(signals))


def parse_vv_table(document: str) -> VvTable:
    """Parse a Virtual Vehicle table; same rules as parse_can_table."""
    entries: list[VvEntry] = []
    seen: set[str] = set()
    for number, cells in _records(document, len(VV_COLUMNS)):
        key, bound, unit, encoding = cells
        _check_duplicate(key, seen, number)
        try:
            entries.append(
                VvEntry(
                    key=key,
                    bound_can_key=bound or None,
                    unit_text=unit or None,
                    encoding=_parse_encoding(encoding, number),
                )
            )
        except ValidationError as e:
            raise TableSyntaxError(f"Line {number}: {e}", {"line": number, "key": key}) from e
    logger.debug("vv_table_parsed", entries=len(entries))
    return VvTable(entries=tuple(entries))


def load_can_table(path: Path) -> CanTable:
    return parse_can_table(path.read_text(encoding="utf-8"))


def load_vv_table(path: Path) -> VvTable:
    return parse_vv_table(path.read_text(encoding="utf-8"))


def serialize_can_table(table: CanTable) -> str:
    lines = ["# " + " | ".join(CAN_COLUMNS)]
    lines.extend(
        " | ".join(
            (
                signal.key,
                signal.endpoint_hint,
                signal.unit_text or "",
                _format_encoding(signal.encoding),
                signal.pseudocode or "",
            )
        )
        for signal in table.signals
    )
    return "\n".join(lines) + "\n"


def serialize_vv_table(table: VvTable) -> str:
    lines = ["# " + " | ".join(VV_COLUMNS)]
    lines.extend(
        " | ".join(
            (
                entry.key,
                entry.bound_can_key or "",
                entry.unit_text or "",
                _format_encoding(entry.encoding),
            )
        )
        for entry in table.entries
    )
    return "\n".join(lines) + "\n"


def _records(document: str, columns: int, optional_tail: int = 0) -> list[tuple[int, list[str]]]:
    records = []
    for number, line in enumerate(document.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = [cell.strip() for cell in stripped.split("|")]
        if not columns - optional_tail <= len(cells) <= columns:
            raise TableSyntaxError(
                f"Line {number}: expected {columns} fields, got {len(cells)}",
                {"line": number},
            )
        cells.extend([""] * (columns - len(cells)))
        if not cells[0]:
            raise TableSyntaxError(f"Line {number}: empty key", {"line": number})
        records.append((number, cells))
    return records


def _check_duplicate(key: str, seen: set[str], number: int) -> None:
    if key in seen:
        raise DuplicateKeyError(f"Line {number}: duplicate key {key}", {"key": key})
    seen.add(key)


def _parse_encoding(cell: str, number: int) -> dict[str, int]:
    encoding: dict[str, int] = {}
    for item in filter(None, (part.strip() for part in cell.split(";"))):
        label, sep, raw = item.partition("=")
        label = label.strip()
        if not sep or not label:
            raise TableSyntaxError(f"Line {number}: bad encoding item {item!r}", {"line": number})
        if label in encoding:
            raise TableSyntaxError(f"Line {number}: label {label} repeated", {"line": number})
        try:
            encoding[label] = int(raw.strip())
        except ValueError as e:
            raise TableSyntaxError(
                f"Line {number}: raw value {raw!r} is not an integer", {"line": number}
            ) from e
    return encoding


def _format_encoding(encoding: dict[str, int]) -> str:
    return ";".join(f"{label}={raw}" for label, raw in encoding.items())
