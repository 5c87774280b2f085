"""Normalization of informally written enumerations ("STANDARD or ECONOMY")."""

import re

from apps.tester.core.exceptions import AmbiguousEnumError

_SEPARATORS = re.compile(r" or | OR |/|,")


def normalize_informal_enum(text: str, *, declared_enum: bool = True) -> list[str]:
    """Split informal enumeration text into labels.

    Args:
        text: Raw enum text, e.g. ``"A, B or C"``
        declared_enum: Whether the property was declared as an enumeration;
            only then is a single label an error

    Returns:
        Distinct labels in original order

    Raises:
        AmbiguousEnumError: Fewer than two labels for a declared enumeration
    """
    labels: list[str] = []
    for part in _SEPARATORS.split(text.strip()):
        label = part.strip()
        if label and label not in labels:
            labels.append(label)
    if not labels or (declared_enum and len(labels) < 2):
        raise AmbiguousEnumError(
            f"Enumeration text {text!r} yields {len(labels)} label(s)",
            {"text": text, "labels": labels},
        )
    return labels
