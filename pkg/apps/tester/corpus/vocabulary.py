"""Automotive word lists the forge builds keys, labels and units from."""

from typing import NamedTuple

SUBJECTS: tuple[str, ...] = (
    "climate",
    "cabin",
    "seat",
    "mirror",
    "wiper",
    "battery",
    "charging",
    "trailer",
    "cargo",
    "engine",
    "brake",
    "tire",
    "window",
    "door",
    "alarm",
    "cruise",
    "lane",
    "parking",
    "horn",
    "roof",
    "heater",
    "steering",
    "suspension",
    "tachograph",
    "axle",
)

QUALIFIERS: tuple[str, ...] = ("", "front", "rear", "left", "right", "upper", "lower", "aux", "main")


class NumericTemplate(NamedTuple):
    words: tuple[str, ...]
    dimension: str
    minimum: int
    maximum: int


class EnumTemplate(NamedTuple):
    words: tuple[str, ...]
    labels: tuple[str, ...]


NUMERIC_TEMPLATES: tuple[NumericTemplate, ...] = (
    NumericTemplate(("max", "speed"), "speed", 0, 250),
    NumericTemplate(("target", "speed"), "speed", 0, 160),
    NumericTemplate(("speed", "limit"), "speed", 10, 130),
    NumericTemplate(("charge", "power"), "power", 0, 150),
    NumericTemplate(("heater", "power"), "power", 0, 12),
    NumericTemplate(("fan", "level"), "ratio", 0, 100),
    NumericTemplate(("fill", "level"), "ratio", 0, 100),
    NumericTemplate(("rest", "duration"), "time", 0, 120),
    NumericTemplate(("timer", "duration"), "time", 1, 90),
    NumericTemplate(("reduced", "weekly", "rests"), "time", 0, 48),
)

ENUM_TEMPLATES: tuple[EnumTemplate, ...] = (
    EnumTemplate(("mode",), ("ECO", "COMFORT", "SPORT")),
    EnumTemplate(("setting",), ("OFF", "LOW", "MEDIUM", "HIGH")),
    EnumTemplate(("position",), ("PARK", "REVERSE", "NEUTRAL", "DRIVE")),
    EnumTemplate(("wiper", "speed"), ("SLOW", "FAST", "INTERVAL")),
    EnumTemplate(("light", "pattern"), ("STEADY", "BLINKING", "PULSING")),
    EnumTemplate(("warning", "tone"), ("CHIME", "BEEP", "SILENT")),
)

# Every state word has an antonym in the bundled lexicon
BOOLEAN_STATES: tuple[str, ...] = ("locked", "open", "active", "enabled", "engaged", "connected", "visible")

# CAN-side encodings of a boolean: (true label, false label)
BOOLEAN_ENCODINGS: tuple[tuple[str, str], ...] = (
    ("TRUE", "FALSE"),
    ("ON", "OFF"),
    ("ACTIVE", "INACTIVE"),
    ("ENABLED", "DISABLED"),
)

DATETIME_TEMPLATES: tuple[tuple[str, ...], ...] = (
    ("alarm", "time"),
    ("departure", "time"),
    ("charge", "start", "time"),
    ("preheat", "time"),
    ("wake", "up", "time"),
)

# Labels that only appear as extra alternatives in pseudocode cells
ALTERNATIVE_LABELS: tuple[str, ...] = (
    "LEGACY",
    "RESERVED",
    "SERVICE",
    "FALLBACK",
    "TRANSITION",
    "INIT",
    "UNDEFINED",
    "CALIBRATION",
)

# Units per dimension; the first one is what unperturbed documents use
UNITS: dict[str, tuple[str, ...]] = {
    "speed": ("km/h", "m/s", "mph"),
    "power": ("kW", "W"),
    "time": ("min", "s", "h"),
    "ratio": ("%", "permille"),
}

UNIT_PHRASES: dict[str, str] = {
    "km/h": "kilometers_per_hour",
    "m/s": "meters_per_second",
    "mph": "mph",
    "kW": "kilowatts",
    "W": "watts",
    "min": "minutes",
    "s": "seconds",
    "h": "hours",
    "%": "percent",
    "permille": "permille",
}

# Synonyms the forge may substitute. The first group is in the bundled
# lexicon; the second is not, so matching cannot recover it.
LEXICON_SYNONYMS: dict[str, str] = {
    "speed": "velocity",
    "fan": "blower",
    "level": "amount",
    "setting": "preference",
    "mode": "profile",
    "limit": "cap",
    "light": "lamp",
    "door": "hatch",
    "window": "pane",
    "heater": "warmer",
    "cargo": "freight",
    "rest": "break",
    "start": "launch",
    "warning": "caution",
}

EXTRA_SYNONYMS: dict[str, str] = {
    "battery": "accumulator",
    "engine": "motor",
    "duration": "period",
    "power": "wattage",
    "alarm": "alert",
    "trailer": "hitch",
    "target": "goal",
    "seat": "chair",
    "mirror": "reflector",
    "position": "placement",
    "tone": "sound",
    "pattern": "sequence",
}
