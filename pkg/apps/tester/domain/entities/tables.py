"""CAN signal table and Virtual Vehicle table entities."""

from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator


class CanSignal(BaseModel):
    """One row of the CAN signal table (k', v')."""

    model_config = ConfigDict(frozen=True)

    key: str = Field(..., min_length=1)
    endpoint_hint: str = ""
    encoding: dict[str, int] = Field(default_factory=dict, description="label -> raw")
    unit_text: str | None = None
    pseudocode: str | None = Field(default=None, description="Unexpanded OR-chain cell")

    @model_validator(mode="after")
    def _check_encoding(self) -> Self:
        raws = list(self.encoding.values())
        if len(set(raws)) != len(raws):
            raise ValueError(f"signal {self.key} reuses a raw value")
        return self

    @property
    def is_enumerated(self) -> bool:
        return bool(self.encoding)

    def label_of(self, raw: int) -> str | None:
        return next((label for label, value in self.encoding.items() if value == raw), None)


class VvEntry(BaseModel):
    """One row of the Virtual Vehicle table (k*, v*)."""

    model_config = ConfigDict(frozen=True)

    key: str = Field(..., min_length=1)
    encoding: dict[str, int] = Field(default_factory=dict, description="label -> raw")
    bound_can_key: str | None = None
    unit_text: str | None = None

    @property
    def is_enumerated(self) -> bool:
        return bool(self.encoding)


class CanTable(BaseModel):
    """Parsed CAN signal table, rows in file order."""

    model_config = ConfigDict(frozen=True)

    signals: tuple[CanSignal, ...] = ()

    @model_validator(mode="after")
    def _check_unique(self) -> Self:
        keys = [signal.key for signal in self.signals]
        if len(set(keys)) != len(keys):
            raise ValueError("CAN table repeats a signal key")
        return self

    def __len__(self) -> int:
        return len(self.signals)

    def get(self, key: str) -> CanSignal | None:
        return next((signal for signal in self.signals if signal.key == key), None)


class VvTable(BaseModel):
    """Parsed Virtual Vehicle table, rows in file order."""

    model_config = ConfigDict(frozen=True)

    entries: tuple[VvEntry, ...] = ()

    @model_validator(mode="after")
    def _check_unique(self) -> Self:
        keys = [entry.key for entry in self.entries]
        if len(set(keys)) != len(keys):
            raise ValueError("VV table repeats a key")
        return self

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, key: str) -> VvEntry | None:
        return next((entry for entry in self.entries if entry.key == key), None)

    def bound_to(self, can_key: str) -> VvEntry | None:
        """Entry explicitly bound to a CAN signal, if any."""
        return next((entry for entry in self.entries if entry.bound_can_key == can_key), None)

    @property
    def unbound(self) -> tuple[VvEntry, ...]:
        return tuple(entry for entry in self.entries if entry.bound_can_key is None)


class PseudocodeAlternatives(BaseModel):
    """Alternatives of an informal ``key:label OR key:label`` cell, in source order."""

    model_config = ConfigDict(frozen=True)

    alternatives: tuple[tuple[str, str], ...]

    @model_validator(mode="after")
    def _check_alternatives(self) -> Self:
        if not self.alternatives:
            raise ValueError("pseudocode needs at least one alternative")
        if len(set(self.alternatives)) != len(self.alternatives):
            raise ValueError("pseudocode repeats an alternative")
        return self

    def __len__(self) -> int:
        return len(self.alternatives)
