"""Matcher port - interface every matching backend implements.

One entry point per task. Requests and responses are typed records so the
same call can be answered by the local rule engine, by a remote language
model, or from a replay store.
"""

from abc import ABC, abstractmethod

from pydantic import BaseModel, ConfigDict, Field

from apps.tester.domain.entities.matching import MatchCandidate, Strictness


class KeyMatchRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    left: tuple[str, ...]
    right: tuple[str, ...]
    strictness: Strictness


class KeyMatchResponse(BaseModel):
    candidates: list[MatchCandidate] = Field(default_factory=list)


class ValueMatchRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    left_labels: tuple[str, ...]
    right_labels: tuple[str, ...]
    strictness: Strictness


class ValueMatchResponse(BaseModel):
    pairs: list[tuple[str, str]] = Field(default_factory=list)


class PseudocodeMatchRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    left_key: str
    left_label: str
    alternatives: tuple[tuple[str, str], ...]
    strictness: Strictness


class PseudocodeMatchResponse(BaseModel):
    matches: list[tuple[str, str]] = Field(default_factory=list)


class UnitInferRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    key: str
    description: str | None = None
    known_units: tuple[str, ...] = ()


class UnitInferResponse(BaseModel):
    unit: str | None = None


class MatcherPort(ABC):
    """Port (interface) for matching backends.

    Implementations must be safe to call from several threads at once; the
    pipeline matches endpoints in parallel.
    """

    name: str = "matcher"

    @abstractmethod
    def match_keys(self, request: KeyMatchRequest) -> KeyMatchResponse:
        """Pair left keys with right keys.

        Args:
            request: Key lists and strictness

        Returns:
            Scored one-to-one candidates

        Raises:
            BackendError: Backend could not answer
        """
        pass

    @abstractmethod
    def match_values(self, request: ValueMatchRequest) -> ValueMatchResponse:
        """Pair enumerated labels of two encodings."""
        pass

    @abstractmethod
    def match_pseudocode(self, request: PseudocodeMatchRequest) -> PseudocodeMatchResponse:
        """Pick the alternatives of an OR-chain that realize one API label."""
        pass

    @abstractmethod
    def infer_unit(self, request: UnitInferRequest) -> UnitInferResponse:
        """Recover a unit from a property's description, or None."""
        pass

    def close(self) -> None:  # noqa: B027
        """Release transports and flush record stores; no-op by default."""
