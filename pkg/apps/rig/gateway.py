"""Gateway translation between API records and CAN signals.

PUT carries each property (k, v) onto its signal (k', v'); GET reads the
signals back and renders the API record. Active faults are applied here.
"""

import math
from datetime import datetime
from fractions import Fraction
from typing import Any

import structlog

from apps.rig.models import EndpointConfig, FaultKind, PropertyBinding, PropertyKind
from apps.rig.state import RigState
from apps.tester.core.exceptions import RigRequestError, UnknownKeyError
from apps.tester.domain.entities.spec import BOOLEAN_LABELS

logger = structlog.get_logger(__name__)


class Gateway:
    """Stateless translator over a RigState."""

    def __init__(self, state: RigState) -> None:
        self.state = state

    def endpoint(self, path: str, method: str) -> EndpointConfig:
        """Resolve a configured endpoint.

        Raises:
            UnknownKeyError: Path not configured or method not served
        """
        endpoint = self.state.config.endpoint(path)
        if endpoint is None or method not in endpoint.methods:
            raise UnknownKeyError(f"No {method} {path} on this rig", {"path": path, "method": method})
        return endpoint

    def put(self, path: str, body: dict[str, Any]) -> dict[str, Any]:
        """Apply a PUT record; returns the CAN raws written per property.

        Raises:
            UnknownKeyError: Endpoint not served
            RigRequestError: Unknown property or value outside its encoding
        """
        endpoint = self.endpoint(path, "PUT")
        written: dict[str, Any] = {}
        for api_key, value in body.items():
            binding = endpoint.binding(api_key)
            if binding is None:
                raise RigRequestError(f"{path} has no property {api_key}", {"property": api_key})
            frames = self._encode(endpoint, binding, value)
            for can_key, raw in frames:
                self.state.write_can(can_key, raw)
            written[api_key] = {can_key: raw for can_key, raw in frames}
        logger.debug("gateway_put", path=path, properties=len(written))
        return written

    def get(self, path: str) -> dict[str, Any]:
        """Render the API record of an endpoint from the current VV state."""
        endpoint = self.endpoint(path, "GET")
        return {binding.api_key: self._decode(endpoint, binding) for binding in endpoint.properties}

    def _encode(
        self, endpoint: EndpointConfig, binding: PropertyBinding, value: Any
    ) -> list[tuple[str, float]]:
        can_key = binding.can_key or ""
        match binding.kind:
            case PropertyKind.BOOLEAN | PropertyKind.ENUM:
                label = _label_of(binding, value)
                label = self._swap(endpoint, label)
                if label not in binding.value_map:
                    raise RigRequestError(
                        f"{binding.api_key} does not take {value!r}", {"property": binding.api_key}
                    )
                return [(can_key, float(binding.value_map[label]))]
            case PropertyKind.NUMERIC:
                if isinstance(value, bool) or not isinstance(value, int | float) or not math.isfinite(value):
                    raise RigRequestError(
                        f"{binding.api_key} needs a number", {"property": binding.api_key}
                    )
                raw = Fraction(value) * self._scale(binding) * self._factor(endpoint)
                return [(can_key, float(raw))]
            case PropertyKind.DATETIME:
                hour, minute = _parse_time(binding.api_key, value)
                return [(binding.hour_can_key or "", float(hour)), (binding.minute_can_key or "", float(minute))]
        return []

    def _decode(self, endpoint: EndpointConfig, binding: PropertyBinding) -> Any:
        if binding.kind is PropertyKind.DATETIME:
            hour = self.state.read_can(binding.hour_can_key or "")
            minute = self.state.read_can(binding.minute_can_key or "")
            if hour is None or minute is None:
                return None
            return f"{int(hour):02d}:{int(minute):02d}"

        raw = self.state.read_can(binding.can_key or "")
        if raw is None:
            return None
        if binding.kind is PropertyKind.NUMERIC:
            value = Fraction(raw) / self._scale(binding) * self._factor(endpoint)
            if binding.integer and value.denominator == 1:
                return int(value)
            return float(value)

        label = binding.label_for(int(raw))
        if label is None:
            return None
        label = self._swap(endpoint, label)
        if binding.kind is PropertyKind.BOOLEAN:
            return label == BOOLEAN_LABELS[0]
        return label

    def _scale(self, binding: PropertyBinding) -> Fraction:
        if binding.can_key and self.state.has_fault(FaultKind.WRONG_UNIT, binding.can_key):
            # The gateway forgets the conversion, or applies a stray 1000 when there is none
            return Fraction(1000) if binding.ratio == 1 else Fraction(1)
        return binding.ratio

    def _factor(self, endpoint: EndpointConfig) -> Fraction:
        factor = Fraction(1)
        for fault in self.state.faults(FaultKind.WRONG_SCALE, endpoint.path):
            factor *= Fraction(fault.factor)
        return factor

    def _swap(self, endpoint: EndpointConfig, label: str) -> str:
        for fault in self.state.faults(FaultKind.SWAPPED_ENUM, endpoint.path):
            if label == fault.label_a:
                return fault.label_b or label
            if label == fault.label_b:
                return fault.label_a or label
        return label


def _label_of(binding: PropertyBinding, value: Any) -> str:
    if binding.kind is PropertyKind.BOOLEAN:
        if not isinstance(value, bool):
            raise RigRequestError(f"{binding.api_key} needs true or false", {"property": binding.api_key})
        return BOOLEAN_LABELS[0] if value else BOOLEAN_LABELS[1]
    if not isinstance(value, str):
        raise RigRequestError(f"{binding.api_key} needs a label", {"property": binding.api_key})
    return value


def _parse_time(api_key: str, value: Any) -> tuple[int, int]:
    """Hour and minute of an ISO datetime or an ``HH:MM`` string."""
    if isinstance(value, str):
        try:
            if "T" in value:
                parsed = datetime.fromisoformat(value)
                return parsed.hour, parsed.minute
            hour_text, minute_text = value.split(":")[:2]
            hour, minute = int(hour_text), int(minute_text)
            if 0 <= hour <= 23 and 0 <= minute <= 59:
                return hour, minute
        except ValueError:
            pass
    raise RigRequestError(f"{api_key} needs a datetime, got {value!r}", {"property": api_key})
