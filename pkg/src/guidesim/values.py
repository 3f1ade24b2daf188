"""Tagged sensor values shared by the world state, preconditions and actions.

A value is one of five variants: boolean flag, symbolic label, dimensionless
number, free text, or absent (none). Comparing values of different variants
is always "not equal", never an error, so preconditions can be evaluated
before the first percept arrives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

BOOL = "boolean"
LABEL = "label"
NUMBER = "number"
TEXT = "text"
NONE = "none"

_KINDS = (BOOL, LABEL, NUMBER, TEXT, NONE)

JsonValue = Union[bool, float, int, str, None]


@dataclass(frozen=True)
class SensorValue:
    kind: str
    payload: Union[bool, str, float, None] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown value kind {self.kind!r}")

    def is_none(self) -> bool:
        return self.kind == NONE

    def as_str(self) -> str:
        """Render the payload for display / speech output."""
        if self.kind == NONE:
            return ""
        if self.kind == BOOL:
            return "true" if self.payload else "false"
        if self.kind == NUMBER:
            return f"{self.payload}"
        return str(self.payload)


NONE_VALUE = SensorValue(NONE)


def boolean(flag: bool) -> SensorValue:
    return SensorValue(BOOL, bool(flag))


def label(token: str) -> SensorValue:
    if not token:
        raise ValueError("label tokens must be non-empty")
    return SensorValue(LABEL, token)


def number(x: float) -> SensorValue:
    return SensorValue(NUMBER, float(x))


def text(s: str) -> SensorValue:
    return SensorValue(TEXT, s)


def from_json(raw: JsonValue) -> SensorValue:
    """Map a plain JSON scalar onto a value (strings become labels)."""
    if raw is None:
        return NONE_VALUE
    if isinstance(raw, bool):
        return boolean(raw)
    if isinstance(raw, (int, float)):
        return number(raw)
    if isinstance(raw, str):
        return label(raw)
    raise ValueError(f"cannot represent {type(raw).__name__} as a sensor value")


def to_json(value: SensorValue) -> JsonValue:
    """Inverse of from_json; text renders as a plain string as well."""
    if value.kind == NONE:
        return None
    if value.kind == NUMBER:
        return float(value.payload)
    return value.payload


def values_equal(a: SensorValue, b: SensorValue) -> bool:
    # Different variants never compare equal; same-variant compares payloads.
    if a.kind != b.kind:
        return False
    return a.payload == b.payload


def compare(op: str, actual: SensorValue, expected: SensorValue) -> bool:
    """Evaluate a precondition/extractor operator between two values.

    `eq`/`ne` are total; `le`/`ge` hold only between two numbers.
    """
    if op == "eq":
        return values_equal(actual, expected)
    if op == "ne":
        return not values_equal(actual, expected)
    if op in ("le", "ge"):
        if actual.kind != NUMBER or expected.kind != NUMBER:
            return False
        if op == "le":
            return actual.payload <= expected.payload
        return actual.payload >= expected.payload
    raise ValueError(f"unknown comparison op {op!r}")
