"""Percept memory (world state) and semantic sensor extraction.

Raw percepts land in a key/value store with per-key timestamps; semantic
sensors abstract that store into a small, human-legible snapshot that the
guidance engine's preconditions consume. Extractors are declarative (copy,
predicate, count) so configurations stay serializable and explainable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from .values import NONE_VALUE, SensorValue, boolean, compare, number, values_equal

COPY = "copy"
PREDICATE = "predicate"
COUNT = "count"


@dataclass(frozen=True)
class Percept:
    key: str
    value: SensorValue

    def __post_init__(self):
        if not self.key:
            raise ValueError("percept keys must be non-empty")


@dataclass(frozen=True)
class Extractor:
    kind: str  # copy | predicate | count
    key: str  # world key, or key prefix for count
    op: str | None = None  # predicate only: eq | ne | le | ge
    constant: SensorValue | None = None  # predicate only


@dataclass(frozen=True)
class SemanticSensorDef:
    id: str
    name: str
    icon: str
    extractor: Extractor


@dataclass(frozen=True)
class SensorSnapshot:
    values: Dict[str, SensorValue]
    tick: int


class WorldState:
    """Latest-value percept store; absent keys read as the none value."""

    def __init__(self) -> None:
        self.entries: Dict[str, Tuple[SensorValue, int]] = {}
        self.tick = 0

    def get(self, key: str) -> SensorValue:
        entry = self.entries.get(key)
        return entry[0] if entry is not None else NONE_VALUE

    def apply_percepts(self, percepts: Iterable[Percept], tick: int) -> List[str]:
        """Overwrite keys with (value, tick); returns keys whose value changed."""
        if tick < self.tick:
            raise ValueError(f"tick {tick} older than world tick {self.tick}")
        self.tick = tick
        changed: List[str] = []
        for p in percepts:
            old = self.get(p.key)
            stored = self.entries.get(p.key)
            if stored is not None and tick < stored[1]:
                raise ValueError(f"tick {tick} older than stored tick for {p.key!r}")
            self.entries[p.key] = (p.value, tick)
            if not values_equal(old, p.value):
                changed.append(p.key)
        return changed

    def clear_keys(self, keys: Iterable[str]) -> None:
        """Set the listed keys to none at the current tick."""
        for key in keys:
            if key in self.entries:
                self.entries[key] = (NONE_VALUE, self.tick)


def extract_sensors(ws: WorldState, defs: Iterable[SemanticSensorDef]) -> SensorSnapshot:
    """Pure projection of the world state onto the declared sensors."""
    values: Dict[str, SensorValue] = {}
    for d in defs:
        ex = d.extractor
        if ex.kind == COPY:
            values[d.id] = ws.get(ex.key)
        elif ex.kind == PREDICATE:
            actual = ws.get(ex.key)
            if actual.is_none():
                values[d.id] = boolean(False)
            else:
                values[d.id] = boolean(compare(ex.op, actual, ex.constant))
        elif ex.kind == COUNT:
            n = sum(
                1
                for key, (value, _) in ws.entries.items()
                if key.startswith(ex.key) and not value.is_none()
            )
            values[d.id] = number(n)
        else:
            raise ValueError(f"unknown extractor kind {ex.kind!r}")
    return SensorSnapshot(values=values, tick=ws.tick)
