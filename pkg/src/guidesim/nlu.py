"""Rule-based intent recognition with slot capture.

Utterances are normalized, then matched against each intent's token
templates in catalogue order; the first full match wins. A `{slot}` in a
template captures a maximal non-empty token run bounded by the template's
literal neighbors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Sequence


@dataclass(frozen=True)
class IntentDef:
    name: str
    patterns: Sequence[str]
    slots: Sequence[str]
    example: str


@dataclass(frozen=True)
class ParseResult:
    recognized: bool
    intent: str | None = None
    slots: Dict[str, str] = field(default_factory=dict)
    text: str = ""  # normalized input


def normalize(text: str) -> str:
    """Lowercase, collapse whitespace, drop terminal . ? ! punctuation."""
    out = " ".join(text.lower().split())
    out = out.rstrip(".?!").rstrip()
    return out


@lru_cache(maxsize=256)
def _template_regex(pattern: str) -> re.Pattern:
    parts: List[str] = []
    for token in normalize(pattern).split():
        m = re.fullmatch(r"\{(\w+)\}", token)
        if m:
            # maximal non-empty token run, greedy up to the next literal
            parts.append(rf"(?P<{m.group(1)}>\S+(?: \S+)*)")
        else:
            parts.append(re.escape(token))
    return re.compile("^" + " ".join(parts) + "$")


def parse_utterance(text: str, catalogue: Sequence[IntentDef]) -> ParseResult:
    normalized = normalize(text)
    for intent in catalogue:
        for pattern in intent.patterns:
            m = _template_regex(pattern).match(normalized)
            if m:
                slots = {name: m.group(name) for name in intent.slots if name in m.groupdict()}
                return ParseResult(recognized=True, intent=intent.name, slots=slots, text=normalized)
    return ParseResult(recognized=False, text=normalized)


def default_catalogue() -> List[IntentDef]:
    """Commands the robot understands, including decoys it never needs."""
    return [
        IntentDef(
            name="teach_region",
            patterns=(
                "learn the region {region_label}",
                "this is the {region_label}",
                "teach you the {region_label}",
            ),
            slots=("region_label",),
            example="learn the region kitchen",
        ),
        IntentDef(
            name="arrived",
            patterns=("we arrived", "we are here", "here we are"),
            slots=(),
            example="we arrived",
        ),
        IntentDef(name="greet", patterns=("hello", "hi robot"), slots=(), example="hello"),
        IntentDef(
            name="stop",
            patterns=("stop", "stop following me"),
            slots=(),
            example="stop",
        ),
        IntentDef(
            name="whoami",
            patterns=("what can you do",),
            slots=(),
            example="what can you do",
        ),
    ]
