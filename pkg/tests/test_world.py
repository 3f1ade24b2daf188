import random

import pytest

from guidesim.values import NONE_VALUE, boolean, compare, label, number
from guidesim.world import Extractor, Percept, SemanticSensorDef, WorldState, extract_sensors


def copy_sensor(sid, key):
    return SemanticSensorDef(id=sid, name=sid, icon="i", extractor=Extractor("copy", key))


def predicate_sensor(sid, key, op, constant):
    return SemanticSensorDef(
        id=sid, name=sid, icon="i", extractor=Extractor("predicate", key, op, constant)
    )


def count_sensor(sid, prefix):
    return SemanticSensorDef(id=sid, name=sid, icon="i", extractor=Extractor("count", prefix))


def test_apply_percepts_reports_changed_keys():
    ws = WorldState()
    assert ws.apply_percepts([Percept("person_visible", boolean(True))], 1) == ["person_visible"]
    # idempotent second write
    assert ws.apply_percepts([Percept("person_visible", boolean(True))], 2) == []


def test_apply_percepts_change_detection_across_keys():
    ws = WorldState()
    ws.apply_percepts([Percept("a", number(1))], 1)
    changed = ws.apply_percepts([Percept("a", number(2)), Percept("b", number(3))], 2)
    assert changed == ["a", "b"]


def test_apply_percepts_rejects_time_travel():
    ws = WorldState()
    ws.apply_percepts([Percept("a", number(1))], 5)
    with pytest.raises(ValueError):
        ws.apply_percepts([Percept("a", number(2))], 4)


def test_absent_key_reads_none():
    assert WorldState().get("nope") is NONE_VALUE


def test_extract_copy_and_absent():
    ws = WorldState()
    defs = [copy_sensor("last_intent", "last_intent")]
    assert extract_sensors(ws, defs).values["last_intent"].is_none()
    ws.apply_percepts([Percept("last_intent", label("greet"))], 1)
    assert extract_sensors(ws, defs).values["last_intent"] == label("greet")


def test_extract_predicate_distance_to_visibility():
    ws = WorldState()
    defs = [predicate_sensor("person_visible", "distance_to_avatar", "le", number(5.0))]
    ws.apply_percepts([Percept("distance_to_avatar", number(3.2))], 1)
    assert extract_sensors(ws, defs).values["person_visible"] == boolean(True)
    ws.apply_percepts([Percept("distance_to_avatar", number(5.1))], 2)
    assert extract_sensors(ws, defs).values["person_visible"] == boolean(False)


def test_extract_predicate_absent_key_is_false_even_for_ne():
    defs = [predicate_sensor("p", "k", "ne", label("x"))]
    assert extract_sensors(WorldState(), defs).values["p"] == boolean(False)


def test_extract_count_prefix():
    ws = WorldState()
    ws.apply_percepts(
        [Percept("region.kitchen", boolean(True)), Percept("region.hall", boolean(True))], 1
    )
    defs = [count_sensor("regions", "region.")]
    assert extract_sensors(ws, defs).values["regions"] == number(2)
    ws.clear_keys(["region.hall"])
    assert extract_sensors(ws, defs).values["regions"] == number(1)


def test_clear_keys_semantics():
    ws = WorldState()
    ws.apply_percepts([Percept("a", number(1))], 1)
    ws.clear_keys(["a", "missing"])  # absent key is a no-op
    assert ws.get("a").is_none()
    changed = ws.apply_percepts([Percept("a", number(1))], 2)
    assert changed == ["a"]  # value restored counts as a change


def test_extract_is_pure_and_deterministic():
    ws = WorldState()
    ws.apply_percepts([Percept("a", number(2)), Percept("b", label("x"))], 3)
    defs = [copy_sensor("sa", "a"), copy_sensor("sb", "b"), count_sensor("sc", "")]
    first = extract_sensors(ws, defs)
    second = extract_sensors(ws, defs)
    assert first == second


def test_merge_order_insensitivity_per_key():
    defs = [copy_sensor("sa", "a"), copy_sensor("sb", "b")]
    ws1 = WorldState()
    ws1.apply_percepts([Percept("a", number(1))], 1)
    ws1.apply_percepts([Percept("b", number(2))], 2)
    ws2 = WorldState()
    ws2.apply_percepts([Percept("b", number(2)), Percept("a", number(1))], 2)
    assert extract_sensors(ws1, defs).values == extract_sensors(ws2, defs).values


def test_predicate_matches_direct_comparison_randomized():
    rng = random.Random(42)
    for _ in range(1000):
        threshold = rng.uniform(-10, 10)
        op = rng.choice(["le", "ge", "eq", "ne"])
        value = rng.choice([rng.uniform(-10, 10), threshold])
        ws = WorldState()
        ws.apply_percepts([Percept("k", number(value))], 1)
        defs = [predicate_sensor("p", "k", op, number(threshold))]
        extracted = extract_sensors(ws, defs).values["p"]
        assert extracted == boolean(compare(op, number(value), number(threshold)))
