"""Configuration document: sensors, intents, actions, apartment, protocols.

One JSON document defines a whole scenario. Parsing collects *all* errors
(syntactic node errors and semantic violations) instead of stopping at the
first; serialization is canonical (schema key order, config-order arrays,
shortest round-trip numbers) so parse(serialize(c)) == c structurally.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from . import values
from .engine import (
    ActionSpec,
    Behavior,
    Binding,
    FROM_WORLD,
    InteractionProtocol,
    Precondition,
    STATIC,
)
from .nlu import IntentDef, default_catalogue
from .sim import Apartment, Rect, Room
from .world import COPY, COUNT, PREDICATE, Extractor, SemanticSensorDef

DUPLICATE_ID = "DuplicateId"
UNKNOWN_REFERENCE = "UnknownReference"
NO_ENTRY = "NoEntry"
MULTIPLE_ENTRIES = "MultipleEntries"
NO_EXIT = "NoExit"
PREDECESSOR_CYCLE = "PredecessorCycle"
BAD_VALUE = "BadValue"
SYNTAX_ERROR = "SyntaxError"

# World keys the session itself maintains each tick; sensor extractor keys
# additionally declare injectable keys (this is how battery_low resolves).
BUILTIN_WORLD_KEYS = (
    "distance_to_avatar",
    "avatar_pose",
    "robot_pose",
    "regions_taught",
    "last_taught_label",
)


@dataclass(frozen=True)
class ConfigError:
    path: str
    code: str
    message: str

    def to_json(self) -> dict:
        return {"path": self.path, "code": self.code, "message": self.message}


@dataclass(frozen=True)
class ActionDef:
    name: str
    params: Tuple[str, ...]


@dataclass(frozen=True)
class ApartmentConfig:
    apartment: Apartment
    robot_start: Tuple[float, float]
    avatar_start: Tuple[float, float]
    perception_radius: float
    speed: float
    tau: float
    time_limit_s: float


@dataclass
class Config:
    version: int
    sensors: List[SemanticSensorDef]
    intents: List[IntentDef]
    actions: List[ActionDef]
    apartment: ApartmentConfig
    protocols: List[InteractionProtocol]

    def action(self, name: str) -> Optional[ActionDef]:
        for a in self.actions:
            if a.name == name:
                return a
        return None

    def sensor_ids(self) -> Set[str]:
        return {s.id for s in self.sensors}

    def intent_slot_map(self) -> Dict[str, Tuple[str, ...]]:
        return {i.name: tuple(i.slots) for i in self.intents}

    def goal_labels(self) -> Tuple[str, ...]:
        return tuple(room.name for room in self.apartment.apartment.rooms)


def world_key_universe(config: Config) -> Set[str]:
    keys = set(BUILTIN_WORLD_KEYS)
    keys.add("last_intent")
    for intent in config.intents:
        keys.update(intent.slots)
    for sensor in config.sensors:
        if sensor.extractor.kind in (COPY, PREDICATE):
            keys.add(sensor.extractor.key)
    return keys


# --- structural parsing -------------------------------------------------------


class _Walker:
    """Typed field access over raw JSON with path-qualified error collection."""

    def __init__(self) -> None:
        self.errors: List[ConfigError] = []

    def error(self, path: str, code: str, message: str) -> None:
        self.errors.append(ConfigError(path=path, code=code, message=message))

    def field(self, obj: dict, key: str, kinds, path: str, default=None):
        if not isinstance(obj, dict) or key not in obj:
            self.error(f"{path}/{key}", BAD_VALUE, f"missing required key {key!r}")
            return default
        value = obj[key]
        if kinds is bool:
            if not isinstance(value, bool):
                self.error(f"{path}/{key}", BAD_VALUE, f"{key!r} must be a boolean")
                return default
            return value
        if kinds is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                self.error(f"{path}/{key}", BAD_VALUE, f"{key!r} must be a number")
                return default
            return float(value)
        if kinds is int:
            if isinstance(value, bool) or not isinstance(value, int):
                self.error(f"{path}/{key}", BAD_VALUE, f"{key!r} must be an integer")
                return default
            return value
        if not isinstance(value, kinds):
            self.error(f"{path}/{key}", BAD_VALUE, f"{key!r} has the wrong type")
            return default
        return value

    def pair(self, obj: dict, key: str, path: str) -> Optional[Tuple[float, float]]:
        raw = self.field(obj, key, list, path)
        if raw is None:
            return None
        if len(raw) != 2 or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw):
            self.error(f"{path}/{key}", BAD_VALUE, f"{key!r} must be [x, y]")
            return None
        return (float(raw[0]), float(raw[1]))


def _parse_rect(raw, path: str, w: _Walker) -> Optional[Rect]:
    if (
        not isinstance(raw, list)
        or len(raw) != 4
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw)
    ):
        w.error(path, BAD_VALUE, "rectangles are [x, y, w, h]")
        return None
    return Rect(float(raw[0]), float(raw[1]), float(raw[2]), float(raw[3]))


def _parse_value(raw, path: str, w: _Walker) -> values.SensorValue:
    try:
        return values.from_json(raw)
    except ValueError as exc:
        w.error(path, BAD_VALUE, str(exc))
        return values.NONE_VALUE


def _parse_sensor(raw, path: str, w: _Walker) -> Optional[SemanticSensorDef]:
    sid = w.field(raw, "id", str, path)
    name = w.field(raw, "name", str, path)
    icon = w.field(raw, "icon", str, path)
    ex_raw = w.field(raw, "extractor", dict, path)
    if sid is None or ex_raw is None:
        return None
    kind = w.field(ex_raw, "kind", str, f"{path}/extractor")
    key = w.field(ex_raw, "key", str, f"{path}/extractor")
    if kind not in (COPY, PREDICATE, COUNT):
        w.error(f"{path}/extractor/kind", BAD_VALUE, f"unknown extractor kind {kind!r}")
        return None
    op = None
    constant = None
    if kind == PREDICATE:
        op = w.field(ex_raw, "op", str, f"{path}/extractor")
        if op not in ("eq", "ne", "le", "ge"):
            w.error(f"{path}/extractor/op", BAD_VALUE, f"unknown predicate op {op!r}")
            return None
        if "value" not in ex_raw:
            w.error(f"{path}/extractor/value", BAD_VALUE, "predicate extractors need a value")
            return None
        constant = _parse_value(ex_raw["value"], f"{path}/extractor/value", w)
    if key is None:
        return None
    return SemanticSensorDef(
        id=sid, name=name or sid, icon=icon or "", extractor=Extractor(kind, key, op, constant)
    )


def _parse_intent(raw, path: str, w: _Walker) -> Optional[IntentDef]:
    name = w.field(raw, "name", str, path)
    patterns = w.field(raw, "patterns", list, path)
    slots = w.field(raw, "slots", list, path)
    example = w.field(raw, "example", str, path)
    if name is None or patterns is None:
        return None
    for i, p in enumerate(patterns):
        if not isinstance(p, str):
            w.error(f"{path}/patterns/{i}", BAD_VALUE, "patterns must be strings")
            return None
    if slots is not None and any(not isinstance(s, str) for s in slots):
        w.error(f"{path}/slots", BAD_VALUE, "slots must be strings")
        return None
    return IntentDef(
        name=name,
        patterns=tuple(patterns),
        slots=tuple(slots or ()),
        example=example or "",
    )


def _parse_action_def(raw, path: str, w: _Walker) -> Optional[ActionDef]:
    name = w.field(raw, "name", str, path)
    params = w.field(raw, "params", list, path)
    if name is None or params is None:
        return None
    if any(not isinstance(p, str) for p in params):
        w.error(f"{path}/params", BAD_VALUE, "action params must be strings")
        return None
    return ActionDef(name=name, params=tuple(params))


def parse_behavior_node(raw, path: str, def_index: int) -> Tuple[Optional[Behavior], List[ConfigError]]:
    """Structural parse of one behavior object (also used by define_behavior)."""
    w = _Walker()
    if not isinstance(raw, dict):
        w.error(path, BAD_VALUE, "behaviors must be objects")
        return None, w.errors
    bid = w.field(raw, "id", str, path)
    title = w.field(raw, "title", str, path)
    entry = w.field(raw, "entry", bool, path, default=False)
    exit_ = w.field(raw, "exit", bool, path, default=False)
    preds = w.field(raw, "predecessors", list, path, default=[])
    pcs_raw = w.field(raw, "preconditions", list, path, default=[])
    action_raw = w.field(raw, "action", dict, path)
    if bid is None or action_raw is None:
        return None, w.errors
    if any(not isinstance(p, str) for p in (preds or [])):
        w.error(f"{path}/predecessors", BAD_VALUE, "predecessor ids must be strings")
        return None, w.errors
    preconditions = []
    for i, pc in enumerate(pcs_raw or []):
        pc_path = f"{path}/preconditions/{i}"
        if not isinstance(pc, dict):
            w.error(pc_path, BAD_VALUE, "preconditions must be objects")
            continue
        sensor = w.field(pc, "sensor", str, pc_path)
        op = w.field(pc, "op", str, pc_path)
        if op not in ("eq", "ne"):
            w.error(f"{pc_path}/op", BAD_VALUE, f"precondition op must be eq or ne, got {op!r}")
            continue
        if "value" not in pc:
            w.error(f"{pc_path}/value", BAD_VALUE, "preconditions need a value")
            continue
        expected = _parse_value(pc["value"], f"{pc_path}/value", w)
        if sensor is None:
            continue
        preconditions.append(Precondition(sensor_id=sensor, op=op, expected=expected))
    action_name = w.field(action_raw, "name", str, f"{path}/action")
    params_raw = w.field(action_raw, "params", dict, f"{path}/action", default={})
    bindings: Dict[str, Binding] = {}
    for pname, binding_raw in (params_raw or {}).items():
        b_path = f"{path}/action/params/{pname}"
        if not isinstance(binding_raw, dict) or len(binding_raw) != 1:
            w.error(b_path, BAD_VALUE, "bindings are {static: value} or {from_world: key}")
            continue
        if "static" in binding_raw:
            bindings[pname] = Binding(kind=STATIC, value=_parse_value(binding_raw["static"], b_path, w))
        elif "from_world" in binding_raw:
            key = binding_raw["from_world"]
            if not isinstance(key, str) or not key:
                w.error(b_path, BAD_VALUE, "from_world must name a world key")
                continue
            bindings[pname] = Binding(kind=FROM_WORLD, key=key)
        else:
            w.error(b_path, BAD_VALUE, "bindings are {static: value} or {from_world: key}")
    if action_name is None:
        return None, w.errors
    behavior = Behavior(
        id=bid,
        title=title or bid,
        is_entry=bool(entry),
        is_exit=bool(exit_),
        preconditions=preconditions,
        predecessors=list(preds or []),
        action=ActionSpec(name=action_name, params=bindings),
        def_index=def_index,
    )
    return behavior, w.errors


def _parse_protocol(raw, path: str, w: _Walker) -> Optional[InteractionProtocol]:
    pid = w.field(raw, "id", str, path)
    name = w.field(raw, "name", str, path)
    priority = w.field(raw, "priority", int, path, default=0)
    behaviors_raw = w.field(raw, "behaviors", list, path)
    if pid is None or behaviors_raw is None:
        return None
    behaviors = []
    for i, b_raw in enumerate(behaviors_raw):
        behavior, errs = parse_behavior_node(b_raw, f"{path}/behaviors/{i}", def_index=i)
        w.errors.extend(errs)
        if behavior is not None:
            behaviors.append(behavior)
    return InteractionProtocol(id=pid, name=name or pid, priority=priority, behaviors=behaviors)


def parse_config(text: str) -> Union[Config, List[ConfigError]]:
    """Parse and fully validate a config document; errors come back as a list."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        return [ConfigError(path="", code=SYNTAX_ERROR, message=str(exc))]
    if not isinstance(doc, dict):
        return [ConfigError(path="", code=SYNTAX_ERROR, message="top level must be an object")]
    w = _Walker()
    version = w.field(doc, "version", int, "")
    if version is not None and version != 1:
        w.error("/version", BAD_VALUE, f"unsupported version {version}")
    sensors = []
    for i, raw in enumerate(w.field(doc, "sensors", list, "", default=[]) or []):
        sensor = _parse_sensor(raw, f"/sensors/{i}", w)
        if sensor is not None:
            sensors.append(sensor)
    intents = []
    for i, raw in enumerate(w.field(doc, "intents", list, "", default=[]) or []):
        intent = _parse_intent(raw, f"/intents/{i}", w)
        if intent is not None:
            intents.append(intent)
    actions = []
    for i, raw in enumerate(w.field(doc, "actions", list, "", default=[]) or []):
        action = _parse_action_def(raw, f"/actions/{i}", w)
        if action is not None:
            actions.append(action)
    apartment = _parse_apartment(w.field(doc, "apartment", dict, ""), "/apartment", w)
    protocols = []
    for i, raw in enumerate(w.field(doc, "protocols", list, "", default=[]) or []):
        if not isinstance(raw, dict):
            w.error(f"/protocols/{i}", BAD_VALUE, "protocols must be objects")
            continue
        protocol = _parse_protocol(raw, f"/protocols/{i}", w)
        if protocol is not None:
            protocols.append(protocol)
    if apartment is None:
        return w.errors
    config = Config(
        version=version or 1,
        sensors=sensors,
        intents=intents,
        actions=actions,
        apartment=apartment,
        protocols=protocols,
    )
    all_errors = w.errors + validate(config)
    if all_errors:
        return all_errors
    return config


def _parse_apartment(raw, path: str, w: _Walker) -> Optional[ApartmentConfig]:
    if raw is None:
        return None
    bounds = w.pair(raw, "bounds", path)
    walls = []
    for i, wall_raw in enumerate(w.field(raw, "walls", list, path, default=[]) or []):
        rect = _parse_rect(wall_raw, f"{path}/walls/{i}", w)
        if rect is not None:
            walls.append(rect)
    rooms = []
    for i, room_raw in enumerate(w.field(raw, "rooms", list, path, default=[]) or []):
        room_path = f"{path}/rooms/{i}"
        if not isinstance(room_raw, dict):
            w.error(room_path, BAD_VALUE, "rooms must be objects")
            continue
        name = w.field(room_raw, "name", str, room_path)
        rect = None
        if "rect" in room_raw:
            rect = _parse_rect(room_raw["rect"], f"{room_path}/rect", w)
        else:
            w.error(f"{room_path}/rect", BAD_VALUE, "missing required key 'rect'")
        if name is not None and rect is not None:
            rooms.append(Room(name=name, rect=rect))
    robot_start = w.pair(raw, "robot_start", path)
    avatar_start = w.pair(raw, "avatar_start", path)
    radius = w.field(raw, "perception_radius", float, path)
    speed = w.field(raw, "speed", float, path)
    tau = w.field(raw, "tau", float, path)
    time_limit = w.field(raw, "time_limit_s", float, path)
    if bounds is None or robot_start is None or avatar_start is None:
        return None
    if None in (radius, speed, tau, time_limit):
        return None
    apartment = Apartment(width=bounds[0], height=bounds[1], walls=tuple(walls), rooms=tuple(rooms))
    return ApartmentConfig(
        apartment=apartment,
        robot_start=robot_start,
        avatar_start=avatar_start,
        perception_radius=radius,
        speed=speed,
        tau=tau,
        time_limit_s=time_limit,
    )


# --- semantic validation ------------------------------------------------------


def _check_duplicates(items: Sequence[str], category: str, errors: List[ConfigError]) -> None:
    seen: Dict[str, int] = {}
    for i, ident in enumerate(items):
        if ident in seen:
            errors.append(
                ConfigError(
                    path=f"/{category}/{i}",
                    code=DUPLICATE_ID,
                    message=f"duplicate {category} id {ident!r}",
                )
            )
        else:
            seen[ident] = i


def validate(config: Config) -> List[ConfigError]:
    """Semantic checks per the Config invariants; pure, returns all findings."""
    errors: List[ConfigError] = []
    _check_duplicates([s.id for s in config.sensors], "sensors", errors)
    _check_duplicates([i.name for i in config.intents], "intents", errors)
    _check_duplicates([a.name for a in config.actions], "actions", errors)
    _check_duplicates([p.id for p in config.protocols], "protocols", errors)
    behavior_ids: Dict[str, str] = {}
    for p_idx, ip in enumerate(config.protocols):
        for b_idx, b in enumerate(ip.behaviors):
            if b.id in behavior_ids:
                errors.append(
                    ConfigError(
                        path=f"/protocols/{p_idx}/behaviors/{b_idx}",
                        code=DUPLICATE_ID,
                        message=f"duplicate behavior id {b.id!r}",
                    )
                )
            else:
                behavior_ids[b.id] = ip.id

    for i, sensor in enumerate(config.sensors):
        if not sensor.icon:
            errors.append(
                ConfigError(f"/sensors/{i}/icon", BAD_VALUE, "sensor icons must be non-empty")
            )
        if not sensor.extractor.key:
            errors.append(
                ConfigError(f"/sensors/{i}/extractor/key", BAD_VALUE, "extractor key must be non-empty")
            )

    for i, intent in enumerate(config.intents):
        if not intent.patterns:
            errors.append(ConfigError(f"/intents/{i}/patterns", BAD_VALUE, "patterns must be non-empty"))
        declared = set(intent.slots)
        for j, pattern in enumerate(intent.patterns):
            for slot in re.findall(r"\{(\w+)\}", pattern):
                if slot not in declared:
                    errors.append(
                        ConfigError(
                            f"/intents/{i}/patterns/{j}",
                            UNKNOWN_REFERENCE,
                            f"slot {slot!r} is not declared",
                        )
                    )

    errors.extend(_validate_apartment(config.apartment))

    sensor_ids = config.sensor_ids()
    universe = world_key_universe(config)
    for p_idx, ip in enumerate(config.protocols):
        p_path = f"/protocols/{p_idx}"
        if ip.priority < 0:
            errors.append(ConfigError(f"{p_path}/priority", BAD_VALUE, "priority must be >= 0"))
        entries = [b for b in ip.behaviors if b.is_entry]
        exits = [b for b in ip.behaviors if b.is_exit]
        if len(entries) == 0:
            errors.append(ConfigError(p_path, NO_ENTRY, f"protocol {ip.id!r} has no entry behavior"))
        elif len(entries) > 1:
            errors.append(
                ConfigError(p_path, MULTIPLE_ENTRIES, f"protocol {ip.id!r} has multiple entry behaviors")
            )
        if len(exits) == 0:
            errors.append(ConfigError(p_path, NO_EXIT, f"protocol {ip.id!r} has no exit behavior"))
        local_ids = {b.id for b in ip.behaviors}
        for b_idx, b in enumerate(ip.behaviors):
            b_path = f"{p_path}/behaviors/{b_idx}"
            for k, pred in enumerate(b.predecessors):
                if pred not in local_ids:
                    errors.append(
                        ConfigError(
                            f"{b_path}/predecessors/{k}",
                            UNKNOWN_REFERENCE,
                            f"predecessor {pred!r} is not a behavior of protocol {ip.id!r}",
                        )
                    )
            for k, pc in enumerate(b.preconditions):
                if pc.sensor_id not in sensor_ids:
                    errors.append(
                        ConfigError(
                            f"{b_path}/preconditions/{k}",
                            UNKNOWN_REFERENCE,
                            f"sensor {pc.sensor_id!r} is not declared",
                        )
                    )
            errors.extend(_validate_action(config, b, b_path, universe))
        if _has_cycle(ip):
            errors.append(
                ConfigError(p_path, PREDECESSOR_CYCLE, f"protocol {ip.id!r} has a predecessor cycle")
            )
    return errors


def _validate_apartment(ac: ApartmentConfig) -> List[ConfigError]:
    errors: List[ConfigError] = []
    apt = ac.apartment
    if apt.width <= 0 or apt.height <= 0:
        errors.append(ConfigError("/apartment/bounds", BAD_VALUE, "bounds must be positive"))
        return errors
    for i, wall in enumerate(apt.walls):
        inside = (
            0 <= wall.x
            and 0 <= wall.y
            and wall.x + wall.w <= apt.width
            and wall.y + wall.h <= apt.height
            and wall.w > 0
            and wall.h > 0
        )
        if not inside:
            errors.append(
                ConfigError(f"/apartment/walls/{i}", BAD_VALUE, "walls must lie within bounds")
            )
    for key, pos in (("robot_start", ac.robot_start), ("avatar_start", ac.avatar_start)):
        ok = apt.in_bounds(*pos) and not any(w.contains(*pos) for w in apt.walls)
        if not ok:
            errors.append(
                ConfigError(
                    f"/apartment/{key}", BAD_VALUE, f"{key} must be inside bounds and outside walls"
                )
            )
    for field_name, value in (
        ("perception_radius", ac.perception_radius),
        ("speed", ac.speed),
        ("tau", ac.tau),
        ("time_limit_s", ac.time_limit_s),
    ):
        if value <= 0:
            errors.append(
                ConfigError(f"/apartment/{field_name}", BAD_VALUE, f"{field_name} must be positive")
            )
    return errors


def _validate_action(config: Config, b: Behavior, b_path: str, universe: Set[str]) -> List[ConfigError]:
    errors: List[ConfigError] = []
    action_def = config.action(b.action.name)
    if action_def is None:
        errors.append(
            ConfigError(
                f"{b_path}/action/name",
                UNKNOWN_REFERENCE,
                f"action {b.action.name!r} is not in the catalogue",
            )
        )
        return errors
    required = set(action_def.params)
    given = set(b.action.params.keys())
    for missing in sorted(required - given):
        errors.append(
            ConfigError(f"{b_path}/action/params", BAD_VALUE, f"missing required param {missing!r}")
        )
    for extra in sorted(given - required):
        errors.append(
            ConfigError(f"{b_path}/action/params/{extra}", BAD_VALUE, f"unexpected param {extra!r}")
        )
    for pname, binding in b.action.params.items():
        if binding.kind == FROM_WORLD and binding.key not in universe:
            errors.append(
                ConfigError(
                    f"{b_path}/action/params/{pname}",
                    UNKNOWN_REFERENCE,
                    f"world key {binding.key!r} does not resolve",
                )
            )
    return errors


def _has_cycle(ip: InteractionProtocol) -> bool:
    graph = {b.id: [p for p in b.predecessors] for b in ip.behaviors}
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {bid: WHITE for bid in graph}

    def visit(node: str) -> bool:
        color[node] = GRAY
        for nxt in graph.get(node, []):
            if nxt not in color:
                continue  # unknown reference, reported elsewhere
            if color[nxt] == GRAY:
                return True
            if color[nxt] == WHITE and visit(nxt):
                return True
        color[node] = BLACK
        return False

    return any(color[bid] == WHITE and visit(bid) for bid in graph)


def validate_behavior_for_protocol(
    config: Config,
    protocol: InteractionProtocol,
    behavior: Behavior,
    existing_ids: Optional[Set[str]] = None,
) -> List[ConfigError]:
    """Semantic checks for appending one behavior to a live protocol."""
    errors: List[ConfigError] = []
    if existing_ids is None:
        existing_ids = {b.id for ip in config.protocols for b in ip.behaviors}
        existing_ids.update(b.id for b in protocol.behaviors)
    if behavior.id in existing_ids:
        errors.append(ConfigError("/behavior/id", DUPLICATE_ID, f"behavior id {behavior.id!r} exists"))
    if behavior.is_entry and any(b.is_entry for b in protocol.behaviors):
        errors.append(
            ConfigError("/behavior", MULTIPLE_ENTRIES, "protocol already has an entry behavior")
        )
    local_ids = {b.id for b in protocol.behaviors}
    for k, pred in enumerate(behavior.predecessors):
        if pred not in local_ids:
            errors.append(
                ConfigError(
                    f"/behavior/predecessors/{k}",
                    UNKNOWN_REFERENCE,
                    f"predecessor {pred!r} is not a behavior of protocol {protocol.id!r}",
                )
            )
    sensor_ids = config.sensor_ids()
    for k, pc in enumerate(behavior.preconditions):
        if pc.sensor_id not in sensor_ids:
            errors.append(
                ConfigError(
                    f"/behavior/preconditions/{k}",
                    UNKNOWN_REFERENCE,
                    f"sensor {pc.sensor_id!r} is not declared",
                )
            )
    errors.extend(_validate_action(config, behavior, "/behavior", world_key_universe(config)))
    return errors


# --- serialization ------------------------------------------------------------


def _value_doc(value: values.SensorValue):
    return values.to_json(value)


def _behavior_doc(b: Behavior) -> dict:
    return {
        "id": b.id,
        "title": b.title,
        "entry": b.is_entry,
        "exit": b.is_exit,
        "predecessors": list(b.predecessors),
        "preconditions": [
            {"sensor": pc.sensor_id, "op": pc.op, "value": _value_doc(pc.expected)}
            for pc in b.preconditions
        ],
        "action": {
            "name": b.action.name,
            "params": {
                name: (
                    {"static": _value_doc(binding.value)}
                    if binding.kind == STATIC
                    else {"from_world": binding.key}
                )
                for name, binding in b.action.params.items()
            },
        },
    }


def config_document(config: Config) -> dict:
    """The canonical plain-dict form of a config (schema key order)."""
    ac = config.apartment
    return {
        "version": config.version,
        "sensors": [
            {
                "id": s.id,
                "name": s.name,
                "icon": s.icon,
                "extractor": {
                    "kind": s.extractor.kind,
                    "key": s.extractor.key,
                    **({"op": s.extractor.op} if s.extractor.op is not None else {}),
                    **(
                        {"value": _value_doc(s.extractor.constant)}
                        if s.extractor.constant is not None
                        else {}
                    ),
                },
            }
            for s in config.sensors
        ],
        "intents": [
            {
                "name": i.name,
                "patterns": list(i.patterns),
                "slots": list(i.slots),
                "example": i.example,
            }
            for i in config.intents
        ],
        "actions": [{"name": a.name, "params": list(a.params)} for a in config.actions],
        "apartment": {
            "bounds": [ac.apartment.width, ac.apartment.height],
            "walls": [[w.x, w.y, w.w, w.h] for w in ac.apartment.walls],
            "rooms": [
                {"name": r.name, "rect": [r.rect.x, r.rect.y, r.rect.w, r.rect.h]}
                for r in ac.apartment.rooms
            ],
            "robot_start": list(ac.robot_start),
            "avatar_start": list(ac.avatar_start),
            "perception_radius": ac.perception_radius,
            "speed": ac.speed,
            "tau": ac.tau,
            "time_limit_s": ac.time_limit_s,
        },
        "protocols": [
            {
                "id": ip.id,
                "name": ip.name,
                "priority": ip.priority,
                "behaviors": [_behavior_doc(b) for b in ip.behaviors],
            }
            for ip in config.protocols
        ],
    }


def serialize(config: Config) -> str:
    return json.dumps(config_document(config), indent=2) + "\n"


def load_config(path: str) -> Union[Config, List[ConfigError]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def default_config_document() -> dict:
    """The shipped scenario: teach three apartment regions, battery fixture IP."""
    intents = [
        {
            "name": i.name,
            "patterns": list(i.patterns),
            "slots": list(i.slots),
            "example": i.example,
        }
        for i in default_catalogue()
    ]
    return {
        "version": 1,
        "sensors": [
            {
                "id": "person_visible",
                "name": "Person visible",
                "icon": "person",
                "extractor": {
                    "kind": "predicate",
                    "key": "distance_to_avatar",
                    "op": "le",
                    "value": 5.0,
                },
            },
            {
                "id": "last_intent",
                "name": "Last understood command",
                "icon": "speech",
                "extractor": {"kind": "copy", "key": "last_intent"},
            },
            {
                "id": "battery_low",
                "name": "Battery low",
                "icon": "battery",
                "extractor": {"kind": "copy", "key": "battery_low"},
            },
            {
                "id": "regions_known",
                "name": "Regions known",
                "icon": "map",
                "extractor": {"kind": "count", "key": "region."},
            },
            {
                "id": "last_taught_label",
                "name": "Last taught region",
                "icon": "tag",
                "extractor": {"kind": "copy", "key": "last_taught_label"},
            },
        ],
        "intents": intents,
        "actions": [
            {"name": "follow", "params": ["target"]},
            {"name": "navigate", "params": ["target"]},
            {"name": "say", "params": ["text"]},
            {"name": "learn", "params": ["label"]},
        ],
        "apartment": {
            "bounds": [10.0, 8.0],
            "walls": [
                [4.0, 0.0, 0.2, 3.0],
                [4.0, 4.0, 0.2, 2.0],
                [0.0, 4.0, 2.5, 0.2],
            ],
            "rooms": [
                {"name": "kitchen", "rect": [0.0, 0.0, 4.0, 4.0]},
                {"name": "entrance", "rect": [4.2, 0.0, 5.8, 4.0]},
                {"name": "hall", "rect": [0.0, 4.2, 10.0, 3.8]},
            ],
            "robot_start": [1.0, 1.0],
            "avatar_start": [9.0, 7.0],
            "perception_radius": 5.0,
            "speed": 1.0,
            "tau": 3.0,
            "time_limit_s": 1800.0,
        },
        "protocols": [
            {
                "id": "teach_region",
                "name": "Teach Region",
                "priority": 1,
                "behaviors": [
                    {
                        "id": "start_following",
                        "title": "Start Following",
                        "entry": True,
                        "exit": False,
                        "predecessors": [],
                        "preconditions": [
                            {"sensor": "person_visible", "op": "eq", "value": True},
                            {"sensor": "last_intent", "op": "eq", "value": "teach_region"},
                        ],
                        "action": {"name": "follow", "params": {"target": {"from_world": "avatar_pose"}}},
                    },
                    {
                        "id": "learn_region",
                        "title": "Learn Region",
                        "entry": False,
                        "exit": False,
                        "predecessors": ["start_following"],
                        "preconditions": [
                            {"sensor": "person_visible", "op": "eq", "value": True},
                            {"sensor": "last_intent", "op": "eq", "value": "arrived"},
                        ],
                        "action": {"name": "learn", "params": {"label": {"from_world": "region_label"}}},
                    },
                    {
                        "id": "confirm",
                        "title": "Confirm",
                        "entry": False,
                        "exit": True,
                        "predecessors": ["learn_region"],
                        "preconditions": [],
                        "action": {"name": "say", "params": {"text": {"from_world": "last_taught_label"}}},
                    },
                ],
            },
            {
                "id": "battery_warning",
                "name": "Battery Warning",
                "priority": 9,
                "behaviors": [
                    {
                        "id": "warn_battery",
                        "title": "Warn Battery",
                        "entry": True,
                        "exit": True,
                        "predecessors": [],
                        "preconditions": [
                            {"sensor": "battery_low", "op": "eq", "value": True}
                        ],
                        "action": {"name": "say", "params": {"text": {"static": "battery low"}}},
                    }
                ],
            },
        ],
    }


def default_config() -> Config:
    config = parse_config(json.dumps(default_config_document()))
    if isinstance(config, list):  # pragma: no cover - the shipped scenario is valid
        raise RuntimeError(f"default config is invalid: {config}")
    return config


def packaged_default_path() -> str:
    """Filesystem path of the pinned copy of the default config."""
    return str(resources.files("guidesim.data").joinpath("default_config.json"))
