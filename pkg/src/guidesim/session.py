"""Live session: engine + simulator + world state behind a message protocol.

A session owns one scenario run. Client messages mutate it between ticks;
each tick advances the simulator, refreshes percepts and sensors, updates
preconditions, lets the engine select/begin at most one behavior, completes
behaviors whose simulator action finished, and finally checks the goal and
the time limit. Everything is driven by the simulated clock, so a scripted
replay is reproducible byte for byte.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import sim as simulation
from .config import Config, parse_behavior_node, validate_behavior_for_protocol
from .engine import (
    ActionDispatched,
    BehaviorState,
    BehaviorStatusChanged,
    GuidanceEngine,
    MissingWorldKey,
    PrecondState,
    PreconditionChanged,
    ProtocolStatusChanged,
)
from .nlu import ParseResult, parse_utterance
from .values import NONE_VALUE, boolean, from_json, label, number, text, to_json, values_equal
from .world import Percept, WorldState, extract_sensors

DEFAULT_DT = 0.1
FLOOR_RESOLUTION = 0.25
OPEN_ENDED_ACTIONS = ("follow",)


class Phase(str, Enum):
    RUNNING = "running"
    TIMED_OUT = "timed_out"
    SUCCEEDED = "succeeded"


class CommandClass(str, Enum):
    NEEDED = "needed"
    WRONG = "wrong"
    UNRECOGNIZED = "unrecognized"


class TruncatedLog(Exception):
    pass


@dataclass(frozen=True)
class Metrics:
    success: bool
    regions_taught: int
    wrong_commands: int
    out_of_sight_events: int
    duration_s: float

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "regions_taught": self.regions_taught,
            "wrong_commands": self.wrong_commands,
            "out_of_sight_events": self.out_of_sight_events,
            "duration_s": self.duration_s,
        }


class SessionLog:
    """Ordered, tick-stamped record list; ticks never decrease."""

    def __init__(self) -> None:
        self.records: List[dict] = []

    def append(self, tick: int, kind: str, data: dict, meta: Optional[dict] = None) -> None:
        if self.records and tick < self.records[-1]["tick"]:
            raise ValueError("log ticks must be non-decreasing")
        record = {"tick": tick, "kind": kind, "data": data}
        if meta is not None:
            record["meta"] = meta
        self.records.append(record)

    def export_ndjson(self) -> str:
        return "".join(json.dumps(r) + "\n" for r in self.records)


def _engine_event_dict(ev) -> dict:
    if isinstance(ev, PreconditionChanged):
        return {
            "event": "precondition",
            "behavior": ev.behavior_id,
            "index": ev.index,
            "status": ev.status.value,
        }
    if isinstance(ev, BehaviorStatusChanged):
        return {"event": "behavior_status", "behavior": ev.behavior_id, "status": ev.status.value}
    if isinstance(ev, ProtocolStatusChanged):
        return {"event": "protocol_status", "protocol": ev.protocol_id, "status": ev.status.value}
    if isinstance(ev, ActionDispatched):
        return {
            "event": "action_dispatched",
            "behavior": ev.behavior_id,
            "action": {
                "name": ev.action.name,
                "params": {k: to_json(v) for k, v in ev.action.params.items()},
            },
        }
    raise TypeError(f"unexpected engine event {ev!r}")


def _sim_event_dict(ev) -> dict:
    if isinstance(ev, simulation.RobotMoved):
        return {"event": "robot_moved", "x": ev.x, "y": ev.y, "heading": ev.heading}
    if isinstance(ev, simulation.ActionCompleted):
        return {"event": "action_completed", "action": ev.action}
    if isinstance(ev, simulation.AvatarSighted):
        return {"event": "avatar_sighted"}
    if isinstance(ev, simulation.AvatarLost):
        return {"event": "avatar_lost"}
    if isinstance(ev, simulation.RobotSaid):
        return {"event": "robot_said", "text": ev.text}
    raise TypeError(f"unexpected sim event {ev!r}")


class Session:
    def __init__(
        self,
        config: Config,
        *,
        dynamic_viz: bool = True,
        visual_programming: bool = True,
        dt: float = DEFAULT_DT,
    ) -> None:
        self.config = config
        self.dynamic_viz = dynamic_viz
        self.visual_programming = visual_programming
        self.dt = dt
        self._init_state()

    def _init_state(self) -> None:
        self.seq = 0
        self.phase = Phase.RUNNING
        self.world = WorldState()
        self.engine = GuidanceEngine(
            copy.deepcopy(self.config.protocols), intent_slots=self.config.intent_slot_map()
        )
        ac = self.config.apartment
        self.sim = simulation.SimState(
            apartment=ac.apartment,
            robot_start=ac.robot_start,
            avatar_start=ac.avatar_start,
            perception_radius=ac.perception_radius,
            speed=ac.speed,
            tau=ac.tau,
        )
        self.goal: Tuple[str, ...] = self.config.goal_labels()
        self.time_limit_ticks = int(round(ac.time_limit_s / self.dt))
        self.log = SessionLog()
        self._last_sensors: Dict[str, Any] = {}
        self.log.append(0, "init", {"dt": self.dt, "snapshot": self.snapshot_data()})

    # -- outbound plumbing

    def _out(self, mtype: str, meta: Optional[dict] = None, **fields) -> dict:
        msg = {"type": mtype, "seq": self.seq, "tick": self.sim.tick, **fields}
        self.seq += 1
        self.log.append(self.sim.tick, "server", msg, meta=meta)
        return msg

    def _emit_engine_events(self, events, out: List[dict]) -> None:
        for ev in events:
            self.log.append(self.sim.tick, "engine", _engine_event_dict(ev))
            if isinstance(ev, PreconditionChanged):
                if self.dynamic_viz:
                    out.append(
                        self._out(
                            "event",
                            kind="precondition",
                            behavior=ev.behavior_id,
                            index=ev.index,
                            status=ev.status.value,
                        )
                    )
            elif isinstance(ev, BehaviorStatusChanged):
                out.append(
                    self._out(
                        "event", kind="behavior_status", behavior=ev.behavior_id, status=ev.status.value
                    )
                )
            elif isinstance(ev, ProtocolStatusChanged):
                out.append(
                    self._out(
                        "event", kind="protocol_status", protocol=ev.protocol_id, status=ev.status.value
                    )
                )
            # ActionDispatched stays log-only; the UI reads actions from snapshots.

    def _emit_sim_events(self, events, out: List[dict]) -> None:
        for ev in events:
            self.log.append(self.sim.tick, "sim", _sim_event_dict(ev))
            if isinstance(ev, simulation.RobotMoved):
                out.append(
                    self._out("event", kind="robot_moved", x=ev.x, y=ev.y, heading=ev.heading)
                )
            elif isinstance(ev, simulation.RobotSaid):
                out.append(self._out("robot_say", text=ev.text))

    # -- message handling

    def handle_message(self, msg: Any) -> List[dict]:
        """Apply one client message; malformed input never mutates the session."""
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            self.log.append(self.sim.tick, "client", {"msg": msg, "error": "malformed"})
            return [self._out("protocol_error", detail="messages are objects with a string 'type'")]
        mtype = msg["type"]
        if self.phase != Phase.RUNNING:
            self.log.append(self.sim.tick, "client", {"msg": msg, "ignored": "session_ended"})
            return [
                self._out(
                    "session_ended",
                    success=self.phase == Phase.SUCCEEDED,
                    metrics=self._live_metrics().to_json(),
                )
            ]
        handler = {
            "chat": self._handle_chat,
            "move_avatar": self._handle_move,
            "define_behavior": self._handle_define,
            "get_snapshot": self._handle_get_snapshot,
            "reset": self._handle_reset,
        }.get(mtype)
        if handler is None:
            self.log.append(self.sim.tick, "client", {"msg": msg, "error": "unknown_type"})
            return [self._out("protocol_error", detail=f"unknown message type {mtype!r}")]
        return handler(msg)

    def _handle_chat(self, msg: dict) -> List[dict]:
        utterance = msg.get("text")
        if not isinstance(utterance, str):
            self.log.append(self.sim.tick, "client", {"msg": msg, "error": "bad_text"})
            return [self._out("protocol_error", detail="chat needs a string 'text'")]
        parse = parse_utterance(utterance, self.config.intents)
        classification = classify_command(self, parse)
        self.log.append(
            self.sim.tick,
            "client",
            {"msg": msg, "classification": classification.value, "intent": parse.intent},
        )
        if not parse.recognized:
            return [self._out("chat_ack", recognized=False)]
        percepts = [Percept("last_intent", label(parse.intent))]
        for slot_name, slot_value in parse.slots.items():
            percepts.append(Percept(slot_name, label(slot_value)))
        self.world.apply_percepts(percepts, self.sim.tick)
        return [self._out("chat_ack", recognized=True, intent=parse.intent, slots=dict(parse.slots))]

    def _handle_move(self, msg: dict) -> List[dict]:
        x, y = msg.get("x"), msg.get("y")
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in (x, y)):
            self.log.append(self.sim.tick, "client", {"msg": msg, "error": "bad_coords"})
            return [self._out("protocol_error", detail="move_avatar needs numeric x and y")]
        self.log.append(self.sim.tick, "client", {"msg": msg})
        sight_before = self.sim.in_sight()
        result = self.sim.move_avatar((float(x), float(y)))
        if not result.accepted:
            return [self._out("move_rejected", reason=result.reason.value)]
        sight_after = self.sim.in_sight()
        return [
            self._out(
                "avatar_moved",
                meta={"sight_before": sight_before, "sight_after": sight_after},
                x=result.pose.x,
                y=result.pose.y,
            )
        ]

    def _handle_define(self, msg: dict) -> List[dict]:
        self.log.append(self.sim.tick, "client", {"msg": msg})
        if not self.visual_programming:
            return [self._out("protocol_error", detail="visual programming is disabled")]
        protocol_id = msg.get("protocol_id")
        behavior_raw = msg.get("behavior")
        if not isinstance(protocol_id, str) or not isinstance(behavior_raw, dict):
            return [self._out("protocol_error", detail="define_behavior needs protocol_id and behavior")]
        target = None
        for ip in self.engine.protocols:
            if ip.id == protocol_id:
                target = ip
                break
        if target is None:
            return [
                self._out(
                    "define_rejected",
                    errors=[
                        {
                            "path": "/protocol_id",
                            "code": "UnknownReference",
                            "message": f"protocol {protocol_id!r} does not exist",
                        }
                    ],
                )
            ]
        behavior, errors = parse_behavior_node(behavior_raw, "/behavior", def_index=len(target.behaviors))
        if behavior is not None:
            existing = {b.id for ip in self.engine.protocols for b in ip.behaviors}
            errors = errors + validate_behavior_for_protocol(
                self.config, target, behavior, existing_ids=existing
            )
        if errors or behavior is None:
            return [self._out("define_rejected", errors=[e.to_json() for e in errors])]
        target.behaviors.append(behavior)
        return [self.snapshot_message()]

    def _handle_get_snapshot(self, msg: dict) -> List[dict]:
        self.log.append(self.sim.tick, "client", {"msg": msg})
        return [self.snapshot_message()]

    def snapshot_message(self) -> dict:
        """A full snapshot as a stamped, logged wire message."""
        return self._out("snapshot", **self.snapshot_data())

    def _handle_reset(self, msg: dict) -> List[dict]:
        self._init_state()
        self.log.append(self.sim.tick, "client", {"msg": msg})
        return [self.snapshot_message()]

    def inject_percept(self, key: str, value) -> None:
        """Scripted exogenous percept (e.g. battery_low); value is a JSON scalar."""
        self.log.append(self.sim.tick, "percept", {"key": key, "value": value})
        self.world.apply_percepts([Percept(key, from_json(value))], self.sim.tick)

    # -- the tick pipeline

    def tick(self) -> List[dict]:
        if self.phase != Phase.RUNNING:
            return []
        out: List[dict] = []
        # (1) advance the simulator
        sim_events = self.sim.step(self.dt)
        self._emit_sim_events(sim_events, out)
        # (2) simulator-derived percepts
        self.world.apply_percepts(self._sim_percepts(), self.sim.tick)
        # (3) semantic sensors
        snapshot = extract_sensors(self.world, self.config.sensors)
        changed = {
            sid: to_json(value)
            for sid, value in snapshot.values.items()
            if not values_equal(value, self._last_sensors.get(sid, NONE_VALUE))
        }
        self._last_sensors = dict(snapshot.values)
        if changed:
            self.log.append(self.sim.tick, "sensors", {"values": changed})
            if self.dynamic_viz:
                out.append(self._out("event", kind="sensor_update", values=changed))
        # (4) precondition + executability update
        self._emit_engine_events(self.engine.update_preconditions(snapshot), out)
        # (4b) open-ended actions yield once a successor behavior is ready
        while self._handoff_ready():
            behavior_id = self.engine.executing[1]
            self._emit_engine_events(self.engine.complete_execution(behavior_id), out)
            self.sim.end_active_action()
            self._emit_engine_events(self.engine.update_preconditions(snapshot), out)
        # (5) selection and dispatch while the executor is free
        if self.engine.executing is None:
            selection = self.engine.select_next()
            if selection is not None:
                try:
                    events = self.engine.begin_execution(selection, self.world)
                except MissingWorldKey as exc:
                    # unresolvable binding: leave the behavior executable and
                    # retry on later ticks once the world key exists
                    self.log.append(
                        self.sim.tick,
                        "engine_error",
                        {"behavior": selection.behavior_id, "missing_key": exc.key},
                    )
                else:
                    concrete = next(e.action for e in events if isinstance(e, ActionDispatched))
                    self._emit_engine_events(events, out)
                    self.sim.dispatch_action(concrete)
                    if concrete.name == "learn":
                        self._emit_region_learned(out)
        # (6) simulator completions finish their behavior
        for ev in sim_events:
            if isinstance(ev, simulation.ActionCompleted) and self.engine.executing is not None:
                self._emit_engine_events(
                    self.engine.complete_execution(self.engine.executing[1]), out
                )
        # (7) goal / time limit
        self._check_phase(out)
        return out

    def _sim_percepts(self) -> List[Percept]:
        robot, avatar = self.sim.robot, self.sim.avatar
        distance = math.hypot(robot.x - avatar.x, robot.y - avatar.y)
        taught = self.sim.learner.labels()
        percepts = [
            Percept("distance_to_avatar", number(distance)),
            Percept("avatar_pose", text(f"{avatar.x},{avatar.y}")),
            Percept("robot_pose", text(f"{robot.x},{robot.y}")),
            Percept("regions_taught", number(len(set(taught) & set(self.goal)))),
        ]
        if taught:
            percepts.append(Percept("last_taught_label", label(taught[-1])))
        for region in sorted(set(taught)):
            percepts.append(Percept(f"region.{region}", boolean(True)))
        return percepts

    def _handoff_ready(self) -> bool:
        if self.engine.executing is None:
            return False
        action = self.sim.active_action
        if action is None or action.name not in OPEN_ENDED_ACTIONS:
            return False
        pid, bid = self.engine.executing
        ip = self.engine.protocol(pid)
        for b in ip.behaviors:
            if b.id == bid or b.status in (BehaviorState.EXECUTING, BehaviorState.FINISHED):
                continue
            if bid not in b.predecessors:
                continue
            others_done = all(
                ip.behavior(p).status == BehaviorState.FINISHED for p in b.predecessors if p != bid
            )
            if others_done and all(pc.status == PrecondState.SATISFIED for pc in b.preconditions):
                return True
        return False

    def _emit_region_learned(self, out: List[dict]) -> None:
        x, y, region = self.sim.learner.samples[-1]
        floor = self._floor_data()
        self.log.append(
            self.sim.tick, "region", {"x": x, "y": y, "label": region, "floor": floor}
        )
        out.append(self._out("event", kind="floor_update", x=x, y=y, label=region, floor=floor))

    def _check_phase(self, out: List[dict]) -> None:
        taught = set(self.sim.learner.labels())
        if self.goal and all(g in taught for g in self.goal):
            self.phase = Phase.SUCCEEDED
        elif self.sim.tick >= self.time_limit_ticks:
            self.phase = Phase.TIMED_OUT
        else:
            return
        metrics = self._live_metrics()
        out.append(
            self._out(
                "session_ended", success=self.phase == Phase.SUCCEEDED, metrics=metrics.to_json()
            )
        )

    def _live_metrics(self) -> Metrics:
        wrong = 0
        oos = 0
        for record in self.log.records:
            if record["kind"] == "client" and record["data"].get("classification") == "wrong":
                wrong += 1
            if (
                record["kind"] == "server"
                and record["data"].get("type") == "avatar_moved"
                and record.get("meta", {}).get("sight_before")
                and not record.get("meta", {}).get("sight_after")
            ):
                oos += 1
        taught = set(self.sim.learner.labels()) & set(self.goal)
        return Metrics(
            success=self.phase == Phase.SUCCEEDED,
            regions_taught=len(taught),
            wrong_commands=wrong,
            out_of_sight_events=oos,
            duration_s=self.sim.tick * self.dt,
        )

    # -- snapshots

    def _floor_data(self, resolution: float = FLOOR_RESOLUTION) -> dict:
        apt = self.config.apartment.apartment
        grid = simulation.floor_grid(self.sim.learner, apt, resolution)
        labels = sorted({cell for row in grid for cell in row if cell is not None})
        index = {name: i for i, name in enumerate(labels)}
        return {
            "resolution": resolution,
            "labels": labels,
            "cells": [[index[c] if c is not None else -1 for c in row] for row in grid],
        }

    def snapshot_data(self) -> dict:
        apt = self.config.apartment
        return {
            "phase": self.phase.value,
            "tick": self.sim.tick,
            "elapsed_s": self.sim.tick * self.dt,
            "time_limit_s": apt.time_limit_s,
            "flags": {
                "dynamic_viz": self.dynamic_viz,
                "visual_programming": self.visual_programming,
            },
            "robot": {"x": self.sim.robot.x, "y": self.sim.robot.y, "heading": self.sim.robot.heading},
            "avatar": {"x": self.sim.avatar.x, "y": self.sim.avatar.y},
            "perception_radius": self.sim.perception_radius,
            "goal": list(self.goal),
            "taught": [
                {"x": s[0], "y": s[1], "label": s[2]} for s in self.sim.learner.samples
            ],
            "sensors": [
                {
                    "id": s.id,
                    "name": s.name,
                    "icon": s.icon,
                    "value": to_json(self._last_sensors[s.id])
                    if s.id in self._last_sensors
                    else None,
                }
                for s in self.config.sensors
            ],
            "intents": [{"name": i.name, "example": i.example} for i in self.config.intents],
            "apartment": {
                "bounds": [apt.apartment.width, apt.apartment.height],
                "walls": [[w.x, w.y, w.w, w.h] for w in apt.apartment.walls],
                "rooms": [
                    {"name": r.name, "rect": [r.rect.x, r.rect.y, r.rect.w, r.rect.h]}
                    for r in apt.apartment.rooms
                ],
            },
            "protocols": [
                {
                    "id": ip.id,
                    "name": ip.name,
                    "priority": ip.priority,
                    "status": ip.status.value,
                    "last_finished": ip.last_finished,
                    "behaviors": [
                        {
                            "id": b.id,
                            "title": b.title,
                            "entry": b.is_entry,
                            "exit": b.is_exit,
                            "predecessors": list(b.predecessors),
                            "preconditions": [
                                {
                                    "sensor": pc.sensor_id,
                                    "op": pc.op,
                                    "value": to_json(pc.expected),
                                    "status": pc.status.value,
                                }
                                for pc in b.preconditions
                            ],
                            "action": {
                                "name": b.action.name,
                                "params": {
                                    name: (
                                        {"static": to_json(binding.value)}
                                        if binding.kind == "static"
                                        else {"from_world": binding.key}
                                    )
                                    for name, binding in b.action.params.items()
                                },
                            },
                            "status": b.status.value,
                            "def_index": b.def_index,
                        }
                        for b in ip.behaviors
                    ],
                }
                for ip in self.engine.protocols
            ],
            "executing": list(self.engine.executing) if self.engine.executing else None,
            "suspended_stack": list(self.engine.suspended_stack),
            "floor": self._floor_data(),
        }


# --- command classification and metrics ----------------------------------------


def classify_command(session: Session, parse: ParseResult) -> CommandClass:
    """Needed / wrong / unrecognized per the goal-advancement rule table."""
    if not parse.recognized:
        return CommandClass.UNRECOGNIZED
    action = session.sim.active_action
    following = action is not None and action.name == "follow"
    if parse.intent == "teach_region":
        region = parse.slots.get("region_label")
        taught = set(session.sim.learner.labels())
        if not following and region in session.goal and region not in taught:
            return CommandClass.NEEDED
        return CommandClass.WRONG
    if parse.intent == "arrived":
        if following and session.sim.in_sight():
            return CommandClass.NEEDED
        return CommandClass.WRONG
    return CommandClass.WRONG


def compute_metrics(log: SessionLog, config: Config) -> Metrics:
    """Recompute the paper-style measures from the log alone."""
    init = next((r for r in log.records if r["kind"] == "init"), None)
    terminator = next(
        (
            r
            for r in log.records
            if r["kind"] == "server" and r["data"].get("type") == "session_ended"
        ),
        None,
    )
    if init is None or terminator is None:
        raise TruncatedLog("log lacks an init record or a session_ended terminator")
    dt = init["data"]["dt"]
    end_tick = terminator["tick"]
    goal = set(config.goal_labels())
    taught = {
        r["data"]["label"]
        for r in log.records
        if r["kind"] == "region" and r["tick"] <= end_tick
    }
    wrong = sum(
        1
        for r in log.records
        if r["kind"] == "client" and r["data"].get("classification") == "wrong"
    )
    oos = sum(
        1
        for r in log.records
        if r["kind"] == "server"
        and r["data"].get("type") == "avatar_moved"
        and r.get("meta", {}).get("sight_before")
        and not r.get("meta", {}).get("sight_after")
    )
    regions = len(taught & goal)
    duration = end_tick * dt
    success = bool(goal) and regions == len(goal) and duration <= config.apartment.time_limit_s
    return Metrics(
        success=success,
        regions_taught=regions,
        wrong_commands=wrong,
        out_of_sight_events=oos,
        duration_s=duration,
    )


def reconstruct_snapshot(log: SessionLog) -> dict:
    """Fold the log onto its initial snapshot; equals the live final snapshot."""
    init = next((r for r in log.records if r["kind"] == "init"), None)
    if init is None:
        raise TruncatedLog("log lacks an init record")
    dt = init["data"]["dt"]
    snap = copy.deepcopy(init["data"]["snapshot"])

    def find_behavior(behavior_id: str):
        for ip in snap["protocols"]:
            for b in ip["behaviors"]:
                if b["id"] == behavior_id:
                    return ip, b
        raise KeyError(behavior_id)

    sensor_values = {s["id"]: s["value"] for s in snap["sensors"]}
    for record in log.records:
        kind, data = record["kind"], record["data"]
        snap["tick"] = record["tick"]
        if kind == "server":
            mtype = data.get("type")
            if mtype == "snapshot":
                snap = copy.deepcopy({k: v for k, v in data.items() if k not in ("type", "seq", "tick")})
                snap["tick"] = record["tick"]
                sensor_values = {s["id"]: s["value"] for s in snap["sensors"]}
            elif mtype == "avatar_moved":
                snap["avatar"] = {"x": data["x"], "y": data["y"]}
            elif mtype == "session_ended":
                snap["phase"] = "succeeded" if data["success"] else "timed_out"
        elif kind == "sensors":
            sensor_values.update(data["values"])
            for s in snap["sensors"]:
                if s["id"] in data["values"]:
                    s["value"] = data["values"][s["id"]]
        elif kind == "sim":
            if data["event"] == "robot_moved":
                snap["robot"] = {"x": data["x"], "y": data["y"], "heading": data["heading"]}
        elif kind == "region":
            snap["taught"].append({"x": data["x"], "y": data["y"], "label": data["label"]})
            snap["floor"] = data["floor"]
        elif kind == "engine":
            event = data["event"]
            if event == "precondition":
                _, b = find_behavior(data["behavior"])
                b["preconditions"][data["index"]]["status"] = data["status"]
            elif event == "behavior_status":
                ip, b = find_behavior(data["behavior"])
                was_executing = b["status"] == "executing"
                b["status"] = data["status"]
                if data["status"] == "executing":
                    snap["executing"] = [ip["id"], b["id"]]
                elif data["status"] == "finished" and was_executing:
                    snap["executing"] = None
                    ip["last_finished"] = b["id"]
            elif event == "protocol_status":
                ip = next(p for p in snap["protocols"] if p["id"] == data["protocol"])
                ip["status"] = data["status"]
                if data["status"] == "suspended":
                    snap["suspended_stack"].append(ip["id"])
                elif data["status"] == "active":
                    if ip["id"] in snap["suspended_stack"]:
                        snap["suspended_stack"].remove(ip["id"])
                elif data["status"] == "inactive":
                    ip["last_finished"] = None
    snap["elapsed_s"] = snap["tick"] * dt
    return snap


# --- headless replay ------------------------------------------------------------


@dataclass
class ReplayResult:
    snapshot: dict
    metrics: Metrics
    log: SessionLog
    session: Session


def replay(
    entries: Sequence[dict],
    config: Config,
    *,
    dynamic_viz: bool = True,
    visual_programming: bool = True,
    dt: float = DEFAULT_DT,
) -> ReplayResult:
    """Run a timed script on a purely simulated clock; fully deterministic.

    Entries are {"t": seconds, "msg": {...client message...}} or
    {"t": seconds, "percept": {"key": ..., "value": ...}}, with
    non-decreasing times.
    """
    session = Session(config, dynamic_viz=dynamic_viz, visual_programming=visual_programming, dt=dt)
    schedule: List[Tuple[int, dict]] = []
    last_t = None
    for entry in entries:
        t = float(entry["t"])
        if last_t is not None and t < last_t:
            raise ValueError("script timestamps must be non-decreasing")
        last_t = t
        schedule.append((int(round(t / dt)), entry))

    def deliver(entry: dict) -> None:
        if "percept" in entry:
            session.inject_percept(entry["percept"]["key"], entry["percept"]["value"])
        else:
            session.handle_message(entry["msg"])

    i = 0
    while session.phase == Phase.RUNNING:
        while i < len(schedule) and schedule[i][0] <= session.sim.tick:
            deliver(schedule[i][1])
            i += 1
        session.tick()
    while i < len(schedule):
        deliver(schedule[i][1])
        i += 1
    return ReplayResult(
        snapshot=session.snapshot_data(),
        metrics=compute_metrics(session.log, config),
        log=session.log,
        session=session,
    )


def load_script(path: str) -> List[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if isinstance(doc, dict) and "entries" in doc:
        return doc["entries"]
    if isinstance(doc, list):
        return doc
    raise ValueError("scripts are a list of entries or {'entries': [...]}")
