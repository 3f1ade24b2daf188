"""Behavior guidance: interaction protocols, behaviors and selection.

An interaction protocol (IP) groups behaviors toward one goal. A behavior
becomes executable when all its preconditions hold against the current
semantic sensor snapshot and all its predecessors have finished. Exactly one
behavior may execute at a time; a higher-priority IP preempts the active one
between executions and the active IP is resumed from a suspension stack once
the preempting IP completes.

Selection rules, in order:
  * the active IP is preferred while it owns executable behaviors, unless
    some other IP with executable behaviors has strictly greater priority;
  * otherwise the highest-priority candidate wins, ties broken by suspended
    before inactive, then configuration order;
  * within an inactive IP only the entry behavior may start it; within an
    active/suspended IP, behaviors whose predecessors include the last
    finished behavior are preferred, then the lowest definition index.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .values import SensorValue, compare
from .world import SensorSnapshot, WorldState


class BehaviorState(str, Enum):
    IDLE = "idle"
    EXECUTABLE = "executable"
    EXECUTING = "executing"
    FINISHED = "finished"


class ProtocolState(str, Enum):
    INACTIVE = "inactive"
    ACTIVE = "active"
    SUSPENDED = "suspended"
    COMPLETED = "completed"


class PrecondState(str, Enum):
    UNKNOWN = "unknown"
    SATISFIED = "satisfied"
    UNSATISFIED = "unsatisfied"


class EngineError(Exception):
    pass


class ExecutorBusy(EngineError):
    pass


class StaleSelection(EngineError):
    pass


class NotExecuting(EngineError):
    pass


class MissingWorldKey(EngineError):
    def __init__(self, key: str):
        super().__init__(f"world key {key!r} is absent")
        self.key = key


class ConfigIntegrityError(EngineError):
    pass


@dataclass
class Precondition:
    sensor_id: str
    op: str  # eq | ne
    expected: SensorValue
    status: PrecondState = PrecondState.UNKNOWN


STATIC = "static"
FROM_WORLD = "from_world"


@dataclass(frozen=True)
class Binding:
    kind: str  # static | from_world
    value: SensorValue | None = None  # static
    key: str | None = None  # from_world


@dataclass(frozen=True)
class ActionSpec:
    name: str
    params: Mapping[str, Binding]


@dataclass(frozen=True)
class ConcreteAction:
    name: str
    params: Mapping[str, SensorValue]


@dataclass
class Behavior:
    id: str
    title: str
    is_entry: bool
    is_exit: bool
    preconditions: List[Precondition]
    predecessors: List[str]
    action: ActionSpec
    status: BehaviorState = BehaviorState.IDLE
    def_index: int = 0


@dataclass
class InteractionProtocol:
    id: str
    name: str
    priority: int
    behaviors: List[Behavior]
    status: ProtocolState = ProtocolState.INACTIVE
    last_finished: Optional[str] = None

    def entry_behavior(self) -> Behavior:
        for b in self.behaviors:
            if b.is_entry:
                return b
        raise ConfigIntegrityError(f"protocol {self.id!r} has no entry behavior")

    def behavior(self, behavior_id: str) -> Behavior:
        for b in self.behaviors:
            if b.id == behavior_id:
                return b
        raise ConfigIntegrityError(f"behavior {behavior_id!r} not in protocol {self.id!r}")


@dataclass(frozen=True)
class Selection:
    protocol_id: str
    behavior_id: str


# --- engine events -----------------------------------------------------------


@dataclass(frozen=True)
class PreconditionChanged:
    behavior_id: str
    index: int
    status: PrecondState


@dataclass(frozen=True)
class BehaviorStatusChanged:
    behavior_id: str
    status: BehaviorState


@dataclass(frozen=True)
class ProtocolStatusChanged:
    protocol_id: str
    status: ProtocolState


@dataclass(frozen=True)
class ActionDispatched:
    behavior_id: str
    action: ConcreteAction


EngineEvent = Union[PreconditionChanged, BehaviorStatusChanged, ProtocolStatusChanged, ActionDispatched]


def resolve_action_params(behavior: Behavior, world: WorldState) -> ConcreteAction:
    """Bind the behavior's action parameters against the current world state."""
    params: Dict[str, SensorValue] = {}
    for name, binding in behavior.action.params.items():
        if binding.kind == STATIC:
            params[name] = binding.value
        elif binding.kind == FROM_WORLD:
            value = world.get(binding.key)
            if value.is_none():
                raise MissingWorldKey(binding.key)
            params[name] = value
        else:
            raise ConfigIntegrityError(f"unknown binding kind {binding.kind!r}")
    return ConcreteAction(name=behavior.action.name, params=params)


class GuidanceEngine:
    """Owns the protocol set and the single-executor lifecycle."""

    def __init__(
        self,
        protocols: Sequence[InteractionProtocol],
        intent_slots: Optional[Mapping[str, Sequence[str]]] = None,
    ) -> None:
        self.protocols: List[InteractionProtocol] = list(protocols)
        self.executing: Optional[Tuple[str, str]] = None
        self.suspended_stack: List[str] = []
        # intent name -> slot world keys, for the consumption rule on begin.
        self.intent_slots: Dict[str, Tuple[str, ...]] = {
            name: tuple(slots) for name, slots in (intent_slots or {}).items()
        }

    # -- lookups

    def protocol(self, protocol_id: str) -> InteractionProtocol:
        for ip in self.protocols:
            if ip.id == protocol_id:
                return ip
        raise ConfigIntegrityError(f"unknown protocol {protocol_id!r}")

    def find_behavior(self, behavior_id: str) -> Tuple[InteractionProtocol, Behavior]:
        for ip in self.protocols:
            for b in ip.behaviors:
                if b.id == behavior_id:
                    return ip, b
        raise ConfigIntegrityError(f"unknown behavior {behavior_id!r}")

    def executing_behavior(self) -> Optional[Behavior]:
        if self.executing is None:
            return None
        ip = self.protocol(self.executing[0])
        return ip.behavior(self.executing[1])

    def _active_protocol(self) -> Optional[InteractionProtocol]:
        for ip in self.protocols:
            if ip.status == ProtocolState.ACTIVE:
                return ip
        return None

    # -- operations

    def update_preconditions(self, snapshot: SensorSnapshot) -> List[EngineEvent]:
        """Re-evaluate preconditions and recompute Idle/Executable statuses.

        Evaluation scope: all behaviors of active/suspended IPs plus the entry
        behaviors of inactive IPs. Out-of-scope preconditions reset to
        unknown. Executing and finished statuses are never touched here.
        """
        events: List[EngineEvent] = []
        for ip in self.protocols:
            ip_scope = ip.status in (ProtocolState.ACTIVE, ProtocolState.SUSPENDED)
            for b in ip.behaviors:
                in_scope = ip_scope or (ip.status == ProtocolState.INACTIVE and b.is_entry)
                for i, pc in enumerate(b.preconditions):
                    if in_scope:
                        if pc.sensor_id not in snapshot.values:
                            raise ConfigIntegrityError(f"undeclared sensor {pc.sensor_id!r}")
                        actual = snapshot.values[pc.sensor_id]
                        new = (
                            PrecondState.SATISFIED
                            if compare(pc.op, actual, pc.expected)
                            else PrecondState.UNSATISFIED
                        )
                    else:
                        new = PrecondState.UNKNOWN
                    if pc.status != new:
                        pc.status = new
                        events.append(PreconditionChanged(b.id, i, new))
                if b.status in (BehaviorState.EXECUTING, BehaviorState.FINISHED):
                    continue
                ready = (
                    in_scope
                    and all(pc.status == PrecondState.SATISFIED for pc in b.preconditions)
                    and all(ip.behavior(pid).status == BehaviorState.FINISHED for pid in b.predecessors)
                )
                new_status = BehaviorState.EXECUTABLE if ready else BehaviorState.IDLE
                if b.status != new_status:
                    b.status = new_status
                    events.append(BehaviorStatusChanged(b.id, new_status))
        return events

    def executable_set(self) -> List[Tuple[str, str]]:
        """All executable behaviors in (protocol config order, def_index) order."""
        out: List[Tuple[str, str]] = []
        for ip in self.protocols:
            for b in ip.behaviors:
                if b.status == BehaviorState.EXECUTABLE:
                    out.append((ip.id, b.id))
        return out

    def select_next(self) -> Optional[Selection]:
        """Pick the behavior to execute next; pure, None when nothing is ready."""
        if self.executing is not None:
            raise ExecutorBusy("selection requires a free executor")
        owners: List[Tuple[int, InteractionProtocol, List[Behavior]]] = []
        for idx, ip in enumerate(self.protocols):
            ex = [b for b in ip.behaviors if b.status == BehaviorState.EXECUTABLE]
            if ex:
                owners.append((idx, ip, ex))
        if not owners:
            return None
        chosen = None
        for entry in owners:
            if entry[1].status == ProtocolState.ACTIVE:
                if all(o[1].priority <= entry[1].priority for o in owners):
                    chosen = entry
                break
        if chosen is None:
            # Suspended beats inactive at equal priority, then config order.
            def rank(entry):
                _, ip, _ = entry
                if ip.status == ProtocolState.SUSPENDED:
                    srank = 0
                elif ip.status == ProtocolState.INACTIVE:
                    srank = 1
                else:
                    srank = 2
                return (-ip.priority, srank, entry[0])

            chosen = min(owners, key=rank)
        _, ip, ex = chosen
        if ip.status == ProtocolState.INACTIVE:
            b = ip.entry_behavior()
            if b.status != BehaviorState.EXECUTABLE:
                raise ConfigIntegrityError(
                    f"inactive protocol {ip.id!r} owns an executable non-entry behavior"
                )
        else:
            preferred = [
                bb for bb in ex if ip.last_finished is not None and ip.last_finished in bb.predecessors
            ]
            pool = preferred if preferred else ex
            b = min(pool, key=lambda bb: bb.def_index)
        return Selection(protocol_id=ip.id, behavior_id=b.id)

    def begin_execution(self, sel: Selection, world: WorldState) -> List[EngineEvent]:
        """Start the selected behavior: activate/suspend IPs, dispatch the action.

        The action parameters are resolved before any state changes so a
        missing world key leaves the engine untouched. After dispatch the
        intent-consumption rule fires: a behavior guarded on `last_intent`
        clears that key, plus any slot keys its own bindings read.
        """
        if self.executing is not None:
            raise ExecutorBusy("a behavior is already executing")
        ip = self.protocol(sel.protocol_id)
        b = ip.behavior(sel.behavior_id)
        if b.status != BehaviorState.EXECUTABLE:
            raise StaleSelection(f"behavior {b.id!r} is {b.status.value}, not executable")
        concrete = resolve_action_params(b, world)
        consumed = self._consumed_keys(b, world)

        events: List[EngineEvent] = []
        active = self._active_protocol()
        if active is not ip:
            if active is not None:
                active.status = ProtocolState.SUSPENDED
                self.suspended_stack.append(active.id)
                events.append(ProtocolStatusChanged(active.id, ProtocolState.SUSPENDED))
            if ip.id in self.suspended_stack:
                self.suspended_stack.remove(ip.id)
            ip.status = ProtocolState.ACTIVE
            events.append(ProtocolStatusChanged(ip.id, ProtocolState.ACTIVE))
        b.status = BehaviorState.EXECUTING
        self.executing = (ip.id, b.id)
        events.append(BehaviorStatusChanged(b.id, BehaviorState.EXECUTING))
        events.append(ActionDispatched(b.id, concrete))
        if consumed:
            world.clear_keys(consumed)
        return events

    def _consumed_keys(self, b: Behavior, world: WorldState) -> List[str]:
        if not any(pc.sensor_id == "last_intent" for pc in b.preconditions):
            return []
        keys = ["last_intent"]
        current = world.get("last_intent")
        slot_keys = set()
        for slots in self.intent_slots.values():
            slot_keys.update(slots)
        if current.kind == "label" and current.payload in self.intent_slots:
            # consumption-on-use: only slots this behavior's bindings read
            read = {
                binding.key
                for binding in b.action.params.values()
                if binding.kind == FROM_WORLD and binding.key in slot_keys
            }
            keys.extend(sorted(read))
        return keys

    def complete_execution(self, behavior_id: str) -> List[EngineEvent]:
        """Mark the executing behavior finished; exit behaviors complete the IP.

        A completed IP resets to inactive (protocols are re-runnable) and the
        most recently suspended IP, if any, resumes.
        """
        if self.executing is None or self.executing[1] != behavior_id:
            raise NotExecuting(f"behavior {behavior_id!r} is not executing")
        ip = self.protocol(self.executing[0])
        b = ip.behavior(behavior_id)
        events: List[EngineEvent] = []
        b.status = BehaviorState.FINISHED
        ip.last_finished = b.id
        self.executing = None
        events.append(BehaviorStatusChanged(b.id, BehaviorState.FINISHED))
        if b.is_exit:
            ip.status = ProtocolState.COMPLETED
            events.append(ProtocolStatusChanged(ip.id, ProtocolState.COMPLETED))
            for bb in ip.behaviors:
                for i, pc in enumerate(bb.preconditions):
                    if pc.status != PrecondState.UNKNOWN:
                        pc.status = PrecondState.UNKNOWN
                        events.append(PreconditionChanged(bb.id, i, PrecondState.UNKNOWN))
                if bb.status != BehaviorState.IDLE:
                    bb.status = BehaviorState.IDLE
                    events.append(BehaviorStatusChanged(bb.id, BehaviorState.IDLE))
            ip.last_finished = None
            ip.status = ProtocolState.INACTIVE
            events.append(ProtocolStatusChanged(ip.id, ProtocolState.INACTIVE))
            if self.suspended_stack:
                resumed_id = self.suspended_stack.pop()
                resumed = self.protocol(resumed_id)
                resumed.status = ProtocolState.ACTIVE
                events.append(ProtocolStatusChanged(resumed_id, ProtocolState.ACTIVE))
        return events

    # -- snapshots and invariants

    def snapshot(self) -> dict:
        """Plain-data view of all statuses; replay_events folds events onto it."""
        return {
            "protocols": [
                {
                    "id": ip.id,
                    "status": ip.status.value,
                    "last_finished": ip.last_finished,
                    "behaviors": [
                        {
                            "id": b.id,
                            "status": b.status.value,
                            "preconditions": [pc.status.value for pc in b.preconditions],
                        }
                        for b in ip.behaviors
                    ],
                }
                for ip in self.protocols
            ],
            "executing": list(self.executing) if self.executing else None,
            "suspended_stack": list(self.suspended_stack),
        }

    def check_invariants(self) -> None:
        executing = [
            (ip.id, b.id)
            for ip in self.protocols
            for b in ip.behaviors
            if b.status == BehaviorState.EXECUTING
        ]
        if len(executing) > 1:
            raise AssertionError(f"multiple executing behaviors: {executing}")
        expected = tuple(executing[0]) if executing else None
        actual = tuple(self.executing) if self.executing else None
        if expected != actual:
            raise AssertionError(f"executing field {actual} != statuses {expected}")
        active = [ip.id for ip in self.protocols if ip.status == ProtocolState.ACTIVE]
        if len(active) > 1:
            raise AssertionError(f"multiple active protocols: {active}")
        for ip in self.protocols:
            if ip.status == ProtocolState.SUSPENDED and ip.id not in self.suspended_stack:
                raise AssertionError(f"suspended protocol {ip.id!r} missing from stack")
            for b in ip.behaviors:
                if b.status == BehaviorState.EXECUTABLE:
                    if not all(pc.status == PrecondState.SATISFIED for pc in b.preconditions):
                        raise AssertionError(f"{b.id!r} executable with unsatisfied preconditions")
                    if not all(
                        ip.behavior(p).status == BehaviorState.FINISHED for p in b.predecessors
                    ):
                        raise AssertionError(f"{b.id!r} executable with unfinished predecessors")
                    if ip.status == ProtocolState.INACTIVE and not b.is_entry:
                        raise AssertionError(f"{b.id!r} executable in inactive protocol")


def replay_events(snapshot: dict, events: Sequence[EngineEvent]) -> dict:
    """Apply an event list to a snapshot copy; reproduces the live post-state."""
    snap = copy.deepcopy(snapshot)
    by_behavior: Dict[str, Tuple[dict, dict]] = {}
    for ip in snap["protocols"]:
        for b in ip["behaviors"]:
            by_behavior[b["id"]] = (ip, b)
    for ev in events:
        if isinstance(ev, PreconditionChanged):
            _, b = by_behavior[ev.behavior_id]
            b["preconditions"][ev.index] = ev.status.value
        elif isinstance(ev, BehaviorStatusChanged):
            ip, b = by_behavior[ev.behavior_id]
            was_executing = b["status"] == BehaviorState.EXECUTING.value
            b["status"] = ev.status.value
            if ev.status == BehaviorState.EXECUTING:
                snap["executing"] = [ip["id"], b["id"]]
            elif ev.status == BehaviorState.FINISHED and was_executing:
                snap["executing"] = None
                ip["last_finished"] = b["id"]
        elif isinstance(ev, ProtocolStatusChanged):
            ip = next(p for p in snap["protocols"] if p["id"] == ev.protocol_id)
            ip["status"] = ev.status.value
            if ev.status == ProtocolState.SUSPENDED:
                snap["suspended_stack"].append(ip["id"])
            elif ev.status == ProtocolState.ACTIVE:
                if ip["id"] in snap["suspended_stack"]:
                    snap["suspended_stack"].remove(ip["id"])
            elif ev.status == ProtocolState.INACTIVE:
                ip["last_finished"] = None
        # ActionDispatched carries no state change
    return snap
