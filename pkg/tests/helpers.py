"""Shared test fixtures: engine builders, the independent selection oracle,
and an enumerator of valid engine states for the equivalence sweep."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from guidesim.config import default_config, parse_config, config_document
from guidesim.engine import (
    ActionSpec,
    Behavior,
    BehaviorState,
    Binding,
    GuidanceEngine,
    InteractionProtocol,
    Precondition,
    ProtocolState,
    STATIC,
)
from guidesim.values import boolean


def mk_behavior(
    bid: str,
    *,
    entry: bool = False,
    exit_: bool = False,
    preds: Sequence[str] = (),
    preconds: Sequence[Precondition] = (),
    status: BehaviorState = BehaviorState.IDLE,
    def_index: int = 0,
    action: str = "say",
) -> Behavior:
    return Behavior(
        id=bid,
        title=bid,
        is_entry=entry,
        is_exit=exit_,
        preconditions=list(preconds),
        predecessors=list(preds),
        action=ActionSpec(name=action, params={"text": Binding(kind=STATIC, value=boolean(True))}),
        status=status,
        def_index=def_index,
    )


def mk_precond(sensor: str, expected=True, op: str = "eq") -> Precondition:
    return Precondition(sensor_id=sensor, op=op, expected=boolean(expected))


# --- independent brute-force selection oracle ---------------------------------


def oracle_select(engine: GuidanceEngine) -> Optional[Tuple[str, str]]:
    """Literal transcription of the selection rule, structured differently
    from the engine's implementation."""
    executables = {}
    for ip in engine.protocols:
        owned = [b for b in ip.behaviors if b.status == BehaviorState.EXECUTABLE]
        if owned:
            executables[ip.id] = owned
    if not executables:
        return None
    candidates = [ip for ip in engine.protocols if ip.id in executables]
    active = None
    for ip in engine.protocols:
        if ip.status == ProtocolState.ACTIVE:
            active = ip
    chosen_ip = None
    if active is not None and active.id in executables:
        strictly_higher = [ip for ip in candidates if ip.priority > active.priority]
        if not strictly_higher:
            chosen_ip = active
    if chosen_ip is None:
        best = max(ip.priority for ip in candidates)
        top = [ip for ip in candidates if ip.priority == best]
        suspended = [ip for ip in top if ip.status == ProtocolState.SUSPENDED]
        pool = suspended if suspended else top
        chosen_ip = pool[0]  # protocols list is config order
    if chosen_ip.status == ProtocolState.INACTIVE:
        behavior = next(b for b in chosen_ip.behaviors if b.is_entry)
    else:
        owned = executables[chosen_ip.id]
        last = chosen_ip.last_finished
        tier = [b for b in owned if last is not None and last in b.predecessors]
        if not tier:
            tier = owned
        behavior = sorted(tier, key=lambda b: b.def_index)[0]
    return (chosen_ip.id, behavior.id)


# --- engine state enumeration ---------------------------------------------------


@dataclass(frozen=True)
class IPState:
    n_behaviors: int
    preds: Tuple[Tuple[int, ...], ...]  # predecessor indices per behavior
    statuses: Tuple[BehaviorState, ...]
    ip_status: ProtocolState
    priority: int
    last_finished: Optional[int]


def _pred_patterns(n: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """Acyclic predecessor assignments: each behavior may depend on earlier ones."""
    options_per_behavior = []
    for i in range(n):
        earlier = list(range(i))
        subsets = [()]
        for r in range(1, len(earlier) + 1):
            subsets.extend(itertools.combinations(earlier, r))
        options_per_behavior.append(subsets)
    return [tuple(combo) for combo in itertools.product(*options_per_behavior)]


def enumerate_ip_states(n_behaviors: int, priorities=(0, 1, 2)) -> List[IPState]:
    """All semantically valid single-IP states at selection time (no executing)."""
    states: List[IPState] = []
    behavior_statuses = [BehaviorState.IDLE, BehaviorState.EXECUTABLE, BehaviorState.FINISHED]
    for preds in _pred_patterns(n_behaviors):
        for statuses in itertools.product(behavior_statuses, repeat=n_behaviors):
            for ip_status in (ProtocolState.INACTIVE, ProtocolState.ACTIVE, ProtocolState.SUSPENDED):
                finished = [i for i in range(n_behaviors) if statuses[i] == BehaviorState.FINISHED]
                if ip_status == ProtocolState.INACTIVE:
                    if finished:
                        continue
                    # only the entry (index 0) may be executable in an inactive IP
                    if any(
                        statuses[i] == BehaviorState.EXECUTABLE for i in range(1, n_behaviors)
                    ):
                        continue
                    lf_options: List[Optional[int]] = [None]
                else:
                    if not finished:
                        continue  # active/suspended implies >= 1 finished here
                    lf_options = list(finished)
                ok = True
                for i in range(n_behaviors):
                    if statuses[i] == BehaviorState.EXECUTABLE:
                        if not all(statuses[p] == BehaviorState.FINISHED for p in preds[i]):
                            ok = False
                            break
                if not ok:
                    continue
                for lf in lf_options:
                    for priority in priorities:
                        states.append(
                            IPState(n_behaviors, preds, statuses, ip_status, priority, lf)
                        )
    return states


def build_engine(ip_states: Sequence[IPState]) -> GuidanceEngine:
    protocols = []
    stack = []
    for p_idx, state in enumerate(ip_states):
        behaviors = []
        for i in range(state.n_behaviors):
            behaviors.append(
                mk_behavior(
                    f"p{p_idx}b{i}",
                    entry=(i == 0),
                    exit_=(i == state.n_behaviors - 1),
                    preds=[f"p{p_idx}b{j}" for j in state.preds[i]],
                    status=state.statuses[i],
                    def_index=i,
                )
            )
        ip = InteractionProtocol(
            id=f"p{p_idx}",
            name=f"p{p_idx}",
            priority=state.priority,
            behaviors=behaviors,
            status=state.ip_status,
            last_finished=None if state.last_finished is None else f"p{p_idx}b{state.last_finished}",
        )
        protocols.append(ip)
        if state.ip_status == ProtocolState.SUSPENDED:
            stack.append(ip.id)
    engine = GuidanceEngine(protocols)
    engine.suspended_stack = stack
    return engine


def valid_combination(states: Sequence[IPState]) -> bool:
    return sum(1 for s in states if s.ip_status == ProtocolState.ACTIVE) <= 1


def engine_cases(min_cases: int = 10_000, seed: int = 20240811):
    """Exhaustive 2x2 sweep plus seeded random 3-IP combinations."""
    pool2 = enumerate_ip_states(1) + enumerate_ip_states(2)
    cases: List[Tuple[IPState, ...]] = []
    for combo in itertools.product(pool2, pool2):
        if valid_combination(combo):
            cases.append(combo)
    for state in pool2:
        cases.append((state,))
    rng = random.Random(seed)
    pool3 = pool2 + enumerate_ip_states(3)
    target = max(min_cases, len(cases) + 5000)
    while len(cases) < target:
        combo = tuple(rng.choice(pool3) for _ in range(3))
        if valid_combination(combo):
            cases.append(combo)
    return cases


# --- scripts and configs --------------------------------------------------------


def golden_entries() -> List[dict]:
    from importlib import resources

    raw = resources.files("guidesim.data").joinpath("golden_script.json").read_text("utf-8")
    return json.loads(raw)["entries"]


def shifted(entries: Sequence[dict], dt_shift: float) -> List[dict]:
    out = []
    for e in entries:
        e = dict(e)
        e["t"] = e["t"] + dt_shift
        out.append(e)
    return out


def config_with(**apartment_overrides):
    doc = config_document(default_config())
    doc["apartment"].update(apartment_overrides)
    cfg = parse_config(json.dumps(doc))
    assert not isinstance(cfg, list), cfg
    return cfg
