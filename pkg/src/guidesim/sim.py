"""Apartment world: avatar teleports, perception radius, follow navigation
and the 1-nearest-neighbor region learner.

The robot navigates with A* over a 0.1 m occupancy grid built from the wall
rectangles (see kernels); following keeps a 1.0 m standoff from the avatar
and stalls while the avatar is out of the perception radius. All motion is
pure float arithmetic driven by the session tick, so runs are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from . import kernels
from .engine import ConcreteAction, ExecutorBusy
from .values import SensorValue

GRID_RES = 0.1
AVATAR_RADIUS = 0.25
MIN_AVATAR_ROBOT_DIST = 0.5
FOLLOW_STANDOFF = 1.0
NAV_ARRIVE_DIST = 0.1

KNOWN_ACTIONS = ("follow", "navigate", "say", "learn")


class SimError(Exception):
    pass


class UnknownAction(SimError):
    pass


class EmptyLabel(SimError):
    pass


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px <= self.x + self.w and self.y <= py <= self.y + self.h

    def inflated(self, margin: float) -> "Rect":
        return Rect(self.x - margin, self.y - margin, self.w + 2 * margin, self.h + 2 * margin)

    def center(self) -> Tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)


@dataclass(frozen=True)
class Room:
    name: str
    rect: Rect


@dataclass(frozen=True)
class Apartment:
    width: float
    height: float
    walls: Tuple[Rect, ...]
    rooms: Tuple[Room, ...]

    def in_bounds(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.width and 0.0 <= y <= self.height


@dataclass
class Pose:
    x: float
    y: float
    heading: float = 0.0


class RejectReason(str, Enum):
    OUT_OF_BOUNDS = "out_of_bounds"
    INSIDE_WALL = "inside_wall"
    TOO_CLOSE_TO_ROBOT = "too_close_to_robot"


@dataclass(frozen=True)
class MoveResult:
    accepted: bool
    pose: Optional[Pose] = None
    reason: Optional[RejectReason] = None


# --- sim events --------------------------------------------------------------


@dataclass(frozen=True)
class RobotMoved:
    x: float
    y: float
    heading: float


@dataclass(frozen=True)
class ActionCompleted:
    action: str


@dataclass(frozen=True)
class AvatarSighted:
    pass


@dataclass(frozen=True)
class AvatarLost:
    pass


@dataclass(frozen=True)
class RobotSaid:
    text: str


SimEvent = Union[RobotMoved, ActionCompleted, AvatarSighted, AvatarLost, RobotSaid]


# --- region learner -----------------------------------------------------------


class RegionLearner:
    """1-NN classifier over taught (x, y, label) samples with a cutoff radius."""

    def __init__(self, tau: float = 3.0) -> None:
        if tau <= 0:
            raise ValueError("tau must be positive")
        self.k = 1
        self.tau = tau
        self.samples: List[Tuple[float, float, str]] = []
        self._arrays: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def add(self, x: float, y: float, label: str) -> Tuple[float, float, str]:
        if not label:
            raise EmptyLabel("region labels must be non-empty")
        sample = (float(x), float(y), label)
        self.samples.append(sample)
        self._arrays = None
        return sample

    def labels(self) -> List[str]:
        return [s[2] for s in self.samples]

    def _sample_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._arrays is None:
            sx = np.array([s[0] for s in self.samples], dtype=np.float64)
            sy = np.array([s[1] for s in self.samples], dtype=np.float64)
            self._arrays = (sx, sy)
        return self._arrays

    def classify_batch(self, px: np.ndarray, py: np.ndarray) -> List[Optional[str]]:
        if not self.samples:
            return [None] * len(px)
        sx, sy = self._sample_arrays()
        idx = kernels.knn_nearest(
            np.ascontiguousarray(px, dtype=np.float64),
            np.ascontiguousarray(py, dtype=np.float64),
            sx,
            sy,
            float(self.tau),
        )
        return [self.samples[i][2] if i >= 0 else None for i in idx]

    def classify(self, x: float, y: float) -> Optional[str]:
        return self.classify_batch(np.array([x]), np.array([y]))[0]


def classify_point(learner: RegionLearner, point: Tuple[float, float]) -> Optional[str]:
    """Label of the nearest sample within tau, ties to the lowest index."""
    return learner.classify(point[0], point[1])


def floor_grid(
    learner: RegionLearner, apartment: Apartment, resolution: float
) -> List[List[Optional[str]]]:
    """Classify cell centers of a bounds-aligned grid, bottom row first."""
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    cols = int(math.ceil(apartment.width / resolution - 1e-9))
    rows = int(math.ceil(apartment.height / resolution - 1e-9))
    cx = (np.arange(cols, dtype=np.float64) + 0.5) * resolution
    cy = (np.arange(rows, dtype=np.float64) + 0.5) * resolution
    px = np.tile(cx, rows)
    py = np.repeat(cy, cols)
    flat = learner.classify_batch(px, py)
    return [flat[r * cols : (r + 1) * cols] for r in range(rows)]


# --- simulation state ---------------------------------------------------------


@dataclass
class ActiveAction:
    name: str
    params: Dict[str, SensorValue]
    ticks: int = 0
    target: Optional[Tuple[float, float]] = None  # navigate only


class SimState:
    def __init__(
        self,
        apartment: Apartment,
        robot_start: Tuple[float, float],
        avatar_start: Tuple[float, float],
        perception_radius: float = 5.0,
        speed: float = 1.0,
        tau: float = 3.0,
    ) -> None:
        self.apartment = apartment
        self.robot = Pose(float(robot_start[0]), float(robot_start[1]))
        self.avatar = Pose(float(avatar_start[0]), float(avatar_start[1]))
        self.perception_radius = float(perception_radius)
        self.speed = float(speed)
        self.learner = RegionLearner(tau=tau)
        self.active_action: Optional[ActiveAction] = None
        self.tick = 0
        self._occupancy = build_occupancy(apartment, GRID_RES)
        self._pending: List[SimEvent] = []
        self._waypoints: List[Tuple[float, float]] = []
        self._path_goal: Optional[Tuple[int, int]] = None
        self._last_in_sight = self.in_sight()

    # -- geometry helpers

    def in_sight(self) -> bool:
        return (
            math.hypot(self.robot.x - self.avatar.x, self.robot.y - self.avatar.y)
            <= self.perception_radius
        )

    def _cell_of(self, x: float, y: float) -> Tuple[int, int]:
        rows, cols = self._occupancy.shape
        c = min(max(int(x / GRID_RES), 0), cols - 1)
        r = min(max(int(y / GRID_RES), 0), rows - 1)
        return r, c

    def _cell_center(self, r: int, c: int) -> Tuple[float, float]:
        return ((c + 0.5) * GRID_RES, (r + 0.5) * GRID_RES)

    # -- operations

    def move_avatar(self, target: Tuple[float, float]) -> MoveResult:
        """Teleport the avatar; first failing check wins: bounds, wall, robot."""
        x, y = float(target[0]), float(target[1])
        if not self.apartment.in_bounds(x, y):
            return MoveResult(accepted=False, reason=RejectReason.OUT_OF_BOUNDS)
        for wall in self.apartment.walls:
            if wall.inflated(AVATAR_RADIUS).contains(x, y):
                return MoveResult(accepted=False, reason=RejectReason.INSIDE_WALL)
        if math.hypot(x - self.robot.x, y - self.robot.y) < MIN_AVATAR_ROBOT_DIST:
            return MoveResult(accepted=False, reason=RejectReason.TOO_CLOSE_TO_ROBOT)
        self.avatar.x = x
        self.avatar.y = y
        return MoveResult(accepted=True, pose=Pose(x, y, self.avatar.heading))

    def teach_region(self, label: str) -> Tuple[float, float, str]:
        """Store the robot's current position under the given label."""
        return self.learner.add(self.robot.x, self.robot.y, label)

    def dispatch_action(self, action: ConcreteAction) -> None:
        """Install a low-level action; learn stores its sample immediately."""
        if self.active_action is not None:
            raise ExecutorBusy(f"action {self.active_action.name!r} still running")
        if action.name not in KNOWN_ACTIONS:
            raise UnknownAction(action.name)
        installed = ActiveAction(name=action.name, params=dict(action.params))
        if action.name == "say":
            utterance = action.params.get("text")
            self._pending.append(RobotSaid(utterance.as_str() if utterance else ""))
        elif action.name == "learn":
            value = action.params.get("label")
            self.teach_region(value.as_str() if value else "")
        elif action.name == "navigate":
            installed.target = self._parse_nav_target(action.params.get("target"))
        elif action.name == "follow":
            self._waypoints = []
            self._path_goal = None
        self.active_action = installed

    def end_active_action(self) -> None:
        """Drop the running action (engine completed its behavior externally)."""
        self.active_action = None
        self._waypoints = []
        self._path_goal = None

    def _parse_nav_target(self, value: Optional[SensorValue]) -> Optional[Tuple[float, float]]:
        if value is None or value.is_none():
            return None
        raw = value.as_str()
        if "," in raw:
            try:
                xs, ys = raw.split(",", 1)
                return (float(xs), float(ys))
            except ValueError:
                return None
        for room in self.apartment.rooms:
            if room.name == raw:
                return room.rect.center()
        return None

    def step(self, dt: float) -> List[SimEvent]:
        """Advance one tick: flush queued speech, run the active action,
        then report sight transitions."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.tick += 1
        events: List[SimEvent] = []
        events.extend(self._pending)
        self._pending.clear()
        action = self.active_action
        if action is not None:
            action.ticks += 1
            if action.name == "follow":
                if self.in_sight():
                    if self._advance_follow(self.speed * dt):
                        events.append(RobotMoved(self.robot.x, self.robot.y, self.robot.heading))
                # out of sight: halt in place, keep the action
            elif action.name == "navigate":
                moved, arrived = self._advance_navigate(self.speed * dt)
                if moved:
                    events.append(RobotMoved(self.robot.x, self.robot.y, self.robot.heading))
                if arrived:
                    events.append(ActionCompleted(action.name))
                    self.end_active_action()
            else:  # say / learn complete one tick after dispatch
                events.append(ActionCompleted(action.name))
                self.active_action = None
        sight = self.in_sight()
        if sight != self._last_in_sight:
            events.append(AvatarSighted() if sight else AvatarLost())
            self._last_in_sight = sight
        return events

    # -- path following

    def _plan_to(self, goal: Tuple[int, int], include_exact: Optional[Tuple[float, float]]) -> None:
        start = self._cell_of(self.robot.x, self.robot.y)
        cells = kernels.astar_cells(self._occupancy, start[0], start[1], goal[0], goal[1])
        cols = self._occupancy.shape[1]
        waypoints = [self._cell_center(int(idx) // cols, int(idx) % cols) for idx in cells[1:]]
        if include_exact is not None and len(cells) > 0:
            waypoints.append(include_exact)
        self._waypoints = waypoints
        self._path_goal = goal

    def _walk(self, budget: float, stop_radius: Optional[float]) -> bool:
        """Advance along the waypoint polyline by up to `budget` meters.

        With a stop radius, motion halts exactly on the circle of that radius
        around the avatar. Returns whether the robot moved.
        """
        moved = False
        ax, ay = self.avatar.x, self.avatar.y
        while budget > 1e-12 and self._waypoints:
            tx, ty = self._waypoints[0]
            dx = tx - self.robot.x
            dy = ty - self.robot.y
            seg = math.hypot(dx, dy)
            if seg <= 1e-9:
                self._waypoints.pop(0)
                continue
            ux, uy = dx / seg, dy / seg
            step_d = min(budget, seg)
            if stop_radius is not None:
                beta = ux * (self.robot.x - ax) + uy * (self.robot.y - ay)
                gamma = (self.robot.x - ax) ** 2 + (self.robot.y - ay) ** 2 - stop_radius ** 2
                disc = beta * beta - gamma
                if disc >= 0.0:
                    entry = -beta - math.sqrt(disc)
                    if 0.0 <= entry < step_d:
                        if entry > 1e-12:
                            self.robot.x += ux * entry
                            self.robot.y += uy * entry
                            self.robot.heading = math.atan2(uy, ux)
                            moved = True
                        return moved
            self.robot.x += ux * step_d
            self.robot.y += uy * step_d
            self.robot.heading = math.atan2(uy, ux)
            moved = True
            budget -= step_d
            if step_d >= seg - 1e-9:
                self.robot.x, self.robot.y = tx, ty
                self._waypoints.pop(0)
        return moved

    def _advance_follow(self, budget: float) -> bool:
        if (
            math.hypot(self.robot.x - self.avatar.x, self.robot.y - self.avatar.y)
            <= FOLLOW_STANDOFF
        ):
            return False
        goal = self._cell_of(self.avatar.x, self.avatar.y)
        if self._path_goal != goal or not self._waypoints:
            self._plan_to(goal, include_exact=None)
        return self._walk(budget, stop_radius=FOLLOW_STANDOFF)

    def _advance_navigate(self, budget: float) -> Tuple[bool, bool]:
        action = self.active_action
        if action.target is None:
            return False, True  # nothing to navigate to: complete
        tx, ty = action.target
        if math.hypot(self.robot.x - tx, self.robot.y - ty) <= NAV_ARRIVE_DIST:
            return False, True
        goal = self._cell_of(tx, ty)
        if self._path_goal != goal or not self._waypoints:
            self._plan_to(goal, include_exact=(tx, ty))
        moved = self._walk(budget, stop_radius=None)
        arrived = math.hypot(self.robot.x - tx, self.robot.y - ty) <= NAV_ARRIVE_DIST
        return moved, arrived


def build_occupancy(apartment: Apartment, resolution: float) -> np.ndarray:
    """Occupancy grid over the bounds; a cell is blocked when its center lies
    inside a wall rectangle."""
    cols = int(math.ceil(apartment.width / resolution - 1e-9))
    rows = int(math.ceil(apartment.height / resolution - 1e-9))
    occ = np.zeros((rows, cols), dtype=np.uint8)
    for wall in apartment.walls:
        c0 = max(int((wall.x) / resolution - 0.5), 0)
        c1 = min(int(math.ceil((wall.x + wall.w) / resolution - 0.5)), cols - 1)
        r0 = max(int((wall.y) / resolution - 0.5), 0)
        r1 = min(int(math.ceil((wall.y + wall.h) / resolution - 0.5)), rows - 1)
        for r in range(r0, r1 + 1):
            for c in range(c0, c1 + 1):
                cx, cy = ((c + 0.5) * resolution, (r + 0.5) * resolution)
                if wall.contains(cx, cy):
                    occ[r, c] = 1
    return occ
