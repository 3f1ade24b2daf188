import copy
import math
import random

import pytest

from guidesim.engine import ConcreteAction, ExecutorBusy
from guidesim.sim import (
    Apartment,
    EmptyLabel,
    Rect,
    RegionLearner,
    RejectReason,
    SimState,
    UnknownAction,
    classify_point,
    floor_grid,
)
from guidesim.values import label, text


def open_apartment(width=10.0, height=8.0, walls=()):
    return Apartment(width=width, height=height, walls=tuple(walls), rooms=())


def mk_sim(
    robot=(1.0, 1.0), avatar=(9.0, 7.0), walls=(), radius=5.0, speed=1.0, tau=3.0
) -> SimState:
    return SimState(
        apartment=open_apartment(walls=walls),
        robot_start=robot,
        avatar_start=avatar,
        perception_radius=radius,
        speed=speed,
        tau=tau,
    )


def say(text_value="hi"):
    return ConcreteAction(name="say", params={"text": text(text_value)})


def learn(label_value="kitchen"):
    return ConcreteAction(name="learn", params={"label": label(label_value)})


def follow():
    return ConcreteAction(name="follow", params={"target": text("0,0")})


# --- move_avatar ---------------------------------------------------------------


def test_move_into_wall_rejected_state_unchanged():
    sim = mk_sim(walls=[Rect(4.0, 0.0, 0.2, 3.0)])
    before = (sim.avatar.x, sim.avatar.y)
    result = sim.move_avatar((4.1, 1.0))
    assert not result.accepted
    assert result.reason == RejectReason.INSIDE_WALL
    assert (sim.avatar.x, sim.avatar.y) == before


def test_move_wall_test_uses_avatar_radius():
    sim = mk_sim(walls=[Rect(4.0, 0.0, 0.2, 3.0)])
    assert sim.move_avatar((4.4, 1.0)).reason == RejectReason.INSIDE_WALL  # within 0.25 m
    assert sim.move_avatar((4.5, 1.0)).accepted


def test_identity_move_accepted():
    sim = mk_sim()
    result = sim.move_avatar((9.0, 7.0))
    assert result.accepted
    assert (result.pose.x, result.pose.y) == (9.0, 7.0)


def test_move_too_close_to_robot():
    sim = mk_sim()
    result = sim.move_avatar((1.3, 1.0))  # 0.3 m from the robot
    assert result.reason == RejectReason.TOO_CLOSE_TO_ROBOT
    assert sim.move_avatar((1.5, 1.0)).accepted  # exactly 0.5 m is fine


def test_move_out_of_bounds_checked_first():
    sim = mk_sim(walls=[Rect(9.5, 7.0, 0.5, 1.0)])
    result = sim.move_avatar((10.4, 7.5))
    assert result.reason == RejectReason.OUT_OF_BOUNDS


def test_random_accepted_moves_always_valid():
    rng = random.Random(11)
    walls = [Rect(4.0, 0.0, 0.2, 3.0), Rect(0.0, 4.0, 2.5, 0.2)]
    sim = mk_sim(walls=walls)
    for _ in range(500):
        target = (rng.uniform(-1, 11), rng.uniform(-1, 9))
        before = copy.deepcopy((sim.avatar.x, sim.avatar.y, sim.robot.x, sim.robot.y))
        result = sim.move_avatar(target)
        if result.accepted:
            assert sim.apartment.in_bounds(sim.avatar.x, sim.avatar.y)
            assert not any(
                w.inflated(0.25).contains(sim.avatar.x, sim.avatar.y) for w in walls
            )
        else:
            assert (sim.avatar.x, sim.avatar.y, sim.robot.x, sim.robot.y) == before


# --- in_sight -------------------------------------------------------------------


def test_in_sight_same_point():
    sim = mk_sim(robot=(0.0, 0.0), avatar=(0.5, 0.0))
    sim.avatar.x, sim.avatar.y = 0.0, 0.0
    assert sim.in_sight()


def test_in_sight_345_boundary_inclusive():
    sim = mk_sim(robot=(0.0, 0.0), avatar=(3.0, 4.0), radius=5.0)
    assert sim.in_sight()
    sim.perception_radius = 4.9
    assert not sim.in_sight()


def test_in_sight_symmetric_and_monotone():
    rng = random.Random(5)
    for _ in range(200):
        a = (rng.uniform(0, 10), rng.uniform(0, 8))
        b = (rng.uniform(0, 10), rng.uniform(0, 8))
        r = rng.uniform(0.1, 12)
        sim1 = mk_sim(robot=a, avatar=b, radius=r)
        sim2 = mk_sim(robot=b, avatar=a, radius=r)
        assert sim1.in_sight() == sim2.in_sight()
        sim1.perception_radius = r + 1.0
        assert sim1.in_sight() or not sim2.in_sight()  # monotone in the radius


# --- step / actions -------------------------------------------------------------


def test_follow_advances_at_speed_in_open_space():
    sim = mk_sim(robot=(1.0, 1.0), avatar=(9.0, 1.0), radius=20.0)
    sim.dispatch_action(follow())
    before = (sim.robot.x, sim.robot.y)
    events = sim.step(1.0)
    moved = math.hypot(sim.robot.x - before[0], sim.robot.y - before[1])
    assert any(type(e).__name__ == "RobotMoved" for e in events)
    assert moved == pytest.approx(1.0, abs=0.05)


def test_follow_out_of_sight_stalls():
    sim = mk_sim(robot=(1.0, 1.0), avatar=(9.0, 7.0), radius=5.0)  # 10 m apart
    sim.dispatch_action(follow())
    events = sim.step(1.0)
    assert not any(type(e).__name__ == "RobotMoved" for e in events)
    assert (sim.robot.x, sim.robot.y) == (1.0, 1.0)


def test_follow_keeps_standoff():
    sim = mk_sim(robot=(1.0, 1.0), avatar=(4.0, 1.0), radius=20.0)
    sim.dispatch_action(follow())
    for _ in range(100):
        sim.step(0.1)
    dist = math.hypot(sim.robot.x - 4.0, sim.robot.y - 1.0)
    assert dist == pytest.approx(1.0, abs=1e-6)
    # never self-completes
    assert sim.active_action is not None and sim.active_action.name == "follow"


def test_follow_routes_around_walls():
    sim = mk_sim(robot=(2.0, 1.5), avatar=(6.0, 1.5), walls=[Rect(4.0, 0.0, 0.2, 3.0)], radius=20.0)
    sim.dispatch_action(follow())
    for _ in range(200):
        sim.step(0.1)
    # the straight line is blocked; the robot must have gone over the wall top
    assert math.hypot(sim.robot.x - 6.0, sim.robot.y - 1.5) == pytest.approx(1.0, abs=1e-6)


def test_say_completes_after_one_tick():
    sim = mk_sim()
    sim.dispatch_action(say("done"))
    events = sim.step(0.1)
    names = [type(e).__name__ for e in events]
    assert names == ["RobotSaid", "ActionCompleted"]
    assert events[0].text == "done"
    assert sim.active_action is None


def test_learn_stores_immediately_and_completes_next_step():
    sim = mk_sim(robot=(2.0, 3.5))
    sim.dispatch_action(learn("kitchen"))
    assert sim.learner.samples == [(2.0, 3.5, "kitchen")]
    events = sim.step(0.1)
    assert any(type(e).__name__ == "ActionCompleted" for e in events)


def test_dispatch_while_busy_is_rejected():
    sim = mk_sim()
    sim.dispatch_action(follow())
    with pytest.raises(ExecutorBusy):
        sim.dispatch_action(say())


def test_dispatch_unknown_action():
    sim = mk_sim()
    with pytest.raises(UnknownAction):
        sim.dispatch_action(ConcreteAction(name="dance", params={}))


def test_navigate_completes_on_arrival():
    sim = mk_sim(robot=(1.0, 1.0))
    sim.dispatch_action(ConcreteAction(name="navigate", params={"target": text("3.0,1.0")}))
    completed = False
    for _ in range(60):
        events = sim.step(0.1)
        if any(type(e).__name__ == "ActionCompleted" for e in events):
            completed = True
            break
    assert completed
    assert math.hypot(sim.robot.x - 3.0, sim.robot.y - 1.0) <= 0.1 + 1e-9


def test_sight_transition_events():
    sim = mk_sim(robot=(1.0, 1.0), avatar=(9.0, 7.0), radius=5.0)
    sim.move_avatar((3.0, 2.0))
    events = sim.step(0.1)
    assert any(type(e).__name__ == "AvatarSighted" for e in events)
    sim.move_avatar((9.0, 7.0))
    events = sim.step(0.1)
    assert any(type(e).__name__ == "AvatarLost" for e in events)


def test_step_rejects_non_positive_dt():
    with pytest.raises(ValueError):
        mk_sim().step(0.0)


def test_substep_consistency():
    walls = [Rect(4.0, 0.0, 0.2, 3.0)]
    one = mk_sim(robot=(2.0, 1.5), avatar=(6.5, 1.8), walls=walls, radius=20.0)
    many = mk_sim(robot=(2.0, 1.5), avatar=(6.5, 1.8), walls=walls, radius=20.0)
    one.dispatch_action(follow())
    many.dispatch_action(follow())
    for _ in range(3):
        one.step(1.0)
        for _ in range(10):
            many.step(0.1)
    gap = math.hypot(one.robot.x - many.robot.x, one.robot.y - many.robot.y)
    assert gap <= 0.1


# --- teach / classify / floor ----------------------------------------------------


def test_teach_region_appends_and_returns_sample():
    sim = mk_sim(robot=(2.0, 3.5))
    assert sim.teach_region("kitchen") == (2.0, 3.5, "kitchen")
    assert sim.teach_region("kitchen") == (2.0, 3.5, "kitchen")
    assert len(sim.learner.samples) == 2  # duplicates allowed


def test_teach_empty_label():
    with pytest.raises(EmptyLabel):
        mk_sim().teach_region("")


def test_classify_empty_learner():
    assert classify_point(RegionLearner(tau=3.0), (1.0, 1.0)) is None


def test_classify_exact_sample_position():
    learner = RegionLearner(tau=3.0)
    learner.add(2.0, 3.0, "hall")
    assert classify_point(learner, (2.0, 3.0)) == "hall"


def test_classify_hand_computed_cases():
    learner = RegionLearner(tau=3.0)
    learner.add(0.0, 0.0, "kitchen")
    learner.add(4.0, 0.0, "entrance")
    assert classify_point(learner, (1.0, 0.0)) == "kitchen"
    assert classify_point(learner, (2.1, 0.0)) == "entrance"
    assert classify_point(learner, (2.0, 3.5)) is None  # both ~4.03 > tau


def test_classify_tie_breaks_to_lowest_sample_index():
    learner = RegionLearner(tau=3.0)
    learner.add(0.0, 0.0, "first")
    learner.add(2.0, 0.0, "second")
    assert classify_point(learner, (1.0, 0.0)) == "first"


def test_classify_matches_brute_force_scan():
    rng = random.Random(99)
    learner = RegionLearner(tau=3.0)
    for i in range(25):
        learner.add(rng.uniform(0, 10), rng.uniform(0, 8), f"r{i % 5}")
    for _ in range(10_000):
        p = (rng.uniform(-2, 12), rng.uniform(-2, 10))
        best_i, best_d = -1, float("inf")
        for i, (sx, sy, _) in enumerate(learner.samples):
            d = math.hypot(p[0] - sx, p[1] - sy)
            if d < best_d:
                best_i, best_d = i, d
        expected = learner.samples[best_i][2] if best_d <= 3.0 else None
        assert classify_point(learner, p) == expected


def test_floor_grid_empty_learner_all_none():
    grid = floor_grid(RegionLearner(tau=3.0), open_apartment(), 0.5)
    assert all(cell is None for row in grid for cell in row)
    assert len(grid) == 16 and len(grid[0]) == 20


def test_floor_grid_single_sample_disc():
    learner = RegionLearner(tau=3.0)
    learner.add(5.0, 4.0, "kitchen")
    apt = open_apartment()
    grid = floor_grid(learner, apt, 0.25)
    # probe four cells: inside the disc, and far outside
    def cell(x, y):
        return grid[int(y / 0.25)][int(x / 0.25)]

    assert cell(5.0, 4.0) == "kitchen"
    assert cell(5.0, 6.5) == "kitchen"  # 2.5 m away
    assert cell(0.2, 0.2) is None
    assert cell(9.8, 7.8) is None


def test_floor_grid_matches_per_cell_classify():
    rng = random.Random(4)
    learner = RegionLearner(tau=2.0)
    for i in range(6):
        learner.add(rng.uniform(0, 10), rng.uniform(0, 8), f"r{i}")
    apt = open_apartment()
    res = 0.5
    grid = floor_grid(learner, apt, res)
    for r, row in enumerate(grid):
        for c, value in enumerate(row):
            center = ((c + 0.5) * res, (r + 0.5) * res)
            assert value == classify_point(learner, center)


def test_teaching_three_labels_then_classifying_at_positions():
    sim = mk_sim(robot=(1.0, 1.0))
    positions = [(1.0, 1.0), (6.0, 2.0), (3.0, 6.0)]
    for pos, name in zip(positions, ("kitchen", "entrance", "hall")):
        sim.robot.x, sim.robot.y = pos
        sim.teach_region(name)
    for pos, name in zip(positions, ("kitchen", "entrance", "hall")):
        assert classify_point(sim.learner, pos) == name
