"""Path planner vs an independent breadth-first-search oracle."""

from __future__ import annotations

import random
from collections import deque

import pytest

from coopkitchen.env.state import Action, Direction
from coopkitchen.errors import NoPath
from coopkitchen.executor import plan_path

_DIRS = {
    Direction.UP: (0, -1),
    Direction.DOWN: (0, 1),
    Direction.LEFT: (-1, 0),
    Direction.RIGHT: (1, 0),
}


def bfs_oracle_distance(layout, start, facing, goals, occupied=()):
    """Plain BFS over (position, facing) states; None when unreachable."""
    goals = set(goals)
    blocked = set(occupied) - {start}

    def is_goal(pos, fac):
        dx, dy = _DIRS[fac]
        return (pos[0] + dx, pos[1] + dy) in goals

    if is_goal(start, facing):
        return 0
    seen = {(start, facing)}
    frontier = deque([((start, facing), 0)])
    while frontier:
        (pos, fac), dist = frontier.popleft()
        for direction, (dx, dy) in _DIRS.items():
            nxt = (pos[0] + dx, pos[1] + dy)
            if not layout.is_floor(nxt) or nxt in blocked:
                nxt = pos
            state = (nxt, direction)
            if state in seen:
                continue
            seen.add(state)
            if is_goal(nxt, direction):
                return dist + 1
            frontier.append((state, dist + 1))
    return None


def simulate_moves(layout, start, facing, actions, occupied=()):
    pos, fac = start, facing
    blocked = set(occupied) - {start}
    for action in actions:
        direction = Direction(action.value)
        fac = direction
        dx, dy = _DIRS[direction]
        nxt = (pos[0] + dx, pos[1] + dy)
        if layout.is_floor(nxt) and nxt not in blocked:
            pos = nxt
    return pos, fac


def test_already_adjacent_and_facing_returns_empty(counter_circuit):
    layout = counter_circuit
    goal = layout.counters[0]
    adj = next(n for n in layout.neighbors(goal) if layout.is_floor(n))
    dx, dy = goal[0] - adj[0], goal[1] - adj[1]
    facing = {v: k for k, v in _DIRS.items()}[(dx, dy)]
    assert plan_path(layout, adj, [goal], facing=facing) == []


def test_adjacent_but_not_facing_needs_one_turn(counter_circuit):
    layout = counter_circuit
    goal = layout.counters[0]
    adj = next(n for n in layout.neighbors(goal) if layout.is_floor(n))
    dx, dy = goal[0] - adj[0], goal[1] - adj[1]
    right_facing = {v: k for k, v in _DIRS.items()}[(dx, dy)]
    wrong = next(d for d in Direction if d != right_facing)
    path = plan_path(layout, adj, [goal], facing=wrong)
    assert len(path) >= 1
    pos, fac = simulate_moves(layout, adj, wrong, path)
    dxe, dye = _DIRS[fac]
    assert (pos[0] + dxe, pos[1] + dye) == goal


def test_goal_in_other_region_raises(counter_circuit):
    from coopkitchen.env.layout import CellKind

    layout = counter_circuit
    outer_spawn = layout.spawns[1]
    inner_region = layout.region_of(layout.spawns[0])
    # the inner beef-station island is only approachable from inner floor
    inner_only = next(
        pos
        for pos in layout.cells_of(CellKind.BEEF_STATION)
        if any(n in inner_region for n in layout.neighbors(pos))
        and all(n in inner_region or not layout.is_floor(n) for n in layout.neighbors(pos))
    )
    with pytest.raises(NoPath):
        plan_path(layout, outer_spawn, [inner_only])


@pytest.mark.parametrize("layout_name", ["counter_circuit", "asymmetric_advantages"])
def test_optimality_against_bfs_oracle(layout_name, request):
    layout = request.getfixturevalue(layout_name)
    rng = random.Random(77)
    floors = [
        (x, y)
        for y in range(layout.height)
        for x in range(layout.width)
        if layout.is_floor((x, y))
    ]
    from coopkitchen.env.layout import CellKind

    targets = layout.counters + [
        p
        for kind in (
            CellKind.PAN,
            CellKind.CUTBOARD,
            CellKind.SERVING,
            CellKind.BEEF_STATION,
            CellKind.PLATE_STATION,
        )
        for p in layout.cells_of(kind)
    ]
    directions = list(Direction)
    checked = 0
    for _ in range(600):
        start = rng.choice(floors)
        facing = rng.choice(directions)
        goals = rng.sample(targets, k=rng.randint(1, 3))
        occupied = [rng.choice(floors)] if rng.random() < 0.5 else []
        oracle = bfs_oracle_distance(layout, start, facing, goals, occupied)
        if oracle is None:
            with pytest.raises(NoPath):
                plan_path(layout, start, goals, occupied=occupied, facing=facing)
            continue
        path = plan_path(layout, start, goals, occupied=occupied, facing=facing)
        assert len(path) == oracle, (start, facing, goals, occupied)
        pos, fac = simulate_moves(layout, start, facing, path, occupied)
        dx, dy = _DIRS[fac]
        assert (pos[0] + dx, pos[1] + dy) in set(goals)
        checked += 1
    assert checked > 400  # most sampled pairs are reachable
