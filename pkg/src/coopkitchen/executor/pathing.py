"""Grid path planning.

The planner searches over (position, facing) states because a move both
translates and turns: stepping toward a non-floor cell only changes facing.
A plan ends adjacent to a goal cell *facing it*, so a path's length is the
exact number of move actions to spend, including a final turn-in-place.
"""

from __future__ import annotations

import heapq
from collections import deque
from functools import lru_cache
from typing import Iterable

from ..env.layout import Layout, Pos
from ..env.state import Action, Direction
from ..errors import NoPath

_DIRS: tuple[tuple[Direction, Pos], ...] = (
    (Direction.UP, (0, -1)),
    (Direction.DOWN, (0, 1)),
    (Direction.LEFT, (-1, 0)),
    (Direction.RIGHT, (1, 0)),
)
_MOVE_OF = {
    Direction.UP: Action.UP,
    Direction.DOWN: Action.DOWN,
    Direction.LEFT: Action.LEFT,
    Direction.RIGHT: Action.RIGHT,
}
_DIR_ORDER = {d: i for i, (d, _) in enumerate(_DIRS)}


def adjacent_floor(layout: Layout, pos: Pos) -> list[Pos]:
    """Floor cells from which ``pos`` can be faced and interacted with."""
    return [n for n in layout.neighbors(pos) if layout.is_floor(n)]


def _facing_goal(pos: Pos, facing: Direction, goals: frozenset[Pos]) -> bool:
    dx, dy = facing.vector
    return (pos[0] + dx, pos[1] + dy) in goals


def plan_path(
    layout: Layout,
    start: Pos,
    goals: Iterable[Pos],
    occupied: Iterable[Pos] = (),
    facing: Direction = Direction.DOWN,
) -> list[Action]:
    """Minimum-length move sequence ending adjacent to and facing a goal.

    ``occupied`` floor cells are avoided (the other player). Returns an
    empty list when already adjacent and facing a goal; raises
    :class:`NoPath` when every goal is unreachable.
    """
    goal_set = frozenset(goals)
    if not goal_set:
        raise ValueError("goals must be non-empty")
    if not layout.is_floor(start):
        raise ValueError(f"start {start} is not a floor cell")
    blocked = frozenset(p for p in occupied if p != start)

    def heuristic(pos: Pos) -> int:
        return min(
            max(0, abs(pos[0] - g[0]) + abs(pos[1] - g[1]) - 1) for g in goal_set
        )

    start_state = (start, facing)
    if _facing_goal(start, facing, goal_set):
        return []

    counter = 0
    open_heap: list[tuple[int, int, int, int]] = []
    heapq.heappush(open_heap, (heuristic(start), 0, counter, 0))
    states = [start_state]
    g_cost = {start_state: 0}
    parent: dict[tuple[Pos, Direction], tuple[tuple[Pos, Direction], Action]] = {}

    while open_heap:
        f, g, _, state_idx = heapq.heappop(open_heap)
        state = states[state_idx]
        if g > g_cost.get(state, -1):
            continue
        pos, fac = state
        if _facing_goal(pos, fac, goal_set):
            actions: list[Action] = []
            cur = state
            while cur != start_state:
                cur, action = parent[cur]
                actions.append(action)
            actions.reverse()
            return actions
        for direction, (dx, dy) in _DIRS:
            nxt = (pos[0] + dx, pos[1] + dy)
            if layout.is_floor(nxt) and nxt not in blocked:
                new_state = (nxt, direction)
            else:
                new_state = (pos, direction)
            if new_state == state:
                continue
            ng = g + 1
            if ng < g_cost.get(new_state, 1 << 30):
                g_cost[new_state] = ng
                parent[new_state] = (state, _MOVE_OF[direction])
                counter += 1
                states.append(new_state)
                heapq.heappush(
                    open_heap,
                    (ng + heuristic(new_state[0]), ng, counter, len(states) - 1),
                )
    raise NoPath(f"no path from {start} to any of {sorted(goal_set)}")


@lru_cache(maxsize=64)
def _floor_distances_cached(layout: Layout, start: Pos) -> dict[Pos, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nxt in layout.neighbors(cur):
            if layout.is_floor(nxt) and nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return dist


def floor_distances(layout: Layout, start: Pos) -> dict[Pos, int]:
    """BFS distance from ``start`` to every reachable floor cell."""
    return _floor_distances_cached(layout, start)


def approach_distance(layout: Layout, start: Pos, target: Pos) -> int | None:
    """Moves needed to stand next to ``target`` (ignoring facing), or None."""
    dists = floor_distances(layout, start)
    best = None
    for n in adjacent_floor(layout, target):
        d = dists.get(n)
        if d is not None and (best is None or d < best):
            best = d
    return best
