"""Compiling macro actions into subgoal plans and atomic actions.

A plan is an ordered list of subgoals. Each subgoal names the cells to
approach, whether to interact there, a ``done_when`` predicate that
advances the cursor, and an ``expect`` predicate that invalidates the plan
(returning ``Replan`` to the caller) when the world changed under it, e.g.
the item being fetched was taken by the partner.

Deterministic choices throughout: nearest target by BFS path distance,
ties broken by lowest row-major cell index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from ..dsl.tasks import MacroAction
from ..env.items import (
    BEEF,
    BREAD,
    BURGER_INGREDIENTS,
    CHOPPED,
    FIRE_EXTINGUISHER,
    FRESH,
    IN_PROGRESS,
    LETTUCE,
    OVERCOOKED,
    PLATE,
    UNCHOPPED,
    WELL_COOKED,
    Item,
    Plate,
    Unit,
    derived_name,
)
from ..env.layout import CellKind, Layout, Pos
from ..env.state import Action, Direction, GameState
from ..errors import NoPath, NotReady
from .pathing import adjacent_floor, floor_distances, plan_path

WAIT_BLOCKED_LIMIT = 8  # ticks to wait for the partner to unblock a path

StatePred = Callable[[GameState], bool]
TargetsFn = Callable[[GameState], tuple[Pos, ...]]


class PlanSignal(Enum):
    DONE = "done"
    REPLAN = "replan"


DONE = PlanSignal.DONE
REPLAN = PlanSignal.REPLAN


@dataclass
class Subgoal:
    desc: str
    targets: tuple[Pos, ...] = ()
    targets_fn: TargetsFn | None = None
    interact: bool = False
    done_when: StatePred | None = None
    expect: StatePred | None = None

    def effective_targets(self, state: GameState) -> tuple[Pos, ...]:
        if self.targets_fn is not None:
            return self.targets_fn(state)
        return self.targets


@dataclass
class Plan:
    macro: MacroAction
    subgoals: list[Subgoal]
    player: int
    cursor: int = 0
    status: str = "active"  # active | done | failed:<reason>
    wait_blocked: int = 0
    issued_tick: int | None = None
    atomics: int = 0

    @property
    def active(self) -> bool:
        return self.status == "active"

    def fail(self, reason: str) -> None:
        self.status = f"failed:{reason}"

    def current(self) -> Subgoal | None:
        if 0 <= self.cursor < len(self.subgoals):
            return self.subgoals[self.cursor]
        return None


@dataclass
class MacroCompileContext:
    """Per-player geometry shared by all compilations."""

    layout: Layout
    player: int

    def region(self, state: GameState) -> set[Pos]:
        return self.layout.region_of(state.players[self.player].position)

    def reachable(self, state: GameState, pos: Pos) -> bool:
        region = self.region(state)
        return any(n in region for n in adjacent_floor(self.layout, pos))

    def nearest(self, state: GameState, cells: list[Pos]) -> Pos | None:
        """Nearest reachable cell by path distance; ties by cell index."""
        me = state.players[self.player].position
        dists = floor_distances(self.layout, me)
        best: tuple[int, int] | None = None
        best_pos: Pos | None = None
        for pos in cells:
            approach = [dists[n] for n in adjacent_floor(self.layout, pos) if n in dists]
            if not approach:
                continue
            key = (min(approach), self.layout.cell_index(pos))
            if best is None or key < best:
                best = key
                best_pos = pos
        return best_pos


# --- world queries ----------------------------------------------------------


def _surface_items(state: GameState, pred: Callable[[Unit], bool]) -> list[Pos]:
    return sorted(
        (pos for pos, unit in state.surfaces.items() if pred(unit)),
        key=lambda p: state.layout.cell_index(p),
    )


def bare_item_cells(state: GameState, name: str, status: str) -> list[Pos]:
    return _surface_items(
        state, lambda u: isinstance(u, Item) and u.name == name and u.status == status
    )


def plate_cells(state: GameState, pred: Callable[[Plate], bool]) -> list[Pos]:
    return _surface_items(state, lambda u: isinstance(u, Plate) and pred(u))


def free_counter_cells(state: GameState, *, prefer_plain: bool = True) -> list[Pos]:
    """Empty surfaces, plain counters before center counters."""
    plain, center = [], []
    for pos in state.layout.counters:
        if pos in state.surfaces:
            continue
        if state.layout.kind(pos) == CellKind.CENTER_COUNTER:
            center.append(pos)
        else:
            plain.append(pos)
    return plain + center if prefer_plain else center + plain


def free_pan_cells(state: GameState) -> list[Pos]:
    return sorted(
        (pos for pos, pan in state.pans.items() if pan.free()),
        key=lambda p: state.layout.cell_index(p),
    )


def held(state: GameState, player: int) -> Unit | None:
    return state.players[player].held


def holding_uid(state: GameState, player: int, uid: int) -> bool:
    unit = held(state, player)
    return unit is not None and unit.uid == uid


def holding_key(state: GameState, player: int, key: tuple[str, str]) -> bool:
    unit = held(state, player)
    return unit is not None and derived_name(unit) == key


# --- subgoal builders -------------------------------------------------------


def _sg_pickup(ctx: MacroCompileContext, pos: Pos, uid: int, desc: str) -> Subgoal:
    def still_there(state: GameState) -> bool:
        unit = state.surfaces.get(pos)
        return unit is not None and unit.uid == uid

    return Subgoal(
        desc=desc,
        targets=(pos,),
        interact=True,
        done_when=lambda s: holding_uid(s, ctx.player, uid),
        expect=lambda s: holding_uid(s, ctx.player, uid) or still_there(s),
    )


def _sg_place_free_counter(ctx: MacroCompileContext, uid: int, desc: str,
                           prefer_plain: bool = True) -> Subgoal:
    def targets(state: GameState) -> tuple[Pos, ...]:
        return tuple(
            pos for pos in free_counter_cells(state, prefer_plain=prefer_plain)
            if ctx.reachable(state, pos)
        )

    def placed(state: GameState) -> bool:
        return not holding_uid(state, ctx.player, uid)

    return Subgoal(
        desc=desc,
        targets_fn=targets,
        interact=True,
        done_when=placed,
        expect=lambda s: holding_uid(s, ctx.player, uid) or placed(s),
    )


def _sg_stash_if_holding(ctx: MacroCompileContext) -> list[Subgoal]:
    """Free the hands before a macro that needs them (no-op if empty)."""

    def targets(state: GameState) -> tuple[Pos, ...]:
        return tuple(
            pos for pos in free_counter_cells(state) if ctx.reachable(state, pos)
        )

    return [
        Subgoal(
            desc="stash held item",
            targets_fn=targets,
            interact=True,
            done_when=lambda s: held(s, ctx.player) is None,
        )
    ]


def _sg_station_get(
    ctx: MacroCompileContext, station: Pos, key: tuple[str, str], desc: str
) -> Subgoal:
    return Subgoal(
        desc=desc,
        targets=(station,),
        interact=True,
        done_when=lambda s: holding_key(s, ctx.player, key),
        expect=lambda s: holding_key(s, ctx.player, key) or held(s, ctx.player) is None,
    )


# --- acquisition ------------------------------------------------------------


def _station_of(layout: Layout, ingredient: str) -> CellKind:
    return {
        BEEF: CellKind.BEEF_STATION,
        LETTUCE: CellKind.LETTUCE_STATION,
        BREAD: CellKind.BREAD_STATION,
    }[ingredient]


def _acquire_bare(
    ctx: MacroCompileContext,
    state: GameState,
    name: str,
    status: str,
    *,
    station_kind: CellKind | None,
    desc: str,
) -> list[Subgoal]:
    """Steps that end with the player holding a (name, status) item.

    Prefers a loose item on a counter; falls back to the station dispenser.
    Raises NotReady when neither exists in the player's region.
    """
    key = (name, status)
    if holding_key(state, ctx.player, key):
        return []
    steps = _sg_stash_if_holding(ctx) if held(state, ctx.player) is not None else []

    loose = [p for p in bare_item_cells(state, name, status) if ctx.reachable(state, p)]
    target = ctx.nearest(state, loose)
    if target is not None:
        uid = state.surfaces[target].uid
        return steps + [_sg_pickup(ctx, target, uid, desc)]

    if station_kind is not None:
        stations = [
            p for p in ctx.layout.cells_of(station_kind) if ctx.reachable(state, p)
        ]
        station = ctx.nearest(state, stations)
        if station is not None:
            return steps + [_sg_station_get(ctx, station, key, desc + " (station)")]
    raise NotReady(f"no reachable {name} ({status or 'plain'})", missing=name)


def _acquire_plate(ctx: MacroCompileContext, state: GameState) -> list[Subgoal]:
    """End holding an empty plate (loose plate first, then the station)."""
    unit = held(state, ctx.player)
    if isinstance(unit, Plate) and not unit.contents:
        return []
    steps = _sg_stash_if_holding(ctx) if unit is not None else []
    loose = [
        p
        for p in plate_cells(state, lambda pl: not pl.contents)
        if ctx.reachable(state, p)
    ]
    target = ctx.nearest(state, loose)
    if target is not None:
        uid = state.surfaces[target].uid
        return steps + [_sg_pickup(ctx, target, uid, "pick up empty plate")]
    stations = [
        p for p in ctx.layout.cells_of(CellKind.PLATE_STATION) if ctx.reachable(state, p)
    ]
    station = ctx.nearest(state, stations)
    if station is not None:
        return steps + [
            _sg_station_get(ctx, station, (PLATE, "Empty"), "take plate from station")
        ]
    raise NotReady("no reachable plate", missing=PLATE)


# --- macro compilation ------------------------------------------------------


def compile_macro(
    state: GameState, macro: MacroAction, player: int, tick: int | None = None
) -> Plan:
    """Build a Plan realizing ``macro`` for ``player`` against the world now.

    Raises :class:`NotReady` when required inputs are missing (assemble
    without prepared ingredients, pass_on with nothing to pass, ...).
    A putout_fire with no fire and a clean_a_counter with nothing to clean
    compile to immediately-done plans.
    """
    ctx = MacroCompileContext(layout=state.layout, player=player)
    builder = {
        "prepare": _compile_prepare,
        "assemble": _compile_assemble,
        "pass_on": _compile_pass_on,
        "serve": _compile_serve,
        "putout_fire": _compile_putout_fire,
        "clean_a_counter": _compile_clean_a_counter,
    }[macro.name]
    subgoals = builder(ctx, state, macro)
    plan = Plan(macro=macro, subgoals=subgoals, player=player, issued_tick=tick)
    if not subgoals:
        plan.status = "done"
    return plan


def _compile_prepare(ctx: MacroCompileContext, state: GameState, macro: MacroAction) -> list[Subgoal]:
    food = macro.args["food"]
    plate = macro.args.get("plate", False)
    if food == BEEF:
        return _prepare_beef(ctx, state, plate)
    if food == LETTUCE:
        return _prepare_lettuce(ctx, state, plate)
    return _prepare_bread(ctx, state, plate)


def _prepare_beef(ctx: MacroCompileContext, state: GameState, plate: bool) -> list[Subgoal]:
    steps: list[Subgoal] = []
    pans = free_pan_cells(state)
    pans = [p for p in pans if ctx.reachable(state, p)]
    if not pans:
        # A pan with cold overcooked beef can be cleared first.
        clearable = [
            pos
            for pos, pan in state.pans.items()
            if pan.beef is not None
            and pan.beef.status == OVERCOOKED
            and not pan.fire
            and ctx.reachable(state, pos)
        ]
        pan_pos = ctx.nearest(state, clearable)
        if pan_pos is None:
            raise NotReady("no free pan", missing="pan")
        burnt_uid = state.pans[pan_pos].beef.uid
        if held(state, ctx.player) is not None:
            steps += _sg_stash_if_holding(ctx)
        steps.append(
            Subgoal(
                desc="remove overcooked beef from pan",
                targets=(pan_pos,),
                interact=True,
                done_when=lambda s: holding_uid(s, ctx.player, burnt_uid),
                expect=lambda s: (
                    holding_uid(s, ctx.player, burnt_uid)
                    or (s.pans[pan_pos].beef is not None and not s.pans[pan_pos].fire)
                ),
            )
        )
        trash = ctx.nearest(
            state, [p for p in ctx.layout.cells_of(CellKind.BEEF_STATION) if ctx.reachable(state, p)]
        )
        if trash is None:
            raise NotReady("no station to discard overcooked beef", missing="pan")
        steps.append(
            Subgoal(
                desc="discard overcooked beef",
                targets=(trash,),
                interact=True,
                done_when=lambda s: held(s, ctx.player) is None,
            )
        )
        target_pan = pan_pos
    else:
        target_pan = ctx.nearest(state, pans)

    steps += _acquire_bare(
        ctx, state, BEEF, FRESH, station_kind=CellKind.BEEF_STATION, desc="get fresh beef"
    )

    def pan_free(s: GameState) -> bool:
        return s.pans[target_pan].free()

    def beef_placed(s: GameState) -> bool:
        pan = s.pans[target_pan]
        return pan.beef is not None and pan.beef.status in (IN_PROGRESS, WELL_COOKED)

    steps.append(
        Subgoal(
            desc="put beef on pan",
            targets=(target_pan,),
            interact=True,
            done_when=beef_placed,
            expect=lambda s: beef_placed(s)
            or (holding_key(s, ctx.player, (BEEF, FRESH)) and pan_free(s)),
        )
    )
    steps.append(
        Subgoal(
            desc="wait for beef to cook",
            targets=(target_pan,),
            interact=False,
            done_when=lambda s: (
                s.pans[target_pan].beef is not None
                and s.pans[target_pan].beef.status == WELL_COOKED
            ),
            expect=lambda s: (
                s.pans[target_pan].beef is not None
                and s.pans[target_pan].beef.status in (IN_PROGRESS, WELL_COOKED)
            ),
        )
    )
    if plate:
        steps += _acquire_plate(ctx, state)

        def scooped(s: GameState) -> bool:
            unit = held(s, ctx.player)
            return isinstance(unit, Plate) and BEEF in unit.contents

        steps.append(
            Subgoal(
                desc="plate beef from pan",
                targets=(target_pan,),
                interact=True,
                done_when=scooped,
                expect=lambda s: scooped(s)
                or (
                    s.pans[target_pan].beef is not None
                    and s.pans[target_pan].beef.status == WELL_COOKED
                ),
            )
        )
        steps.append(
            Subgoal(
                desc="set plated beef down",
                targets_fn=lambda s: tuple(
                    p for p in free_counter_cells(s) if ctx.reachable(s, p)
                ),
                interact=True,
                done_when=lambda s: held(s, ctx.player) is None,
            )
        )
    else:
        steps.append(
            Subgoal(
                desc="take beef off pan",
                targets=(target_pan,),
                interact=True,
                done_when=lambda s: holding_key(s, ctx.player, (BEEF, WELL_COOKED)),
                expect=lambda s: holding_key(s, ctx.player, (BEEF, WELL_COOKED))
                or (
                    s.pans[target_pan].beef is not None
                    and s.pans[target_pan].beef.status == WELL_COOKED
                ),
            )
        )
        steps.append(
            Subgoal(
                desc="set beef down",
                targets_fn=lambda s: tuple(
                    p for p in free_counter_cells(s) if ctx.reachable(s, p)
                ),
                interact=True,
                done_when=lambda s: held(s, ctx.player) is None,
            )
        )
    return steps


def _free_cutboards(ctx: MacroCompileContext, state: GameState) -> list[Pos]:
    return [
        pos
        for pos, board in state.cutboards.items()
        if board.lettuce is None and ctx.reachable(state, pos)
    ]


def _prepare_lettuce(ctx: MacroCompileContext, state: GameState, plate: bool) -> list[Subgoal]:
    steps: list[Subgoal] = []
    boards = _free_cutboards(ctx, state)
    if not boards:
        # Clear a board that holds abandoned chopped lettuce.
        clearable = [
            pos
            for pos, board in state.cutboards.items()
            if board.lettuce is not None
            and board.lettuce.status == CHOPPED
            and ctx.reachable(state, pos)
        ]
        board_pos = ctx.nearest(state, clearable)
        if board_pos is None:
            raise NotReady("no free cutboard", missing="cutboard")
        stale_uid = state.cutboards[board_pos].lettuce.uid
        if held(state, ctx.player) is not None:
            steps += _sg_stash_if_holding(ctx)
        steps.append(
            Subgoal(
                desc="clear chopped lettuce from cutboard",
                targets=(board_pos,),
                interact=True,
                done_when=lambda s: holding_uid(s, ctx.player, stale_uid),
                expect=lambda s: holding_uid(s, ctx.player, stale_uid)
                or (
                    s.cutboards[board_pos].lettuce is not None
                    and s.cutboards[board_pos].lettuce.uid == stale_uid
                ),
            )
        )
        steps.append(_sg_place_free_counter(ctx, stale_uid, "set cleared lettuce down"))
        target_board = board_pos
    else:
        target_board = ctx.nearest(state, boards)

    steps += _acquire_bare(
        ctx,
        state,
        LETTUCE,
        UNCHOPPED,
        station_kind=CellKind.LETTUCE_STATION,
        desc="get unchopped lettuce",
    )

    def on_board(s: GameState) -> bool:
        return s.cutboards[target_board].lettuce is not None

    steps.append(
        Subgoal(
            desc="put lettuce on cutboard",
            targets=(target_board,),
            interact=True,
            done_when=on_board,
            expect=lambda s: on_board(s) or holding_key(s, ctx.player, (LETTUCE, UNCHOPPED)),
        )
    )
    steps.append(
        Subgoal(
            desc="chop lettuce",
            targets=(target_board,),
            interact=True,
            done_when=lambda s: (
                s.cutboards[target_board].lettuce is not None
                and s.cutboards[target_board].lettuce.status == CHOPPED
            ),
            expect=lambda s: s.cutboards[target_board].lettuce is not None,
        )
    )
    if plate:
        steps += _acquire_plate(ctx, state)

        def scooped(s: GameState) -> bool:
            unit = held(s, ctx.player)
            return isinstance(unit, Plate) and LETTUCE in unit.contents

        steps.append(
            Subgoal(
                desc="plate lettuce from cutboard",
                targets=(target_board,),
                interact=True,
                done_when=scooped,
                expect=lambda s: scooped(s) or s.cutboards[target_board].lettuce is not None,
            )
        )
        steps.append(
            Subgoal(
                desc="set plated lettuce down",
                targets_fn=lambda s: tuple(
                    p for p in free_counter_cells(s) if ctx.reachable(s, p)
                ),
                interact=True,
                done_when=lambda s: held(s, ctx.player) is None,
            )
        )
    else:
        steps.append(
            Subgoal(
                desc="take chopped lettuce",
                targets=(target_board,),
                interact=True,
                done_when=lambda s: holding_key(s, ctx.player, (LETTUCE, CHOPPED)),
                expect=lambda s: holding_key(s, ctx.player, (LETTUCE, CHOPPED))
                or s.cutboards[target_board].lettuce is not None,
            )
        )
        steps.append(
            Subgoal(
                desc="set lettuce down",
                targets_fn=lambda s: tuple(
                    p for p in free_counter_cells(s) if ctx.reachable(s, p)
                ),
                interact=True,
                done_when=lambda s: held(s, ctx.player) is None,
            )
        )
    return steps


def _prepare_bread(ctx: MacroCompileContext, state: GameState, plate: bool) -> list[Subgoal]:
    steps: list[Subgoal] = []
    if plate:
        steps += _acquire_plate(ctx, state)
        stations = [
            p for p in ctx.layout.cells_of(CellKind.BREAD_STATION) if ctx.reachable(state, p)
        ]
        loose = [p for p in bare_item_cells(state, BREAD, "") if ctx.reachable(state, p)]

        def has_bread(s: GameState) -> bool:
            unit = held(s, ctx.player)
            return isinstance(unit, Plate) and BREAD in unit.contents

        bread_pos = ctx.nearest(state, loose)
        source = bread_pos if bread_pos is not None else ctx.nearest(state, stations)
        if source is None:
            raise NotReady("no reachable bread", missing=BREAD)
        steps.append(
            Subgoal(
                desc="collect bread onto plate",
                targets=(source,),
                interact=True,
                done_when=has_bread,
            )
        )
        steps.append(
            Subgoal(
                desc="set plated bread down",
                targets_fn=lambda s: tuple(
                    p for p in free_counter_cells(s) if ctx.reachable(s, p)
                ),
                interact=True,
                done_when=lambda s: held(s, ctx.player) is None,
            )
        )
        return steps

    steps += _acquire_bare(
        ctx, state, BREAD, "", station_kind=CellKind.BREAD_STATION, desc="get bread"
    )
    steps.append(
        Subgoal(
            desc="set bread down",
            targets_fn=lambda s: tuple(
                p for p in free_counter_cells(s) if ctx.reachable(s, p)
            ),
            interact=True,
            done_when=lambda s: held(s, ctx.player) is None,
        )
    )
    return steps


def _ingredient_sources(
    ctx: MacroCompileContext, state: GameState, ingredient: str
) -> list[tuple[str, Pos]]:
    """Reachable places an assembly ingredient can be scooped from.

    Each entry is (kind, pos) with kind in bare / pan / cutboard / plate /
    station. Order reflects preference.
    """
    sources: list[tuple[str, Pos]] = []
    if ingredient == BEEF:
        for pos in bare_item_cells(state, BEEF, WELL_COOKED):
            if ctx.reachable(state, pos):
                sources.append(("bare", pos))
        for pos, pan in sorted(state.pans.items(), key=lambda kv: ctx.layout.cell_index(kv[0])):
            if pan.beef is not None and pan.beef.status == WELL_COOKED and ctx.reachable(state, pos):
                sources.append(("pan", pos))
    elif ingredient == LETTUCE:
        for pos in bare_item_cells(state, LETTUCE, CHOPPED):
            if ctx.reachable(state, pos):
                sources.append(("bare", pos))
        for pos, board in sorted(
            state.cutboards.items(), key=lambda kv: ctx.layout.cell_index(kv[0])
        ):
            if (
                board.lettuce is not None
                and board.lettuce.status == CHOPPED
                and ctx.reachable(state, pos)
            ):
                sources.append(("cutboard", pos))
    else:  # bread
        for pos in bare_item_cells(state, BREAD, ""):
            if ctx.reachable(state, pos):
                sources.append(("bare", pos))
        for pos in ctx.layout.cells_of(CellKind.BREAD_STATION):
            if ctx.reachable(state, pos):
                sources.append(("station", pos))
    # Single-ingredient plates can be merged into the workspace.
    for pos in plate_cells(state, lambda pl: set(pl.contents) == {ingredient}):
        if ctx.reachable(state, pos):
            sources.append(("plate", pos))
    return sources


def _compile_assemble(ctx: MacroCompileContext, state: GameState, macro: MacroAction) -> list[Subgoal]:
    food = macro.args["food"]
    wanted = BURGER_INGREDIENTS[food]

    # Already assembled and available: nothing to do.
    ready = plate_cells(state, lambda pl: frozenset(pl.contents) == wanted)
    unit = held(state, ctx.player)
    if any(ctx.reachable(state, p) for p in ready) or (
        isinstance(unit, Plate) and frozenset(unit.contents) == wanted
    ):
        return []

    # Choose the workspace plate: most progress toward the burger, then nearest.
    candidates: list[tuple[int, int, Pos | None, Plate]] = []
    if isinstance(unit, Plate) and frozenset(unit.contents) <= wanted:
        candidates.append((-len(unit.contents), -1, None, unit))
    for pos in plate_cells(state, lambda pl: frozenset(pl.contents) <= wanted):
        if ctx.reachable(state, pos):
            plate = state.surfaces[pos]
            candidates.append((-len(plate.contents), ctx.layout.cell_index(pos), pos, plate))
    candidates.sort(key=lambda c: (c[0], c[1]))

    workspace_pos: Pos | None
    steps: list[Subgoal] = []
    if candidates:
        _, _, workspace_pos, workspace = candidates[0]
    else:
        workspace = None
        workspace_pos = None

    missing = sorted(
        wanted - (set(workspace.contents) if workspace is not None else set()),
        key=lambda i: (i != BEEF, i != LETTUCE),  # beef, lettuce, bread last
    )
    source_plan: list[tuple[str, str, Pos]] = []
    for ingredient in missing:
        sources = _ingredient_sources(ctx, state, ingredient)
        if workspace_pos is not None:
            sources = [s for s in sources if s[1] != workspace_pos]
        if not sources:
            raise NotReady(f"missing ingredient {ingredient}", missing=ingredient)
        kind, pos = sources[0]
        source_plan.append((ingredient, kind, pos))

    if workspace is None:
        steps += _acquire_plate(ctx, state)
    else:
        if workspace_pos is not None:
            if held(state, ctx.player) is not None:
                steps += _sg_stash_if_holding(ctx)
            steps.append(_sg_pickup(ctx, workspace_pos, workspace.uid, "pick up workspace plate"))

    for ingredient, kind, pos in source_plan:
        if kind == "plate":
            steps += _merge_plate_steps(ctx, ingredient, pos)
            continue

        def scooped(s: GameState, ing=ingredient) -> bool:
            u = held(s, ctx.player)
            return isinstance(u, Plate) and ing in u.contents

        steps.append(
            Subgoal(
                desc=f"collect {ingredient.lower()} for {food}",
                targets=(pos,),
                interact=True,
                done_when=scooped,
                expect=_source_available_pred(ctx, ingredient, kind, pos),
            )
        )
    return steps


def _source_available_pred(
    ctx: MacroCompileContext, ingredient: str, kind: str, pos: Pos
) -> StatePred:
    def ok(s: GameState) -> bool:
        u = held(s, ctx.player)
        if isinstance(u, Plate) and ingredient in u.contents:
            return True
        if kind == "bare":
            unit = s.surfaces.get(pos)
            return isinstance(unit, Item) and unit.name == ingredient
        if kind == "pan":
            pan = s.pans[pos]
            return pan.beef is not None and pan.beef.status == WELL_COOKED
        if kind == "cutboard":
            board = s.cutboards[pos]
            return board.lettuce is not None and board.lettuce.status == CHOPPED
        return True  # stations never run out

    return ok


def _merge_plate_steps(ctx: MacroCompileContext, ingredient: str, source_pos: Pos) -> list[Subgoal]:
    """Merge a single-ingredient plate into the held workspace plate.

    The workspace goes down on a counter, the source plate is carried over
    and poured into it, the emptied plate is stashed, and the workspace is
    picked back up.
    """
    marker: dict[str, object] = {}

    def remember_workspace(s: GameState) -> bool:
        unit = held(s, ctx.player)
        if isinstance(unit, Plate):
            marker["workspace_uid"] = unit.uid
        return held(s, ctx.player) is None or "workspace_uid" in marker

    def workspace_cell(s: GameState) -> tuple[Pos, ...]:
        uid = marker.get("workspace_uid")
        return tuple(
            pos for pos, unit in s.surfaces.items() if isinstance(unit, Plate) and unit.uid == uid
        )

    steps = [
        Subgoal(
            desc="set workspace plate down for merge",
            targets_fn=lambda s: tuple(
                p for p in free_counter_cells(s) if ctx.reachable(s, p)
            ),
            interact=True,
            done_when=lambda s: remember_workspace(s) and held(s, ctx.player) is None,
        ),
        Subgoal(
            desc=f"fetch plated {ingredient.lower()}",
            targets=(source_pos,),
            interact=True,
            done_when=lambda s: isinstance(held(s, ctx.player), Plate)
            and ingredient in getattr(held(s, ctx.player), "contents", {}),
            expect=lambda s: (
                isinstance(held(s, ctx.player), Plate)
                and ingredient in getattr(held(s, ctx.player), "contents", {})
            )
            or isinstance(s.surfaces.get(source_pos), Plate),
        ),
        Subgoal(
            desc="pour into workspace plate",
            targets_fn=workspace_cell,
            interact=True,
            done_when=lambda s: isinstance(held(s, ctx.player), Plate)
            and not held(s, ctx.player).contents,
        ),
        Subgoal(
            desc="stash emptied plate",
            targets_fn=lambda s: tuple(
                p for p in free_counter_cells(s) if ctx.reachable(s, p)
            ),
            interact=True,
            done_when=lambda s: held(s, ctx.player) is None,
        ),
        Subgoal(
            desc="pick workspace plate back up",
            targets_fn=workspace_cell,
            interact=True,
            done_when=lambda s: isinstance(held(s, ctx.player), Plate)
            and held(s, ctx.player).uid == marker.get("workspace_uid"),
        ),
    ]
    return steps


def _compile_pass_on(ctx: MacroCompileContext, state: GameState, macro: MacroAction) -> list[Subgoal]:
    thing = macro.args["thing"]
    status = macro.args.get("thing_status", "Empty" if thing == PLATE else "")
    key = (thing, status)

    centers = [
        p
        for p in ctx.layout.cells_of(CellKind.CENTER_COUNTER)
        if ctx.reachable(state, p)
    ]
    if not centers:
        raise NotReady("no reachable center counter", missing="center counter")

    steps: list[Subgoal] = []
    if not holding_key(state, ctx.player, key):
        matching = _surface_items(state, lambda u: derived_name(u) == key)
        matching = [p for p in matching if ctx.reachable(state, p)]
        centered = [
            p for p in matching if ctx.layout.kind(p) == CellKind.CENTER_COUNTER
        ]
        matching = [p for p in matching if p not in centered]
        # On-pan / on-cutboard sources for passable prepared ingredients.
        extra_sources: list[Pos] = []
        if key == (BEEF, WELL_COOKED):
            extra_sources = [
                pos
                for pos, pan in state.pans.items()
                if pan.beef is not None
                and pan.beef.status == WELL_COOKED
                and ctx.reachable(state, pos)
            ]
        elif key == (LETTUCE, CHOPPED):
            extra_sources = [
                pos
                for pos, board in state.cutboards.items()
                if board.lettuce is not None
                and board.lettuce.status == CHOPPED
                and ctx.reachable(state, pos)
            ]
        target = ctx.nearest(state, matching + extra_sources)
        if target is None:
            if centered:
                return []  # already on the pass-on surface: nothing to do
            raise NotReady(f"nothing matching {key} to pass on", missing=thing)
        if held(state, ctx.player) is not None:
            steps += _sg_stash_if_holding(ctx)
        if target in state.surfaces:
            steps.append(_sg_pickup(ctx, target, state.surfaces[target].uid, f"pick up {thing}"))
        else:
            steps.append(
                Subgoal(
                    desc=f"take {thing} for pass on",
                    targets=(target,),
                    interact=True,
                    done_when=lambda s: holding_key(s, ctx.player, key),
                )
            )

    def passed(s: GameState) -> bool:
        if holding_key(s, ctx.player, key):
            return False
        return held(s, ctx.player) is None

    steps.append(
        Subgoal(
            desc=f"place {thing} on center counter",
            targets_fn=lambda s: tuple(
                p
                for p in free_counter_cells(s, prefer_plain=False)
                if s.layout.kind(p) == CellKind.CENTER_COUNTER and ctx.reachable(s, p)
            ),
            interact=True,
            done_when=passed,
            expect=lambda s: holding_key(s, ctx.player, key) or passed(s),
        )
    )
    return steps


def _compile_serve(ctx: MacroCompileContext, state: GameState, macro: MacroAction) -> list[Subgoal]:
    food = macro.args["food"]
    key = (food, "")
    serving = [
        p for p in ctx.layout.cells_of(CellKind.SERVING) if ctx.reachable(state, p)
    ]
    if not serving:
        raise NotReady("no reachable serving area", missing="serving area")

    steps: list[Subgoal] = []
    if not holding_key(state, ctx.player, key):
        if held(state, ctx.player) is not None:
            steps += _sg_stash_if_holding(ctx)
        plated = [
            p
            for p in plate_cells(
                state, lambda pl: frozenset(pl.contents) == BURGER_INGREDIENTS[food]
            )
            if ctx.reachable(state, p)
        ]
        target = ctx.nearest(state, plated)
        if target is None:
            raise NotReady(f"no completed {food} to serve", missing=food)
        steps.append(_sg_pickup(ctx, target, state.surfaces[target].uid, f"pick up {food}"))

    steps.append(
        Subgoal(
            desc=f"serve {food}",
            targets=tuple(serving),
            interact=True,
            done_when=lambda s: held(s, ctx.player) is None,
            expect=lambda s: held(s, ctx.player) is None or holding_key(s, ctx.player, key),
        )
    )
    return steps


def _compile_putout_fire(ctx: MacroCompileContext, state: GameState, macro: MacroAction) -> list[Subgoal]:
    fires = [p for p in state.fires() if ctx.reachable(state, p)]
    if not fires:
        return []  # nothing burning: immediately done

    steps: list[Subgoal] = []
    unit = held(state, ctx.player)
    holding_ext = isinstance(unit, Item) and unit.name == FIRE_EXTINGUISHER
    if not holding_ext:
        if unit is not None:
            steps += _sg_stash_if_holding(ctx)
        ext_cells = [
            p for p in bare_item_cells(state, FIRE_EXTINGUISHER, "") if ctx.reachable(state, p)
        ]
        target = ctx.nearest(state, ext_cells)
        if target is None:
            raise NotReady("fire extinguisher not reachable", missing=FIRE_EXTINGUISHER)
        steps.append(
            _sg_pickup(ctx, target, state.surfaces[target].uid, "grab fire extinguisher")
        )

    pan_pos = ctx.nearest(state, fires)
    steps.append(
        Subgoal(
            desc="extinguish fire",
            targets=(pan_pos,),
            interact=True,
            done_when=lambda s: not s.pans[pan_pos].fire,
        )
    )

    def ext_home_first(s: GameState) -> tuple[Pos, ...]:
        homes = [
            p
            for p in s.layout.cells_of(CellKind.EXTINGUISHER_HOME)
            if p not in s.surfaces and ctx.reachable(s, p)
        ]
        others = [p for p in free_counter_cells(s) if ctx.reachable(s, p)]
        return tuple(homes + [p for p in others if p not in homes])

    steps.append(
        Subgoal(
            desc="put extinguisher back",
            targets_fn=ext_home_first,
            interact=True,
            done_when=lambda s: held(s, ctx.player) is None,
        )
    )
    return steps


_TRASH_STATION = {
    BEEF: CellKind.BEEF_STATION,
    LETTUCE: CellKind.LETTUCE_STATION,
    BREAD: CellKind.BREAD_STATION,
}


def _compile_clean_a_counter(ctx: MacroCompileContext, state: GameState, macro: MacroAction) -> list[Subgoal]:
    # Nearest occupied non-center counter; the extinguisher is never trash.
    occupied = [
        pos
        for pos, unit in state.surfaces.items()
        if state.layout.kind(pos) == CellKind.COUNTER
        and not (isinstance(unit, Item) and unit.name == FIRE_EXTINGUISHER)
        and ctx.reachable(state, pos)
    ]
    target = ctx.nearest(state, occupied)
    if target is None:
        return []  # nothing to clean: immediately done
    unit = state.surfaces[target]
    uid = unit.uid
    if isinstance(unit, Plate):
        station_kind = CellKind.PLATE_STATION
    else:
        station_kind = _TRASH_STATION.get(unit.name, CellKind.PLATE_STATION)
    stations = [p for p in ctx.layout.cells_of(station_kind) if ctx.reachable(state, p)]
    station = ctx.nearest(state, stations)
    if station is None:
        raise NotReady("no disposal station reachable", missing="station")

    steps: list[Subgoal] = []
    if held(state, ctx.player) is not None:
        steps += _sg_stash_if_holding(ctx)
    steps.append(_sg_pickup(ctx, target, uid, "pick up clutter"))
    steps.append(
        Subgoal(
            desc="drop clutter into station",
            targets=(station,),
            interact=True,
            done_when=lambda s: held(s, ctx.player) is None,
        )
    )
    return steps


# --- execution --------------------------------------------------------------


def next_atomic(plan: Plan, state: GameState) -> Action | PlanSignal:
    """Emit the next atomic action for the plan, or DONE / REPLAN."""
    if plan.status == "done":
        return DONE
    if not plan.active:
        return REPLAN

    layout = state.layout
    player = state.players[plan.player]

    while plan.cursor < len(plan.subgoals):
        sg = plan.subgoals[plan.cursor]
        if sg.done_when is not None and sg.done_when(state):
            plan.cursor += 1
            plan.wait_blocked = 0
            continue
        if sg.expect is not None and not sg.expect(state):
            plan.fail(f"expectation broken at {sg.desc!r}")
            return REPLAN

        targets = sg.effective_targets(state)
        if not targets:
            plan.fail(f"no targets for {sg.desc!r}")
            return REPLAN

        occupied = tuple(
            p.position for i, p in enumerate(state.players) if i != plan.player
        )
        try:
            path = plan_path(
                layout, player.position, targets, occupied=occupied, facing=player.facing
            )
        except NoPath:
            try:
                plan_path(layout, player.position, targets, facing=player.facing)
            except NoPath:
                plan.fail(f"unreachable targets for {sg.desc!r}")
                return REPLAN
            # Blocked by the partner: wait a few ticks before replanning.
            plan.wait_blocked += 1
            if plan.wait_blocked > WAIT_BLOCKED_LIMIT:
                plan.wait_blocked = 0
                return REPLAN
            return Action.NOOP

        plan.wait_blocked = 0
        if path:
            plan.atomics += 1
            return path[0]
        if sg.interact:
            plan.atomics += 1
            return Action.INTERACT
        return Action.NOOP  # waiting subgoal, already in position

    plan.status = "done"
    return DONE
