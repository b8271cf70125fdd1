"""Macro compilation and execution against a live world."""

from __future__ import annotations

import itertools

import pytest

from coopkitchen.dsl.tasks import MacroAction
from coopkitchen.env import Action, GameConfig, build_initial_state, snapshot_document, step
from coopkitchen.env.items import Item, Plate
from coopkitchen.env.layout import parse_layout
from coopkitchen.env.orders import Order
from coopkitchen.errors import NotReady
from coopkitchen.executor import DONE, REPLAN, compile_macro, next_atomic

from conftest import drive_plan

SEVEN = "\n".join(
    [
        "##########",
        "#B.L.D.PC#",
        "#1......2#",
        "#A.U.S.EX#",
        "##########",
    ]
)


def seven_state(players=1, **cfg):
    layout = parse_layout(SEVEN)
    defaults = dict(seed=1, order_interval=0, cook_ticks=6, overcook_ticks=30)
    defaults.update(cfg)
    return build_initial_state(layout, GameConfig(**defaults), players=players)


def macro(name, **args):
    return MacroAction(name, args)


def test_assemble_without_ingredients_is_not_ready():
    state = seven_state()
    with pytest.raises(NotReady) as exc:
        compile_macro(state, macro("assemble", food="BeefBurger"), 0)
    assert exc.value.missing == "Beef"


def test_putout_fire_with_no_fire_compiles_to_done():
    state = seven_state()
    plan = compile_macro(state, macro("putout_fire"), 0)
    assert plan.status == "done"
    assert plan.subgoals == []
    assert next_atomic(plan, state) is DONE


def test_clean_a_counter_with_nothing_to_clean_is_done():
    state = seven_state()
    plan = compile_macro(state, macro("clean_a_counter"), 0)
    assert plan.status == "done"


def test_prepare_lettuce_on_plate_ends_with_plated_chopped_lettuce():
    state = seven_state()
    counter = next(p for p in state.layout.counters if p not in state.surfaces)
    state.surfaces[counter] = Item(uid=state.next_uid(), name="Lettuce", status="Unchopped")
    plan = compile_macro(state, macro("prepare", food="Lettuce", plate=True), 0)
    state, outcome, _ = drive_plan(plan, state)
    assert outcome == "done"
    doc = snapshot_document(state, 0)
    assert doc.count("Lettuce", "Chopped") == 1
    plated = [
        u
        for u in state.surfaces.values()
        if isinstance(u, Plate) and set(u.contents) == {"Lettuce"}
    ]
    assert len(plated) == 1


def test_prepare_beef_ends_with_loose_wellcooked_beef():
    state = seven_state()
    plan = compile_macro(state, macro("prepare", food="Beef", plate=False), 0)
    state, outcome, _ = drive_plan(plan, state)
    assert outcome == "done"
    doc = snapshot_document(state, 0)
    assert doc.count("Beef", "Well-cooked") == 1
    assert state.players[0].held is None
    assert all(pan.beef is None for pan in state.pans.values())


def test_full_bltburger_pipeline_to_delivery():
    state = seven_state()
    state.orders.append(Order(uid=state.next_uid(), name="BeefLettuceBurger", remain_time=400))
    for m in (
        macro("prepare", food="Beef", plate=False),
        macro("prepare", food="Lettuce", plate=False),
        macro("assemble", food="BeefLettuceBurger"),
        macro("serve", food="BeefLettuceBurger"),
    ):
        plan = compile_macro(state, m, 0)
        state, outcome, events = drive_plan(plan, state)
        assert outcome == "done", m
    assert state.score == 25


def test_serve_without_burger_is_not_ready():
    state = seven_state()
    with pytest.raises(NotReady):
        compile_macro(state, macro("serve", food="BeefBurger"), 0)


def test_pass_on_places_item_on_center_counter():
    layout = parse_layout("#########\n#B.X.X.P#\n#1.....2#\n#A.U.S.C#\n#########")
    state = build_initial_state(layout, GameConfig(seed=1, order_interval=0), players=1)
    counter = (7, 3)
    state.surfaces[counter] = Item(uid=state.next_uid(), name="Bread", status="")
    plan = compile_macro(state, macro("pass_on", thing="Bread"), 0)
    state, outcome, _ = drive_plan(plan, state)
    assert outcome == "done"
    from coopkitchen.env.layout import CellKind

    centered = [
        pos
        for pos, unit in state.surfaces.items()
        if state.layout.kind(pos) == CellKind.CENTER_COUNTER and unit.key() == ("Bread", "")
    ]
    assert len(centered) == 1


def test_pass_on_already_centered_is_done():
    layout = parse_layout("#########\n#B.X.X.P#\n#1.....2#\n#A.U.S.C#\n#########")
    state = build_initial_state(layout, GameConfig(seed=1, order_interval=0), players=1)
    state.surfaces[(3, 1)] = Item(uid=state.next_uid(), name="Bread", status="")
    plan = compile_macro(state, macro("pass_on", thing="Bread"), 0)
    assert plan.status == "done"


def test_pass_on_with_nothing_available_is_not_ready():
    layout = parse_layout("#########\n#B.X.X.P#\n#1.....2#\n#A.U.S.C#\n#########")
    state = build_initial_state(layout, GameConfig(seed=1, order_interval=0), players=1)
    with pytest.raises(NotReady):
        compile_macro(state, macro("pass_on", thing="BeefBurger"), 0)


def test_stolen_target_triggers_replan():
    state = seven_state(players=2)
    counter = next(p for p in state.layout.counters if p not in state.surfaces)
    beef = Item(uid=state.next_uid(), name="Beef", status="Well-cooked")
    state.surfaces[counter] = beef
    plan = compile_macro(state, macro("pass_on", thing="Beef", thing_status="Well-cooked"), 0)
    # partner swipes the beef before the plan gets there
    state.surfaces.pop(counter)
    state.players[1].held = beef
    result = next_atomic(plan, state)
    assert result is REPLAN
    assert plan.status.startswith("failed")


def test_putout_fire_full_cycle():
    state = seven_state(extinguish_interacts=2)
    pan_pos = next(iter(state.pans))
    state.pans[pan_pos].beef = Item(uid=state.next_uid(), name="Beef", status="Overcooked")
    state.pans[pan_pos].fire = True
    plan = compile_macro(state, macro("putout_fire"), 0)
    state, outcome, events = drive_plan(plan, state)
    assert outcome == "done"
    assert not state.pans[pan_pos].fire
    assert any(e.kind == "fire-extinguished" for e in events)
    assert state.players[0].held is None  # extinguisher put back down


def test_clean_a_counter_trashes_clutter():
    state = seven_state()
    counter = next(
        p
        for p in state.layout.counters
        if p not in state.surfaces
    )
    state.surfaces[counter] = Item(uid=state.next_uid(), name="Bread", status="")
    plan = compile_macro(state, macro("clean_a_counter"), 0)
    state, outcome, events = drive_plan(plan, state)
    assert outcome == "done"
    doc = snapshot_document(state, 0)
    assert doc.count("Bread") == 0
    assert any(e.kind == "item-trashed" for e in events)


def test_replan_cycle_terminates_in_static_world():
    state = seven_state()
    counter = next(p for p in state.layout.counters if p not in state.surfaces)
    state.surfaces[counter] = Item(uid=state.next_uid(), name="Lettuce", status="Unchopped")
    outcomes = []
    for attempt in range(3):
        plan = compile_macro(state, macro("prepare", food="Lettuce", plate=False), 0)
        state, outcome, _ = drive_plan(plan, state)
        outcomes.append(outcome)
        if outcome == "done":
            break
    assert "done" in outcomes
    assert len(outcomes) <= 3
