"""State snapshots: the published example census, conservation, faithfulness."""

from __future__ import annotations

import random

import pytest

from coopkitchen.env import (
    Action,
    GameConfig,
    build_initial_state,
    snapshot_document,
    spawn_orders,
    step,
)
from coopkitchen.env.document import render_document
from coopkitchen.env.items import OBJECT_CATALOG, Item, Plate, derived_name
from coopkitchen.env.orders import Order, OrderSchedule

from conftest import literal_fixture


def build_example_state(layout):
    """Reconstruct the documented example census on the counter-circuit map.

    31 counter surfaces minus 13 occupied = 18 empty; one in-progress and
    one overcooked beef live on the two pans; partner holds an empty plate.
    """
    config = GameConfig(seed=0, order_interval=0)
    state = build_initial_state(layout, config, players=2)  # extinguisher on its home
    counters = [p for p in layout.counters if p not in state.surfaces]

    def place(unit):
        state.surfaces[counters.pop(0)] = unit

    place(Item(uid=state.next_uid(), name="Beef", status="Fresh"))
    for _ in range(3):
        place(Item(uid=state.next_uid(), name="Lettuce", status="Unchopped"))
    place(Item(uid=state.next_uid(), name="Lettuce", status="Chopped"))
    for _ in range(4):
        place(Item(uid=state.next_uid(), name="Bread", status=""))
    burger = Plate(uid=state.next_uid(), fetched_by=0)
    burger.add(Item(uid=state.next_uid(), name="Lettuce", status="Chopped"), 0)
    burger.add(Item(uid=state.next_uid(), name="Bread", status=""), 0)
    assert derived_name(burger) == ("LettuceBurger", "")
    place(burger)
    place(Plate(uid=state.next_uid(), fetched_by=0))
    place(Plate(uid=state.next_uid(), fetched_by=1))

    pans = sorted(state.pans)
    state.pans[pans[0]].beef = Item(
        uid=state.next_uid(), name="Beef", status="In-progress", progress=0.5
    )
    state.pans[pans[1]].beef = Item(uid=state.next_uid(), name="Beef", status="Overcooked")

    state.orders.append(Order(uid=state.next_uid(), name="BeefBurger", remain_time=30))
    state.orders.append(Order(uid=state.next_uid(), name="LettuceBurger", remain_time=45))
    state.players[1].held = Plate(uid=state.next_uid(), fetched_by=1)
    return state


def test_example_census_matches_published_document(counter_circuit):
    state = build_example_state(counter_circuit)
    doc = snapshot_document(state, viewer=0)
    expected = literal_fixture("game_state_example")
    assert doc.objects == expected["objects"]
    assert doc.counters == expected["counters"]
    assert doc.orders == expected["orders"]
    assert doc.inventory_other_player == expected["inventory_other_player"]


def test_render_document_round_trips_via_literal(counter_circuit):
    import ast

    state = build_example_state(counter_circuit)
    doc = snapshot_document(state, viewer=0)
    parsed = ast.literal_eval(render_document(doc))
    assert parsed["objects"] == doc.objects
    assert parsed["orders"] == doc.orders


def test_initial_kitchen_census_is_all_zero_except_extinguisher(counter_circuit):
    state = build_initial_state(counter_circuit, GameConfig(order_interval=0), players=2)
    doc = snapshot_document(state, 0)
    for name, status in OBJECT_CATALOG:
        expected = 1 if name == "FireExtinguisher" else 0
        assert doc.count(name, status) == expected, (name, status)


def test_pickup_moves_plate_from_objects_to_inventory(counter_circuit):
    state = build_initial_state(counter_circuit, GameConfig(order_interval=0), players=2)
    counter = next(p for p in counter_circuit.counters if p not in state.surfaces)
    state.surfaces[counter] = Plate(uid=state.next_uid(), fetched_by=1)

    def census_total(doc):
        return sum(doc.objects.values()) + len(doc.inventory_other_player)

    before = snapshot_document(state, 0)
    assert before.count("Plate", "Empty") == 1

    adj = next(n for n in counter_circuit.neighbors(counter) if counter_circuit.is_floor(n))
    state.players[1].position = adj
    from coopkitchen.env.state import Direction

    dx, dy = counter[0] - adj[0], counter[1] - adj[1]
    state.players[1].facing = {
        (0, -1): Direction.UP,
        (0, 1): Direction.DOWN,
        (-1, 0): Direction.LEFT,
        (1, 0): Direction.RIGHT,
    }[(dx, dy)]
    state, _ = step(state, [Action.NOOP, Action.INTERACT])

    after = snapshot_document(state, 0)
    assert after.count("Plate", "Empty") == 0
    assert after.inventory_other_player == {"player_1": ("Plate", "Empty")}
    assert census_total(before) == census_total(after)  # conservation across pickup


def brute_force_census(state, viewer):
    """Independent recount, written against the raw containers."""
    counts = {key: 0 for key in OBJECT_CATALOG}

    def bump(unit):
        key = derived_name(unit)
        counts[key] = counts.get(key, 0) + 1

    for unit in state.surfaces.values():
        bump(unit)
    for pan in state.pans.values():
        if pan.beef is not None:
            bump(pan.beef)
    for board in state.cutboards.values():
        if board.lettuce is not None:
            bump(board.lettuce)
    if state.players[viewer].held is not None:
        bump(state.players[viewer].held)
    counts[("Fire", "")] = sum(1 for pan in state.pans.values() if pan.fire)
    return counts


def test_document_faithful_on_random_rollouts(counter_circuit):
    rng = random.Random(123)
    config = GameConfig(seed=5, cook_ticks=6, overcook_ticks=6)
    state = build_initial_state(counter_circuit, config, players=2)
    schedule = OrderSchedule.from_config(config)
    actions = list(Action)
    for tick in range(120):
        state, _ = step(state, [rng.choice(actions), rng.choice(actions)])
        state = spawn_orders(state, schedule)
        if tick % 10 == 0:
            for viewer in (0, 1):
                doc = snapshot_document(state, viewer)
                expected = brute_force_census(state, viewer)
                for key, count in expected.items():
                    assert doc.objects.get(key, 0) == count, (tick, viewer, key)
