from __future__ import annotations

import ast
from pathlib import Path

import pytest

from coopkitchen.env import (
    GameConfig,
    build_initial_state,
    load_layout,
)
from coopkitchen.env.layout import builtin_layout_path

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def counter_circuit():
    return load_layout(builtin_layout_path("new_counter_circuit"))


@pytest.fixture(scope="session")
def asymmetric_advantages():
    return load_layout(builtin_layout_path("new_asymmetric_advantages"))


@pytest.fixture
def small_config():
    return GameConfig(seed=7, cook_ticks=10, overcook_ticks=10, order_interval=0)


@pytest.fixture
def solo_state(counter_circuit, small_config):
    return build_initial_state(counter_circuit, small_config, players=1)


@pytest.fixture
def duo_state(counter_circuit, small_config):
    return build_initial_state(counter_circuit, small_config, players=2)


def literal_fixture(name: str):
    """Parse a Python-literal asset (the structured-state examples)."""
    from coopkitchen.system2.prompts import load_asset

    return ast.literal_eval(load_asset(name))


def drive_plan(plan, state, actor: int = 0, partner_actions=None, limit: int = 400):
    """Run a plan to completion in a closed world; returns (state, outcome, events)."""
    from coopkitchen.env.state import Action, step
    from coopkitchen.executor import DONE, REPLAN, next_atomic

    all_events = []
    for _ in range(limit):
        result = next_atomic(plan, state)
        if result is DONE:
            return state, "done", all_events
        if result is REPLAN:
            return state, f"replan:{plan.status}", all_events
        actions = [Action.NOOP] * len(state.players)
        actions[actor] = result
        if partner_actions is not None and len(state.players) > 1:
            try:
                actions[1 - actor] = next(partner_actions)
            except StopIteration:
                pass
        state, events = step(state, actions)
        all_events.extend(events)
    return state, "timeout", all_events
