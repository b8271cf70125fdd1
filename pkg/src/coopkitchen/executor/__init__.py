from .pathing import plan_path, floor_distances, adjacent_floor
from .plans import (
    DONE,
    REPLAN,
    MacroCompileContext,
    Plan,
    PlanSignal,
    Subgoal,
    compile_macro,
    next_atomic,
)

__all__ = [
    "DONE",
    "REPLAN",
    "MacroCompileContext",
    "Plan",
    "PlanSignal",
    "Subgoal",
    "adjacent_floor",
    "compile_macro",
    "floor_distances",
    "next_atomic",
    "plan_path",
]
