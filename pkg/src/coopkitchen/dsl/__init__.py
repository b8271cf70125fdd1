from .conditions import ConditionExpr, parse_condition, eval_condition
from .tasks import (
    AssignedTask,
    MacroAction,
    parse_assigned_tasks,
    parse_macro_action,
    render_assigned_tasks,
    validate_macro_action,
)

__all__ = [
    "AssignedTask",
    "ConditionExpr",
    "MacroAction",
    "eval_condition",
    "parse_assigned_tasks",
    "parse_condition",
    "parse_macro_action",
    "render_assigned_tasks",
    "validate_macro_action",
]
