"""Macro actions and assigned-task lists.

An assigned-task list is the payload models emit to steer the fast
controller: a Python literal (or strict JSON) list whose elements are
either an order name or a ``(precondition, action)`` pair. Parsing is
all-or-nothing so the slow loop gets unambiguous feedback.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field, replace

from ..env.items import BURGER_NAMES
from ..errors import ParseError, ValidationError
from .conditions import ConditionExpr, parse_condition

PREPARE_FOODS = ("Beef", "Lettuce", "Bread")
PASS_ON_THINGS: dict[str, tuple[str, ...]] = {
    "Plate": ("",),
    "Bread": ("",),
    "Lettuce": ("Chopped", "Unchopped"),
    "Beef": ("Well-cooked", "Fresh"),
    "BeefLettuce": ("",),
    "BeefBurger": ("",),
    "LettuceBurger": ("",),
    "BeefLettuceBurger": ("",),
    "FireExtinguisher": ("",),
}
MACRO_NAMES = ("prepare", "assemble", "pass_on", "serve", "putout_fire", "clean_a_counter")


@dataclass(frozen=True)
class MacroAction:
    name: str
    args: dict = field(default_factory=dict)

    def __hash__(self) -> int:
        return hash((self.name, tuple(sorted(self.args.items()))))

    def to_tuple(self) -> tuple[str, dict]:
        return (self.name, dict(self.args))

    def render(self) -> str:
        parts = []
        for key, value in self.args.items():
            if isinstance(value, bool):
                parts.append(f'"{key}": {value}')
            else:
                parts.append(f'"{key}": "{value}"')
        return f'("{self.name}", {{{", ".join(parts)}}})'

    def __str__(self) -> str:
        return self.render()


def validate_macro_action(name: object, args: object, *, index: int | None = None) -> MacroAction:
    """Check an action against the valid-action catalog."""
    if not isinstance(name, str) or name not in MACRO_NAMES:
        raise ValidationError(f"unknown action name {name!r}", index=index)
    if not isinstance(args, dict):
        raise ValidationError(f"action arguments must be a mapping, got {args!r}", index=index)

    if name == "prepare":
        food = args.get("food")
        if food not in PREPARE_FOODS:
            raise ValidationError(f"prepare: invalid food {food!r}", index=index)
        plate = args.get("plate", False)
        if not isinstance(plate, bool):
            raise ValidationError(f"prepare: plate must be a boolean, got {plate!r}", index=index)
        extra = set(args) - {"food", "plate"}
        if extra:
            raise ValidationError(f"prepare: unknown arguments {sorted(extra)}", index=index)
        return MacroAction(name, {"food": food, "plate": plate})

    if name in ("assemble", "serve"):
        food = args.get("food")
        if food not in BURGER_NAMES:
            raise ValidationError(f"{name}: invalid food {food!r}", index=index)
        extra = set(args) - {"food"}
        if extra:
            raise ValidationError(f"{name}: unknown arguments {sorted(extra)}", index=index)
        return MacroAction(name, {"food": food})

    if name == "pass_on":
        thing = args.get("thing")
        if thing not in PASS_ON_THINGS:
            raise ValidationError(f"pass_on: invalid thing {thing!r}", index=index)
        statuses = PASS_ON_THINGS[thing]
        status = args.get("thing_status", "" if statuses == ("",) else None)
        if status not in statuses:
            raise ValidationError(
                f"pass_on: {thing} requires thing_status in {list(statuses)}", index=index
            )
        extra = set(args) - {"thing", "thing_status"}
        if extra:
            raise ValidationError(f"pass_on: unknown arguments {sorted(extra)}", index=index)
        out = {"thing": thing}
        if statuses != ("",):
            out["thing_status"] = status
        return MacroAction(name, out)

    # putout_fire / clean_a_counter take no arguments
    if args:
        raise ValidationError(f"{name}: takes no arguments, got {args!r}", index=index)
    return MacroAction(name, {})


@dataclass
class AssignedTask:
    """One element of a task list: a guarded action or an order goal."""

    kind: str  # "conditional" | "order_goal"
    condition: ConditionExpr | None = None
    action: MacroAction | None = None
    order_name: str | None = None
    consumed: bool = False

    @classmethod
    def conditional(cls, condition: ConditionExpr, action: MacroAction) -> "AssignedTask":
        return cls(kind="conditional", condition=condition, action=action)

    @classmethod
    def order_goal(cls, name: str) -> "AssignedTask":
        return cls(kind="order_goal", order_name=name)

    def copy(self) -> "AssignedTask":
        return replace(self)

    def render(self) -> str:
        if self.kind == "order_goal":
            return f'"{self.order_name}"'
        src = self.condition.source if self.condition is not None else "lambda json_state: True"
        return f"({json.dumps(src)}, {self.action.render()})"

    def structurally_equal(self, other: "AssignedTask") -> bool:
        if self.kind != other.kind:
            return False
        if self.kind == "order_goal":
            return self.order_name == other.order_name
        return (
            self.action == other.action
            and self.condition is not None
            and other.condition is not None
            and self.condition.body == other.condition.body
        )


def _to_tuples(value):
    """JSON arrays play the role of tuples; normalize for matching."""
    if isinstance(value, list):
        return tuple(_to_tuples(v) for v in value)
    if isinstance(value, tuple):
        return tuple(_to_tuples(v) for v in value)
    if isinstance(value, dict):
        return {k: _to_tuples(v) for k, v in value.items()}
    return value


def _literal_parse(src: str):
    try:
        return ast.literal_eval(src)
    except (ValueError, SyntaxError, MemoryError, RecursionError):
        pass
    try:
        return json.loads(src)
    except json.JSONDecodeError:
        raise ParseError("task list is neither a Python literal nor JSON") from None


def parse_assigned_tasks(src: str) -> list[AssignedTask]:
    """Parse a task-list block into validated AssignedTasks (all-or-nothing)."""
    if not isinstance(src, str):
        raise ParseError("task list source must be text")
    text = src.strip()
    if not text:
        raise ParseError("empty task list source")
    data = _to_tuples(_literal_parse(text))
    if not isinstance(data, tuple):
        raise ParseError(f"task list must be a list, got {type(data).__name__}")

    tasks: list[AssignedTask] = []
    for i, element in enumerate(data):
        if isinstance(element, str):
            if element not in BURGER_NAMES:
                raise ValidationError(f"unknown order name {element!r}", index=i)
            tasks.append(AssignedTask.order_goal(element))
            continue
        if isinstance(element, tuple) and len(element) == 2:
            first, second = element
            if isinstance(second, dict):
                # Bare action without a precondition: always eligible.
                action = validate_macro_action(first, second, index=i)
                tasks.append(AssignedTask.conditional(parse_condition("lambda json_state: True"), action))
                continue
            if isinstance(first, str) and isinstance(second, tuple) and len(second) == 2:
                try:
                    condition = parse_condition(first)
                except ParseError as exc:
                    raise ParseError(f"bad precondition: {exc}", index=i) from None
                action = validate_macro_action(second[0], dict(second[1]) if isinstance(second[1], dict) else second[1], index=i)
                tasks.append(AssignedTask.conditional(condition, action))
                continue
        raise ParseError(
            f"element must be an order name or (precondition, action) pair, got {element!r}",
            index=i,
        )
    return tasks


def render_assigned_tasks(tasks: list[AssignedTask]) -> str:
    """Python-literal text form; re-parsing yields a structurally equal list."""
    if not tasks:
        return "[]"
    lines = ["["]
    for task in tasks:
        lines.append(f"    {task.render()},")
    lines.append("]")
    return "\n".join(lines)


def parse_macro_action(src: str) -> MacroAction | None:
    """Best-effort extraction of a single action from model output.

    Accepts ``("serve", {"food": ...})`` literals, JSON arrays, or JSON
    objects shaped like ``{"action": ..., "args": {...}}``. Returns None
    when nothing valid is found.
    """
    if not isinstance(src, str) or not src.strip():
        return None
    text = src.strip()
    candidates = []
    try:
        candidates.append(_to_tuples(ast.literal_eval(text)))
    except (ValueError, SyntaxError, MemoryError, RecursionError):
        pass
    try:
        candidates.append(_to_tuples(json.loads(text)))
    except json.JSONDecodeError:
        pass

    for cand in candidates:
        try:
            if isinstance(cand, tuple) and len(cand) == 2 and isinstance(cand[1], dict):
                return validate_macro_action(cand[0], dict(cand[1]))
            if isinstance(cand, dict):
                name = cand.get("action") or cand.get("name")
                args = cand.get("args") or cand.get("arguments") or cand.get("params") or {}
                if name is not None:
                    return validate_macro_action(name, dict(args))
        except ValidationError:
            continue
    return None
