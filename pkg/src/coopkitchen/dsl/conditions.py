"""Safe condition expressions over the structured game state.

Model-written task preconditions arrive as Python lambda source. We parse
them with the stdlib ``ast`` module, convert the tree into a closed set of
node types, and interpret that tree ourselves: no host ``eval``, no
attribute access, no calls beyond ``sum``/``len``/``any``/``all``.

Grammar (see GRAMMAR.md): int/str/bool literals, the lambda parameter,
subscripts with string or string-tuple keys, ``+ - *`` arithmetic,
comparisons (chaining allowed), ``and``/``or``/``not``, conditional
expressions, and generator comprehensions as the argument of
``sum``/``any``/``all``.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from typing import Any

from ..errors import EvalError, ParseError, SecurityError

EVAL_BUDGET = 10_000  # AST-node visits per evaluation
ALLOWED_CALLS = ("sum", "len", "any", "all")
DEFAULT_PARAM = "json_state"


# --- closed node set -------------------------------------------------------


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Lit(Node):
    value: int | str | bool


@dataclass(frozen=True)
class Name(Node):
    id: str


@dataclass(frozen=True)
class TupleExpr(Node):
    items: tuple[Node, ...]


@dataclass(frozen=True)
class Subscript(Node):
    value: Node
    key: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str  # + - *
    left: Node
    right: Node


@dataclass(frozen=True)
class UnaryOp(Node):
    op: str  # - or not
    operand: Node


@dataclass(frozen=True)
class Compare(Node):
    left: Node
    ops: tuple[str, ...]
    comparators: tuple[Node, ...]


@dataclass(frozen=True)
class BoolOp(Node):
    op: str  # and / or
    values: tuple[Node, ...]


@dataclass(frozen=True)
class Generator(Node):
    element: Node
    var: str
    iterable: Node
    condition: Node | None


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node  # expression or Generator


@dataclass(frozen=True)
class IfExp(Node):
    test: Node
    body: Node
    orelse: Node


@dataclass(frozen=True)
class ConditionExpr:
    """A parsed precondition: parameter name, body, and original source."""

    param: str
    body: Node
    source: str = field(compare=False, default="")


# --- parsing ---------------------------------------------------------------

_BIN_OPS = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*"}
_CMP_OPS = {
    ast.Lt: "<",
    ast.LtE: "<=",
    ast.Eq: "==",
    ast.NotEq: "!=",
    ast.Gt: ">",
    ast.GtE: ">=",
}


def parse_condition(src: str) -> ConditionExpr:
    """Parse lambda source (or a bare expression) into a ConditionExpr."""
    if not isinstance(src, str) or not src.strip():
        raise ParseError("empty condition")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(
            f"invalid syntax: {exc.msg}", line=exc.lineno, col=exc.offset
        ) from None
    except (ValueError, RecursionError, MemoryError) as exc:
        raise ParseError(f"unparseable condition: {exc}") from None

    expr = tree.body
    if isinstance(expr, ast.Lambda):
        args = expr.args
        if (
            len(args.args) != 1
            or args.vararg
            or args.kwarg
            or args.kwonlyargs
            or args.posonlyargs
            or args.defaults
        ):
            raise ParseError("lambda must take exactly one positional parameter")
        param = args.args[0].arg
        body = expr.body
    else:
        param = DEFAULT_PARAM
        body = expr

    _check_name(param)
    converter = _Converter(param)
    try:
        converted = converter.convert(body)
    except RecursionError:
        raise ParseError("condition is too deeply nested") from None
    return ConditionExpr(param=param, body=converted, source=src)


def _check_name(name: str) -> None:
    if "__" in name:
        raise SecurityError(f"dunder identifiers are not allowed: {name!r}")


class _Converter:
    def __init__(self, param: str):
        self.scopes: list[set[str]] = [{param}]

    def _bound(self, name: str) -> bool:
        return any(name in scope for scope in self.scopes)

    def convert(self, node: ast.expr) -> Node:
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or isinstance(node.value, int):
                return Lit(node.value)
            if isinstance(node.value, str):
                return Lit(node.value)
            raise ParseError(
                f"literal of type {type(node.value).__name__} is outside the grammar",
                line=node.lineno,
                col=node.col_offset,
            )
        if isinstance(node, ast.Name):
            _check_name(node.id)
            if not self._bound(node.id):
                raise SecurityError(f"unknown identifier {node.id!r}")
            return Name(node.id)
        if isinstance(node, ast.Attribute):
            raise SecurityError("attribute access is not allowed")
        if isinstance(node, ast.Tuple):
            return TupleExpr(tuple(self.convert(e) for e in node.elts))
        if isinstance(node, ast.Subscript):
            return Subscript(self.convert(node.value), self.convert(node.slice))
        if isinstance(node, ast.BinOp):
            op = _BIN_OPS.get(type(node.op))
            if op is None:
                raise ParseError(
                    f"operator {type(node.op).__name__} is outside the grammar",
                    line=node.lineno,
                    col=node.col_offset,
                )
            return BinOp(op, self.convert(node.left), self.convert(node.right))
        if isinstance(node, ast.UnaryOp):
            if isinstance(node.op, ast.USub):
                return UnaryOp("-", self.convert(node.operand))
            if isinstance(node.op, ast.Not):
                return UnaryOp("not", self.convert(node.operand))
            raise ParseError(
                f"operator {type(node.op).__name__} is outside the grammar",
                line=node.lineno,
                col=node.col_offset,
            )
        if isinstance(node, ast.Compare):
            ops = []
            for op in node.ops:
                name = _CMP_OPS.get(type(op))
                if name is None:
                    raise ParseError(
                        f"comparison {type(op).__name__} is outside the grammar",
                        line=node.lineno,
                        col=node.col_offset,
                    )
                ops.append(name)
            return Compare(
                self.convert(node.left),
                tuple(ops),
                tuple(self.convert(c) for c in node.comparators),
            )
        if isinstance(node, ast.BoolOp):
            op = "and" if isinstance(node.op, ast.And) else "or"
            return BoolOp(op, tuple(self.convert(v) for v in node.values))
        if isinstance(node, ast.IfExp):
            return IfExp(
                self.convert(node.test), self.convert(node.body), self.convert(node.orelse)
            )
        if isinstance(node, ast.Call):
            return self._convert_call(node)
        if isinstance(node, ast.GeneratorExp) or isinstance(node, ast.ListComp):
            raise ParseError(
                "comprehensions are only allowed as the argument of sum/any/all",
                line=node.lineno,
                col=node.col_offset,
            )
        raise ParseError(
            f"{type(node).__name__} is outside the grammar",
            line=getattr(node, "lineno", None),
            col=getattr(node, "col_offset", None),
        )

    def _convert_call(self, node: ast.Call) -> Node:
        if not isinstance(node.func, ast.Name):
            raise SecurityError("only direct calls to sum/len/any/all are allowed")
        func = node.func.id
        if func not in ALLOWED_CALLS:
            raise SecurityError(f"call to {func!r} is not allowed")
        if node.keywords or len(node.args) != 1:
            raise ParseError(
                f"{func}() takes exactly one positional argument",
                line=node.lineno,
                col=node.col_offset,
            )
        arg = node.args[0]
        if isinstance(arg, (ast.GeneratorExp, ast.ListComp)):
            if func == "len":
                raise ParseError(
                    "len() does not take a comprehension argument",
                    line=node.lineno,
                    col=node.col_offset,
                )
            return Call(func, self._convert_generator(arg))
        return Call(func, self.convert(arg))

    def _convert_generator(self, node: ast.GeneratorExp | ast.ListComp) -> Generator:
        if len(node.generators) != 1:
            raise ParseError("only single-clause comprehensions are allowed")
        gen = node.generators[0]
        if gen.is_async:
            raise ParseError("async comprehensions are not allowed")
        if not isinstance(gen.target, ast.Name):
            raise ParseError("comprehension target must be a single name")
        if len(gen.ifs) > 1:
            raise ParseError("at most one filter clause is allowed")
        _check_name(gen.target.id)
        iterable = self.convert(gen.iter)
        self.scopes.append({gen.target.id})
        try:
            condition = self.convert(gen.ifs[0]) if gen.ifs else None
            element = self.convert(node.elt)
        finally:
            self.scopes.pop()
        return Generator(
            element=element, var=gen.target.id, iterable=iterable, condition=condition
        )


# --- evaluation ------------------------------------------------------------


class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit: int):
        self.left = limit

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise EvalError(f"evaluation budget of {EVAL_BUDGET} node visits exceeded")


def eval_condition(expr: ConditionExpr, doc: Any) -> bool:
    """Evaluate a parsed condition against a state document.

    ``doc`` may be a StateDocument or its ``as_dict()`` form. Missing keys
    and type mismatches raise :class:`EvalError` (never host exceptions).
    """
    data = doc.as_dict() if hasattr(doc, "as_dict") else doc
    budget = _Budget(EVAL_BUDGET)
    result = _eval(expr.body, {expr.param: data}, budget)
    return bool(result)


def _expect_number(value: Any, context: str) -> int:
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    raise EvalError(f"{context} requires a number, got {type(value).__name__}")


def _eval(node: Node, env: dict[str, Any], budget: _Budget) -> Any:
    budget.spend()
    if isinstance(node, Lit):
        return node.value
    if isinstance(node, Name):
        try:
            return env[node.id]
        except KeyError:
            raise EvalError(f"unbound identifier {node.id!r}") from None
    if isinstance(node, TupleExpr):
        return tuple(_eval(item, env, budget) for item in node.items)
    if isinstance(node, Subscript):
        container = _eval(node.value, env, budget)
        key = _eval(node.key, env, budget)
        if isinstance(container, dict):
            try:
                return container[key]
            except (KeyError, TypeError):
                raise EvalError(f"missing key {key!r}") from None
        if isinstance(container, (list, tuple, str)):
            if not isinstance(key, int) or isinstance(key, bool):
                raise EvalError(f"sequence index must be an integer, got {key!r}")
            try:
                return container[key]
            except IndexError:
                raise EvalError(f"index {key} out of range") from None
        raise EvalError(f"{type(container).__name__} is not subscriptable")
    if isinstance(node, BinOp):
        left = _eval(node.left, env, budget)
        right = _eval(node.right, env, budget)
        lnum = _expect_number(left, f"operator {node.op!r}")
        rnum = _expect_number(right, f"operator {node.op!r}")
        if node.op == "+":
            return lnum + rnum
        if node.op == "-":
            return lnum - rnum
        return lnum * rnum
    if isinstance(node, UnaryOp):
        value = _eval(node.operand, env, budget)
        if node.op == "-":
            return -_expect_number(value, "unary minus")
        return not value
    if isinstance(node, Compare):
        left = _eval(node.left, env, budget)
        for op, comp_node in zip(node.ops, node.comparators):
            right = _eval(comp_node, env, budget)
            if not _compare(op, left, right):
                return False
            left = right
        return True
    if isinstance(node, BoolOp):
        value: Any = node.op != "and"
        for sub in node.values:
            value = _eval(sub, env, budget)
            if node.op == "and" and not value:
                return value
            if node.op == "or" and value:
                return value
        return value
    if isinstance(node, IfExp):
        if _eval(node.test, env, budget):
            return _eval(node.body, env, budget)
        return _eval(node.orelse, env, budget)
    if isinstance(node, Call):
        return _eval_call(node, env, budget)
    raise EvalError(f"cannot evaluate node {type(node).__name__}")


def _compare(op: str, left: Any, right: Any) -> bool:
    if op == "==":
        return left == right
    if op == "!=":
        return left != right
    both_num = isinstance(left, (int, bool)) and isinstance(right, (int, bool))
    both_str = isinstance(left, str) and isinstance(right, str)
    if not (both_num or both_str):
        raise EvalError(
            f"cannot order {type(left).__name__} against {type(right).__name__}"
        )
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    return left >= right


def _iter_generator(gen: Generator, env: dict[str, Any], budget: _Budget):
    iterable = _eval(gen.iterable, env, budget)
    if isinstance(iterable, dict):
        items: Any = list(iterable)
    elif isinstance(iterable, (list, tuple)):
        items = iterable
    else:
        raise EvalError(f"cannot iterate over {type(iterable).__name__}")
    for item in items:
        inner = dict(env)
        inner[gen.var] = item
        if gen.condition is not None and not _eval(gen.condition, inner, budget):
            continue
        yield _eval(gen.element, inner, budget)


def _eval_call(node: Call, env: dict[str, Any], budget: _Budget) -> Any:
    if isinstance(node.arg, Generator):
        values = _iter_generator(node.arg, env, budget)
        if node.func == "sum":
            total = 0
            for v in values:
                total += _expect_number(v, "sum()")
            return total
        if node.func == "any":
            return any(bool(v) for v in values)
        if node.func == "all":
            return all(bool(v) for v in values)
        raise EvalError(f"{node.func}() does not accept a comprehension")

    value = _eval(node.arg, env, budget)
    if node.func == "len":
        if isinstance(value, (list, tuple, dict, str)):
            return len(value)
        raise EvalError(f"len() of {type(value).__name__}")
    if isinstance(value, dict):
        value = list(value)
    if not isinstance(value, (list, tuple)):
        raise EvalError(f"{node.func}() requires a sequence")
    if node.func == "sum":
        total = 0
        for v in value:
            total += _expect_number(v, "sum()")
        return total
    if node.func == "any":
        return any(bool(v) for v in value)
    return all(bool(v) for v in value)
