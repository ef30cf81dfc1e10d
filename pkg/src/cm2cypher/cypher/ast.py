"""AST nodes and their evaluation semantics.

Values use native Python types: None (null), bool, int (64-bit checked),
str, list/range, dict. Semantics follow Cypher for the supported subset:
three-valued logic, null propagation through arithmetic and comparison,
null-on-missing for map keys and out-of-range list indexes, negative list
indexes counting from the end, truncating integer division, and a simple
CASE whose null subject never matches an arm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

from .errors import (
    DivisionByZero,
    IntegerOverflow,
    TypeMismatch,
    UnknownParameter,
    UnknownVariable,
)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

Value = Any  # None | bool | int | str | list | range | dict

_MISSING = object()


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_list(v) -> bool:
    return isinstance(v, (list, range))


def _check64(v: int, node: "Expr") -> int:
    if v < INT64_MIN or v > INT64_MAX:
        raise IntegerOverflow("integer out of 64-bit range", node.line, node.column)
    return v


def eq3(a: Value, b: Value) -> Optional[bool]:
    """Cypher equality: null-propagating, structural for lists and maps."""
    if a is None or b is None:
        return None
    a_bool, b_bool = isinstance(a, bool), isinstance(b, bool)
    if a_bool or b_bool:
        return a is b if (a_bool and b_bool) else False
    if _is_int(a) and _is_int(b):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if _is_list(a) and _is_list(b):
        if len(a) != len(b):
            return False
        out: Optional[bool] = True
        for x, y in zip(a, b):
            e = eq3(x, y)
            if e is False:
                return False
            if e is None:
                out = None
        return out
    if isinstance(a, dict) and isinstance(b, dict):
        if set(a) != set(b):
            return False
        out = True
        for k in a:
            e = eq3(a[k], b[k])
            if e is False:
                return False
            if e is None:
                out = None
        return out
    return False


class Expr:
    __slots__ = ("line", "column")

    def __init__(self, line: int, column: int):
        self.line = line
        self.column = column

    def eval(self, env: dict, params: dict) -> Value:
        raise NotImplementedError


class IntLit(Expr):
    __slots__ = ("value",)

    def __init__(self, value: int, line: int, column: int):
        super().__init__(line, column)
        self.value = value

    def eval(self, env, params):
        return self.value


class StrLit(Expr):
    __slots__ = ("value",)

    def __init__(self, value: str, line: int, column: int):
        super().__init__(line, column)
        self.value = value

    def eval(self, env, params):
        return self.value


class BoolLit(Expr):
    __slots__ = ("value",)

    def __init__(self, value: bool, line: int, column: int):
        super().__init__(line, column)
        self.value = value

    def eval(self, env, params):
        return self.value


class NullLit(Expr):
    __slots__ = ()

    def eval(self, env, params):
        return None


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str, line: int, column: int):
        super().__init__(line, column)
        self.name = name

    def eval(self, env, params):
        v = env.get(self.name, _MISSING)
        if v is _MISSING:
            raise UnknownVariable(f"variable {self.name!r} not defined", self.line, self.column)
        return v


class Param(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str, line: int, column: int):
        super().__init__(line, column)
        self.name = name

    def eval(self, env, params):
        if self.name not in params:
            raise UnknownParameter(f"parameter ${self.name} not supplied", self.line, self.column)
        return params[self.name]


class MapLit(Expr):
    __slots__ = ("items",)

    def __init__(self, items: list[tuple[str, Expr]], line: int, column: int):
        super().__init__(line, column)
        self.items = items

    def eval(self, env, params):
        return {k: e.eval(env, params) for k, e in self.items}


class ListLit(Expr):
    __slots__ = ("items",)

    def __init__(self, items: list[Expr], line: int, column: int):
        super().__init__(line, column)
        self.items = items

    def eval(self, env, params):
        return [e.eval(env, params) for e in self.items]


class Prop(Expr):
    __slots__ = ("obj", "key")

    def __init__(self, obj: Expr, key: str, line: int, column: int):
        super().__init__(line, column)
        self.obj = obj
        self.key = key

    def eval(self, env, params):
        v = self.obj.eval(env, params)
        if v is None:
            return None
        if isinstance(v, dict):
            return v.get(self.key)
        raise TypeMismatch(
            f"property access on non-map value of type {type(v).__name__}",
            self.line,
            self.column,
        )


class Index(Expr):
    __slots__ = ("obj", "index")

    def __init__(self, obj: Expr, index: Expr, line: int, column: int):
        super().__init__(line, column)
        self.obj = obj
        self.index = index

    def eval(self, env, params):
        container = self.obj.eval(env, params)
        idx = self.index.eval(env, params)
        if container is None or idx is None:
            return None
        if _is_list(container):
            if not _is_int(idx):
                raise TypeMismatch("list index must be an integer", self.line, self.column)
            n = len(container)
            if idx < 0:
                idx += n
            if 0 <= idx < n:
                return container[idx]
            return None
        if isinstance(container, dict):
            if not isinstance(idx, str):
                raise TypeMismatch("map index must be a string", self.line, self.column)
            return container.get(idx)
        raise TypeMismatch(
            f"cannot index value of type {type(container).__name__}", self.line, self.column
        )


class Not(Expr):
    __slots__ = ("operand",)

    def __init__(self, operand: Expr, line: int, column: int):
        super().__init__(line, column)
        self.operand = operand

    def eval(self, env, params):
        v = self.operand.eval(env, params)
        if v is None:
            return None
        if isinstance(v, bool):
            return not v
        raise TypeMismatch("NOT requires a boolean", self.line, self.column)


class Neg(Expr):
    __slots__ = ("operand",)

    def __init__(self, operand: Expr, line: int, column: int):
        super().__init__(line, column)
        self.operand = operand

    def eval(self, env, params):
        v = self.operand.eval(env, params)
        if v is None:
            return None
        if _is_int(v):
            return _check64(-v, self)
        raise TypeMismatch("unary minus requires an integer", self.line, self.column)


class Binary(Expr):
    __slots__ = ("op", "left", "right")

    def __init__(self, op: str, left: Expr, right: Expr, line: int, column: int):
        super().__init__(line, column)
        self.op = op
        self.left = left
        self.right = right

    def eval(self, env, params):
        op = self.op
        if op == "AND":
            l = self.left.eval(env, params)
            if l is False:
                return False
            r = self.right.eval(env, params)
            self._require_bool(l)
            self._require_bool(r)
            if r is False:
                return False
            if l is None or r is None:
                return None
            return True
        if op == "OR":
            l = self.left.eval(env, params)
            if l is True:
                return True
            r = self.right.eval(env, params)
            self._require_bool(l)
            self._require_bool(r)
            if r is True:
                return True
            if l is None or r is None:
                return None
            return False

        l = self.left.eval(env, params)
        r = self.right.eval(env, params)
        if op == "=":
            return eq3(l, r)
        if op == "<>":
            e = eq3(l, r)
            return None if e is None else not e
        if op in ("<", "<=", ">", ">="):
            if l is None or r is None:
                return None
            if _is_int(l) and _is_int(r) or (isinstance(l, str) and isinstance(r, str)):
                if op == "<":
                    return l < r
                if op == "<=":
                    return l <= r
                if op == ">":
                    return l > r
                return l >= r
            return None  # incomparable types order as null
        # arithmetic
        if l is None or r is None:
            return None
        if not (_is_int(l) and _is_int(r)):
            raise TypeMismatch(
                f"operator {op} requires integers, got "
                f"{type(l).__name__} and {type(r).__name__}",
                self.line,
                self.column,
            )
        if op == "+":
            return _check64(l + r, self)
        if op == "-":
            return _check64(l - r, self)
        if op == "*":
            return _check64(l * r, self)
        if op == "/":
            if r == 0:
                raise DivisionByZero("division by zero", self.line, self.column)
            q = abs(l) // abs(r)
            if (l < 0) != (r < 0):
                q = -q
            return _check64(q, self)
        if op == "%":
            if r == 0:
                raise DivisionByZero("modulo by zero", self.line, self.column)
            # remainder takes the sign of the dividend (truncating division)
            m = abs(l) % abs(r)
            return _check64(-m if l < 0 else m, self)
        raise AssertionError(f"unknown operator {op}")

    def _require_bool(self, v):
        if v is not None and not isinstance(v, bool):
            raise TypeMismatch(f"{self.op} requires booleans", self.line, self.column)


class SimpleCase(Expr):
    __slots__ = ("subject", "whens", "default")

    def __init__(self, subject, whens, default, line, column):
        super().__init__(line, column)
        self.subject = subject
        self.whens = whens  # list of (match_expr, result_expr)
        self.default = default

    def eval(self, env, params):
        subject = self.subject.eval(env, params)
        if subject is not None:  # a null subject never matches an arm
            for match, result in self.whens:
                if eq3(subject, match.eval(env, params)) is True:
                    return result.eval(env, params)
        if self.default is not None:
            return self.default.eval(env, params)
        return None


class SearchedCase(Expr):
    __slots__ = ("whens", "default")

    def __init__(self, whens, default, line, column):
        super().__init__(line, column)
        self.whens = whens  # list of (condition_expr, result_expr)
        self.default = default

    def eval(self, env, params):
        for cond, result in self.whens:
            c = cond.eval(env, params)
            if c is True:
                return result.eval(env, params)
            if c is not None and not isinstance(c, bool):
                raise TypeMismatch("CASE condition must be boolean", self.line, self.column)
        if self.default is not None:
            return self.default.eval(env, params)
        return None


class Reduce(Expr):
    __slots__ = ("acc_name", "init", "var_name", "list_expr", "body")

    def __init__(self, acc_name, init, var_name, list_expr, body, line, column):
        super().__init__(line, column)
        self.acc_name = acc_name
        self.init = init
        self.var_name = var_name
        self.list_expr = list_expr
        self.body = body

    def eval(self, env, params):
        items = self.list_expr.eval(env, params)
        if not _is_list(items):
            raise TypeMismatch("reduce requires a list", self.line, self.column)
        acc = self.init.eval(env, params)
        acc_name, var_name, body = self.acc_name, self.var_name, self.body
        saved_acc = env.get(acc_name, _MISSING)
        saved_var = env.get(var_name, _MISSING)
        try:
            for x in items:
                env[acc_name] = acc
                env[var_name] = x
                acc = body.eval(env, params)
        finally:
            if saved_acc is _MISSING:
                env.pop(acc_name, None)
            else:
                env[acc_name] = saved_acc
            if saved_var is _MISSING:
                env.pop(var_name, None)
            else:
                env[var_name] = saved_var
        return acc


class Comprehension(Expr):
    __slots__ = ("var_name", "list_expr", "where", "mapper")

    def __init__(self, var_name, list_expr, where, mapper, line, column):
        super().__init__(line, column)
        self.var_name = var_name
        self.list_expr = list_expr
        self.where = where
        self.mapper = mapper

    def eval(self, env, params):
        items = self.list_expr.eval(env, params)
        if items is None:
            return None
        if not _is_list(items):
            raise TypeMismatch("list comprehension requires a list", self.line, self.column)
        var_name = self.var_name
        saved = env.get(var_name, _MISSING)
        out = []
        try:
            for x in items:
                env[var_name] = x
                if self.where is not None and self.where.eval(env, params) is not True:
                    continue
                out.append(self.mapper.eval(env, params) if self.mapper is not None else x)
        finally:
            if saved is _MISSING:
                env.pop(var_name, None)
            else:
                env[var_name] = saved
        return out


class Call(Expr):
    __slots__ = ("name", "args")

    def __init__(self, name: str, args: list[Expr], line: int, column: int):
        super().__init__(line, column)
        self.name = name
        self.args = args

    def eval(self, env, params):
        if self.name == "head":
            v = self.args[0].eval(env, params)
            if v is None:
                return None
            if not _is_list(v):
                raise TypeMismatch("head requires a list", self.line, self.column)
            return v[0] if len(v) else None
        if self.name == "range":
            lo = self.args[0].eval(env, params)
            hi = self.args[1].eval(env, params)
            if lo is None or hi is None:
                return None
            if not (_is_int(lo) and _is_int(hi)):
                raise TypeMismatch("range requires integers", self.line, self.column)
            # inclusive of both ends; lazy so huge bounds stay cheap
            return range(lo, hi + 1)
        raise AssertionError(f"unknown function {self.name}")


@dataclass(frozen=True)
class ReturnItem:
    expr: Expr
    alias: str


@dataclass(frozen=True)
class QueryAst:
    has_header: bool
    bindings: tuple[tuple[str, Expr], ...]
    returns: tuple[ReturnItem, ...]
