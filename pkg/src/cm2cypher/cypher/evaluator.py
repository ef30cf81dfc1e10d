"""Query evaluation and canonical result formatting."""

from __future__ import annotations

from .ast import Expr, QueryAst
from .errors import CypherSyntaxError
from .parser import parse_query


def evaluate(expr: Expr, environment: dict | None = None, parameters: dict | None = None):
    return expr.eval(environment or {}, parameters or {})


def run_query(query: QueryAst, parameters: dict | None = None) -> dict:
    params = parameters or {}
    env: dict = {}
    for name, expr in query.bindings:
        env[name] = expr.eval(env, params)
    results: dict = {}
    for item in query.returns:
        if item.alias in results:
            raise CypherSyntaxError(f"duplicate return alias {item.alias!r}")
        results[item.alias] = item.expr.eval(env, params)
    return results


def run_query_text(text: str, parameters: dict | None = None) -> dict:
    """Parse and evaluate; returns a mapping alias -> value."""
    return run_query(parse_query(text), parameters)


def format_value(v) -> str:
    """Canonical single-line rendering; map keys sorted for display."""
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace("'", "\\'")
        return f"'{escaped}'"
    if isinstance(v, (list, range)):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}:{format_value(v[k])}" for k in sorted(v)) + "}"
    raise TypeError(f"not a subset value: {type(v).__name__}")


def format_results(results: dict) -> str:
    """One-line rendering of a query result row.

    A single returned map is flattened to the map itself, matching the
    style of the published result boxes; otherwise aliases are shown.
    """
    if len(results) == 1:
        (value,) = results.values()
        if isinstance(value, dict):
            return format_value(value)
    return "{" + ", ".join(f"{k}:{format_value(v)}" for k, v in results.items()) + "}"
