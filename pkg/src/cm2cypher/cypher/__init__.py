"""In-process evaluator for the Cypher expression subset used by the
pure-reduce query form."""

from .errors import (
    CypherError,
    CypherSyntaxError,
    DivisionByZero,
    EvalError,
    IntegerOverflow,
    TypeMismatch,
    UnknownParameter,
    UnknownVariable,
    UnsupportedFeature,
)
from .evaluator import evaluate, format_results, format_value, run_query, run_query_text
from .lexer import Token, tokenize
from .parser import parse_expression, parse_query

__all__ = [
    "CypherError",
    "CypherSyntaxError",
    "DivisionByZero",
    "EvalError",
    "IntegerOverflow",
    "Token",
    "TypeMismatch",
    "UnknownParameter",
    "UnknownVariable",
    "UnsupportedFeature",
    "evaluate",
    "format_results",
    "format_value",
    "parse_expression",
    "parse_query",
    "run_query",
    "run_query_text",
    "tokenize",
]
