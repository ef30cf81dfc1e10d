"""Error types for the Cypher expression subset."""

from __future__ import annotations


class CypherError(Exception):
    kind = "Error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            super().__init__(f"{self.kind} at line {line}, column {column}: {message}")
        else:
            super().__init__(f"{self.kind}: {message}")


class CypherSyntaxError(CypherError):
    kind = "SyntaxError"


class UnsupportedFeature(CypherError):
    """A construct outside the supported subset; raised at parse time."""

    kind = "UnsupportedFeature"


class EvalError(CypherError):
    kind = "EvalError"


class DivisionByZero(EvalError):
    kind = "DivisionByZero"


class TypeMismatch(EvalError):
    kind = "TypeMismatch"


class UnknownVariable(EvalError):
    kind = "UnknownVariable"


class UnknownParameter(EvalError):
    kind = "UnknownParameter"


class IntegerOverflow(EvalError):
    kind = "Overflow"
