"""Tokenizer for the Cypher expression subset.

Covers identifiers, integer literals, single-quoted strings, punctuation
and operators (including <=, >=, <>), parameters ($name), and both //
line comments and /* */ block comments.
"""

from __future__ import annotations

from dataclasses import dataclass

IDENT = "ident"
INT = "int"
STRING = "string"
PUNCT = "punct"
EOF = "eof"

_TWO_CHAR = ("<=", ">=", "<>")
_SINGLE = set("()[]{},:.|+-*/%=<>$;")


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    line: int
    column: int
    offset: int  # absolute character offset, for source-span recovery


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(k: int = 1):
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance()
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance()
            continue
        if text.startswith("/*", i):
            start_line, start_col = line, col
            advance(2)
            while i < n and not text.startswith("*/", i):
                advance()
            if i >= n:
                from .errors import CypherSyntaxError

                raise CypherSyntaxError("unterminated block comment", start_line, start_col)
            advance(2)
            continue
        start_line, start_col, start_off = line, col, i
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token(INT, text[i:j], start_line, start_col, start_off))
            advance(j - i)
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token(IDENT, text[i:j], start_line, start_col, start_off))
            advance(j - i)
            continue
        if ch == "'":
            j = i + 1
            buf = []
            while j < n and text[j] != "'":
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                from .errors import CypherSyntaxError

                raise CypherSyntaxError("unterminated string literal", start_line, start_col)
            tokens.append(Token(STRING, "".join(buf), start_line, start_col, start_off))
            advance(j + 1 - i)
            continue
        two = text[i : i + 2]
        if two in _TWO_CHAR:
            tokens.append(Token(PUNCT, two, start_line, start_col, start_off))
            advance(2)
            continue
        if ch in _SINGLE:
            tokens.append(Token(PUNCT, ch, start_line, start_col, start_off))
            advance()
            continue
        from .errors import CypherSyntaxError

        raise CypherSyntaxError(f"illegal character {ch!r}", line, col)
    tokens.append(Token(EOF, "", line, col, i))
    return tokens
