"""Recursive-descent parser for the expression subset.

Query shape: optional "CYPHER 25" header, zero or more LET bindings, one
RETURN clause, optional trailing semicolon. Anything outside the subset
(MATCH, CALL, WITH, unknown functions, ...) is rejected at parse time
with UnsupportedFeature naming the construct.
"""

from __future__ import annotations

from . import ast
from .errors import CypherSyntaxError, UnsupportedFeature
from .lexer import EOF, IDENT, INT, PUNCT, STRING, Token, tokenize

_KEYWORDS = {
    "LET", "RETURN", "CASE", "WHEN", "THEN", "ELSE", "END",
    "IN", "AS", "AND", "OR", "NOT", "XOR", "TRUE", "FALSE", "NULL", "WHERE",
}

_UNSUPPORTED = {
    "MATCH", "OPTIONAL", "CREATE", "MERGE", "SET", "DELETE", "DETACH", "REMOVE",
    "CALL", "UNWIND", "WITH", "FOREACH", "ORDER", "SKIP", "LIMIT", "UNION",
    "USE", "USING", "SHOW", "NEXT", "LOAD", "EXISTS", "COUNT", "COLLECT",
}

_FUNCTIONS = {"head", "range"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    # --- token helpers -------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def at_keyword(self, word: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind == IDENT and tok.lexeme.upper() == word

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            tok = self.peek()
            raise CypherSyntaxError(f"expected {word}, found {tok.lexeme!r}", tok.line, tok.column)
        return self.next()

    def at_punct(self, lexeme: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind == PUNCT and tok.lexeme == lexeme

    def expect_punct(self, lexeme: str) -> Token:
        if not self.at_punct(lexeme):
            tok = self.peek()
            raise CypherSyntaxError(
                f"expected {lexeme!r}, found {tok.lexeme or 'end of input'!r}",
                tok.line,
                tok.column,
            )
        return self.next()

    def expect_name(self) -> Token:
        tok = self.peek()
        if tok.kind != IDENT or tok.lexeme.upper() in _KEYWORDS:
            raise CypherSyntaxError(
                f"expected a name, found {tok.lexeme or 'end of input'!r}", tok.line, tok.column
            )
        self._reject_unsupported(tok)
        return self.next()

    def _reject_unsupported(self, tok: Token):
        if tok.kind == IDENT and tok.lexeme.upper() in _UNSUPPORTED:
            raise UnsupportedFeature(tok.lexeme.upper(), tok.line, tok.column)

    # --- query ----------------------------------------------------------

    def parse_query(self) -> ast.QueryAst:
        has_header = False
        if self.at_keyword("CYPHER") and self.peek(1).kind == INT:
            self.next()
            self.next()
            has_header = True
        bindings: list[tuple[str, ast.Expr]] = []
        seen = set()
        while self.at_keyword("LET"):
            self.next()
            name_tok = self.expect_name()
            if name_tok.lexeme in seen:
                raise CypherSyntaxError(
                    f"duplicate binding {name_tok.lexeme!r}", name_tok.line, name_tok.column
                )
            seen.add(name_tok.lexeme)
            self.expect_punct("=")
            bindings.append((name_tok.lexeme, self.parse_expr()))
        tok = self.peek()
        self._reject_unsupported(tok)
        self.expect_keyword("RETURN")
        returns = [self.parse_return_item()]
        while self.at_punct(","):
            self.next()
            returns.append(self.parse_return_item())
        if self.at_punct(";"):
            self.next()
        tok = self.peek()
        if tok.kind != EOF:
            self._reject_unsupported(tok)
            raise CypherSyntaxError(
                f"unexpected input after RETURN clause: {tok.lexeme!r}", tok.line, tok.column
            )
        return ast.QueryAst(has_header, tuple(bindings), tuple(returns))

    def parse_return_item(self) -> ast.ReturnItem:
        start = self.peek().offset
        expr = self.parse_expr()
        if self.at_keyword("AS"):
            self.next()
            alias = self.expect_name().lexeme
        else:
            end = self.peek().offset
            alias = self.text[start:end].strip()
        return ast.ReturnItem(expr, alias)

    # --- expressions (precedence climbing) -------------------------------

    def parse_expr(self) -> ast.Expr:
        return self.parse_or()

    def parse_or(self) -> ast.Expr:
        left = self.parse_and()
        while self.at_keyword("OR"):
            tok = self.next()
            left = ast.Binary("OR", left, self.parse_and(), tok.line, tok.column)
        return left

    def parse_and(self) -> ast.Expr:
        left = self.parse_not()
        while self.at_keyword("AND"):
            tok = self.next()
            left = ast.Binary("AND", left, self.parse_not(), tok.line, tok.column)
        return left

    def parse_not(self) -> ast.Expr:
        if self.at_keyword("NOT"):
            tok = self.next()
            return ast.Not(self.parse_not(), tok.line, tok.column)
        return self.parse_comparison()

    def parse_comparison(self) -> ast.Expr:
        left = self.parse_additive()
        while self.peek().kind == PUNCT and self.peek().lexeme in ("=", "<>", "<", "<=", ">", ">="):
            tok = self.next()
            left = ast.Binary(tok.lexeme, left, self.parse_additive(), tok.line, tok.column)
        return left

    def parse_additive(self) -> ast.Expr:
        left = self.parse_multiplicative()
        while self.peek().kind == PUNCT and self.peek().lexeme in ("+", "-"):
            tok = self.next()
            left = ast.Binary(tok.lexeme, left, self.parse_multiplicative(), tok.line, tok.column)
        return left

    def parse_multiplicative(self) -> ast.Expr:
        left = self.parse_unary()
        while self.peek().kind == PUNCT and self.peek().lexeme in ("*", "/", "%"):
            tok = self.next()
            left = ast.Binary(tok.lexeme, left, self.parse_unary(), tok.line, tok.column)
        return left

    def parse_unary(self) -> ast.Expr:
        if self.at_punct("-"):
            tok = self.next()
            operand = self.parse_unary()
            if isinstance(operand, ast.IntLit):  # fold -<int> into a literal
                return ast.IntLit(-operand.value, tok.line, tok.column)
            return ast.Neg(operand, tok.line, tok.column)
        if self.at_punct("+"):
            self.next()
            return self.parse_unary()
        return self.parse_postfix()

    def parse_postfix(self) -> ast.Expr:
        expr = self.parse_primary()
        while True:
            if self.at_punct("."):
                tok = self.next()
                key = self.peek()
                if key.kind != IDENT:
                    raise CypherSyntaxError("expected property name after '.'", key.line, key.column)
                self.next()
                expr = ast.Prop(expr, key.lexeme, tok.line, tok.column)
            elif self.at_punct("["):
                tok = self.next()
                index = self.parse_expr()
                self.expect_punct("]")
                expr = ast.Index(expr, index, tok.line, tok.column)
            else:
                return expr

    def parse_primary(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind == INT:
            self.next()
            return ast.IntLit(int(tok.lexeme), tok.line, tok.column)
        if tok.kind == STRING:
            self.next()
            return ast.StrLit(tok.lexeme, tok.line, tok.column)
        if tok.kind == PUNCT:
            if tok.lexeme == "(":
                self.next()
                expr = self.parse_expr()
                self.expect_punct(")")
                return expr
            if tok.lexeme == "[":
                return self.parse_list()
            if tok.lexeme == "{":
                return self.parse_map()
            if tok.lexeme == "$":
                self.next()
                name = self.peek()
                if name.kind != IDENT:
                    raise CypherSyntaxError("expected parameter name after '$'", name.line, name.column)
                self.next()
                return ast.Param(name.lexeme, tok.line, tok.column)
            raise CypherSyntaxError(f"unexpected {tok.lexeme!r}", tok.line, tok.column)
        if tok.kind == IDENT:
            upper = tok.lexeme.upper()
            self._reject_unsupported(tok)
            if upper == "CASE":
                return self.parse_case()
            if upper == "TRUE":
                self.next()
                return ast.BoolLit(True, tok.line, tok.column)
            if upper == "FALSE":
                self.next()
                return ast.BoolLit(False, tok.line, tok.column)
            if upper == "NULL":
                self.next()
                return ast.NullLit(tok.line, tok.column)
            if upper in _KEYWORDS:
                raise CypherSyntaxError(f"unexpected keyword {tok.lexeme!r}", tok.line, tok.column)
            if self.at_punct("(", ahead=1):
                return self.parse_call()
            self.next()
            return ast.Var(tok.lexeme, tok.line, tok.column)
        raise CypherSyntaxError("unexpected end of input", tok.line, tok.column)

    def parse_call(self) -> ast.Expr:
        name_tok = self.next()
        name = name_tok.lexeme
        if name == "reduce":
            return self.parse_reduce(name_tok)
        if name not in _FUNCTIONS:
            raise UnsupportedFeature(f"function {name}()", name_tok.line, name_tok.column)
        self.expect_punct("(")
        args = [self.parse_expr()]
        while self.at_punct(","):
            self.next()
            args.append(self.parse_expr())
        self.expect_punct(")")
        arity = {"head": 1, "range": 2}[name]
        if len(args) != arity:
            raise CypherSyntaxError(
                f"{name}() takes {arity} argument(s), got {len(args)}",
                name_tok.line,
                name_tok.column,
            )
        return ast.Call(name, args, name_tok.line, name_tok.column)

    def parse_reduce(self, name_tok) -> ast.Expr:
        self.expect_punct("(")
        acc = self.expect_name()
        self.expect_punct("=")
        init = self.parse_expr()
        self.expect_punct(",")
        var = self.expect_name()
        self.expect_keyword("IN")
        list_expr = self.parse_expr()
        self.expect_punct("|")
        body = self.parse_expr()
        self.expect_punct(")")
        return ast.Reduce(
            acc.lexeme, init, var.lexeme, list_expr, body, name_tok.line, name_tok.column
        )

    def parse_list(self) -> ast.Expr:
        open_tok = self.expect_punct("[")
        # two-token lookahead: "[ name IN" starts a comprehension
        if (
            self.peek().kind == IDENT
            and self.peek().lexeme.upper() not in _KEYWORDS
            and self.at_keyword("IN", ahead=1)
        ):
            var = self.expect_name()
            self.expect_keyword("IN")
            list_expr = self.parse_expr()
            where = None
            mapper = None
            if self.at_keyword("WHERE"):
                self.next()
                where = self.parse_expr()
            if self.at_punct("|"):
                self.next()
                mapper = self.parse_expr()
            self.expect_punct("]")
            return ast.Comprehension(
                var.lexeme, list_expr, where, mapper, open_tok.line, open_tok.column
            )
        items = []
        if not self.at_punct("]"):
            items.append(self.parse_expr())
            while self.at_punct(","):
                self.next()
                items.append(self.parse_expr())
        self.expect_punct("]")
        return ast.ListLit(items, open_tok.line, open_tok.column)

    def parse_map(self) -> ast.Expr:
        open_tok = self.expect_punct("{")
        items: list[tuple[str, ast.Expr]] = []
        if not self.at_punct("}"):
            while True:
                key = self.peek()
                if key.kind != IDENT:
                    raise CypherSyntaxError("expected map key", key.line, key.column)
                self.next()
                self.expect_punct(":")
                items.append((key.lexeme, self.parse_expr()))
                if not self.at_punct(","):
                    break
                self.next()
        self.expect_punct("}")
        return ast.MapLit(items, open_tok.line, open_tok.column)

    def parse_case(self) -> ast.Expr:
        case_tok = self.next()
        if self.at_keyword("WHEN"):
            whens = []
            while self.at_keyword("WHEN"):
                self.next()
                cond = self.parse_expr()
                self.expect_keyword("THEN")
                whens.append((cond, self.parse_expr()))
            default = None
            if self.at_keyword("ELSE"):
                self.next()
                default = self.parse_expr()
            self.expect_keyword("END")
            return ast.SearchedCase(whens, default, case_tok.line, case_tok.column)
        subject = self.parse_expr()
        whens = []
        while self.at_keyword("WHEN"):
            self.next()
            match = self.parse_expr()
            self.expect_keyword("THEN")
            whens.append((match, self.parse_expr()))
        if not whens:
            tok = self.peek()
            raise CypherSyntaxError("CASE requires at least one WHEN arm", tok.line, tok.column)
        default = None
        if self.at_keyword("ELSE"):
            self.next()
            default = self.parse_expr()
        self.expect_keyword("END")
        return ast.SimpleCase(subject, whens, default, case_tok.line, case_tok.column)


def parse_query(text: str) -> ast.QueryAst:
    return _Parser(text).parse_query()


def parse_expression(text: str) -> ast.Expr:
    p = _Parser(text)
    expr = p.parse_expr()
    tok = p.peek()
    if tok.kind != EOF:
        raise CypherSyntaxError(f"unexpected trailing input {tok.lexeme!r}", tok.line, tok.column)
    return expr
