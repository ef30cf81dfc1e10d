"""Generators for the three Cypher-25 query forms.

* reduce  -- a single pure RETURN that folds the machine over range(),
* tx      -- a three-query script (setup, IN TRANSACTIONS stepper, readback)
             using graph storage for the machine state,
* qpp     -- graph setup plus a quantified-path-pattern traversal whose
             allReduce predicate prunes invalid counter branches.

Output is a house style (two-space indent, one clause per line); a
token-level normalizer is provided for whitespace-insensitive comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .frontend import to_map_document
from .machine import Halt, Inc, JzDec, Program

DIALECT_HEADER = "CYPHER 25"
DEFAULT_MAX_STEPS = 1_000_000
DEFAULT_MAX_PATH = 2**63 - 1


class Approach(Enum):
    REDUCE = "reduce"
    TRANSACTIONS = "tx"
    QPP = "qpp"


@dataclass(frozen=True)
class CypherQuery:
    approach: Approach
    text: str
    dialect_header: str = DIALECT_HEADER


@dataclass(frozen=True)
class ScriptBundle:
    """Ordered, uniquely-labelled queries; execution order is list order."""

    queries: tuple[tuple[str, CypherQuery], ...]
    parameters: dict | None = None

    def __post_init__(self):
        labels = [label for label, _ in self.queries]
        if len(labels) != len(set(labels)):
            raise ValueError(f"duplicate script labels: {labels}")

    def __getitem__(self, label: str) -> CypherQuery:
        for name, query in self.queries:
            if name == label:
                return query
        raise KeyError(label)


def _map_entry_literal(entry: dict) -> str:
    if entry["op"] == "JZDEC":
        return (
            f"{{state: {entry['state']}, op: 'JZDEC', counter: '{entry['counter']}', "
            f"q_zero: {entry['q_zero']}, q_pos: {entry['q_pos']}}}"
        )
    return (
        f"{{state: {entry['state']}, op: '{entry['op']}', counter: '{entry['counter']}', "
        f"next: {entry['next']}}}"
    )


def _program_literal(program: Program) -> str:
    entries = ",\n  ".join(_map_entry_literal(e) for e in to_map_document(program))
    return f"[\n  {entries}\n]"


_REDUCE_BODY = """\
LET result = reduce(
  machine = {{state: 0, A: 0, B: 0}},
  step IN range(1, max_steps) |
  CASE WHEN machine.state = -1
    THEN machine
    ELSE head([instr IN [program[machine.state]] |
      CASE instr.op
        WHEN 'INC' THEN
          CASE instr.counter
            WHEN 'A' THEN {{state: instr.next, A: machine.A + 1, B: machine.B}}
            WHEN 'B' THEN {{state: instr.next, A: machine.A, B: machine.B + 1}}
          END
        WHEN 'JZDEC' THEN
          CASE instr.counter
            WHEN 'A' THEN
              CASE WHEN machine.A = 0
                THEN {{state: instr.q_zero, A: 0, B: machine.B}}
                ELSE {{state: instr.q_pos, A: machine.A - 1, B: machine.B}}
              END
            WHEN 'B' THEN
              CASE WHEN machine.B = 0
                THEN {{state: instr.q_zero, A: machine.A, B: 0}}
                ELSE {{state: instr.q_pos, A: machine.A, B: machine.B - 1}}
              END
          END
        WHEN 'HALT' THEN {{state: -1, A: machine.A, B: machine.B}}
      END
    ])
  END
)
RETURN result
"""


def gen_reduce_query(program: Program, max_steps: int = DEFAULT_MAX_STEPS) -> CypherQuery:
    """Pure fold query: one reduce() iteration per machine step, with a
    halted-absorption branch and let-binding via head([... IN [...] | ...])."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    text = (
        f"{DIALECT_HEADER}\n"
        f"LET program = {_program_literal(program)}\n"
        f"LET max_steps = {max_steps}\n"
        + _REDUCE_BODY.format()
    )
    return CypherQuery(Approach.REDUCE, text)


_TX_STEPPER = """\
UNWIND range(1, 9223372036854775807) AS step
CALL (step) {{
  MATCH (m:Machine)
  WITH m,
    CASE WHEN m.state = -1 THEN 1/0
      ELSE {program_ref}[m.state]
    END AS instr
  SET m.state = CASE instr.op
    WHEN 'INC' THEN instr.next
    WHEN 'JZDEC' THEN
      CASE instr.counter
        WHEN 'A' THEN
          CASE WHEN m.A = 0 THEN instr.q_zero ELSE instr.q_pos END
        WHEN 'B' THEN
          CASE WHEN m.B = 0 THEN instr.q_zero ELSE instr.q_pos END
      END
    WHEN 'HALT' THEN -1
    END,
  m.A = CASE
    WHEN instr.op = 'INC' AND instr.counter = 'A' THEN m.A + 1
    WHEN instr.op = 'JZDEC' AND instr.counter = 'A' AND m.A > 0 THEN m.A - 1
    ELSE m.A END,
  m.B = CASE
    WHEN instr.op = 'INC' AND instr.counter = 'B' THEN m.B + 1
    WHEN instr.op = 'JZDEC' AND instr.counter = 'B' AND m.B > 0 THEN m.B - 1
    ELSE m.B END
}} IN TRANSACTIONS OF 1 ROW
  ON ERROR BREAK
"""


def gen_transactions_script(program: Program, parameter_mode: bool = False) -> ScriptBundle:
    """Setup / main / readback bundle.

    The stepper's 1/0 halt guard comes lexically before the program-index
    expression so ON ERROR BREAK terminates the loop after halting. By
    default the program is inlined as a LET list; ``parameter_mode``
    switches to a ``$program`` reference plus a parameter document.
    """
    setup = CypherQuery(
        Approach.TRANSACTIONS,
        f"{DIALECT_HEADER}\nCREATE (:Machine {{state: 0, A: 0, B: 0}});\n",
    )
    if parameter_mode:
        main_text = f"{DIALECT_HEADER}\n" + _TX_STEPPER.format(program_ref="$program")
        parameters = {"program": to_map_document(program)}
    else:
        main_text = (
            f"{DIALECT_HEADER}\n"
            f"LET program = {_program_literal(program)}\n"
            + _TX_STEPPER.format(program_ref="program")
        )
        parameters = None
    main = CypherQuery(Approach.TRANSACTIONS, main_text)
    readback = CypherQuery(Approach.TRANSACTIONS, "MATCH (m:Machine) RETURN m;\n")
    return ScriptBundle(
        (("setup", setup), ("main", main), ("readback", readback)), parameters
    )


def gen_qpp_setup(program: Program) -> CypherQuery:
    """State-graph setup: one node per state (q<i>), :Init on state 0,
    :Halt on halt states; INC edges plus JZDEC_ZERO/JZDEC_POS edge pairs."""
    lines = [DIALECT_HEADER]
    for i, instr in enumerate(program.instructions):
        labels = ":State"
        if i == 0:
            labels += ":Init"
        if isinstance(instr, Halt):
            labels += ":Halt"
        lines.append(f"CREATE (q{i}{labels} {{name: 'q{i}'}})")
    for i, instr in enumerate(program.instructions):
        if isinstance(instr, Inc):
            lines.append(f"CREATE (q{i})-[:INC {{c: '{instr.counter.value}'}}]->(q{instr.next})")
        elif isinstance(instr, JzDec):
            c = instr.counter.value
            lines.append(f"CREATE (q{i})-[:JZDEC_ZERO {{c: '{c}'}}]->(q{instr.q_zero})")
            lines.append(f"CREATE (q{i})-[:JZDEC_POS {{c: '{c}'}}]->(q{instr.q_pos})")
    return CypherQuery(Approach.QPP, "\n".join(lines) + "\n")


_QPP_QUERY = """\
{header}
MATCH REPEATABLE ELEMENTS
  p = (init:Init)
    -[rels:INC|JZDEC_ZERO|JZDEC_POS]->{{0, {max_path}}}
  (h:Halt)
WHERE allReduce(
  m = {{A: 0, B: 0}}, r IN rels |
  CASE
    WHEN r:INC AND r.c = 'A' THEN {{A: m.A + 1, B: m.B}}
    WHEN r:INC AND r.c = 'B' THEN {{A: m.A, B: m.B + 1}}
    WHEN r:JZDEC_POS AND r.c = 'A' THEN {{A: m.A - 1, B: m.B}}
    WHEN r:JZDEC_POS AND r.c = 'B' THEN {{A: m.A, B: m.B - 1}}
    ELSE m
  END,
  CASE
    WHEN r:JZDEC_ZERO AND r.c = 'A' THEN m.A = 0
    WHEN r:JZDEC_ZERO AND r.c = 'B' THEN m.B = 0
    WHEN r:JZDEC_POS AND r.c = 'A' THEN m.A >= 0
    WHEN r:JZDEC_POS AND r.c = 'B' THEN m.B >= 0
    ELSE true
  END
)
RETURN rels, length(p) AS steps
NEXT
LET final = reduce(m = {{A: 0, B: 0}}, r IN rels |
  CASE
    WHEN r:INC AND r.c = 'A' THEN {{A: m.A + 1, B: m.B}}
    WHEN r:INC AND r.c = 'B' THEN {{A: m.A, B: m.B + 1}}
    WHEN r:JZDEC_POS AND r.c = 'A' THEN {{A: m.A - 1, B: m.B}}
    WHEN r:JZDEC_POS AND r.c = 'B' THEN {{A: m.A, B: m.B - 1}}
    ELSE m
  END
)
RETURN steps, final.A AS ctrA, final.B AS ctrB
"""


def gen_qpp_query(max_path: int = DEFAULT_MAX_PATH) -> CypherQuery:
    """Traversal query. The allReduce predicate evaluates on the
    post-update accumulator, so the JZDEC_POS checks are >= 0, never > 0."""
    if max_path < 0:
        raise ValueError("max_path must be >= 0")
    return CypherQuery(
        Approach.QPP, _QPP_QUERY.format(header=DIALECT_HEADER, max_path=max_path)
    )


# --- normalization and linting -----------------------------------------

_TOKEN_RE = re.compile(r"'(?:\\.|[^'\\])*'|[A-Za-z_][A-Za-z0-9_]*|\d+|\S")
_LINE_COMMENT_RE = re.compile(r"//[^\n]*")
_BLOCK_COMMENT_RE = re.compile(r"/\*.*?\*/", re.S)


def normalize_tokens(text: str) -> list[str]:
    """Comment-stripped token stream; whitespace and line breaks are
    irrelevant to the comparison."""
    text = _BLOCK_COMMENT_RE.sub(" ", text)
    text = _LINE_COMMENT_RE.sub(" ", text)
    return _TOKEN_RE.findall(text)


def queries_token_equal(a: str, b: str) -> bool:
    return normalize_tokens(a) == normalize_tokens(b)


_LINT_KEYWORDS_ALLOWED = {
    "cypher", "let", "return", "case", "when", "then", "else", "end",
    "in", "as", "and", "or", "not", "true", "false", "null",
}
_LINT_FORBIDDEN = {
    "match", "create", "merge", "set", "delete", "detach", "remove", "call",
    "unwind", "with", "foreach", "where", "next", "load", "using", "union",
    "apoc", "gds",
}
_LINT_FUNCTIONS = {"reduce", "head", "range"}

_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def lint_primitives(query: "CypherQuery | str") -> list[str]:
    """Check a reduce-approach query against the pure-expression primitive
    whitelist: no graph operations, no procedure libraries, and only the
    reduce/head/range functions."""
    text = query.text if isinstance(query, CypherQuery) else query
    tokens = normalize_tokens(text)
    violations = []
    for i, tok in enumerate(tokens):
        if not _WORD_RE.fullmatch(tok):
            continue
        low = tok.lower()
        if low == "next" and (
            (i + 1 < len(tokens) and tokens[i + 1] == ":")
            or (i > 0 and tokens[i - 1] == ".")
        ):
            continue  # the 'next' map key or property access, not the NEXT clause
        if low in _LINT_FORBIDDEN:
            violations.append(f"forbidden token {tok!r}")
            continue
        is_call = i + 1 < len(tokens) and tokens[i + 1] == "("
        if is_call and low not in _LINT_FUNCTIONS and low not in _LINT_KEYWORDS_ALLOWED:
            violations.append(f"function {tok!r} outside the primitive whitelist")
    return violations
