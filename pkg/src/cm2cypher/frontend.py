"""Program frontend: the `.2cm` DSL, the map-list JSON encoding, trace
tables, and a deterministic random-program generator.

DSL grammar, one instruction per line (`#` starts a comment):

    state <n>: INC <A|B> -> <n>
    state <n>: JZDEC <A|B> ? <n_zero> : <n_pos>
    state <n>: HALT

States may appear in any order but must form a dense 0..n-1 range; sparse
numbering is rejected rather than compacted so that generated query list
indices stay aligned with state ids.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from .machine import (
    CounterId,
    Halt,
    Inc,
    InvalidProgram,
    JzDec,
    Program,
    RunResult,
)


class DslError(Exception):
    """Syntax or validation error in DSL text, with 1-based position."""

    def __init__(self, message: str, line: int, column: int = 1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class DocumentError(Exception):
    """Schema violation in a map-list program document."""


_LINE_RE = re.compile(r"^\s*state\s+(\d+)\s*:\s*(.*?)\s*$")
_INC_RE = re.compile(r"^INC\s+(\w+)\s*->\s*(\d+)$")
_JZDEC_RE = re.compile(r"^JZDEC\s+(\w+)\s*\?\s*(\d+)\s*:\s*(\d+)$")


def _parse_counter(name: str, line_no: int, col: int) -> CounterId:
    try:
        return CounterId(name)
    except ValueError:
        raise DslError(f"unknown counter {name!r} (expected A or B)", line_no, col) from None


def parse_dsl(text: str) -> Program:
    by_state: dict[int, tuple] = {}  # state -> (instruction, line_no)
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE_RE.match(line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise DslError("expected 'state <n>: <instruction>'", line_no, col)
        state = int(m.group(1))
        body = m.group(2)
        body_col = line.index(body, m.start(2)) + 1 if body else len(line) + 1
        if state in by_state:
            raise DslError(
                f"duplicate state {state} (first declared on line {by_state[state][1]})",
                line_no,
                m.start(1) + 1,
            )
        if body == "HALT":
            instr: Inc | JzDec | Halt = Halt()
        elif body.startswith("INC"):
            im = _INC_RE.match(body)
            if not im:
                raise DslError("expected 'INC <A|B> -> <n>'", line_no, body_col)
            instr = Inc(_parse_counter(im.group(1), line_no, body_col), int(im.group(2)))
        elif body.startswith("JZDEC"):
            jm = _JZDEC_RE.match(body)
            if not jm:
                raise DslError("expected 'JZDEC <A|B> ? <n_zero> : <n_pos>'", line_no, body_col)
            instr = JzDec(
                _parse_counter(jm.group(1), line_no, body_col),
                int(jm.group(2)),
                int(jm.group(3)),
            )
        else:
            raise DslError(f"unknown instruction {body.split()[0]!r}", line_no, body_col)
        by_state[state] = (instr, line_no)

    if not by_state:
        raise DslError("empty program", 1)
    n = len(by_state)
    for s in range(n):
        if s not in by_state:
            top = max(by_state)
            raise DslError(f"missing state {s} (states must be dense 0..{top})", 1)
    try:
        return Program(tuple(by_state[s][0] for s in range(n)))
    except InvalidProgram as exc:
        raise DslError(str(exc), 1) from exc


def render_dsl(program: Program) -> str:
    """Formatting inverse of parse_dsl."""
    lines = []
    for i, instr in enumerate(program.instructions):
        if isinstance(instr, Inc):
            lines.append(f"state {i}: INC {instr.counter.value} -> {instr.next}")
        elif isinstance(instr, JzDec):
            lines.append(
                f"state {i}: JZDEC {instr.counter.value} ? {instr.q_zero} : {instr.q_pos}"
            )
        else:
            lines.append(f"state {i}: HALT")
    return "\n".join(lines) + "\n"


def to_map_document(program: Program) -> list[dict]:
    """Map-list encoding: HALT carries counter '' and next = own state."""
    doc = []
    for i, instr in enumerate(program.instructions):
        if isinstance(instr, Inc):
            doc.append({"state": i, "op": "INC", "counter": instr.counter.value, "next": instr.next})
        elif isinstance(instr, JzDec):
            doc.append(
                {
                    "state": i,
                    "op": "JZDEC",
                    "counter": instr.counter.value,
                    "q_zero": instr.q_zero,
                    "q_pos": instr.q_pos,
                }
            )
        else:
            doc.append({"state": i, "op": "HALT", "counter": "", "next": i})
    return doc


def from_map_document(doc: list[dict]) -> Program:
    if not isinstance(doc, list):
        raise DocumentError("program document must be a list of maps")
    if not doc:
        raise DocumentError("empty program")
    instrs: list[Inc | JzDec | Halt] = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise DocumentError(f"entry {i}: not a map")
        if entry.get("state") != i:
            raise DocumentError(f"entry {i}: state field {entry.get('state')!r} != position {i}")
        op = entry.get("op")
        if op == "INC":
            counter = entry.get("counter")
            if counter not in ("A", "B"):
                raise DocumentError(f"entry {i}: bad counter {counter!r}")
            if not isinstance(entry.get("next"), int):
                raise DocumentError(f"entry {i}: INC requires integer 'next'")
            instrs.append(Inc(CounterId(counter), entry["next"]))
        elif op == "JZDEC":
            counter = entry.get("counter")
            if counter not in ("A", "B"):
                raise DocumentError(f"entry {i}: bad counter {counter!r}")
            if not isinstance(entry.get("q_zero"), int) or not isinstance(entry.get("q_pos"), int):
                raise DocumentError(f"entry {i}: JZDEC requires integer 'q_zero' and 'q_pos'")
            instrs.append(JzDec(CounterId(counter), entry["q_zero"], entry["q_pos"]))
        elif op == "HALT":
            instrs.append(Halt())
        else:
            raise DocumentError(f"entry {i}: unknown op {op!r}")
    try:
        return Program(tuple(instrs))
    except InvalidProgram as exc:
        raise DocumentError(str(exc)) from exc


def format_trace(result: RunResult, ascii_mode: bool = False) -> str:
    """Fixed-width table: Step | Instr | St | A | B.

    The mutated counter cell uses arrow notation (e.g. "0->1"); counters
    before each row are reconstructed from the (0, 0) start.
    """
    if result.trace is None:
        raise ValueError("run was executed without capture_trace")
    arrow = "->" if ascii_mode else "→"
    header = ["Step", "Instr", "St", "A", "B"]
    rows = []
    prev_a, prev_b = 0, 0
    for row in result.trace:
        after = row.config_after
        a_cell = f"{prev_a}{arrow}{after.a}" if after.a != prev_a else str(prev_a)
        b_cell = f"{prev_b}{arrow}{after.b}" if after.b != prev_b else str(prev_b)
        rows.append(
            [str(row.step), row.instruction_tag, f"q{row.state_before}", a_cell, b_cell]
        )
        prev_a, prev_b = after.a, after.b
    widths = [max(len(header[c]), *(len(r[c]) for r in rows)) if rows else len(header[c]) for c in range(5)]
    lines = [" | ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("-+-".join("-" * w for w in widths))
    for r in rows:
        lines.append(" | ".join(cell.ljust(w) for cell, w in zip(r, widths)))
    if result.trace_truncated:
        lines.append(
            f"... trace truncated at {len(result.trace)} rows "
            f"({result.machine_steps} instructions executed)"
        )
    return "\n".join(lines) + "\n"


def random_program(seed: int, max_states: int) -> Program:
    """Deterministic pseudo-random valid program with at least one HALT."""
    if max_states < 1:
        raise ValueError("max_states must be >= 1")
    rng = random.Random(seed)
    n = rng.randint(1, max_states)
    instrs: list[Inc | JzDec | Halt] = []
    for _ in range(n):
        kind = rng.choice(("INC", "INC", "JZDEC", "JZDEC", "HALT"))
        counter = rng.choice((CounterId.A, CounterId.B))
        if kind == "INC":
            instrs.append(Inc(counter, rng.randrange(n)))
        elif kind == "JZDEC":
            instrs.append(JzDec(counter, rng.randrange(n), rng.randrange(n)))
        else:
            instrs.append(Halt())
    if not any(isinstance(x, Halt) for x in instrs):
        instrs[rng.randrange(n)] = Halt()
    return Program(tuple(instrs))
