"""Constructive Turing-completeness pipeline.

Compiles a Turing machine down to a 2-counter program in three stages,
each independently interpretable for differential testing:

    TM  ->  two-stack machine   (tape halves as stacks)
        ->  3-counter machine   (stacks as base-(s+1) numerals; one
                                 shared scratch counter for the
                                 multiply/divide/mod gadgets)
        ->  2-counter program   (counter vector as the prime-exponent
                                 product 2^c1 * 3^c2 * 5^c3 [* 7^c4] in
                                 counter A, with B as scratch)

Conventions (documented here because they are choices, not forced):

* Stack numerals use base s+1 where s is the alphabet size, with digit 0
  reserved as the stack-bottom marker, so empty-stack tests are zero
  tests. The numeral's least significant digit is the stack top.
* The empty counter vector encodes as A = 1 (the empty product), so the
  compiled 2-counter program starts with a single bootstrap INC(A),
  since machines start from (0, 0).
* Moving left at the left tape edge extends the tape with a blank
  (one-way-infinite tape presented as two-way by padding).
* Step blowup: one two-stack step costs O(base * max stack numeral)
  3-counter steps (one divmod dispatch plus O(1) push gadgets), and one
  3-counter step costs O(p * A) 2-counter steps for its prime p. The
  exponential cost of the prime encoding is intrinsic; large fixtures
  exercise only the earlier stages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .machine import (
    INT64_MAX,
    Config,
    CounterId,
    Halt,
    Inc,
    JzDec,
    Program,
    RunResult,
    run,
)

PRIMES = (2, 3, 5, 7)


class ReductionError(Exception):
    """Base class for pipeline errors."""


class FixtureError(ReductionError):
    """Invalid Turing-machine description."""


class DecodeError(ReductionError):
    """A compiled-machine value does not conform to its encoding."""


# --- Turing machines -----------------------------------------------------


@dataclass(frozen=True)
class TuringMachine:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    blank: str
    # (state, symbol) -> (state, written symbol, move 'L' or 'R')
    transitions: dict[tuple[str, str], tuple[str, str, str]]
    initial: str
    halting: frozenset[str]
    input: tuple[str, ...]

    def __post_init__(self):
        if self.blank not in self.alphabet:
            raise FixtureError(f"blank {self.blank!r} not in alphabet")
        if self.initial not in self.states:
            raise FixtureError(f"initial state {self.initial!r} not in states")
        for q in self.halting:
            if q not in self.states:
                raise FixtureError(f"halting state {q!r} not in states")
        for sym in self.input:
            if sym not in self.alphabet:
                raise FixtureError(f"input symbol {sym!r} not in alphabet")
        for (q, sym), (q2, sym2, move) in self.transitions.items():
            if q not in self.states or q2 not in self.states:
                raise FixtureError(f"transition ({q!r}, {sym!r}) references unknown state")
            if sym not in self.alphabet or sym2 not in self.alphabet:
                raise FixtureError(f"transition ({q!r}, {sym!r}) references unknown symbol")
            if move not in ("L", "R"):
                raise FixtureError(f"transition ({q!r}, {sym!r}) has bad move {move!r}")
        for q in self.states:
            if q in self.halting:
                continue
            for sym in self.alphabet:
                if (q, sym) not in self.transitions:
                    raise FixtureError(f"missing transition for ({q!r}, {sym!r})")


def load_tm(doc: dict) -> TuringMachine:
    """Fixture format: states, alphabet, blank, transitions (5-tuples),
    initial, halting, input."""
    try:
        transitions = {
            (q, sym): (q2, sym2, move) for q, sym, q2, sym2, move in doc["transitions"]
        }
        return TuringMachine(
            states=tuple(doc["states"]),
            alphabet=tuple(doc["alphabet"]),
            blank=doc["blank"],
            transitions=transitions,
            initial=doc["initial"],
            halting=frozenset(doc["halting"]),
            input=tuple(doc["input"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureError(f"malformed machine description: {exc}") from exc


def load_tm_file(path) -> TuringMachine:
    with open(path, encoding="utf-8") as fh:
        return load_tm(json.load(fh))


def _trim(tape: list[str] | tuple[str, ...], blank: str) -> tuple[str, ...]:
    tape = list(tape)
    while tape and tape[0] == blank:
        tape.pop(0)
    while tape and tape[-1] == blank:
        tape.pop()
    return tuple(tape)


@dataclass(frozen=True)
class TmResult:
    halted: bool
    steps: int
    tape: tuple[str, ...]


def tm_run(tm: TuringMachine, fuel: int) -> TmResult:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    tape = list(tm.input) if tm.input else [tm.blank]
    head = 0
    state = tm.initial
    steps = 0
    while steps < fuel and state not in tm.halting:
        state, written, move = tm.transitions[(state, tape[head])]
        tape[head] = written
        if move == "R":
            head += 1
            if head == len(tape):
                tape.append(tm.blank)
        else:
            head -= 1
            if head < 0:
                tape.insert(0, tm.blank)
                head = 0
        steps += 1
    return TmResult(state in tm.halting, steps, _trim(tape, tm.blank))


# --- two-stack machines ---------------------------------------------------


@dataclass(frozen=True)
class PopR:
    pass


@dataclass(frozen=True)
class PushR:
    symbol: str


@dataclass(frozen=True)
class PushL:
    symbol: str


@dataclass(frozen=True)
class PopLToR:
    """Pop the left stack (blank if empty) and push the symbol onto the
    right stack."""


StackOp = PopR | PushR | PushL | PopLToR


@dataclass(frozen=True)
class TwoStackMachine:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    blank: str
    # (state, top-of-right) -> (state, stack-op sequence)
    transitions: dict[tuple[str, str], tuple[str, tuple[StackOp, ...]]]
    initial: str
    halting: frozenset[str]
    initial_right: tuple[str, ...]  # bottom of stack last; top = element 0


@dataclass(frozen=True)
class TsmResult:
    halted: bool
    steps: int
    left: tuple[str, ...]  # bottom first
    right: tuple[str, ...]  # bottom first
    tape: tuple[str, ...]


def _stacks_to_tape(left, right, blank) -> tuple[str, ...]:
    return _trim(list(left) + list(reversed(right)), blank)


def tsm_run(tsm: TwoStackMachine, fuel: int) -> TsmResult:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    left: list[str] = []
    right: list[str] = list(reversed(tsm.initial_right))
    state = tsm.initial
    steps = 0
    while steps < fuel and state not in tsm.halting:
        top = right[-1] if right else tsm.blank
        state, ops = tsm.transitions[(state, top)]
        for op in ops:
            if isinstance(op, PopR):
                if right:
                    right.pop()
            elif isinstance(op, PushR):
                right.append(op.symbol)
            elif isinstance(op, PushL):
                left.append(op.symbol)
            else:
                right.append(left.pop() if left else tsm.blank)
        steps += 1
    return TsmResult(
        state in tsm.halting,
        steps,
        tuple(left),
        tuple(right),
        _stacks_to_tape(left, right, tsm.blank),
    )


def tm_to_two_stack(tm: TuringMachine) -> TwoStackMachine:
    """Left stack = tape left of head (top = nearest cell); right stack =
    head cell plus rightward tape. One machine step per tape step."""
    transitions: dict[tuple[str, str], tuple[str, tuple[StackOp, ...]]] = {}
    for (q, sym), (q2, written, move) in tm.transitions.items():
        if move == "R":
            ops: tuple[StackOp, ...] = (PopR(), PushL(written))
        else:
            ops = (PopR(), PushR(written), PopLToR())
        transitions[(q, sym)] = (q2, ops)
    return TwoStackMachine(
        states=tm.states,
        alphabet=tm.alphabet,
        blank=tm.blank,
        transitions=transitions,
        initial=tm.initial,
        halting=tm.halting,
        initial_right=tm.input,
    )


# --- multi-counter machines ------------------------------------------------


@dataclass(frozen=True)
class McmInc:
    counter: int
    next: int


@dataclass(frozen=True)
class McmJzDec:
    counter: int
    q_zero: int
    q_pos: int


@dataclass(frozen=True)
class McmHalt:
    pass


McmInstruction = McmInc | McmJzDec | McmHalt


@dataclass(frozen=True)
class MultiCounterMachine:
    instructions: tuple[McmInstruction, ...]
    num_counters: int

    def __post_init__(self):
        n = len(self.instructions)
        for i, instr in enumerate(self.instructions):
            if isinstance(instr, McmInc):
                targets, counters = (instr.next,), (instr.counter,)
            elif isinstance(instr, McmJzDec):
                targets, counters = (instr.q_zero, instr.q_pos), (instr.counter,)
            else:
                targets, counters = (), ()
            for t in targets:
                if not (0 <= t < n):
                    raise ReductionError(f"mcm state {i}: dangling target {t}")
            for c in counters:
                if not (0 <= c < self.num_counters):
                    raise ReductionError(f"mcm state {i}: bad counter {c}")


@dataclass(frozen=True)
class McmResult:
    halted: bool
    steps: int
    counters: tuple[int, ...]


def mcm_run(mcm: MultiCounterMachine, fuel: int) -> McmResult:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    counters = [0] * mcm.num_counters
    state = 0
    steps = 0
    while steps < fuel and state != -1:
        instr = mcm.instructions[state]
        if isinstance(instr, McmInc):
            counters[instr.counter] += 1
            if counters[instr.counter] > INT64_MAX:
                raise ReductionError("mcm counter overflow")
            state = instr.next
        elif isinstance(instr, McmJzDec):
            if counters[instr.counter] == 0:
                state = instr.q_zero
            else:
                counters[instr.counter] -= 1
                state = instr.q_pos
        else:
            state = -1
        steps += 1
    return McmResult(state == -1, steps, tuple(counters))


# --- assembler --------------------------------------------------------------


class _Asm:
    """Counter-machine assembler with symbolic labels.

    All control flow is explicit in instruction targets, so emission
    order only matters for which label lands at index 0 (the entry).
    """

    def __init__(self):
        self._instrs: list[tuple] = []
        self._marks: dict[str, int] = {}
        self._aliases: dict[str, str] = {}
        self._fresh = 0

    def label(self, hint: str = "L") -> str:
        self._fresh += 1
        return f"{hint}.{self._fresh}"

    def mark(self, name: str):
        if name in self._marks or name in self._aliases:
            raise AssertionError(f"label {name} defined twice")
        self._marks[name] = len(self._instrs)

    def alias(self, name: str, target: str):
        if name in self._marks or name in self._aliases:
            raise AssertionError(f"label {name} defined twice")
        self._aliases[name] = target

    def inc(self, counter: int, goto: str):
        self._instrs.append(("inc", counter, goto))

    def jzdec(self, counter: int, goto_zero: str, goto_pos: str):
        self._instrs.append(("jzdec", counter, goto_zero, goto_pos))

    def halt(self):
        self._instrs.append(("halt",))

    def _resolve(self, name: str) -> int:
        seen = set()
        while name in self._aliases:
            if name in seen:
                raise AssertionError(f"alias cycle at {name}")
            seen.add(name)
            name = self._aliases[name]
        if name not in self._marks:
            raise AssertionError(f"undefined label {name}")
        return self._marks[name]

    def build(self) -> list[tuple]:
        out = []
        for instr in self._instrs:
            if instr[0] == "inc":
                out.append(("inc", instr[1], self._resolve(instr[2])))
            elif instr[0] == "jzdec":
                out.append(("jzdec", instr[1], self._resolve(instr[2]), self._resolve(instr[3])))
            else:
                out.append(("halt",))
        return out


def _emit_inc_chain(asm: _Asm, entry: str, counter: int, n: int, done: str):
    """counter += n, then goto done."""
    if n == 0:
        asm.alias(entry, done)
        return
    cur = entry
    for i in range(n):
        nxt = done if i == n - 1 else asm.label()
        asm.mark(cur)
        asm.inc(counter, nxt)
        cur = nxt


def _emit_move(asm: _Asm, entry: str, src: int, dst: int, done: str):
    """dst += src; src = 0."""
    body = asm.label()
    asm.mark(entry)
    asm.jzdec(src, done, body)
    asm.mark(body)
    asm.inc(dst, entry)


def _emit_mul_const(asm: _Asm, entry: str, counter: int, scratch: int, k: int, done: str):
    """counter *= k via the scratch counter; scratch must be 0 on entry
    and is 0 again on exit."""
    body = asm.label()
    move_back = asm.label()
    asm.mark(entry)
    asm.jzdec(counter, move_back, body)
    _emit_inc_chain(asm, body, scratch, k, entry)
    _emit_move(asm, move_back, scratch, counter, done)


def _emit_push(asm: _Asm, entry: str, counter: int, scratch: int, base: int, digit: int, done: str):
    """counter = counter * base + digit."""
    mid = asm.label()
    _emit_mul_const(asm, entry, counter, scratch, base, mid)
    _emit_inc_chain(asm, mid, counter, digit, done)


def _emit_divmod_dispatch(
    asm: _Asm, entry: str, counter: int, scratch: int, base: int, handlers: list[str]
):
    """counter = counter div base; jump to handlers[counter mod base].
    Scratch is 0 on entry and on every handler entry."""
    assert len(handlers) == base
    attempts = [entry] + [asm.label() for _ in range(base - 1)]
    bump = asm.label()
    found = [asm.label() for _ in range(base)]
    for j in range(base):
        nxt = attempts[j + 1] if j < base - 1 else bump
        asm.mark(attempts[j])
        asm.jzdec(counter, found[j], nxt)
    asm.mark(bump)
    asm.inc(scratch, attempts[0])
    for r in range(base):
        _emit_move(asm, found[r], scratch, counter, handlers[r])


def _emit_divide_or_restore(
    asm: _Asm, entry: str, a: int, b: int, p: int, on_divisible: str, on_indivisible: str
):
    """If p | a: a = a/p, goto on_divisible. Else restore a unchanged and
    goto on_indivisible. b is scratch, 0 on entry and exit."""
    attempts = [entry] + [asm.label() for _ in range(p - 1)]
    bump = asm.label()
    found = [asm.label() for _ in range(p)]
    for j in range(p):
        nxt = attempts[j + 1] if j < p - 1 else bump
        asm.mark(attempts[j])
        asm.jzdec(a, found[j], nxt)
    asm.mark(bump)
    asm.inc(b, attempts[0])
    _emit_move(asm, found[0], b, a, on_divisible)
    for r in range(1, p):
        # a was q*p + r with remainder r; rebuild it from the quotient in b
        add_back = asm.label()
        body = asm.label()
        asm.mark(found[r])
        asm.jzdec(b, add_back, body)
        _emit_inc_chain(asm, body, a, p, found[r])
        _emit_inc_chain(asm, add_back, a, r, on_indivisible)


# --- stage compilers --------------------------------------------------------

_L, _R, _S = 0, 1, 2


def two_stack_to_counters(tsm: TwoStackMachine) -> MultiCounterMachine:
    """Encode each stack as a base-(s+1) numeral in a counter; pushes and
    pops become multiply/divmod gadget loops over the shared scratch."""
    base = len(tsm.alphabet) + 1
    digit = {sym: i + 1 for i, sym in enumerate(tsm.alphabet)}
    asm = _Asm()
    entry_of = {q: asm.label(f"state_{q}") for q in tsm.states}

    # Load the initial right stack so input[0] ends up on top, then enter
    # the initial state. Emitted first so the overall entry is index 0.
    cur = asm.label("boot")
    entry_label = cur
    if tsm.initial_right:
        for i, sym in enumerate(reversed(tsm.initial_right)):
            nxt = entry_of[tsm.initial] if i == len(tsm.initial_right) - 1 else asm.label()
            _emit_push(asm, cur, _R, _S, base, digit[sym], nxt)
            cur = nxt
    else:
        asm.alias(cur, entry_of[tsm.initial])

    def compile_ops(entry: str, ops: tuple[StackOp, ...], i: int, pending: int | None, cont: str):
        # pending: digit pre-popped from the right stack by the dispatch
        # (0 = the stack was empty) that the op sequence has not yet
        # consumed or had restored; None once settled.
        if i == len(ops):
            if pending:  # unconsumed non-empty top: push it back
                _emit_push(asm, entry, _R, _S, base, pending, cont)
            else:
                asm.alias(entry, cont)
            return
        op = ops[i]
        if isinstance(op, PopR):
            if pending is not None:
                # consumes the virtual top (a no-op if the stack was empty)
                compile_ops(entry, ops, i + 1, None, cont)
            else:
                nxt = asm.label()
                _emit_divmod_dispatch(asm, entry, _R, _S, base, [nxt] * base)
                compile_ops(nxt, ops, i + 1, None, cont)
        elif isinstance(op, PushR):
            if pending:
                mid = asm.label()
                _emit_push(asm, entry, _R, _S, base, pending, mid)
                entry = mid
            nxt = asm.label()
            _emit_push(asm, entry, _R, _S, base, digit[op.symbol], nxt)
            compile_ops(nxt, ops, i + 1, None, cont)
        elif isinstance(op, PushL):
            nxt = asm.label()
            _emit_push(asm, entry, _L, _S, base, digit[op.symbol], nxt)
            compile_ops(nxt, ops, i + 1, pending, cont)
        else:  # PopLToR
            if pending:
                mid = asm.label()
                _emit_push(asm, entry, _R, _S, base, pending, mid)
                entry = mid
            handlers = [asm.label() for _ in range(base)]
            _emit_divmod_dispatch(asm, entry, _L, _S, base, handlers)
            for e in range(base):
                moved = digit[tsm.blank] if e == 0 else e
                nxt = asm.label()
                _emit_push(asm, handlers[e], _R, _S, base, moved, nxt)
                compile_ops(nxt, ops, i + 1, None, cont)

    order = [tsm.initial] + [q for q in tsm.states if q != tsm.initial]
    for q in order:
        if q in tsm.halting:
            asm.mark(entry_of[q])
            asm.halt()
            continue
        handlers = [asm.label() for _ in range(base)]
        _emit_divmod_dispatch(asm, entry_of[q], _R, _S, base, handlers)
        for d in range(base):
            top = tsm.blank if d == 0 else tsm.alphabet[d - 1]
            target, ops = tsm.transitions[(q, top)]
            compile_ops(handlers[d], ops, 0, d, entry_of[target])

    resolved = asm.build()
    if asm._resolve(entry_label) != 0:
        raise AssertionError("compiled machine entry is not at index 0")
    instrs: list[McmInstruction] = []
    for t in resolved:
        if t[0] == "inc":
            instrs.append(McmInc(t[1], t[2]))
        elif t[0] == "jzdec":
            instrs.append(McmJzDec(t[1], t[2], t[3]))
        else:
            instrs.append(McmHalt())
    return MultiCounterMachine(tuple(instrs), 3)


def k_counters_to_two(mcm: MultiCounterMachine) -> Program:
    """Prime-exponent encoding: counter vector (c1..ck) lives in A as
    2^c1 * 3^c2 * 5^c3 * 7^c4, with B as scratch. A bootstrap INC(A)
    establishes A = 1 (the all-zero vector) before the first state."""
    k = mcm.num_counters
    if k > len(PRIMES):
        raise ReductionError(f"at most {len(PRIMES)} counters supported, got {k}")
    a, b = 0, 1
    asm = _Asm()
    entry_of = [asm.label(f"mcm_{i}") for i in range(len(mcm.instructions))]
    boot = asm.label("boot")
    asm.mark(boot)
    asm.inc(a, entry_of[0])
    for i, instr in enumerate(mcm.instructions):
        if isinstance(instr, McmInc):
            _emit_mul_const(asm, entry_of[i], a, b, PRIMES[instr.counter], entry_of[instr.next])
        elif isinstance(instr, McmJzDec):
            _emit_divide_or_restore(
                asm,
                entry_of[i],
                a,
                b,
                PRIMES[instr.counter],
                on_divisible=entry_of[instr.q_pos],
                on_indivisible=entry_of[instr.q_zero],
            )
        else:
            asm.mark(entry_of[i])
            asm.halt()
    resolved = asm.build()
    if asm._resolve(boot) != 0:
        raise AssertionError("bootstrap is not at index 0")
    counter_ids = (CounterId.A, CounterId.B)
    instrs: list = []
    for t in resolved:
        if t[0] == "inc":
            instrs.append(Inc(counter_ids[t[1]], t[2]))
        elif t[0] == "jzdec":
            instrs.append(JzDec(counter_ids[t[1]], t[2], t[3]))
        else:
            instrs.append(Halt())
    return Program(tuple(instrs))


# --- decoders ---------------------------------------------------------------


def decode_counters(config: Config, k: int) -> tuple[int, ...]:
    """Inverse of the prime-exponent encoding; errors on residue that is
    not a pure product of the first k primes."""
    if k > len(PRIMES):
        raise DecodeError(f"at most {len(PRIMES)} counters supported, got {k}")
    n = config.a
    if n < 1:
        raise DecodeError(f"A = {n} is not a product encoding (expected A >= 1)")
    vec = []
    for p in PRIMES[:k]:
        c = 0
        while n % p == 0:
            n //= p
            c += 1
        vec.append(c)
    if n != 1:
        raise DecodeError(f"non-conforming residue {n} after factoring out {PRIMES[:k]}")
    return tuple(vec)


def decode_stack(value: int, alphabet: tuple[str, ...]) -> tuple[str, ...]:
    """Numeral -> stack, bottom first. The least significant digit is the
    stack top; digit 0 never occurs inside a valid numeral."""
    base = len(alphabet) + 1
    top_first = []
    while value:
        d = value % base
        if d == 0:
            raise DecodeError(f"embedded stack-bottom digit in numeral {value}")
        top_first.append(alphabet[d - 1])
        value //= base
    return tuple(reversed(top_first))


# --- pipeline ----------------------------------------------------------------


@dataclass(frozen=True)
class PipelineReport:
    tm: TuringMachine
    tsm: TwoStackMachine
    mcm: MultiCounterMachine
    program: Program
    tm_result: TmResult
    tsm_result: TsmResult
    mcm_result: McmResult
    cm_result: RunResult
    mcm_tape: tuple[str, ...] | None
    cm_counters: tuple[int, ...] | None
    agreements: dict[str, bool | None]  # None = stage skipped (fuel exhausted)

    @property
    def ok(self) -> bool:
        return all(v is not False for v in self.agreements.values())


def run_pipeline(tm: TuringMachine, fuel_per_stage: int = 1_000_000) -> PipelineReport:
    tsm = tm_to_two_stack(tm)
    mcm = two_stack_to_counters(tsm)
    program = k_counters_to_two(mcm)

    tm_res = tm_run(tm, fuel_per_stage)
    tsm_res = tsm_run(tsm, fuel_per_stage)
    mcm_res = mcm_run(mcm, fuel_per_stage)
    cm_res = run(program, fuel=fuel_per_stage)

    agreements: dict[str, bool | None] = {}
    if tm_res.halted and tsm_res.halted:
        agreements["tm/tsm"] = tm_res.tape == tsm_res.tape
    else:
        agreements["tm/tsm"] = None if not (tm_res.halted or tsm_res.halted) else False

    mcm_tape = None
    if mcm_res.halted:
        left = decode_stack(mcm_res.counters[_L], tsm.alphabet)
        right = decode_stack(mcm_res.counters[_R], tsm.alphabet)
        mcm_tape = _stacks_to_tape(left, right, tsm.blank)
        agreements["tsm/mcm"] = tsm_res.halted and mcm_tape == tsm_res.tape
    else:
        agreements["tsm/mcm"] = None

    cm_counters = None
    if cm_res.halted:
        cm_counters = decode_counters(cm_res.final, mcm.num_counters)
        agreements["mcm/2cm"] = mcm_res.halted and cm_counters == mcm_res.counters
    else:
        agreements["mcm/2cm"] = None

    return PipelineReport(
        tm=tm,
        tsm=tsm,
        mcm=mcm,
        program=program,
        tm_result=tm_res,
        tsm_result=tsm_res,
        mcm_result=mcm_res,
        cm_result=cm_res,
        mcm_tape=mcm_tape,
        cm_counters=cm_counters,
        agreements=agreements,
    )
