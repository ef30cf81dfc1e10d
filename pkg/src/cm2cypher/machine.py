"""2-counter machine model: instructions, configurations, and interpreters.

A machine is a dense list of instructions indexed by control state; state 0
is the initial state and state -1 denotes "halted". Counters A and B are
64-bit non-negative integers. Three execution views are provided:

* ``step`` / ``run``  -- the ground-truth fold interpreter,
* ``qpp_walk``        -- a deterministic guarded walk over the implied
  state graph, mirroring the pruned quantified-path-pattern traversal
  (edges INC / JZDEC_ZERO / JZDEC_POS, predicate on the post-update
  accumulator).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

INT64_MAX = 2**63 - 1
HALTED = -1
DEFAULT_FUEL = 1_000_000
DEFAULT_TRACE_CAP = 10_000


class MachineError(Exception):
    """Base class for machine-model errors."""


class CounterOverflow(MachineError):
    """A counter exceeded the signed 64-bit range."""


class InvalidProgram(MachineError):
    """Program violates a structural invariant."""


class NoPath(MachineError):
    """qpp_walk exhausted its fuel before reaching a halt state."""


class CounterId(Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class Inc:
    counter: CounterId
    next: int


@dataclass(frozen=True)
class JzDec:
    counter: CounterId
    q_zero: int
    q_pos: int


@dataclass(frozen=True)
class Halt:
    pass


Instruction = Inc | JzDec | Halt


@dataclass(frozen=True)
class Program:
    """Dense, deterministic instruction table; one instruction per state."""

    instructions: tuple[Instruction, ...]

    def __post_init__(self):
        if not self.instructions:
            raise InvalidProgram("program must have at least one state")
        n = len(self.instructions)
        for i, instr in enumerate(self.instructions):
            if isinstance(instr, Inc):
                targets = (instr.next,)
            elif isinstance(instr, JzDec):
                targets = (instr.q_zero, instr.q_pos)
            elif isinstance(instr, Halt):
                targets = ()
            else:
                raise InvalidProgram(f"state {i}: not an instruction: {instr!r}")
            for t in targets:
                if not (0 <= t < n):
                    raise InvalidProgram(
                        f"state {i}: dangling reference to state {t} "
                        f"(valid range 0..{n - 1})"
                    )

    def __len__(self) -> int:
        return len(self.instructions)

    def __getitem__(self, state: int) -> Instruction:
        return self.instructions[state]


@dataclass(frozen=True)
class Config:
    """Machine snapshot. state == -1 means halted; counters never negative."""

    state: int
    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError(f"negative counter in {self}")

    @property
    def halted(self) -> bool:
        return self.state == HALTED


@dataclass(frozen=True)
class TraceRow:
    step: int
    state_before: int
    instruction_tag: str
    config_after: Config


@dataclass(frozen=True)
class RunResult:
    final: Config
    machine_steps: int
    halted: bool
    trace: tuple[TraceRow, ...] | None = None
    trace_truncated: bool = False


@dataclass(frozen=True)
class PathResult:
    edge_tags: tuple[str, ...]
    steps: int
    final_a: int
    final_b: int


def _checked_inc(value: int) -> int:
    if value >= INT64_MAX:
        raise CounterOverflow(f"counter exceeds {INT64_MAX}")
    return value + 1


def _step_raw(program: Program, state: int, a: int, b: int) -> tuple[int, int, int, str]:
    """One executed instruction. Caller guarantees state is a valid index."""
    instr = program.instructions[state]
    if isinstance(instr, Inc):
        name = instr.counter.value
        if instr.counter is CounterId.A:
            return instr.next, _checked_inc(a), b, f"INC({name})"
        return instr.next, a, _checked_inc(b), f"INC({name})"
    if isinstance(instr, JzDec):
        name = instr.counter.value
        c = a if instr.counter is CounterId.A else b
        if c == 0:
            return instr.q_zero, a, b, f"JZDEC({name}), {name}=0"
        if instr.counter is CounterId.A:
            return instr.q_pos, a - 1, b, f"JZDEC({name}), {name}>0"
        return instr.q_pos, a, b - 1, f"JZDEC({name}), {name}>0"
    return HALTED, a, b, "HALT"


def step(program: Program, config: Config) -> Config:
    """Apply one machine step; the halted configuration is a fixed point."""
    if config.state == HALTED:
        return config
    if not (0 <= config.state < len(program)):
        raise InvalidProgram(f"state {config.state} out of range for program")
    state, a, b, _ = _step_raw(program, config.state, config.a, config.b)
    return Config(state, a, b)


def run(
    program: Program,
    fuel: int = DEFAULT_FUEL,
    capture_trace: bool = False,
    trace_cap: int = DEFAULT_TRACE_CAP,
    start: Config | None = None,
) -> RunResult:
    """Execute at most ``fuel`` instructions from (0, 0, 0), stopping at halt.

    ``machine_steps`` counts executed instructions, including the HALT
    instruction itself; post-halt absorption never executes.
    """
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    if start is None:
        state, a, b = 0, 0, 0
    else:
        state, a, b = start.state, start.a, start.b
    trace: list[TraceRow] = []
    truncated = False
    steps = 0
    while steps < fuel and state != HALTED:
        before = state
        state, a, b, tag = _step_raw(program, state, a, b)
        if capture_trace:
            if len(trace) < trace_cap:
                trace.append(TraceRow(steps, before, tag, Config(state, a, b)))
            else:
                truncated = True
        steps += 1
    final = Config(state, a, b)
    return RunResult(
        final=final,
        machine_steps=steps,
        halted=state == HALTED,
        trace=tuple(trace) if capture_trace else None,
        trace_truncated=truncated,
    )


def _is_halt_state(program: Program, state: int) -> bool:
    return isinstance(program.instructions[state], Halt)


def qpp_walk(program: Program, fuel: int = DEFAULT_FUEL) -> PathResult:
    """Walk the implied state graph from state 0 to a halt-labelled node.

    Edge guards mirror the traversal predicate: INC always passes,
    JZDEC_ZERO requires the counter to be 0 (accumulator unchanged), and
    JZDEC_POS requires the post-decrement value to be >= 0. Exactly one
    guard passes per state, which is asserted rather than assumed. HALT
    contributes no edge, so a halting run of n instructions walks n-1 edges.
    """
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    state, a, b = 0, 0, 0
    tags: list[str] = []
    while not _is_halt_state(program, state):
        if len(tags) >= fuel:
            raise NoPath(f"no path to a halt state within {fuel} edges")
        instr = program.instructions[state]
        if isinstance(instr, Inc):
            name = instr.counter.value
            if instr.counter is CounterId.A:
                a = _checked_inc(a)
            else:
                b = _checked_inc(b)
            tags.append(f"INC({name})")
            state = instr.next
        else:
            name = instr.counter.value
            c = a if instr.counter is CounterId.A else b
            zero_ok = c == 0
            pos_ok = c - 1 >= 0
            assert zero_ok != pos_ok, "guards must be mutually exclusive"
            if zero_ok:
                tags.append(f"JZDEC_ZERO({name})")
                state = instr.q_zero
            else:
                if instr.counter is CounterId.A:
                    a -= 1
                else:
                    b -= 1
                tags.append(f"JZDEC_POS({name})")
                state = instr.q_pos
    return PathResult(tuple(tags), len(tags), a, b)
