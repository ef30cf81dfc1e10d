import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cm2cypher.machine import Config, Halt, Inc, run
from cm2cypher.reduction import (
    DecodeError,
    McmHalt,
    McmInc,
    McmJzDec,
    MultiCounterMachine,
    ReductionError,
    decode_counters,
    decode_stack,
    k_counters_to_two,
    load_tm,
    load_tm_file,
    mcm_run,
    run_pipeline,
    tm_run,
    tm_to_two_stack,
    tsm_run,
    two_stack_to_counters,
)
from conftest import FIXTURES

TM_DIR = FIXTURES / "tm"


def tm(name):
    return load_tm_file(TM_DIR / f"{name}.json")


# ---------------------------------------------------------------- loading


def test_load_tm_fixtures():
    for name in ("immediate_halt", "unary_successor", "right_move"):
        machine = tm(name)
        assert machine.initial in machine.states
        assert machine.blank in machine.alphabet


def test_load_tm_rejects_partial_transition_table():
    doc = json.loads((TM_DIR / "unary_successor.json").read_text())
    doc["transitions"] = doc["transitions"][:1]
    with pytest.raises(ReductionError):
        load_tm(doc)


def test_load_tm_rejects_bad_move():
    doc = json.loads((TM_DIR / "unary_successor.json").read_text())
    doc["transitions"][0][4] = "U"
    with pytest.raises(ReductionError):
        load_tm(doc)


# --------------------------------------------------------------- tm_run


def test_tm_run_unary_successor():
    result = tm_run(tm("unary_successor"), fuel=100)
    assert result.halted
    assert result.steps == 2
    assert result.tape == ("1", "1")


def test_tm_run_immediate_halt():
    result = tm_run(tm("immediate_halt"), fuel=100)
    assert result.halted
    assert result.steps == 0


def test_tm_run_fuel_zero():
    result = tm_run(tm("unary_successor"), fuel=0)
    assert not result.halted
    assert result.steps == 0


def test_tm_run_nonhalting_exhausts_fuel():
    spinner = load_tm(
        {
            "states": ["q0", "qh"],
            "alphabet": ["_"],
            "blank": "_",
            "transitions": [["q0", "_", "q0", "_", "R"]],
            "initial": "q0",
            "halting": ["qh"],
            "input": [],
        }
    )
    result = tm_run(spinner, fuel=50)
    assert not result.halted
    assert result.steps == 50


# ------------------------------------------------------- two-stack stage


def test_tsm_agrees_with_tm_on_fixtures():
    for name in ("immediate_halt", "unary_successor", "right_move"):
        machine = tm(name)
        tm_res = tm_run(machine, fuel=10_000)
        tsm_res = tsm_run(tm_to_two_stack(machine), fuel=10_000)
        assert tsm_res.halted == tm_res.halted
        assert tsm_res.tape == tm_res.tape
        # one stack step per tape step
        assert tsm_res.steps == tm_res.steps


def test_tsm_left_move_extends_tape():
    lefty = load_tm(
        {
            "states": ["q0", "q1", "qh"],
            "alphabet": ["a", "_"],
            "blank": "_",
            "transitions": [
                ["q0", "a", "q1", "a", "L"],
                ["q0", "_", "qh", "_", "L"],
                ["q1", "a", "qh", "a", "L"],
                ["q1", "_", "q0", "a", "R"],
            ],
            "initial": "q0",
            "halting": ["qh"],
            "input": ["a"],
        }
    )
    tm_res = tm_run(lefty, fuel=1000)
    tsm_res = tsm_run(tm_to_two_stack(lefty), fuel=1000)
    assert tm_res.halted and tsm_res.halted
    assert tsm_res.tape == tm_res.tape


# ------------------------------------------------------------ mcm stage


def test_mcm_inc_then_halt():
    mcm = MultiCounterMachine((McmInc(0, 1), McmInc(0, 2), McmHalt()), num_counters=1)
    result = mcm_run(mcm, fuel=100)
    assert result.halted
    assert result.counters == (2,)
    assert result.steps == 3


def test_mcm_jzdec_branches():
    mcm = MultiCounterMachine(
        (McmInc(0, 1), McmJzDec(0, 2, 1), McmHalt()), num_counters=1
    )
    result = mcm_run(mcm, fuel=100)
    assert result.halted
    assert result.counters == (0,)


def test_mcm_fuel_zero():
    result = mcm_run(MultiCounterMachine((McmHalt(),), num_counters=1), fuel=0)
    assert not result.halted


def test_mcm_validates_targets():
    with pytest.raises(ReductionError, match="dangling"):
        MultiCounterMachine((McmInc(0, 5),), num_counters=1)
    with pytest.raises(ReductionError, match="counter"):
        MultiCounterMachine((McmInc(3, 0),), num_counters=1)


def test_two_stack_to_counters_preserves_results():
    for name in ("immediate_halt", "unary_successor", "right_move"):
        tsm = tm_to_two_stack(tm(name))
        mcm = two_stack_to_counters(tsm)
        tsm_res = tsm_run(tsm, fuel=10_000)
        mcm_res = mcm_run(mcm, fuel=1_000_000)
        assert mcm_res.halted
        # scratch ends at zero; stacks decode to the same contents
        assert mcm_res.counters[2] == 0
        assert decode_stack(mcm_res.counters[0], tsm.alphabet) == tsm_res.left
        assert decode_stack(mcm_res.counters[1], tsm.alphabet) == tsm_res.right


# --------------------------------------------------------- 2-counter stage


def test_k_counters_to_two_trivial_machine():
    program = k_counters_to_two(MultiCounterMachine((McmHalt(),), num_counters=1))
    assert isinstance(program.instructions[0], Inc)
    result = run(program, fuel=100)
    assert result.halted
    # A = 1 encodes the all-zero counter vector
    assert result.final.a == 1
    assert result.final.b == 0


def test_k_counters_to_two_counts_match_mcm():
    mcm = MultiCounterMachine(
        (McmInc(0, 1), McmInc(1, 2), McmInc(0, 3), McmHalt()), num_counters=2
    )
    program = k_counters_to_two(mcm)
    result = run(program, fuel=100_000)
    assert result.halted
    # c1 = 2, c2 = 1 -> A = 2^2 * 3^1 = 12
    assert result.final.a == 12
    assert decode_counters(result.final, 2) == (2, 1)


def test_k_counters_to_two_jzdec_restores_on_zero():
    # JZDEC on an untouched counter must leave the encoding intact
    mcm = MultiCounterMachine(
        (McmInc(0, 1), McmJzDec(1, 2, 2), McmHalt()), num_counters=2
    )
    result = run(k_counters_to_two(mcm), fuel=100_000)
    assert result.halted
    assert decode_counters(result.final, 2) == (1, 0)


def test_k_counters_to_two_counter_limit():
    with pytest.raises(ReductionError, match="at most"):
        k_counters_to_two(
            MultiCounterMachine((McmHalt(),) * 1, num_counters=5)
        )


@given(
    counts=st.lists(st.integers(0, 4), min_size=1, max_size=3),
)
@settings(max_examples=30, deadline=None)
def test_k_counters_to_two_encodes_arbitrary_increments(counts):
    k = len(counts)
    instrs = []
    for c, n in enumerate(counts):
        instrs.extend(McmInc(c, len(instrs) + 1) for _ in range(n))
    instrs.append(McmHalt())
    mcm = MultiCounterMachine(tuple(instrs), num_counters=k)
    result = run(k_counters_to_two(mcm), fuel=10_000_000)
    assert result.halted
    assert decode_counters(result.final, k) == tuple(counts)


# ---------------------------------------------------------------- decoders


def test_decode_counters_examples():
    assert decode_counters(Config(-1, 12, 0), 2) == (2, 1)
    assert decode_counters(Config(-1, 1, 0), 4) == (0, 0, 0, 0)
    assert decode_counters(Config(-1, 360, 3), 3) == (3, 2, 1)


def test_decode_counters_rejects_foreign_factor():
    with pytest.raises(DecodeError, match="residue"):
        decode_counters(Config(-1, 10, 0), 2)


def test_decode_counters_rejects_zero():
    with pytest.raises(DecodeError):
        decode_counters(Config(-1, 0, 0), 2)


def test_decode_stack_examples():
    assert decode_stack(0, ("1", "_")) == ()
    # base 3, value 4 = 1*3 + 1: two '1' digits, LSD on top
    assert decode_stack(4, ("1", "_")) == ("1", "1")
    assert decode_stack(2, ("1", "_")) == ("_",)


def test_decode_stack_rejects_embedded_zero_digit():
    # base 3, value 3 has digits [0, 1]: a bottom marker inside the numeral
    with pytest.raises(DecodeError):
        decode_stack(3, ("1", "_"))


@given(
    stack=st.lists(st.sampled_from(["a", "b", "c"]), max_size=8),
)
@settings(max_examples=100, deadline=None)
def test_decode_stack_inverts_numeral_encoding(stack):
    alphabet = ("a", "b", "c")
    base = len(alphabet) + 1
    digit = {s: i + 1 for i, s in enumerate(alphabet)}
    value = 0
    for sym in stack:  # bottom first; top ends up least significant
        value = value * base + digit[sym]
    assert decode_stack(value, alphabet) == tuple(stack)


# ---------------------------------------------------------------- pipeline


@pytest.mark.parametrize("name", ["immediate_halt", "unary_successor", "right_move"])
def test_pipeline_end_to_end(name):
    report = run_pipeline(tm(name), fuel_per_stage=1_000_000)
    assert report.ok
    assert report.agreements == {"tm/tsm": True, "tsm/mcm": True, "mcm/2cm": True}
    assert report.mcm_tape == report.tm_result.tape


def test_pipeline_skips_unfinished_stages():
    report = run_pipeline(tm("unary_successor"), fuel_per_stage=10)
    # 10 steps halts the TM and the stack machine but not the counter stages
    assert report.agreements["tm/tsm"] is True
    assert report.agreements["tsm/mcm"] is None
    assert report.agreements["mcm/2cm"] is None
    assert report.ok
