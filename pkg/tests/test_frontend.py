import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cm2cypher.frontend import (
    DocumentError,
    DslError,
    format_trace,
    from_map_document,
    parse_dsl,
    random_program,
    render_dsl,
    to_map_document,
)
from cm2cypher.machine import (
    Config,
    CounterId,
    Halt,
    Inc,
    JzDec,
    Program,
    run,
)
from conftest import FIXTURES

DEMO = Program(
    (
        Inc(CounterId.A, 1),
        JzDec(CounterId.B, 2, 3),
        Inc(CounterId.B, 0),
        Halt(),
    )
)

DEMO_MAPS = [
    {"state": 0, "op": "INC", "counter": "A", "next": 1},
    {"state": 1, "op": "JZDEC", "counter": "B", "q_zero": 2, "q_pos": 3},
    {"state": 2, "op": "INC", "counter": "B", "next": 0},
    {"state": 3, "op": "HALT", "counter": "", "next": 3},
]


def test_parse_dsl_demo():
    text = "state 0: INC A -> 1\nstate 1: JZDEC B ? 2 : 3\nstate 2: INC B -> 0\nstate 3: HALT"
    assert parse_dsl(text) == DEMO


def test_parse_dsl_minimal():
    assert parse_dsl("state 0: HALT") == Program((Halt(),))


def test_parse_dsl_unknown_counter():
    with pytest.raises(DslError, match="unknown counter 'C'"):
        parse_dsl("state 0: INC C -> 0")


def test_parse_dsl_comments_blank_lines_and_order():
    text = "# comment\n\nstate 1: HALT\nstate 0: INC B -> 1  # trailing\n"
    assert parse_dsl(text) == Program((Inc(CounterId.B, 1), Halt()))


def test_parse_dsl_duplicate_state():
    with pytest.raises(DslError, match="duplicate state 0"):
        parse_dsl("state 0: HALT\nstate 0: HALT")


def test_parse_dsl_sparse_states_rejected():
    with pytest.raises(DslError, match="missing state 1"):
        parse_dsl("state 0: HALT\nstate 2: HALT")


def test_parse_dsl_dangling_reference():
    with pytest.raises(DslError, match="dangling"):
        parse_dsl("state 0: INC A -> 7")


def test_parse_dsl_syntax_error_position():
    with pytest.raises(DslError) as exc_info:
        parse_dsl("state 0: HALT\nbogus line")
    assert exc_info.value.line == 2


def test_to_map_document_demo():
    assert to_map_document(DEMO) == DEMO_MAPS


def test_to_map_document_halt_convention():
    assert to_map_document(Program((Halt(),))) == [
        {"state": 0, "op": "HALT", "counter": "", "next": 0}
    ]


def test_from_map_document_demo():
    assert from_map_document(DEMO_MAPS) == DEMO


def test_bundled_map_document_is_demo():
    doc = json.loads((FIXTURES / "demo.maps.json").read_text())
    assert from_map_document(doc) == DEMO
    assert to_map_document(DEMO) == doc


def test_from_map_document_empty():
    with pytest.raises(DocumentError, match="empty"):
        from_map_document([])


def test_from_map_document_state_position_mismatch():
    with pytest.raises(DocumentError, match="position"):
        from_map_document([{"state": 1, "op": "HALT", "counter": "", "next": 1}])


def test_from_map_document_missing_jzdec_targets():
    with pytest.raises(DocumentError, match="q_zero"):
        from_map_document([{"state": 0, "op": "JZDEC", "counter": "A", "next": 0}])


@given(seed=st.integers(0, 100_000))
@settings(max_examples=200, deadline=None)
def test_map_document_round_trip(seed):
    program = random_program(seed, 10)
    assert from_map_document(to_map_document(program)) == program


@given(seed=st.integers(0, 100_000))
@settings(max_examples=200, deadline=None)
def test_dsl_round_trip(seed):
    program = random_program(seed, 10)
    assert parse_dsl(render_dsl(program)) == program


def _cells(table: str) -> list[list[str]]:
    rows = []
    for line in table.splitlines():
        if "|" in line and not set(line) <= set("-+| "):
            rows.append([cell.strip() for cell in line.split("|")])
    return rows


def test_format_trace_demo_matches_reference_table():
    result = run(DEMO, fuel=100, capture_trace=True)
    rows = _cells(format_trace(result))
    assert rows[0] == ["Step", "Instr", "St", "A", "B"]
    assert rows[1:] == [
        ["0", "INC(A)", "q0", "0→1", "0"],
        ["1", "JZDEC(B), B=0", "q1", "1", "0"],
        ["2", "INC(B)", "q2", "1", "0→1"],
        ["3", "INC(A)", "q0", "1→2", "1"],
        ["4", "JZDEC(B), B>0", "q1", "2", "1→0"],
        ["5", "HALT", "q3", "2", "0"],
    ]


def test_format_trace_ascii_mode():
    result = run(DEMO, fuel=100, capture_trace=True)
    table = format_trace(result, ascii_mode=True)
    assert "0->1" in table
    assert "→" not in table


def test_format_trace_single_halt():
    result = run(Program((Halt(),)), fuel=10, capture_trace=True)
    rows = _cells(format_trace(result))
    assert rows[1] == ["0", "HALT", "q0", "0", "0"]


def test_format_trace_truncation_footer():
    p = Program((Inc(CounterId.A, 0),))
    result = run(p, fuel=30, capture_trace=True, trace_cap=5)
    table = format_trace(result)
    assert "truncated" in table.splitlines()[-1]


def test_format_trace_requires_trace():
    result = run(DEMO, fuel=100)
    with pytest.raises(ValueError):
        format_trace(result)


def test_random_program_deterministic():
    assert random_program(0, 4) == random_program(0, 4)


def test_random_program_single_state_is_halt():
    assert random_program(5, 1) == Program((Halt(),))


def test_random_program_corpus_valid():
    for seed in range(1, 101):
        program = random_program(seed, 8)
        assert any(isinstance(i, Halt) for i in program.instructions)
        # Program construction re-validates target ranges
        assert Program(program.instructions) == program


def test_bundled_demo_file(demo):
    assert demo == DEMO
