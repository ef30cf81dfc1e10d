import json

import pytest

from cm2cypher.cli import (
    EXIT_CONNECTION,
    EXIT_FUEL,
    EXIT_INPUT,
    EXIT_MISMATCH,
    EXIT_OK,
    check_program_differential,
    main,
)
from cm2cypher.frontend import parse_dsl, random_program
from cm2cypher.machine import run
from conftest import FIXTURES

DEMO_PATH = str(FIXTURES / "demo.2cm")
DEMO_JSON = str(FIXTURES / "demo.maps.json")


# ---------------------------------------------------------------------- run


def test_run_demo(capsys):
    assert main(["run", DEMO_PATH]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "halted state=-1 A=2 B=0 steps=6"


def test_run_json_document(capsys):
    assert main(["run", DEMO_JSON]) == EXIT_OK
    assert "A=2 B=0" in capsys.readouterr().out


def test_run_trace(capsys):
    assert main(["run", DEMO_PATH, "--trace", "--ascii"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Step | Instr" in out
    assert "0->1" in out


def test_run_fuel_exhausted(tmp_path, capsys):
    looper = tmp_path / "loop.2cm"
    looper.write_text("state 0: INC A -> 0\n")
    assert main(["run", str(looper), "--fuel", "3"]) == EXIT_FUEL
    assert capsys.readouterr().out.startswith("fuel-exhausted")


def test_run_missing_file(capsys):
    assert main(["run", "/nonexistent.2cm"]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_run_bad_dsl(tmp_path, capsys):
    bad = tmp_path / "bad.2cm"
    bad.write_text("state 0: WAT\n")
    assert main(["run", str(bad)]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


# ------------------------------------------------------------------ compile


def test_compile_reduce(tmp_path, capsys):
    assert main(["compile", DEMO_PATH, "--approach", "reduce", "--out-dir", str(tmp_path)]) == EXIT_OK
    out_file = tmp_path / "demo.reduce.cypher"
    assert out_file.exists()
    assert str(out_file) in capsys.readouterr().out
    assert out_file.read_text().startswith("CYPHER 25")


def test_compile_tx(tmp_path):
    assert main(["compile", DEMO_PATH, "--approach", "tx", "--out-dir", str(tmp_path)]) == EXIT_OK
    for suffix in ("tx.setup", "tx.main", "tx.read"):
        assert (tmp_path / f"demo.{suffix}.cypher").exists()
    assert not (tmp_path / "demo.tx.params.json").exists()


def test_compile_tx_parameter_mode(tmp_path):
    assert main([
        "compile", DEMO_PATH, "--approach", "tx", "--parameter-mode",
        "--out-dir", str(tmp_path),
    ]) == EXIT_OK
    params = json.loads((tmp_path / "demo.tx.params.json").read_text())
    assert params["program"][0]["op"] == "INC"
    assert "$program" in (tmp_path / "demo.tx.main.cypher").read_text()


def test_compile_qpp(tmp_path):
    assert main(["compile", DEMO_PATH, "--approach", "qpp", "--out-dir", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "demo.qpp.setup.cypher").exists()
    assert (tmp_path / "demo.qpp.query.cypher").exists()


# --------------------------------------------------------------------- eval


def test_eval_compiled_query_matches_interpreter(tmp_path, capsys):
    main(["compile", DEMO_PATH, "--approach", "reduce", "--out-dir", str(tmp_path)])
    capsys.readouterr()
    assert main(["eval", str(tmp_path / "demo.reduce.cypher")]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "{A:2, B:0, state:-1}"


def test_eval_with_params(tmp_path, capsys):
    query = tmp_path / "q.cypher"
    query.write_text("RETURN $n * 2 AS doubled")
    params = tmp_path / "p.json"
    params.write_text('{"n": 21}')
    assert main(["eval", str(query), "--params", str(params)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "{doubled:42}"


def test_eval_unsupported_feature(tmp_path, capsys):
    query = tmp_path / "q.cypher"
    query.write_text("MATCH (n) RETURN n")
    assert main(["eval", str(query)]) == EXIT_INPUT
    assert "MATCH" in capsys.readouterr().err


def test_eval_runtime_error(tmp_path, capsys):
    query = tmp_path / "q.cypher"
    query.write_text("RETURN 1/0")
    assert main(["eval", str(query)]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


# ------------------------------------------------------------------- verify


def test_verify_small_batch(capsys):
    assert main(["verify", "--seed", "42", "--count", "10", "--fuel", "2000"]) == EXIT_OK
    assert "10 passed, 0 failed" in capsys.readouterr().out


def test_verify_rejects_bad_count(capsys):
    assert main(["verify", "--count", "0"]) == EXIT_INPUT


def test_differential_check_is_clean_on_random_programs():
    for seed in range(50):
        assert check_program_differential(random_program(seed, 8), 2000) == []


def test_differential_check_detects_injected_mutation(monkeypatch):
    # corrupt the generated query so the evaluator disagrees on purpose
    import cm2cypher.cli as cli_mod
    from cm2cypher.codegen import gen_reduce_query as real_gen

    def sabotaged(program, max_steps):
        q = real_gen(program, max_steps)
        object.__setattr__(q, "text", q.text.replace("A: machine.A + 1", "A: machine.A + 2"))
        return q

    monkeypatch.setattr(cli_mod, "gen_reduce_query", sabotaged)
    program = parse_dsl((FIXTURES / "demo.2cm").read_text())
    failures = check_program_differential(program, 2000)
    assert failures and "evaluator" in failures[0]


def test_verify_reports_failures(monkeypatch, capsys):
    import cm2cypher.cli as cli_mod

    monkeypatch.setattr(cli_mod, "check_program_differential", lambda p, f: ["boom"])
    assert main(["verify", "--count", "2"]) == EXIT_MISMATCH
    out = capsys.readouterr().out
    assert "FAIL seed=42" in out
    assert "reproduce:" in out


# ---------------------------------------------------------------- reduce-tm


def test_reduce_tm(tmp_path, capsys):
    out = tmp_path / "unary.2cm"
    assert main([
        "reduce-tm", str(FIXTURES / "tm" / "unary_successor.json"), "--out", str(out),
    ]) == EXIT_OK
    text = capsys.readouterr().out
    assert "tm/tsm: agree" in text
    assert "mcm/2cm: agree" in text
    # the emitted program is itself runnable and halts
    result = run(parse_dsl(out.read_text()), fuel=1_000_000)
    assert result.halted


def test_reduce_tm_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["reduce-tm", str(bad)]) == EXIT_INPUT


# --------------------------------------------------------------------- live


def test_live_requires_environment(monkeypatch, capsys):
    for var in ("CYPHER_URI", "CYPHER_USER", "CYPHER_PASSWORD"):
        monkeypatch.delenv(var, raising=False)
    assert main(["live", DEMO_PATH, "--approach", "tx"]) == EXIT_INPUT
    assert "CYPHER_URI" in capsys.readouterr().err


def test_live_unreachable_server(monkeypatch, capsys):
    monkeypatch.setenv("CYPHER_URI", "http://127.0.0.1:9")
    monkeypatch.setenv("CYPHER_USER", "neo4j")
    monkeypatch.setenv("CYPHER_PASSWORD", "x")
    assert main(["live", DEMO_PATH, "--approach", "tx"]) == EXIT_CONNECTION
    assert "connection failure" in capsys.readouterr().err


@pytest.mark.skipif(
    not all(__import__("os").environ.get(v) for v in ("CYPHER_URI", "CYPHER_USER")),
    reason="no live Cypher server configured",
)
@pytest.mark.parametrize("approach", ["tx", "qpp"])
def test_live_against_configured_server(approach):
    assert main(["live", DEMO_PATH, "--approach", approach]) == EXIT_OK
