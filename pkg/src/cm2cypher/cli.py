"""Command-line harness.

Commands: run, compile, eval, verify, reduce-tm, live.
Exit codes: 0 ok, 1 input error, 2 fuel exhausted, 3 connection failure,
4 semantic mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import reduction
from .codegen import (
    DEFAULT_MAX_PATH,
    DEFAULT_MAX_STEPS,
    gen_qpp_query,
    gen_qpp_setup,
    gen_reduce_query,
    gen_transactions_script,
)
from .cypher import CypherError, run_query_text
from .cypher.evaluator import format_results
from .frontend import (
    DocumentError,
    DslError,
    format_trace,
    from_map_document,
    parse_dsl,
    random_program,
    render_dsl,
)
from .machine import DEFAULT_FUEL, NoPath, Program, qpp_walk, run

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FUEL = 2
EXIT_CONNECTION = 3
EXIT_MISMATCH = 4


def _load_program(path: str) -> Program:
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".json":
        return from_map_document(json.loads(text))
    return parse_dsl(text)


def cmd_run(args) -> int:
    try:
        program = _load_program(args.program)
    except (OSError, DslError, DocumentError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    result = run(program, fuel=args.fuel, capture_trace=args.trace)
    if args.trace:
        print(format_trace(result, ascii_mode=args.ascii), end="")
    f = result.final
    status = "halted" if result.halted else "fuel-exhausted"
    print(f"{status} state={f.state} A={f.a} B={f.b} steps={result.machine_steps}")
    return EXIT_OK if result.halted else EXIT_FUEL


def cmd_compile(args) -> int:
    try:
        program = _load_program(args.program)
    except (OSError, DslError, DocumentError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = Path(args.program).stem
    written: list[Path] = []

    def emit(suffix: str, text: str):
        path = out_dir / f"{name}.{suffix}"
        path.write_text(text, encoding="utf-8")
        written.append(path)

    if args.approach == "reduce":
        emit("reduce.cypher", gen_reduce_query(program, args.max_steps).text)
    elif args.approach == "tx":
        bundle = gen_transactions_script(program, parameter_mode=args.parameter_mode)
        emit("tx.setup.cypher", bundle["setup"].text)
        emit("tx.main.cypher", bundle["main"].text)
        emit("tx.read.cypher", bundle["readback"].text)
        if bundle.parameters is not None:
            emit("tx.params.json", json.dumps(bundle.parameters, indent=2) + "\n")
    else:
        emit("qpp.setup.cypher", gen_qpp_setup(program).text)
        emit("qpp.query.cypher", gen_qpp_query(args.max_path).text)
    for path in written:
        print(path)
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        text = Path(args.query).read_text(encoding="utf-8")
        params = {}
        if args.params:
            params = json.loads(Path(args.params).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        results = run_query_text(text, params)
    except CypherError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(format_results(results))
    return EXIT_OK


def check_program_differential(program: Program, fuel: int) -> list[str]:
    """Evaluator-vs-interpreter equality, plus walk agreement when halting.
    Returns a list of failure descriptions (empty = pass)."""
    failures = []
    reference = run(program, fuel=fuel)
    expected = {"state": reference.final.state, "A": reference.final.a, "B": reference.final.b}
    evaluated = run_query_text(gen_reduce_query(program, fuel).text)["result"]
    if evaluated != expected:
        failures.append(f"evaluator {evaluated} != interpreter {expected}")
    if reference.halted:
        walk = qpp_walk(program, fuel=fuel)
        if walk.steps != reference.machine_steps - 1:
            failures.append(
                f"walk steps {walk.steps} != machine steps - 1 ({reference.machine_steps - 1})"
            )
        if (walk.final_a, walk.final_b) != (reference.final.a, reference.final.b):
            failures.append(
                f"walk counters ({walk.final_a}, {walk.final_b}) != "
                f"({reference.final.a}, {reference.final.b})"
            )
    return failures


def cmd_verify(args) -> int:
    if args.count < 1:
        print("error: --count must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    passed = failed = 0
    for i in range(args.count):
        seed = args.seed + i
        program = random_program(seed, args.max_states)
        failures = check_program_differential(program, args.fuel)
        if failures:
            failed += 1
            print(f"FAIL seed={seed}: " + "; ".join(failures))
            print(
                f"  reproduce: cm2cypher verify --seed {seed} --count 1 "
                f"--max-states {args.max_states} --fuel {args.fuel}"
            )
        else:
            passed += 1
    print(f"verify: {passed} passed, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_MISMATCH


def cmd_reduce_tm(args) -> int:
    try:
        tm = reduction.load_tm_file(args.machine)
    except (OSError, json.JSONDecodeError, reduction.FixtureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = reduction.run_pipeline(tm, fuel_per_stage=args.fuel_per_stage)
    rows = [
        ("tm", report.tm_result.halted, report.tm_result.steps, "".join(report.tm_result.tape)),
        ("tsm", report.tsm_result.halted, report.tsm_result.steps, "".join(report.tsm_result.tape)),
        (
            "mcm",
            report.mcm_result.halted,
            report.mcm_result.steps,
            "".join(report.mcm_tape) if report.mcm_tape is not None else "-",
        ),
        (
            "2cm",
            report.cm_result.halted,
            report.cm_result.machine_steps,
            str(report.cm_counters) if report.cm_counters is not None else "-",
        ),
    ]
    print("stage | halted | steps | observable")
    for name, halted, steps, obs in rows:
        print(f"{name:5} | {str(halted).lower():6} | {steps:7} | {obs}")
    for pair, outcome in report.agreements.items():
        note = "skipped (fuel exhausted)" if outcome is None else ("agree" if outcome else "DISAGREE")
        print(f"{pair}: {note}")
    out = Path(args.out) if args.out else Path(args.machine).with_suffix(".2cm")
    out.write_text(render_dsl(report.program), encoding="utf-8")
    print(f"wrote {out} ({len(report.program)} states)")
    if not report.ok:
        print("error: stage disagreement (compiler bug)", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


# --- live execution against a Cypher server --------------------------------


def _live_settings() -> tuple[str, str, str] | None:
    uri = os.environ.get("CYPHER_URI")
    user = os.environ.get("CYPHER_USER")
    password = os.environ.get("CYPHER_PASSWORD")
    if not uri or user is None or password is None:
        return None
    return uri, user, password


class _HttpQueryClient:
    """Minimal client for the HTTP query API (POST /db/<db>/query/v2)."""

    def __init__(self, uri: str, user: str, password: str, database: str = "neo4j"):
        self.base = uri.rstrip("/")
        self.auth = (user, password)
        self.database = database

    def query(self, statement: str, parameters: dict | None = None) -> list[dict]:
        import requests

        body: dict = {"statement": statement}
        if parameters:
            body["parameters"] = parameters
        resp = requests.post(
            f"{self.base}/db/{self.database}/query/v2",
            json=body,
            auth=self.auth,
            timeout=120,
        )
        resp.raise_for_status()
        data = resp.json()
        if data.get("errors"):
            raise RuntimeError(f"server error: {data['errors']}")
        result = data.get("data", {})
        fields = result.get("fields", [])
        return [dict(zip(fields, row)) for row in result.get("values", [])]


def cmd_live(args) -> int:
    import requests

    settings = _live_settings()
    if settings is None:
        print(
            "error: live execution needs CYPHER_URI, CYPHER_USER and CYPHER_PASSWORD",
            file=sys.stderr,
        )
        return EXIT_INPUT
    try:
        program = _load_program(args.program)
    except (OSError, DslError, DocumentError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    client = _HttpQueryClient(*settings)
    reference = run(program, fuel=args.fuel)
    try:
        if args.approach == "tx":
            client.query("MATCH (m:Machine) DETACH DELETE m")
            bundle = gen_transactions_script(program)
            client.query(bundle["setup"].text)
            try:
                client.query(bundle["main"].text)
            except RuntimeError:
                # the 1/0 halt guard surfaces as a statement error on some
                # configurations; the readback below decides correctness
                pass
            rows = client.query("MATCH (m:Machine) RETURN m.state AS state, m.A AS A, m.B AS B")
            client.query("MATCH (m:Machine) DETACH DELETE m")
            got = rows[0] if rows else None
            expected = {
                "state": reference.final.state,
                "A": reference.final.a,
                "B": reference.final.b,
            }
        else:
            client.query("MATCH (n:State) DETACH DELETE n")
            client.query(gen_qpp_setup(program).text)
            rows = client.query(gen_qpp_query(args.max_path).text)
            client.query("MATCH (n:State) DETACH DELETE n")
            got = rows[0] if rows else None
            walk = qpp_walk(program, fuel=args.fuel)
            expected = {"steps": walk.steps, "ctrA": walk.final_a, "ctrB": walk.final_b}
    except requests.RequestException as exc:
        print(f"error: connection failure: {exc}", file=sys.stderr)
        return EXIT_CONNECTION
    if got == expected:
        print(f"match: {got}")
        return EXIT_OK
    print(f"mismatch: server {got} != local {expected}", file=sys.stderr)
    return EXIT_MISMATCH


# --- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cm2cypher",
        description="2-counter machine toolkit with Cypher query generation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="interpret a program file")
    p.add_argument("program", help=".2cm DSL file or .json map-list document")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--trace", action="store_true", help="print the execution table")
    p.add_argument("--ascii", action="store_true", help="render arrows as '->'")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compile", help="generate Cypher query files")
    p.add_argument("program")
    p.add_argument("--approach", choices=("reduce", "tx", "qpp"), required=True)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--max-path", type=int, default=DEFAULT_MAX_PATH)
    p.add_argument("--parameter-mode", action="store_true",
                   help="tx: reference $program instead of inlining the list")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("eval", help="evaluate a pure-expression query in-process")
    p.add_argument("query")
    p.add_argument("--params", help="JSON file mapping parameter names to values")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="differential check on random programs")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--max-states", type=int, default=8)
    p.add_argument("--fuel", type=int, default=5000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce-tm", help="compile a Turing machine to a 2-counter program")
    p.add_argument("machine", help="machine description JSON")
    p.add_argument("--fuel-per-stage", type=int, default=DEFAULT_FUEL)
    p.add_argument("--out", help="output .2cm path (default: next to the input)")
    p.set_defaults(func=cmd_reduce_tm)

    p = sub.add_parser("live", help="execute generated queries against a live server")
    p.add_argument("program")
    p.add_argument("--approach", choices=("tx", "qpp"), required=True)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--max-path", type=int, default=DEFAULT_MAX_PATH)
    p.set_defaults(func=cmd_live)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoPath as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FUEL


def entrypoint():  # console-script shim
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
