"""Command-line front end: check, query, oracle, bench and an interactive REPL."""
from __future__ import annotations

import argparse
import shlex
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .bench import format_table, run_bench, write_csv
from .cotree import DEFAULT_BUDGET, BudgetExceeded, build_cotree, find_success_subtree
from .derive import DeriveOptions, NotGuardedError, derive_answers
from .guard import guard_program
from .sld import NonGroundProgramError, ground_tp, sld_solve
from .syntax import ParseError, SourceProgram, export_dot, format_answer, load_program, parse_goal
from .terms import apply_substitution, max_generation, variables_of

EXIT_OK, EXIT_NOT_GUARDED, EXIT_LOAD_ERROR = 0, 1, 2

STATUS_TEXT = {
    "exhausted": "search exhausted",
    "state-limit": "state limit reached",
    "answer-limit": "answer limit reached",
}


@dataclass(frozen=True)
class SessionConfig:
    program_path: str | None = None
    workers: int = 1
    node_budget: int = DEFAULT_BUDGET
    max_answers: int = 10
    max_states: int = 100_000
    ordered: bool = True
    force: bool = False
    dot_path: str | None = None
    solved: bool = False

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.node_budget < 1 or self.max_states < 1 or self.max_answers < 1:
            raise ValueError("budgets must be positive")

    def derive_options(self) -> DeriveOptions:
        return DeriveOptions(
            workers=self.workers,
            node_budget=self.node_budget,
            max_states=self.max_states,
            max_answers=self.max_answers,
            ordered=self.ordered,
            force=self.force,
        )


def _print_diagnostics(src: SourceProgram, out):
    where = src.path or "<input>"
    for d in src.diagnostics:
        print(f"{where}:{d}", file=out)


def _load(path, out) -> SourceProgram | None:
    src = load_program(path)
    if src.program is None:
        _print_diagnostics(src, out)
        return None
    return src


def _dot_target(base: str, i: int) -> Path:
    p = Path(base)
    if i == 1:
        return p
    return p.with_name(f"{p.stem}.{i}{p.suffix}")


def cmd_check(path, budget: int = DEFAULT_BUDGET, out=None) -> int:
    out = out or sys.stdout
    src = _load(path, out)
    if src is None:
        return EXIT_LOAD_ERROR
    report = guard_program(src.program, budget)
    print(report.format(), file=out)
    return EXIT_OK if report.guarded else EXIT_NOT_GUARDED


def run_query(program, goal_text: str, config: SessionConfig, out=None) -> int:
    out = out or sys.stdout
    try:
        goal = parse_goal(goal_text)
    except ParseError as e:
        for d in e.diagnostics:
            print(f"goal:{d}", file=out)
        return EXIT_LOAD_ERROR
    try:
        stream = derive_answers(program, goal, options=config.derive_options())
    except NotGuardedError as e:
        print(str(e).replace("use force", "use --force"), file=out)
        return EXIT_NOT_GUARDED
    goal_vars = variables_of(goal)
    n = 0
    try:
        for ans in stream:
            n += 1
            text = format_answer(ans.chain, goal_vars, config.solved)
            print(f"answer {n} (rank {ans.rank}): {text}", file=out)
            if config.dot_path:
                target = _dot_target(config.dot_path, n)
                target.write_text(export_dot(ans.tree), encoding="utf-8")
    except BudgetExceeded as e:
        print(f"error: {e}", file=out)
        return EXIT_NOT_GUARDED
    status = STATUS_TEXT.get(stream.status, stream.status)
    if n == 0:
        print(f"no answers ({status})", file=out)
    else:
        print(f"{n} answer{'s' if n != 1 else ''} ({status})", file=out)
    return EXIT_OK


def cmd_query(path, goal_text: str, config: SessionConfig, out=None) -> int:
    out = out or sys.stdout
    src = _load(path, out)
    if src is None:
        return EXIT_LOAD_ERROR
    return run_query(src.program, goal_text, config, out)


def run_oracle(program, goal_text: str, config: SessionConfig, depth: int = 30, out=None) -> int:
    """Compare SLD resolution, the coinductive engine and, for ground
    programs, the least Herbrand model on one goal.  Returns 0 when all
    engines agree."""
    out = out or sys.stdout
    try:
        goal = parse_goal(goal_text)
    except ParseError as e:
        for d in e.diagnostics:
            print(f"goal:{d}", file=out)
        return EXIT_LOAD_ERROR
    agree = True
    sld = sld_solve(program, goal, depth, config.max_answers, strategy="bounded")
    goal_vars = variables_of(goal)
    if sld.answers:
        print(f"sld: {len(sld.answers)} answer(s) within depth {depth}", file=out)
    else:
        print(f"sld: no refutation within depth {depth} ({sld.status})", file=out)
    for theta in sld.answers:
        inst = apply_substitution(goal, theta)
        try:
            tree = build_cotree(program, inst, config.node_budget, max_generation(inst) + 1)
            ok = find_success_subtree(tree) is not None
        except BudgetExceeded:
            ok = False
        agree = agree and ok
        print(f"  {format_answer(theta, goal_vars)}: success subtree {'yes' if ok else 'NO'}", file=out)

    try:
        stream = derive_answers(program, goal, options=config.derive_options())
        found = list(stream)
        status = STATUS_TEXT.get(stream.status, stream.status)
        print(f"coalp: {len(found)} answer(s) ({status})", file=out)
        coalp_success = bool(found)
    except NotGuardedError:
        print("coalp: skipped (program not guarded; use --force)", file=out)
        coalp_success = None

    sld_success = bool(sld.answers)
    if coalp_success is not None and (sld.status == "complete" or sld_success):
        agree = agree and coalp_success == sld_success

    if program.is_ground and goal.is_ground:
        try:
            member = goal in ground_tp(program)
        except NonGroundProgramError:  # pragma: no cover - guarded by is_ground
            member = None
        print(f"tp: {goal} {'in' if member else 'not in'} least model", file=out)
        agree = agree and member == sld_success
        if coalp_success is not None:
            agree = agree and member == coalp_success
    print(f"agreement: {'yes' if agree else 'NO'}", file=out)
    return EXIT_OK if agree else EXIT_NOT_GUARDED


def cmd_oracle(path, goal_text, config, depth=30, out=None) -> int:
    out = out or sys.stdout
    src = _load(path, out)
    if src is None:
        return EXIT_LOAD_ERROR
    return run_oracle(src.program, goal_text, config, depth, out)


def cmd_bench(seed, sizes, workers, out_dir=None, csv_path=None, program_files=(), out=None) -> int:
    out = out or sys.stdout
    programs = None
    if program_files:
        programs = {Path(p).stem: Path(p).read_text(encoding="utf-8") for p in program_files}
    result = run_bench(seed, sizes, workers, out_dir, programs)
    print(format_table(result.rows), file=out)
    if csv_path:
        write_csv(result.rows, csv_path)
        print(f"wrote {csv_path}", file=out)
    for name, w in result.mismatches:
        print(f"MISMATCH: {name} with {w} workers disagrees with the fixpoint oracle", file=out)
    return EXIT_OK if result.ok else EXIT_NOT_GUARDED


# -- REPL --------------------------------------------------------------------

_SETTABLE = {f.name: f.type for f in fields(SessionConfig) if f.name != "program_path"}

REPL_HELP = """commands:
  :load PATH        load a program
  :check            run the guardedness checks
  :query GOAL       enumerate answers (a bare goal works too)
  :set KEY VALUE    change a setting (workers, node_budget, max_answers,
                    max_states, ordered, force, solved, dot_path)
  :dot PATH         write success trees of later queries to PATH
  :show             print the loaded program and settings
  :quit             leave"""


def _coerce(key: str, value: str):
    kind = _SETTABLE[key]
    if kind == "bool":
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean for {key}, got {value!r}")
    if kind == "int":
        return int(value)
    return None if value.lower() in ("none", "-") else value


def repl(config: SessionConfig = SessionConfig(), stdin=None, out=None) -> int:
    stdin = stdin or sys.stdin
    out = out or sys.stdout
    program = None
    if config.program_path:
        src = _load(config.program_path, out)
        program = src.program if src else None
    interactive = hasattr(stdin, "isatty") and stdin.isatty()
    while True:
        if interactive:
            print("coalp> ", end="", file=out, flush=True)
        line = stdin.readline()
        if not line:
            return EXIT_OK
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        cmd, _, arg = line.partition(" ")
        arg = arg.strip()
        try:
            if cmd in (":quit", ":q", ":exit"):
                return EXIT_OK
            elif cmd == ":help":
                print(REPL_HELP, file=out)
            elif cmd == ":load":
                src = _load(arg, out)
                if src is not None:
                    program = src.program
                    config = replace(config, program_path=arg)
                    print(f"loaded {len(program)} clauses from {arg}", file=out)
            elif cmd == ":check":
                if program is None:
                    print("no program loaded", file=out)
                else:
                    print(guard_program(program, config.node_budget).format(), file=out)
            elif cmd == ":set":
                parts = shlex.split(arg)
                if len(parts) != 2 or parts[0] not in _SETTABLE:
                    print(f"usage: :set KEY VALUE with KEY in {', '.join(_SETTABLE)}", file=out)
                else:
                    config = replace(config, **{parts[0]: _coerce(*parts)})
                    print(f"{parts[0]} = {getattr(config, parts[0])}", file=out)
            elif cmd == ":dot":
                config = replace(config, dot_path=arg or None)
                print(f"dot_path = {config.dot_path}", file=out)
            elif cmd == ":show":
                if program is not None:
                    print(str(program), file=out)
                print(config, file=out)
            elif cmd == ":query" or not cmd.startswith(":"):
                goal = arg if cmd == ":query" else line
                if program is None:
                    print("no program loaded", file=out)
                else:
                    run_query(program, goal, config, out)
            else:
                print(f"unknown command {cmd}; try :help", file=out)
        except (ValueError, OSError) as e:
            print(f"error: {e}", file=out)


# -- argument parsing --------------------------------------------------------


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _add_search_flags(p):
    p.add_argument("--answers", type=_positive, default=10, help="stop after N answers")
    p.add_argument("--states", type=_positive, default=100_000, help="stop after N derivation states")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="node budget per coinductive tree")
    p.add_argument("--workers", type=_positive, default=1)
    order = p.add_mutually_exclusive_group()
    order.add_argument("--ordered", dest="ordered", action="store_true", default=True)
    order.add_argument("--unordered", dest="ordered", action="store_false")
    p.add_argument("--force", action="store_true", help="run even if the program is not guarded")
    p.add_argument("--dot", metavar="PATH", help="write each success tree as DOT")
    p.add_argument("--solved", action="store_true", help="print composed bindings of goal variables")


def _config(args) -> SessionConfig:
    return SessionConfig(
        program_path=getattr(args, "program", None),
        workers=args.workers,
        node_budget=args.budget,
        max_answers=args.answers,
        max_states=args.states,
        ordered=args.ordered,
        force=args.force,
        dot_path=args.dot,
        solved=args.solved,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coalp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the guardedness checks on a program")
    p.add_argument("program")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)

    p = sub.add_parser("query", help="enumerate answers to an atomic goal")
    p.add_argument("program")
    p.add_argument("goal")
    _add_search_flags(p)

    p = sub.add_parser("oracle", help="cross-check a goal against SLD and T_P")
    p.add_argument("program")
    p.add_argument("goal")
    p.add_argument("--depth", type=int, default=30, help="SLD depth bound")
    _add_search_flags(p)

    p = sub.add_parser("bench", help="time seeded Datalog programs at several worker counts")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--sizes", type=_int_list, default=[2, 4])
    p.add_argument("--workers", type=_int_list, default=[1, 2, 4])
    p.add_argument("--out-dir", help="directory for generated program files")
    p.add_argument("--csv", help="write the timing table as CSV")
    p.add_argument("--program", action="append", default=[], help="bench a Datalog file instead")

    p = sub.add_parser("repl", help="interactive session")
    p.add_argument("program", nargs="?")
    _add_search_flags(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args.program, args.budget)
    if args.command == "query":
        return cmd_query(args.program, args.goal, _config(args))
    if args.command == "oracle":
        return cmd_oracle(args.program, args.goal, _config(args), args.depth)
    if args.command == "bench":
        if any(w < 1 for w in args.workers):
            print("workers must be positive", file=sys.stderr)
            return EXIT_LOAD_ERROR
        return cmd_bench(args.seed, args.sizes, args.workers, args.out_dir, args.csv, args.program)
    return repl(_config(args))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
