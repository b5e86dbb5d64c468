"""Coalgebraic logic programming: guarded Horn clauses answered by lazy
derivations over finite coinductive trees."""
from pathlib import Path

from .cotree import (
    BudgetExceeded,
    CoTree,
    build_cotree,
    compact_tree,
    find_success_subtree,
    open_nodes,
)
from .derive import (
    Answer,
    DerivationState,
    DeriveOptions,
    NotGuardedError,
    coinductive_step,
    derive_answers,
    expand_state,
)
from .guard import GuardReport, check1, check2, check3, guard_program
from .matching import term_match, unify
from .sld import build_andor_tree, build_sld_tree, ground_tp, sld_solve, sld_step
from .syntax import (
    ParseError,
    export_dot,
    format_answer,
    load_program,
    load_source,
    parse_atom,
    parse_clause,
    parse_goal,
    parse_program,
    parse_term,
)
from .terms import (
    Atom,
    Clause,
    Fn,
    Program,
    Substitution,
    Var,
    apply_substitution,
    compose_substitutions,
    rename_apart,
    variables_of,
)

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> Program:
    """Load a bundled example program by stem, e.g. ``fixture("listnat")``."""
    return parse_program((FIXTURES / f"{name}.coalp").read_text(encoding="utf-8"))


def fixture_goals() -> list[tuple[str, str]]:
    """(program stem, goal text) pairs shipped in ``fixtures/goals.txt``."""
    out = []
    for line in (FIXTURES / "goals.txt").read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            name, goal = line.split(None, 1)
            out.append((name, goal))
    return out
