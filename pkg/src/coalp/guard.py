"""Static guardedness analysis.

Check 1 asks that a recursive clause has a function symbol somewhere in
its head, check 2 that some head argument loses occurrences of a
function symbol in every recursive body atom without gaining variables,
and check 3 looks for unguarded loops that only show up across several
clauses by growing the coinductive tree of each clause head.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cotree import DEFAULT_BUDGET, AndNode, BudgetExceeded, build_cotree
from .terms import Atom, Clause, Fn, Program, variables_of


def _symbol_count(t, f: str) -> int:
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Fn):
            if u.name == f:
                n += 1
            stack.extend(u.args)
    return n


def _symbols(t) -> list[str]:
    seen = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Fn):
            seen.setdefault(u.name, None)
            stack.extend(reversed(u.args))
    return list(seen)


def _vars_under(t, f: str) -> set:
    """Variables occurring inside some ``f``-rooted subterm of ``t``."""
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Fn):
            if u.name == f:
                out.update(variables_of(u))
            else:
                stack.extend(u.args)
    return out


def _recursive_atoms(clause: Clause) -> list[Atom]:
    return [b for b in clause.body if b.pred == clause.head.pred]


def _has_function_symbol(atom: Atom) -> bool:
    return any(isinstance(t, Fn) for t in atom.args)


def check1(clause: Clause) -> bool:
    """A clause with a body atom on its own head predicate needs a function
    symbol (constants included) in some head argument."""
    if not _recursive_atoms(clause):
        return True
    return _has_function_symbol(clause.head)


def _reduces(head: Atom, tail: Atom) -> bool:
    for t, t2 in zip(head.args, tail.args):
        for f in _symbols(t):
            m = _symbol_count(t, f)
            k = _symbol_count(t2, f)
            if k >= m:
                continue
            if k >= 1:
                ok = _vars_under(t2, f) <= _vars_under(t, f)
            else:
                ok = set(variables_of(t2)) <= set(variables_of(t))
            if ok:
                return True
    return False


def check2(clause: Clause) -> bool:
    """Every body atom on the head predicate must show constructor
    reduction at some argument position, with no new variables there."""
    return all(_reduces(clause.head, b) for b in _recursive_atoms(clause))


@dataclass(frozen=True)
class ClauseResult:
    index: int
    clause: Clause
    check1: bool
    check2: bool

    @property
    def ok(self) -> bool:
        return self.check1 and self.check2


@dataclass(frozen=True)
class LoopFailure:
    clause_index: int
    head_factor: Atom | None
    tail_factor: Atom | None
    message: str


@dataclass
class GuardReport:
    clauses: list = field(default_factory=list)  # ClauseResult per clause
    loops: list = field(default_factory=list)  # LoopFailure from check 3
    check3_ran: bool = False
    warnings: list = field(default_factory=list)

    @property
    def guarded(self) -> bool:
        return all(r.ok for r in self.clauses) and not self.loops

    @property
    def verdict(self) -> str:
        return "guarded" if self.guarded else "not guarded"

    def failures(self) -> list[str]:
        out = []
        for r in self.clauses:
            if not r.check1:
                out.append(f"clause {r.index + 1} `{r.clause}`: check 1 failed (no function symbol in head)")
            elif not r.check2:
                out.append(f"clause {r.index + 1} `{r.clause}`: check 2 failed (no constructor reduction)")
        for f in self.loops:
            out.append(f"clause {f.clause_index + 1}: check 3 failed: {f.message}")
        return out

    def format(self, program: Program | None = None) -> str:
        lines = []
        for r in self.clauses:
            if r.ok:
                status = "ok"
            else:
                status = "check 1 failed" if not r.check1 else "check 2 failed"
            lines.append(f"clause {r.index + 1}: {r.clause}  [{status}]")
        if self.check3_ran:
            if self.loops:
                for f in self.loops:
                    lines.append(f"check 3: clause {f.clause_index + 1}: {f.message}")
            else:
                lines.append("check 3: no unguarded loops")
        else:
            lines.append("check 3: skipped (checks 1 and 2 must pass first)")
        for w in self.warnings:
            lines.append(f"warning: {w}")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


class _Loop(Exception):
    def __init__(self, head: Atom, tail: Atom):
        super().__init__(f"{head} <- {tail}")
        self.head, self.tail = head, tail


def _watch(node: AndNode):
    for anc in node.ancestors():
        if anc.atom.pred != node.atom.pred:
            continue
        loop = Clause(anc.atom, (node.atom,))
        if not (check1(loop) and check2(loop)):
            raise _Loop(anc.atom, node.atom)


def check3(program: Program, budget: int = DEFAULT_BUDGET) -> list[LoopFailure]:
    """Grow the coinductive tree of every clause head, testing each
    same-predicate ancestor/descendant pair of and-nodes with checks 1
    and 2 as it appears.  Returns the failures (empty when guarded)."""
    out = []
    done = set()
    for i, clause in enumerate(program.clauses):
        # clauses sharing a head atom share its tree
        if clause.head in done:
            continue
        done.add(clause.head)
        try:
            build_cotree(program, clause.head, budget, monitor=_watch)
        except _Loop as e:
            out.append(
                LoopFailure(
                    i,
                    e.head,
                    e.tail,
                    f"unguarded loop {e.head} <- {e.tail} in the tree for {clause.head}",
                )
            )
        except BudgetExceeded:
            out.append(
                LoopFailure(
                    i,
                    None,
                    None,
                    f"possible unguarded recursion beyond budget ({budget} nodes) "
                    f"in the tree for {clause.head}",
                )
            )
    return out


def mutual_recursion(program: Program) -> list[tuple]:
    """Groups of two or more predicates that call each other."""
    calls: dict[str, set] = {}
    for c in program.clauses:
        calls.setdefault(c.head.pred, set()).update(b.pred for b in c.body)

    def reach(p):
        seen = set()
        stack = [p]
        while stack:
            for q in calls.get(stack.pop(), ()):
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    reachable = {p: reach(p) for p in calls}
    groups = []
    done = set()
    for p in calls:
        if p in done:
            continue
        group = sorted(q for q in reachable[p] if q in reachable and p in reachable[q])
        if len(group) >= 2:
            groups.append(tuple(group))
            done.update(group)
    return groups


def guard_program(program: Program, budget: int = DEFAULT_BUDGET) -> GuardReport:
    report = GuardReport(
        clauses=[
            ClauseResult(i, c, check1(c), check2(c))
            for i, c in enumerate(program.clauses)
        ]
    )
    for group in mutual_recursion(program):
        report.warnings.append(
            "mutual recursion between "
            + ", ".join(group)
            + "; checks 1-3 may not catch every unguarded goal here"
        )
    if all(r.ok for r in report.clauses):
        report.check3_ran = True
        report.loops = check3(program, budget)
    return report
