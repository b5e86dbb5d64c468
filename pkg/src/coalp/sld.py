"""Classical semantics used as test oracles.

SLD resolution with leftmost selection, SLD trees, the ground T_P
fixpoint and ground and-or parallel derivation trees.  None of this is
tuned for speed; it exists to be obviously right.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .matching import unify
from .terms import (
    Atom,
    Program,
    Substitution,
    apply_substitution,
    compose_substitutions,
    rename_apart,
    variables_of,
)


class NonGroundProgramError(ValueError):
    pass


def _dedup(atoms) -> tuple:
    return tuple(dict.fromkeys(atoms))


def sld_step(goals, clause, selected: int = 0):
    """Resolve ``goals[selected]`` against an already renamed ``clause``.

    Returns ``(resolvent, mgu)`` or None when the atom and head clash.
    Repeated atoms in the resolvent are collapsed, keeping the first.
    """
    goals = tuple(goals)
    if not 0 <= selected < len(goals):
        raise IndexError(f"selected atom {selected} out of range")
    theta = unify(goals[selected], clause.head)
    if theta is None:
        return None
    resolvent = goals[:selected] + tuple(clause.body) + goals[selected + 1 :]
    return _dedup(apply_substitution(resolvent, theta)), theta


@dataclass
class SldResult:
    answers: list = field(default_factory=list)
    status: str = "complete"  # complete | depth-exhausted | answer-limit
    steps: int = 0

    @property
    def depth_exhausted(self) -> bool:
        return self.status == "depth-exhausted"


def _as_goals(goal) -> tuple:
    return (goal,) if isinstance(goal, Atom) else tuple(goal)


def sld_solve(
    program: Program,
    goal,
    max_depth: int = 20,
    max_answers: int | None = None,
    strategy: str = "prolog",
) -> SldResult:
    """Depth-first, clause-order SLD search with leftmost selection.

    With ``strategy="prolog"`` the first derivation cut at ``max_depth``
    stops the whole search, which is how a Prolog interpreter stuck in an
    infinite branch behaves: nothing to the right of it is ever seen.
    With ``strategy="bounded"`` cut branches are pruned and the search
    carries on, which makes the result a proper depth-bounded oracle.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    if strategy not in ("prolog", "bounded"):
        raise ValueError(f"unknown strategy {strategy!r}")
    goals = _dedup(_as_goals(goal))
    goal_vars = variables_of(goals)
    result = SldResult()
    gen = 1
    cut = False
    stack = [(goals, Substitution(), 0)]
    while stack:
        gs, theta, depth = stack.pop()
        if not gs:
            result.answers.append(theta.restrict(goal_vars))
            if max_answers is not None and len(result.answers) >= max_answers:
                result.status = "answer-limit"
                return result
            continue
        if depth >= max_depth:
            cut = True
            if strategy == "prolog":
                result.status = "depth-exhausted"
                return result
            continue
        children = []
        for i in program.clauses_for(gs[0].pred):
            clause = rename_apart(program.clauses[i], gen)
            gen += 1
            step = sld_step(gs, clause, 0)
            result.steps += 1
            if step is None:
                continue
            resolvent, mgu = step
            children.append((resolvent, compose_substitutions(theta, mgu), depth + 1))
        stack.extend(reversed(children))
    result.status = "depth-exhausted" if cut else "complete"
    return result


def sld_refutes(program: Program, atom: Atom, max_depth: int = 50) -> bool:
    return bool(sld_solve(program, atom, max_depth, 1, strategy="bounded").answers)


# -- SLD trees ---------------------------------------------------------------


@dataclass
class SldNode:
    goals: tuple
    kind: str = "internal"  # success | failure | open | internal
    children: list = field(default_factory=list)  # (mgu, clause index, SldNode)


def build_sld_tree(program: Program, goal, max_depth: int = 10) -> SldNode:
    """SLD tree with leftmost selection, truncated at ``max_depth`` steps
    (truncated nodes are marked ``open``)."""
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    root = SldNode(_dedup(_as_goals(goal)))
    gen = 1
    stack = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        if not node.goals:
            node.kind = "success"
            continue
        if depth >= max_depth:
            node.kind = "open"
            continue
        for i in program.clauses_for(node.goals[0].pred):
            clause = rename_apart(program.clauses[i], gen)
            gen += 1
            step = sld_step(node.goals, clause, 0)
            if step is None:
                continue
            child = SldNode(step[0])
            node.children.append((step[1], i, child))
            stack.append((child, depth + 1))
        if not node.children:
            node.kind = "failure"
    return root


def sld_branches(node: SldNode):
    """Every root-to-leaf path as a list of (mgu, clause index, node)."""
    out = []
    stack = [(node, [])]
    while stack:
        n, path = stack.pop()
        if not n.children:
            out.append(path)
        for step in reversed(n.children):
            stack.append((step[2], path + [step]))
    return out


# -- ground semantics ----------------------------------------------------------


def _require_ground(program: Program):
    if not program.is_ground:
        raise NonGroundProgramError("this operation needs a ground program")


def ground_tp(program: Program) -> frozenset:
    """Least Herbrand model of a ground program, by iterating T_P from the
    empty set."""
    _require_ground(program)
    model: set = set()
    while True:
        new = {
            c.head
            for c in program.clauses
            if c.head not in model and all(b in model for b in c.body)
        }
        if not new:
            return frozenset(model)
        model |= new


@dataclass
class AndOrNode:
    """And-node of a ground and-or tree.

    With a single unifying clause ``children`` holds the and-children (or
    the ``"box"`` marker for a unit clause); with several, ``branches``
    holds one child list per clause, in clause order.
    """

    atom: Atom
    children: list = field(default_factory=list)
    branches: list = field(default_factory=list)
    truncated: bool = False

    def shape(self):
        def body(kids):
            return tuple(("box",) if k == "box" else k.shape() for k in kids)

        if self.branches:
            return ("and", str(self.atom), tuple(("or",) + body(b) for b in self.branches))
        return ("and", str(self.atom), body(self.children))

    def succeeds(self) -> bool:
        def ok(kids):
            return all(k == "box" or k.succeeds() for k in kids)

        if self.truncated:
            return False
        if self.branches:
            return any(ok(b) for b in self.branches)
        return bool(self.children) and ok(self.children)


def build_andor_tree(program: Program, atom: Atom, max_depth: int = 64) -> AndOrNode:
    """And-or parallel derivation tree of a ground program, cut at
    ``max_depth`` and-levels."""
    _require_ground(program)
    root = AndOrNode(atom)
    stack = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        if depth >= max_depth:
            node.truncated = True
            continue
        alts = []
        for i in program.clauses_for(node.atom.pred):
            clause = program.clauses[i]
            theta = unify(node.atom, clause.head)
            if theta is not None:
                kids = [AndOrNode(apply_substitution(b, theta)) for b in clause.body]
                alts.append(kids or ["box"])
        if len(alts) == 1:
            node.children = alts[0]
        elif alts:
            node.branches = alts
        for kids in alts:
            stack.extend((k, depth + 1) for k in kids if k != "box")
    return root
