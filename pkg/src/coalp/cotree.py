"""Coinductive trees: and/or trees grown by term matching only.

An and-node holds an atom.  Every clause whose head term-matches that
atom contributes one or-node, whose children are the clause body under
the matcher.  Body-only variables are given a fresh generation per
or-node.  Clauses that unify with the atom without matching it are kept
as *candidates*: they are where a derivation step can later apply an mgu.

Two derived flags drive the search:

* ``solved``: an or-node whose children are all solved (an empty body is
  trivially solved), or an and-node with a solved or-child.
* ``dead``: a leaf with no candidates, an or-node with a dead child, or
  an and-node with no candidates whose or-children are all dead.

Deadness is stable under instantiation of the root atom: matching
clauses keep matching and non-unifying clauses keep failing, so a dead
root can never lead to a success tree.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

from .matching import term_match, unify
from .terms import (
    Atom,
    Program,
    Substitution,
    Var,
    apply_substitution,
    max_generation,
    rename_apart,
)

DEFAULT_BUDGET = 10_000

# Generation reserved for the throwaway clause variants used only to test
# unifiability; it never appears in a tree.
_PROBE_GEN = -1


class AndNode:
    __slots__ = ("atom", "or_children", "candidates", "level", "parent", "dead", "solved")

    def __init__(self, atom: Atom, level: int, parent: "AndNode | None" = None):
        self.atom = atom
        self.or_children: list[OrNode] = []
        self.candidates: tuple = ()
        self.level = level
        self.parent = parent
        self.dead = False
        self.solved = False

    @property
    def is_leaf(self) -> bool:
        return not self.or_children

    @property
    def is_open(self) -> bool:
        return bool(self.candidates)

    def ancestors(self):
        """Enclosing and-nodes, nearest first."""
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def __repr__(self):
        return f"AndNode({self.atom}, level={self.level})"


class OrNode:
    __slots__ = ("clause", "theta", "children", "dead", "solved")

    def __init__(self, clause: int, theta: Substitution):
        self.clause = clause
        self.theta = theta
        self.children: list[AndNode] = []
        self.dead = False
        self.solved = False

    def __repr__(self):
        return f"OrNode(clause={self.clause})"


@dataclass
class CoTree:
    root: AndNode
    size: int
    next_gen: int

    @property
    def is_dead(self) -> bool:
        return self.root.dead

    @property
    def is_success(self) -> bool:
        return self.root.solved

    def nodes(self):
        """And-nodes in breadth-first order."""
        queue = deque([self.root])
        while queue:
            node = queue.popleft()
            yield node
            for orn in node.or_children:
                queue.extend(orn.children)

    def depth(self) -> int:
        return max(n.level for n in self.nodes())


class BudgetExceeded(Exception):
    """Tree construction passed the node budget; ``tree`` is the level-complete
    prefix built so far."""

    def __init__(self, tree: CoTree, budget: int):
        super().__init__(
            f"coinductive tree for {tree.root.atom} exceeds {budget} nodes"
        )
        self.tree = tree
        self.budget = budget


def _expand(program: Program, atom: Atom):
    """Matching clauses (index, matcher) and candidate clause indices."""
    matched = []
    candidates = []
    for i in program.clauses_for(atom.pred):
        head = program.clauses[i].head
        theta = term_match(head, atom)
        if theta is not None:
            matched.append((i, theta))
        elif unify(atom, rename_apart(program.clauses[i], _PROBE_GEN).head) is not None:
            candidates.append(i)
    return matched, tuple(candidates)


def build_cotree(
    program: Program,
    atom: Atom,
    budget: int = DEFAULT_BUDGET,
    next_gen: int | None = None,
    monitor: Callable[[AndNode], None] | None = None,
    executor=None,
    threshold: int = 64,
) -> CoTree:
    """Breadth-first construction of the coinductive tree for ``atom``.

    ``next_gen`` is the first generation handed to body-only variables
    (by default one past the highest generation in ``atom``); the
    returned tree's ``next_gen`` is one past the last one used.
    ``monitor`` sees each new and-node below the root and may raise to
    abort construction.  When an ``executor`` is given, levels with at
    least ``threshold`` nodes have their clause matching done in parallel;
    node creation stays sequential, so the result does not depend on it.
    """
    if budget <= 0:
        raise ValueError("node budget must be positive")
    if next_gen is None:
        next_gen = max_generation(atom) + 1
    root = AndNode(atom, 0)
    tree = CoTree(root, 1, next_gen)
    level = [root]
    while level:
        if executor is not None and len(level) >= threshold:
            expansions = list(executor.map(lambda n: _expand(program, n.atom), level))
        else:
            expansions = [_expand(program, n.atom) for n in level]
        following = []
        for node, (matched, candidates) in zip(level, expansions):
            node.candidates = candidates
            for idx, theta in matched:
                tree.size += 1
                if tree.size > budget:
                    _finish(tree)
                    raise BudgetExceeded(tree, budget)
                orn = OrNode(idx, theta)
                node.or_children.append(orn)
                clause = program.clauses[idx]
                if not clause.body:
                    continue
                fresh = program.body_only_vars(idx)
                if fresh:
                    gen = tree.next_gen
                    tree.next_gen += 1
                    theta = Substitution._trusted(
                        {**theta._map, **{v: Var(v.name, gen) for v in fresh}}
                    )
                for b in clause.body:
                    tree.size += 1
                    if tree.size > budget:
                        _finish(tree)
                        raise BudgetExceeded(tree, budget)
                    child = AndNode(apply_substitution(b, theta), node.level + 1, node)
                    orn.children.append(child)
                    if monitor is not None:
                        monitor(child)
                    following.append(child)
        level = following
    _finish(tree)
    return tree


def _finish(tree: CoTree):
    """Fill in ``dead``/``solved`` bottom-up without recursion."""
    order = list(tree.nodes())
    for node in reversed(order):
        any_solved = False
        all_dead = True
        for orn in node.or_children:
            orn.dead = any(c.dead for c in orn.children)
            orn.solved = all(c.solved for c in orn.children)
            any_solved = any_solved or orn.solved
            all_dead = all_dead and orn.dead
        node.solved = any_solved
        node.dead = all_dead and not node.candidates


# -- inspection --------------------------------------------------------------


@dataclass(frozen=True)
class OpenNode:
    node: AndNode
    path: tuple  # ((or_index, child_index), ...) from the root
    atom: Atom
    candidates: tuple

    @property
    def level(self) -> int:
        return len(self.path)


def open_nodes(tree: CoTree) -> list[OpenNode]:
    """Live and-nodes that still have candidate clauses, by level then
    left to right.

    Nodes below a dead or-node are skipped: nothing that happens there can
    turn that or-node into part of a success subtree.
    """
    out = []
    queue = deque([(tree.root, ())])
    while queue:
        node, path = queue.popleft()
        if node.candidates:
            out.append(OpenNode(node, path, node.atom, node.candidates))
        for i, orn in enumerate(node.or_children):
            if orn.dead:
                continue
            for j, child in enumerate(orn.children):
                queue.append((child, path + ((i, j),)))
    return out


def open_leaves(tree: CoTree) -> list[OpenNode]:
    return [o for o in open_nodes(tree) if o.node.is_leaf]


@dataclass(frozen=True)
class SubtreeSelection:
    """The retained or-child (by position) of each retained and-node,
    keyed by the and-node's path from the root."""

    choices: tuple  # ((path, or_index), ...) in preorder

    def as_dict(self) -> dict:
        return dict(self.choices)

    def clauses(self, tree: CoTree) -> list[int]:
        out = []
        for path, i in self.choices:
            out.append(node_at(tree, path).or_children[i].clause)
        return out


def node_at(tree: CoTree, path) -> AndNode:
    node = tree.root
    for i, j in path:
        node = node.or_children[i].children[j]
    return node


def find_success_subtree(tree: CoTree) -> SubtreeSelection | None:
    """A success subtree that picks the lowest-indexed solved clause at every
    and-node, or None."""
    if not tree.root.solved:
        return None
    choices = []
    stack = [(tree.root, ())]
    while stack:
        node, path = stack.pop()
        i = next(k for k, orn in enumerate(node.or_children) if orn.solved)
        choices.append((path, i))
        kids = node.or_children[i].children
        for j in range(len(kids) - 1, -1, -1):
            stack.append((kids[j], path + ((i, j),)))
    return SubtreeSelection(tuple(choices))


def verify_selection(tree: CoTree, sel: SubtreeSelection) -> bool:
    """Check the success-subtree conditions directly on ``tree``."""
    chosen = sel.as_dict()
    stack = [(tree.root, ())]
    while stack:
        node, path = stack.pop()
        i = chosen.get(path)
        if i is None or not (0 <= i < len(node.or_children)):
            return False
        for j, child in enumerate(node.or_children[i].children):
            stack.append((child, path + ((i, j),)))
    return True


def _has_open(node: AndNode) -> bool:
    stack = [node]
    while stack:
        n = stack.pop()
        if n.candidates:
            return True
        for orn in n.or_children:
            stack.extend(orn.children)
    return False


def compact_tree(tree: CoTree) -> CoTree:
    """Copy of ``tree`` without the parts that can no longer matter.

    Dead or-nodes are dropped (an and-node left with no or-children keeps
    its candidates, hence its status), and solved subtrees containing no
    open node are cut away from their or-node; an or-node whose children
    are all cut reads as solved, exactly as before.  Levels and the
    left-to-right order of live open nodes are unchanged.
    """

    def copy(node: AndNode, parent):
        new = AndNode(node.atom, node.level, parent)
        new.candidates = node.candidates
        new.dead, new.solved = node.dead, node.solved
        return new

    size = 1
    root = copy(tree.root, None)
    stack = [(tree.root, root)]
    while stack:
        old, new = stack.pop()
        for orn in old.or_children:
            if orn.dead:
                continue
            norn = OrNode(orn.clause, orn.theta)
            norn.dead, norn.solved = orn.dead, orn.solved
            new.or_children.append(norn)
            size += 1
            for child in orn.children:
                if child.solved and not _has_open(child):
                    continue
                nchild = copy(child, new)
                norn.children.append(nchild)
                size += 1
                stack.append((child, nchild))
    return CoTree(root, size, tree.next_gen)


def andor_shape(tree: CoTree):
    """Nested tuples describing the tree with single-or-node chains elided.

    An and-node with one or-node shows that clause's children directly, an
    and-node with several shows each or-node, and an empty body shows as
    ``("box",)``.  This is the form the ground and-or trees of the oracle
    use, so the two can be compared with ``==``.
    """

    def body(orn):
        if not orn.children:
            return (("box",),)
        return tuple(shape(c) for c in orn.children)

    def shape(node):
        # recursion depth is bounded by tree depth, which the budget bounds
        if len(node.or_children) == 1:
            return ("and", str(node.atom), body(node.or_children[0]))
        return (
            "and",
            str(node.atom),
            tuple(("or",) + body(orn) for orn in node.or_children),
        )

    return shape(tree.root)


def count_nodes(tree: CoTree) -> dict:
    """Numbers of atom nodes, or-nodes and empty-goal boxes."""
    atoms = ors = boxes = 0
    for node in tree.nodes():
        atoms += 1
        for orn in node.or_children:
            ors += 1
            if not orn.children:
                boxes += 1
    return {"and": atoms, "or": ors, "box": boxes}
