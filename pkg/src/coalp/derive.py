"""Coinductive derivations as a uniform-cost search over coinductive trees.

A state is a root atom together with its coinductive tree and the chain
of substitutions that led there from the goal.  Its priority is the
number of bindings in that chain.  Expanding a state picks the first open
node (lowest level, then leftmost) that admits a step, and makes one
successor per candidate clause by applying the mgu to the root atom and
rebuilding the tree.  States whose tree has a success subtree are
reported as answers and not expanded further; dead states are dropped.

Parallelism comes in two levels.  All states sharing the lowest priority
are expanded as one batch, concurrently when ``workers > 1``; their
successors are merged back in pop order, so the search visits exactly the
same states in the same order as a sequential run.  A lone state with a
wide tree instead spreads its tree construction over the workers, one
breadth-first level at a time.
"""
from __future__ import annotations

import heapq
import itertools
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace

from .cotree import (
    DEFAULT_BUDGET,
    CoTree,
    OpenNode,
    SubtreeSelection,
    build_cotree,
    compact_tree,
    find_success_subtree,
    open_nodes,
)
from .guard import GuardReport, guard_program
from .matching import unify
from .syntax import canonical_key, format_answer
from .terms import (
    Atom,
    Program,
    Substitution,
    apply_substitution,
    max_generation,
    rename_apart,
    variables_of,
)


class NotGuardedError(Exception):
    def __init__(self, report: GuardReport):
        reasons = "; ".join(report.failures()) or "guardedness checks failed"
        super().__init__(f"program is not guarded: {reasons} (use force to run anyway)")
        self.report = report


@dataclass(frozen=True)
class DeriveOptions:
    workers: int = 1
    node_budget: int = DEFAULT_BUDGET
    max_states: int = 100_000
    max_answers: int | None = None
    ordered: bool = True
    force: bool = False
    compact: bool = True
    level1_threshold: int = 64

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.node_budget < 1 or self.max_states < 1:
            raise ValueError("budgets must be positive")
        if self.max_answers is not None and self.max_answers < 0:
            raise ValueError("max_answers must be non-negative")


@dataclass(frozen=True)
class DerivationState:
    root: Atom
    tree: CoTree
    chain: Substitution
    next_gen: int
    tree_gen: int  # first generation given to the tree's body-only variables
    trail: tuple = ()  # (selected atom, clause index) per step

    @property
    def priority(self) -> int:
        return len(self.chain)


@dataclass(frozen=True)
class Answer:
    goal: Atom
    chain: Substitution
    tree: CoTree
    selection: SubtreeSelection
    rank: int
    trail: tuple = ()

    @property
    def goal_vars(self) -> list:
        return variables_of(self.goal)

    def solved(self) -> Substitution:
        return self.chain.resolve().restrict(self.goal_vars)

    def key(self) -> str:
        return canonical_key(self.goal, self.chain)

    def format(self, solved: bool = False) -> str:
        return format_answer(self.chain, self.goal_vars, solved)


def initial_state(
    program: Program, goal: Atom, budget: int = DEFAULT_BUDGET, executor=None, threshold=64
) -> DerivationState:
    gen = max_generation(goal) + 1
    tree = build_cotree(program, goal, budget, gen, executor=executor, threshold=threshold)
    return DerivationState(goal, tree, Substitution(), tree.next_gen, gen)


def coinductive_step(
    program: Program,
    state: DerivationState,
    node,
    clause_index: int,
    budget: int = DEFAULT_BUDGET,
    executor=None,
    threshold: int = 64,
) -> DerivationState | None:
    """Resolve an open node of ``state`` against a clause.

    ``node`` is an :class:`OpenNode` or just its atom.  Returns None when
    the clause does not unify, or when the mgu leaves the root atom
    unchanged (the step would make no progress).
    """
    atom = node.atom if isinstance(node, OpenNode) else node
    gen = state.next_gen
    head = rename_apart(program.clauses[clause_index], gen).head
    theta = unify(atom, head)
    if theta is None:
        return None
    theta = theta.restrict(variables_of(state.root))
    if not theta:
        return None
    root = apply_substitution(state.root, theta)
    tree = build_cotree(program, root, budget, gen + 1, executor=executor, threshold=threshold)
    return DerivationState(
        root,
        tree,
        state.chain.extend(theta),
        tree.next_gen,
        gen + 1,
        state.trail + ((atom, clause_index),),
    )


def expand_state(
    program: Program,
    state: DerivationState,
    options: DeriveOptions = DeriveOptions(),
    executor=None,
) -> list[DerivationState]:
    """Successors through the first open node that admits a step, one per
    candidate clause, in clause order; dead successors are left out."""
    for open_node in open_nodes(state.tree):
        stepped = False
        out = []
        for ci in open_node.candidates:
            nxt = coinductive_step(
                program,
                state,
                open_node,
                ci,
                options.node_budget,
                executor,
                options.level1_threshold,
            )
            if nxt is None:
                continue
            stepped = True
            if nxt.tree.is_dead:
                continue
            if options.compact:
                nxt = replace(nxt, tree=compact_tree(nxt.tree))
            out.append(nxt)
        if stepped:
            return out
    return []


def _answer(program, goal, state: DerivationState, options) -> Answer:
    tree = state.tree
    if options.compact:
        tree = build_cotree(program, state.root, options.node_budget, state.tree_gen)
    return Answer(
        goal, state.chain, tree, find_success_subtree(tree), state.priority, state.trail
    )


class AnswerStream:
    """Lazy sequence of answers; ``status`` is filled in once the search
    stops ("exhausted", "state-limit" or "answer-limit")."""

    def __init__(self, gen, options: DeriveOptions):
        self._gen = gen
        self.status: str | None = None
        self.states = 0
        self.options = options

    def __iter__(self):
        return self

    def __next__(self) -> Answer:
        return next(self._gen)

    def close(self):
        self._gen.close()


def derive_answers(
    program: Program,
    goal: Atom,
    max_answers: int | None = None,
    max_states: int | None = None,
    options: DeriveOptions | None = None,
    report: GuardReport | None = None,
    observer=None,
) -> AnswerStream:
    """Enumerate answers for ``goal`` lazily, cheapest chains first.

    Raises :class:`NotGuardedError` up front unless ``options.force`` is
    set.  ``report`` may carry a guardedness report computed earlier, and
    ``observer`` is called with every state taken off the queue.
    """
    options = options or DeriveOptions()
    if max_answers is not None:
        options = replace(options, max_answers=max_answers)
    if max_states is not None:
        options = replace(options, max_states=max_states)
    if not options.force:
        report = report or guard_program(program, options.node_budget)
        if not report.guarded:
            raise NotGuardedError(report)
    stream = AnswerStream(None, options)
    stream._gen = _search(program, goal, options, stream, observer)
    return stream


def _search(program, goal, options, stream, observer):
    pool = ThreadPoolExecutor(options.workers) if options.workers > 1 else None
    try:
        yield from _search_loop(program, goal, options, stream, pool, observer)
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)


def _search_loop(program, goal, options, stream, pool, observer):
    seen = set()
    emitted = 0
    counter = itertools.count()
    heap: list = []

    def emit(state):
        nonlocal emitted
        ans = _answer(program, goal, state, options)
        key = ans.key()
        if key in seen:
            return None
        seen.add(key)
        emitted += 1
        return ans

    if options.max_answers == 0:
        stream.status = "answer-limit"
        return
    first = initial_state(
        program, goal, options.node_budget, pool, options.level1_threshold
    )
    if not first.tree.is_dead:
        heapq.heappush(heap, (first.priority, next(counter), first))

    def expand(state, executor=None):
        return expand_state(program, state, options, executor)

    while heap:
        if stream.states >= options.max_states:
            stream.status = "state-limit"
            return
        top = heap[0][0]
        batch = []
        while heap and heap[0][0] == top and stream.states + len(batch) < options.max_states:
            batch.append(heapq.heappop(heap)[2])
        stream.states += len(batch)
        if observer is not None:
            for state in batch:
                observer(state)

        work = []
        for state in batch:
            if state.tree.is_success:
                ans = emit(state)
                if ans is not None:
                    yield ans
                    if options.max_answers is not None and emitted >= options.max_answers:
                        stream.status = "answer-limit"
                        return
            else:
                work.append(state)

        if pool is None or len(work) <= 1:
            results = [expand(s, pool) for s in work]
            pending = None
        elif options.ordered:
            results = list(pool.map(expand, work))
            pending = None
        else:
            futures = {pool.submit(expand, s): i for i, s in enumerate(work)}
            results = [None] * len(work)
            pending = futures

        if pending is None:
            for succs in results:
                for s in succs:
                    heapq.heappush(heap, (s.priority, next(counter), s))
            continue

        # unordered: report fresh success states as soon as their batch job
        # finishes, then merge everything else in pop order
        for fut in as_completed(pending):
            i = pending[fut]
            results[i] = []
            for s in fut.result():
                if s.tree.is_success:
                    ans = emit(s)
                    if ans is not None:
                        yield ans
                        if options.max_answers is not None and emitted >= options.max_answers:
                            stream.status = "answer-limit"
                            return
                else:
                    results[i].append(s)
        for succs in results:
            for s in succs:
                heapq.heappush(heap, (s.priority, next(counter), s))
    stream.status = "exhausted"


def collect(stream: AnswerStream) -> list[Answer]:
    return list(stream)


def replay(program: Program, answer: Answer, budget: int = DEFAULT_BUDGET) -> bool:
    """Re-run the answer's steps from the goal and check that they end in
    the same chain, and that the goal instantiated by the composed chain
    has a success subtree."""
    state = initial_state(program, answer.goal, budget)
    for atom, ci in answer.trail:
        node = next((o for o in open_nodes(state.tree) if o.atom == atom), None)
        if node is None or ci not in node.candidates:
            return False
        state = coinductive_step(program, state, node, ci, budget)
        if state is None:
            return False
    if state.chain != answer.chain:
        return False
    inst = apply_substitution(answer.goal, answer.chain.resolve())
    tree = build_cotree(program, inst, budget, max_generation(inst) + 1)
    return find_success_subtree(tree) is not None
