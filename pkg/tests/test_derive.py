import pytest

from coalp import fixture
from coalp.cotree import BudgetExceeded, find_success_subtree, open_nodes, verify_selection
from coalp.derive import (
    DeriveOptions,
    NotGuardedError,
    coinductive_step,
    derive_answers,
    expand_state,
    initial_state,
    replay,
)
from coalp.sld import ground_tp
from coalp.syntax import parse_atom

FAST = DeriveOptions(max_states=2000)


def A(text):
    return parse_atom(text)


def first_open(state, atom):
    return next(o for o in open_nodes(state.tree) if str(o.atom) == atom)


def test_step_stream_lazy_unfolding():
    prog = fixture("stream")
    s0 = initial_state(prog, A("stream(X)"))
    s1 = coinductive_step(prog, s0, first_open(s0, "stream(X)"), 2)
    assert str(s1.root) == "stream(scons(X1,Y1))"
    assert str(s1.chain) == "{X/scons(X1,Y1)}"
    s2 = coinductive_step(prog, s1, first_open(s1, "bit(X1)"), 0)
    assert str(s2.root) == "stream(scons(0,Y1))"


def test_step_listnat():
    prog = fixture("listnat")
    s0 = initial_state(prog, A("list(cons(X,cons(Y,X)))"))
    s1 = coinductive_step(prog, s0, first_open(s0, "nat(X)"), 0)
    assert str(s1.root) == "list(cons(0,cons(Y,0)))"


def test_step_stale_candidate():
    prog = fixture("listnat")
    s0 = initial_state(prog, A("list(X)"))
    assert coinductive_step(prog, s0, A("list(X)"), 3) is not None
    assert coinductive_step(prog, s0, A("list(X)"), 1) is None
    assert coinductive_step(prog, s0, A("list(nil)"), 2) is None


def test_expand_bit_alternatives():
    prog = fixture("stream")
    s0 = initial_state(prog, A("stream(scons(Z,Y))"))
    succ = expand_state(prog, s0)
    assert [str(s.root) for s in succ] == ["stream(scons(0,Y))", "stream(scons(1,Y))"]


def test_expand_success_and_dead():
    prog = fixture("listnat")
    assert expand_state(prog, initial_state(prog, A("list(cons(0,nil))"))) == []
    dead = initial_state(prog, A("list(cons(0,cons(0,0)))"))
    assert dead.tree.is_dead and expand_state(prog, dead) == []


def test_listnat_first_three():
    answers = list(derive_answers(fixture("listnat"), A("list(X)"), max_answers=3))
    assert [a.format() for a in answers] == [
        "{X/nil}",
        "{X/cons(X1,Y1), X1/0, Y1/nil}",
        "{X/cons(X1,Y1), X1/s(X2), X2/0, Y1/nil}",
    ]
    assert [a.rank for a in answers] == [1, 3, 4]
    assert [a.format(solved=True) for a in answers] == [
        "{X/nil}",
        "{X/cons(0,nil)}",
        "{X/cons(s(0),nil)}",
    ]


def test_answers_are_replayable():
    prog = fixture("listnat")
    for ans in derive_answers(prog, A("list(X)"), max_answers=6):
        assert find_success_subtree(ans.tree) == ans.selection
        assert verify_selection(ans.tree, ans.selection)
        assert replay(prog, ans)


def test_ranks_nondecreasing():
    answers = list(derive_answers(fixture("listnat"), A("list(X)"), max_answers=12))
    ranks = [a.rank for a in answers]
    assert ranks == sorted(ranks)


def test_no_duplicate_solutions():
    answers = list(derive_answers(fixture("listnat"), A("list(X)"), max_answers=15))
    keys = [a.key() for a in answers]
    assert len(set(keys)) == len(keys)


def test_running_goal_fails():
    stream = derive_answers(fixture("listnat"), A("list(cons(X,cons(Y,X)))"))
    assert list(stream) == [] and stream.status == "exhausted"


def test_stream_is_lazy():
    stream = derive_answers(fixture("stream"), A("stream(X)"), max_answers=1, max_states=100)
    assert list(stream) == [] and stream.status == "state-limit" and stream.states == 100


def test_gc_guarded_single_answer():
    stream = derive_answers(fixture("gc_guarded"), A("connected(0,cons(s(0),nil))"))
    answers = list(stream)
    assert len(answers) == 1 and stream.status == "exhausted"
    assert answers[0].chain == {} and answers[0].rank == 0


def test_not_guarded_refused():
    with pytest.raises(NotGuardedError):
        derive_answers(fixture("gc"), A("connected(0,Y)"))


def test_force_surfaces_budget_overflow():
    opts = DeriveOptions(force=True, node_budget=500)
    with pytest.raises(BudgetExceeded) as info:
        list(derive_answers(fixture("gc"), A("connected(0,Y)"), options=opts))
    assert info.value.tree.size > 500 and info.value.tree.root.atom == A("connected(0,Y)")


def test_force_on_unguarded_but_finite_goal():
    opts = DeriveOptions(force=True)
    answers = list(derive_answers(fixture("gc"), A("edge(X,s(s(0)))"), options=opts))
    assert [a.format(solved=True) for a in answers] == ["{X/s(0)}"]


def test_ground_soundness():
    prog = fixture("ground_ex38")
    model = ground_tp(prog)
    for text in ("p(a)", "p(b)", "q(b,a)", "q(a,b)", "s(a,b)", "s(b,a)"):
        got = list(derive_answers(prog, A(text), options=FAST))
        assert bool(got) == (A(text) in model)


def test_zero_answers_requested():
    stream = derive_answers(fixture("listnat"), A("list(X)"), max_answers=0)
    assert list(stream) == [] and stream.status == "answer-limit"


@pytest.mark.parametrize("workers", [2, 4])
def test_workers_same_sequence(workers):
    prog = fixture("listnat")
    seq = [a.format() for a in derive_answers(prog, A("list(X)"), max_answers=10)]
    opts = DeriveOptions(workers=workers)
    par = [a.format() for a in derive_answers(prog, A("list(X)"), max_answers=10, options=opts)]
    assert par == seq


def test_unordered_same_multiset():
    prog = fixture("listnat")
    opts = DeriveOptions(max_states=300)
    seq = sorted(a.format() for a in derive_answers(prog, A("list(X)"), options=opts))
    un = DeriveOptions(max_states=300, workers=4, ordered=False)
    par = sorted(a.format() for a in derive_answers(prog, A("list(cons(X,Y))"), options=un))
    assert seq and par
    exhaustive = DeriveOptions(workers=3, ordered=False)
    got = sorted(a.format() for a in derive_answers(prog, A("list(cons(X,nil))"), max_states=400, options=exhaustive))
    want = sorted(a.format() for a in derive_answers(prog, A("list(cons(X,nil))"), max_states=400))
    assert got == want


def test_compaction_does_not_change_answers():
    prog = fixture("listnat")
    a = [x.format() for x in derive_answers(prog, A("list(X)"), max_answers=8)]
    b = [x.format() for x in derive_answers(prog, A("list(X)"), max_answers=8, options=DeriveOptions(compact=False))]
    assert a == b


def test_observer_sees_every_state():
    seen = []
    stream = derive_answers(fixture("stream"), A("stream(X)"), max_states=20, observer=seen.append)
    list(stream)
    assert len(seen) == 20
