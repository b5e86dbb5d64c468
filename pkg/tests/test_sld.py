import pytest

from coalp import fixture
from coalp.cotree import andor_shape, build_cotree, find_success_subtree
from coalp.sld import (
    NonGroundProgramError,
    build_andor_tree,
    build_sld_tree,
    ground_tp,
    sld_branches,
    sld_refutes,
    sld_solve,
    sld_step,
)
from coalp.syntax import parse_atom, parse_clause, parse_goal, parse_program
from coalp.matching import term_match
from coalp.terms import Atom, Fn, Var, apply_substitution, rename_apart


def A(text):
    return parse_atom(text)


def test_step_stream():
    clause = rename_apart(fixture("stream").clauses[2], 1)
    goals, theta = sld_step([A("stream(X)")], clause)
    assert [str(g) for g in goals] == ["bit(X1)", "stream(Y1)"]
    assert str(theta) == "{X/scons(X1,Y1)}"


def test_step_fact():
    goals, theta = sld_step([A("bit(Y)")], parse_clause("bit(0)."))
    assert goals == () and theta == {Var("Y"): Fn("0")}


def test_step_connected():
    clause = rename_apart(parse_clause("connected(X,X)."), 1)
    goals, theta = sld_step([A("connected(0,Y)")], clause)
    assert goals == ()
    assert apply_substitution(Var("Y"), theta) == Fn("0")
    assert len(theta) == 2


def test_step_collapses_duplicates():
    clause = parse_clause("p(X) :- q(X).")
    goals, _ = sld_step([A("p(a)"), A("q(a)")], clause)
    assert [str(g) for g in goals] == ["q(a)"]


def test_step_failure():
    assert sld_step([A("bit(2)")], parse_clause("bit(0).")) is None


def test_prolog_listnat_order():
    res = sld_solve(fixture("listnat"), A("list(X)"), max_depth=10)
    shown = [str(apply_substitution(Var("X"), a)) for a in res.answers]
    assert shown[:3] == ["nil", "cons(0,nil)", "cons(0,cons(0,nil))"]
    assert "cons(s(0),nil)" not in shown
    assert res.status == "depth-exhausted"


def test_bounded_strategy_finds_more():
    res = sld_solve(fixture("listnat"), A("list(X)"), max_depth=6, strategy="bounded")
    shown = {str(apply_substitution(Var("X"), a)) for a in res.answers}
    assert "cons(s(0),nil)" in shown


def test_gc_prime_loops():
    res = sld_solve(fixture("gc_prime"), A("connected(0,Y)"), max_depth=20)
    assert res.answers == [] and res.status == "depth-exhausted"


def test_stream_no_answers():
    res = sld_solve(fixture("stream"), A("stream(X)"), max_depth=6)
    assert res.answers == [] and res.depth_exhausted


def test_sld_tree_listnat():
    tree = build_sld_tree(fixture("listnat"), A("list(X)"), 3)
    assert len(tree.children) == 2
    (t1, i1, c1), (t2, i2, c2) = tree.children
    assert c1.kind == "success" and str(t1) == "{X/nil}"
    assert [g.pred for g in c2.goals] == ["nat", "list"]


def test_sld_tree_empty_goal():
    tree = build_sld_tree(fixture("listnat"), [], 3)
    assert tree.kind == "success" and not tree.children


def test_sld_tree_stream_single_branch():
    tree = build_sld_tree(fixture("stream"), A("stream(X)"), 4)
    # each stream(_) step has one clause; each bit(_) step has two
    node = tree
    preds = []
    while node.children:
        preds.append(node.goals[0].pred)
        node = node.children[0][2]
    assert preds[:3] == ["stream", "bit", "stream"]
    assert len(tree.children) == 1 and len(tree.children[0][2].children) == 2


def _variant(goals1, goals2) -> bool:
    a, b = Atom("g", tuple(_flat(goals1))), Atom("g", tuple(_flat(goals2)))
    return term_match(a, b) is not None and term_match(b, a) is not None


def _flat(goals):
    return [Fn(g.pred, g.args) for g in goals]


def test_sld_branches_replay():
    prog = fixture("listnat")
    tree = build_sld_tree(prog, A("list(X)"), 5)
    branches = sld_branches(tree)
    assert len(branches) > 3
    for branch in branches:
        goals = tree.goals
        for theta, idx, child in branch:
            step = sld_step(goals, rename_apart(prog.clauses[idx], 999))
            assert step is not None and _variant(step[0], child.goals)
            goals = child.goals


def test_ground_tp_example():
    prog = fixture("ground_ex38")
    assert ground_tp(prog) == {A("q(b,a)"), A("s(a,b)"), A("p(a)")}


def test_ground_tp_trivial():
    assert ground_tp(parse_program("")) == frozenset()
    prog = parse_program("a. b(c).")
    assert ground_tp(prog) == {A("a"), A("b(c)")}


def test_ground_tp_rejects_variables():
    with pytest.raises(NonGroundProgramError):
        ground_tp(fixture("listnat"))


def test_andor_tree_ground_pa():
    prog = fixture("ground_ex38")
    tree = build_andor_tree(prog, A("p(a)"))
    assert tree.succeeds()
    q = tree.children[0]
    assert str(q.atom) == "q(b,a)" and len(q.branches) == 2


def test_andor_tree_trivial():
    prog = parse_program("a. b :- a.")
    assert build_andor_tree(prog, A("a")).shape() == ("and", "a", (("box",),))
    assert build_andor_tree(prog, A("c")).shape() == ("and", "c", ())


def test_ground_equivalence_with_cotree():
    prog = fixture("ground_ex38")
    for goal in ("p(a)", "q(b,a)", "s(a,b)", "s(b,a)"):
        cot = build_cotree(prog, A(goal))
        assert andor_shape(cot) == build_andor_tree(prog, A(goal)).shape()
        assert (find_success_subtree(cot) is not None) == build_andor_tree(prog, A(goal)).succeeds()


def test_oracle_agreement_ground():
    prog = fixture("ground_ex38")
    model = ground_tp(prog)
    atoms = [A(t) for t in ("p(a)", "p(b)", "q(b,a)", "q(a,b)", "s(a,b)", "s(b,a)")]
    for a in atoms:
        assert sld_refutes(prog, a) == (a in model)
