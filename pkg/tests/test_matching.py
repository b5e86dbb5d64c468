import itertools

from hypothesis import given, settings

from coalp.matching import term_match, unify
from coalp.syntax import parse_atom
from coalp.terms import Atom, Fn, Substitution, Var, apply_substitution, variables_of

from conftest import atom_st


def A(text):
    return parse_atom(text)


def test_unify_connected():
    assert unify(A("connected(0,Y)"), A("connected(X,X)")) == {
        Var("X"): Fn("0"),
        Var("Y"): Fn("0"),
    }


def test_unify_occurs_check():
    assert unify(A("p(X)"), A("p(f(X))")) is None


def test_unify_stream():
    got = unify(A("stream(X)"), A("stream(scons(Z,Y))"))
    assert got == {Var("X"): parse_atom("t(scons(Z,Y))").args[0]}
    assert list(got) == [Var("X")]


def test_unify_clash():
    assert unify(A("p(a)"), A("p(b)")) is None
    assert unify(A("p(a)"), A("q(a)")) is None


def test_match_binds_head_only():
    got = term_match(A("list(cons(X,Y))"), A("list(cons(0,nil))"))
    assert got == {Var("X"): Fn("0"), Var("Y"): Fn("nil")}


def test_match_does_not_instantiate_goal():
    assert term_match(A("nat(0)"), A("nat(X)")) is None


def test_match_identical_ground():
    assert term_match(A("list(nil)"), A("list(nil)")) == Substitution()


def test_match_shared_names():
    # the goal's X is a constant to the matcher even though the head uses X too
    got = term_match(A("p(X,Y)"), A("p(Y,X)"))
    assert got == {Var("X"): Var("Y"), Var("Y"): Var("X")}
    assert term_match(A("p(X,X)"), A("p(X,Y)")) is None


@given(atom_st(), atom_st())
def test_unify_is_a_unifier_and_idempotent(a, b):
    theta = unify(a, b)
    if theta is None:
        return
    assert apply_substitution(a, theta) == apply_substitution(b, theta)
    assert apply_substitution(apply_substitution(a, theta), theta) == apply_substitution(a, theta)


@given(atom_st(), atom_st())
def test_unify_symmetric(a, b):
    t1, t2 = unify(a, b), unify(b, a)
    assert (t1 is None) == (t2 is None)
    if t1 is not None:
        u1, u2 = apply_substitution(a, t1), apply_substitution(a, t2)
        assert _variant(u1, u2)


@given(atom_st(), atom_st())
def test_match_implies_unify(h, g):
    # clause heads are renamed apart from goals before either operation
    h = apply_substitution(h, Substitution({v: Var(v.name, 7) for v in variables_of(h)}))
    theta = term_match(h, g)
    if theta is None:
        return
    assert unify(h, g) is not None
    assert apply_substitution(h, theta) == g
    assert set(theta.domain()) <= set(variables_of(h))


def _variant(a, b) -> bool:
    m1, m2 = term_match(a, b), term_match(b, a)
    return m1 is not None and m2 is not None


# -- generality against brute force ---------------------------------------

SMALL_VARS = [Var("X"), Var("Y"), Var("Z")]
SMALL_TERMS = [Fn("a"), Fn("b"), *SMALL_VARS, Fn("f", (Fn("a"),)), Fn("f", (Var("X"),)), Fn("f", (Var("Y"),))]


def _all_substitutions():
    for image in itertools.product(SMALL_TERMS, repeat=len(SMALL_VARS)):
        yield Substitution(zip(SMALL_VARS, image))


def _solve_gamma(theta, sigma, vs):
    """A gamma with sigma(v) = gamma(theta(v)) for all v, or None."""
    lhs = Atom("tuple", tuple(apply_substitution(v, theta) for v in vs))
    rhs = Atom("tuple", tuple(apply_substitution(v, sigma) for v in vs))
    return term_match(lhs, rhs)


@settings(max_examples=60, deadline=None)
@given(atom_st(max_leaves=3, names=["X", "Y", "Z"]), atom_st(max_leaves=3, names=["X", "Y", "Z"]))
def test_mgu_generality_bruteforce(a, b):
    a = apply_substitution(a, Substitution({v: Var(v.name) for v in variables_of(a)}))
    b = apply_substitution(b, Substitution({v: Var(v.name) for v in variables_of(b)}))
    theta = unify(a, b)
    vs = sorted(set(variables_of(a)) | set(variables_of(b)) | set(SMALL_VARS))
    found_unifier = False
    for sigma in _all_substitutions():
        if apply_substitution(a, sigma) != apply_substitution(b, sigma):
            continue
        found_unifier = True
        assert theta is not None, f"{sigma} unifies {a} and {b} but unify failed"
        assert _solve_gamma(theta, sigma, vs) is not None, f"{sigma} does not factor through {theta}"
    if theta is not None and not found_unifier:
        # every mgu over these variables has a ground instance in the space
        grounding = Substitution({v: Fn("a") for v in SMALL_VARS})
        sigma = Substitution(
            {v: apply_substitution(apply_substitution(v, theta), grounding) for v in SMALL_VARS}
        )
        assert apply_substitution(a, sigma) == apply_substitution(b, sigma)


def test_deep_terms_no_recursion_error():
    t = Var("X")
    for _ in range(5000):
        t = Fn("s", (t,))
    a = Atom("nat", (t,))
    b = Atom("nat", (Var("Y"),))
    assert unify(a, b) is not None
    assert term_match(b, a) is not None
