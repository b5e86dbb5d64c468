from hypothesis import strategies as st

from coalp import fixture
from coalp.terms import Atom, Fn, Var

VAR_NAMES = ["X", "Y", "Z"]
FUNCTIONS = {"a": 0, "b": 0, "f": 1, "g": 2}


def var_st(names=VAR_NAMES):
    return st.builds(Var, st.sampled_from(names), st.sampled_from([0, 1]))


def term_st(max_leaves=6, names=VAR_NAMES):
    leaves = st.one_of(var_st(names), st.sampled_from([Fn("a"), Fn("b")]))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(lambda t: Fn("f", (t,)), sub),
            st.builds(lambda s, t: Fn("g", (s, t)), sub, sub),
        ),
        max_leaves=max_leaves,
    )


def atom_st(max_leaves=4, names=VAR_NAMES):
    return st.builds(lambda s, t: Atom("p", (s, t)), term_st(max_leaves, names), term_st(max_leaves, names))


def load(name):
    return fixture(name)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
