"""Most general unification (with occurs check) and one-sided term matching.

Both routines work on an explicit stack so that deep terms produced by
long derivations do not hit the interpreter's recursion limit, and both
return ``None`` on failure rather than raising.
"""
from __future__ import annotations

from .terms import Atom, Fn, Substitution, Var, rebuild


def _pairs(a, b):
    """Top-level argument pairs, or None when the heads clash."""
    if isinstance(a, Atom) or isinstance(b, Atom):
        if not (isinstance(a, Atom) and isinstance(b, Atom)):
            return None
        if a.pred != b.pred or len(a.args) != len(b.args):
            return None
        return list(zip(a.args, b.args))
    return [(a, b)]


def _walk(t, bound):
    while isinstance(t, Var):
        nxt = bound.get(t)
        if nxt is None:
            return t
        t = nxt
    return t


def _occurs(v, t, bound) -> bool:
    stack = [t]
    while stack:
        u = _walk(stack.pop(), bound)
        if isinstance(u, Var):
            if u == v:
                return True
        elif not u.is_ground:
            stack.extend(u.args)
    return False


def _resolve(t, bound):
    """Fully apply the triangular bindings in ``bound`` to ``t``."""

    def leaf(v):
        u = _walk(v, bound)
        return u if isinstance(u, Var) else _resolve(u, bound)

    return rebuild(_walk(t, bound), leaf)


def unify(a, b) -> Substitution | None:
    """Idempotent mgu of two atoms (or two terms), or None.

    Pairs are processed left to right.  When both sides are unbound
    variables the right-hand one is bound to the left-hand one, so the
    variables of ``a`` (typically the goal) survive as representatives.
    """
    pairs = _pairs(a, b)
    if pairs is None:
        return None
    bound: dict[Var, object] = {}
    order: list[Var] = []
    stack = pairs[::-1]
    while stack:
        s, t = stack.pop()
        s = _walk(s, bound)
        t = _walk(t, bound)
        if s is t or s == t:
            continue
        if isinstance(t, Var):
            if _occurs(t, s, bound):
                return None
            bound[t] = s
            order.append(t)
        elif isinstance(s, Var):
            if _occurs(s, t, bound):
                return None
            bound[s] = t
            order.append(s)
        else:
            if s.name != t.name or len(s.args) != len(t.args):
                return None
            stack.extend(reversed(list(zip(s.args, t.args))))
    return Substitution((v, _resolve(v, bound)) for v in order)


def term_match(head, goal) -> Substitution | None:
    """Term-matcher: ``theta`` over the variables of ``head`` only, such
    that ``head`` under ``theta`` equals ``goal`` exactly.

    Variables of ``goal`` behave as constants, even if they happen to share
    a name with a variable of ``head``.
    """
    pairs = _pairs(head, goal)
    if pairs is None:
        return None
    bound: dict[Var, object] = {}
    stack = pairs[::-1]
    while stack:
        p, g = stack.pop()
        if isinstance(p, Var):
            seen = bound.get(p)
            if seen is None:
                bound[p] = g
            elif seen != g:
                return None
            continue
        if p.is_ground:
            if p != g:
                return None
            continue
        if not isinstance(g, Fn) or g.name != p.name or len(g.args) != len(p.args):
            return None
        stack.extend(reversed(list(zip(p.args, g.args))))
    return Substitution(bound)


def matches(head, goal) -> bool:
    return term_match(head, goal) is not None


def unifiable(a, b) -> bool:
    return unify(a, b) is not None
