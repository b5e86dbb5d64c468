"""First-order terms, atoms, clauses, programs and substitutions.

Everything here is immutable once built, so values can be shared freely
between worker threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class Var:
    """A logic variable identified by ``(name, gen)``.

    Generation 0 is the variable as written in the source text; higher
    generations are produced by renaming clauses apart.
    """

    __slots__ = ("name", "gen", "_hash")

    def __init__(self, name: str, gen: int = 0):
        self.name = name
        self.gen = gen
        self._hash = hash(("var", name, gen))

    def __eq__(self, other):
        return (
            isinstance(other, Var)
            and self.gen == other.gen
            and self.name == other.name
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.name, self.gen) < (other.name, other.gen)

    def __repr__(self):
        return f"Var({self.name!r}, {self.gen})"

    def __str__(self):
        if self.gen == 0:
            return self.name
        if self.name[-1].isdigit():
            return f"{self.name}_{self.gen}"
        return f"{self.name}{self.gen}"


class Fn:
    """A compound term ``name(args...)``; constants have no arguments."""

    __slots__ = ("name", "args", "_hash", "_ground")

    def __init__(self, name: str, args: tuple = ()):
        self.name = name
        self.args = tuple(args)
        self._hash = hash((name, self.args))
        self._ground = all(
            isinstance(a, Fn) and a._ground for a in self.args
        )

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return self._ground

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Fn):
            return False
        # explicit stack: derivations can build very deep terms
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if isinstance(a, Fn):
                if not (
                    isinstance(b, Fn)
                    and a._hash == b._hash
                    and a.name == b.name
                    and len(a.args) == len(b.args)
                ):
                    return False
                stack.extend(zip(a.args, b.args))
            elif a != b:
                return False
        return True

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.args:
            return f"Fn({self.name!r})"
        return f"Fn({self.name!r}, {self.args!r})"

    def __str__(self):
        if not self.args:
            return self.name
        return term_text(self)


Term = Union[Var, Fn]


def term_text(t) -> str:
    """Print a term without recursion."""
    out = []
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, str):
            out.append(u)
        elif isinstance(u, Fn) and u.args:
            out.append(u.name + "(")
            stack.append(")")
            for i in range(len(u.args) - 1, -1, -1):
                stack.append(u.args[i])
                if i:
                    stack.append(",")
        else:
            out.append(u.name if isinstance(u, Fn) else str(u))
    return "".join(out)


class Atom:
    """``pred(args...)``."""

    __slots__ = ("pred", "args", "_hash")

    def __init__(self, pred: str, args: tuple = ()):
        self.pred = pred
        self.args = tuple(args)
        self._hash = hash(("atom", pred, self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return all(isinstance(a, Fn) and a.is_ground for a in self.args)

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Atom)
            and self._hash == other._hash
            and self.pred == other.pred
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Atom({self.pred!r}, {self.args!r})"

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple = ()

    def __post_init__(self):
        if len(set(self.body)) != len(self.body):
            raise ValueError(f"clause body atoms must be distinct: {self}")

    @property
    def is_unit(self) -> bool:
        return not self.body

    def body_only_vars(self) -> list[Var]:
        head_vars = set(variables_of(self.head))
        return [v for v in variables_of(self.body) if v not in head_vars]

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(b) for b in self.body)}."


class ArityError(ValueError):
    """A symbol is used with two different arities."""

    def __init__(self, kind: str, name: str, first: int, second: int):
        super().__init__(
            f"{kind} '{name}' used with arity {first} and arity {second}"
        )
        self.kind = kind
        self.name = name
        self.arities = (first, second)


@dataclass(frozen=True)
class Signature:
    functions: Mapping[str, int] = field(default_factory=dict)
    predicates: Mapping[str, int] = field(default_factory=dict)

    @classmethod
    def infer(cls, atoms: Iterable[Atom]) -> "Signature":
        functions: dict[str, int] = {}
        predicates: dict[str, int] = {}
        for atom in atoms:
            _note(predicates, "predicate", atom.pred, atom.arity)
            stack = list(atom.args)
            while stack:
                t = stack.pop()
                if isinstance(t, Fn):
                    _note(functions, "function", t.name, t.arity)
                    stack.extend(t.args)
        return cls(functions, predicates)


def _note(table, kind, name, arity):
    seen = table.setdefault(name, arity)
    if seen != arity:
        raise ArityError(kind, name, seen, arity)


@dataclass(frozen=True)
class Program:
    clauses: tuple = ()
    signature: Signature = field(default_factory=Signature)

    @classmethod
    def from_clauses(cls, clauses: Iterable[Clause]) -> "Program":
        clauses = tuple(clauses)
        atoms = [a for c in clauses for a in (c.head, *c.body)]
        return cls(clauses, Signature.infer(atoms))

    def __post_init__(self):
        index: dict[str, list[int]] = {}
        for i, c in enumerate(self.clauses):
            index.setdefault(c.head.pred, []).append(i)
        object.__setattr__(
            self, "_by_pred", {k: tuple(v) for k, v in index.items()}
        )
        object.__setattr__(
            self,
            "_body_only",
            tuple(tuple(c.body_only_vars()) for c in self.clauses),
        )

    def clauses_for(self, pred: str) -> tuple:
        """Indices of clauses whose head has predicate ``pred``."""
        return self._by_pred.get(pred, ())

    def body_only_vars(self, index: int) -> tuple:
        return self._body_only[index]

    @property
    def is_ground(self) -> bool:
        return all(
            a.is_ground for c in self.clauses for a in (c.head, *c.body)
        )

    def __len__(self):
        return len(self.clauses)

    def __str__(self):
        return "\n".join(str(c) for c in self.clauses)


# -- substitutions ---------------------------------------------------------


class Substitution:
    """Finite ordered map from variables to terms.

    Identity bindings are dropped on construction, so two substitutions
    are equal exactly when they bind the same variables to the same terms.
    Iteration follows binding order.
    """

    __slots__ = ("_map",)

    def __init__(self, bindings: Iterable = ()):
        if isinstance(bindings, Mapping):
            bindings = bindings.items()
        m: dict[Var, Term] = {}
        for v, t in bindings:
            if v == t:
                continue
            if v in m:
                raise ValueError(f"variable {v} bound twice")
            m[v] = t
        self._map = m

    @classmethod
    def _trusted(cls, m: dict) -> "Substitution":
        s = cls.__new__(cls)
        s._map = m
        return s

    def __len__(self):
        return len(self._map)

    def __iter__(self) -> Iterator[Var]:
        return iter(self._map)

    def __contains__(self, v):
        return v in self._map

    def __getitem__(self, v: Var) -> Term:
        return self._map[v]

    def get(self, v, default=None):
        return self._map.get(v, default)

    def items(self):
        return self._map.items()

    def domain(self) -> tuple:
        return tuple(self._map)

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __bool__(self):
        return bool(self._map)

    def __repr__(self):
        return f"Substitution({str(self)})"

    def __str__(self):
        return "{" + ", ".join(f"{v}/{t}" for v, t in self._map.items()) + "}"

    def __call__(self, x):
        return apply_substitution(x, self)

    def restrict(self, keep: Iterable[Var]) -> "Substitution":
        keep = set(keep)
        return Substitution._trusted(
            {v: t for v, t in self._map.items() if v in keep}
        )

    def extend(self, other: "Substitution") -> "Substitution":
        """Append the bindings of ``other`` without rewriting anything.

        This is how triangular answer chains grow; ``other`` must not bind
        any variable already bound here.
        """
        m = dict(self._map)
        for v, t in other.items():
            if v in m:
                raise ValueError(f"variable {v} bound twice")
            m[v] = t
        return Substitution._trusted(m)

    def resolve(self) -> "Substitution":
        """Compose a triangular chain binding by binding, in order."""
        # Binding j only sees the bindings after it, so resolving from the
        # back lets each variable's final value be computed once.
        items = list(self._map.items())
        pos = {v: j for j, (v, _) in enumerate(items)}
        full: dict = {}
        for j in range(len(items) - 1, -1, -1):
            v, t = items[j]
            full[v] = rebuild(t, lambda u, j=j: full[u] if pos.get(u, -1) > j else u)
        return Substitution._trusted(
            {v: full[v] for v, _ in items if full[v] != v}
        )


def apply_substitution(x, s: Substitution):
    """Apply ``s`` to a term, atom, clause or sequence of atoms in one pass."""
    if not s:
        return x
    if isinstance(x, (Var, Fn)):
        return _apply_term(x, s._map)
    if isinstance(x, Atom):
        return Atom(x.pred, tuple(_apply_term(a, s._map) for a in x.args))
    if isinstance(x, Clause):
        return Clause(
            apply_substitution(x.head, s),
            tuple(apply_substitution(b, s) for b in x.body),
        )
    if isinstance(x, (tuple, list)):
        return type(x)(apply_substitution(a, s) for a in x)
    raise TypeError(f"cannot apply a substitution to {type(x).__name__}")


def _apply_term(t, m):
    if isinstance(t, Var):
        return m.get(t, t)
    if t._ground:
        return t
    return rebuild(t, lambda v: m.get(v, v))


def rebuild(t, leaf):
    """Copy ``t`` with every variable ``v`` replaced by ``leaf(v)``.

    Ground subterms are shared, and the traversal uses an explicit stack.
    """
    if isinstance(t, Var):
        return leaf(t)
    if t._ground:
        return t
    done: list = []
    stack = [(t, False)]
    while stack:
        u, expanded = stack.pop()
        if isinstance(u, Var):
            done.append(leaf(u))
        elif u._ground:
            done.append(u)
        elif expanded:
            n = len(u.args)
            args = tuple(done[len(done) - n :])
            del done[len(done) - n :]
            done.append(u if all(a is b for a, b in zip(args, u.args)) else Fn(u.name, args))
        else:
            stack.append((u, True))
            stack.extend((a, False) for a in reversed(u.args))
    return done[0]


def compose_substitutions(s1: Substitution, s2: Substitution) -> Substitution:
    """The substitution that behaves like applying ``s1`` and then ``s2``."""
    if not s1:
        return s2
    if not s2:
        return s1
    m: dict[Var, Term] = {}
    for v, t in s1.items():
        t2 = _apply_term(t, s2._map)
        if t2 != v:
            m[v] = t2
    for v, t in s2.items():
        if v not in s1:
            m[v] = t
    return Substitution._trusted(m)


def variables_of(x) -> list[Var]:
    """Distinct variables of a term, atom, clause or atom sequence, in
    order of first occurrence."""
    seen: dict[Var, None] = {}
    stack = [x]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            seen.setdefault(t, None)
        elif isinstance(t, Fn):
            if not t._ground:
                stack.extend(reversed(t.args))
        elif isinstance(t, Atom):
            stack.extend(reversed(t.args))
        elif isinstance(t, Clause):
            stack.extend(reversed(t.body))
            stack.append(t.head)
        elif isinstance(t, (tuple, list)):
            stack.extend(reversed(t))
        else:
            raise TypeError(f"not a term: {t!r}")
    return list(seen)


def rename_apart(clause: Clause, gen: int) -> Clause:
    """Replace every variable of ``clause`` by its namesake at ``gen``."""
    vs = variables_of(clause)
    if not vs:
        return clause
    return apply_substitution(
        clause, Substitution._trusted({v: Var(v.name, gen) for v in vs})
    )


def max_generation(x) -> int:
    return max((v.gen for v in variables_of(x)), default=0)


def term_depth(t) -> int:
    best = 0
    stack = [(t, 0)]
    while stack:
        u, d = stack.pop()
        best = max(best, d)
        if isinstance(u, (Fn, Atom)):
            stack.extend((a, d + 1) for a in u.args)
    return best


def term_size(t) -> int:
    """Number of symbol and variable occurrences."""
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        if isinstance(u, (Fn, Atom)):
            stack.extend(u.args)
    return n
