"""Prolog-style concrete syntax for programs and goals.

Clauses are ``head :- b1, ..., bn.`` or ``head.``; identifiers starting
with an upper-case letter or ``_`` are variables, everything else is a
symbol.  ``%`` starts a comment that runs to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .terms import (
    ArityError,
    Atom,
    Clause,
    Fn,
    Program,
    Substitution,
    Var,
    apply_substitution,
    variables_of,
)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    line: int
    column: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(Exception):
    """Raised by the strict parsing entry points; carries diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass
class SourceProgram:
    text: str
    path: str | None = None
    program: Program | None = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.program is not None

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]


# -- lexer -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<query>\?-)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*|[0-9]+)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise _Fail(line, col, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            toks.append(_Tok(kind if kind != "punct" else chunk, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = m.start() + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Fail(Exception):
    def __init__(self, line, col, message):
        super().__init__(message)
        self.line, self.col, self.message = line, col, message


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.anon = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str) -> _Tok:
        t = self.tok
        if t.kind != kind:
            shown = t.text or "end of input"
            raise _Fail(t.line, t.col, f"expected {kind!r}, found {shown!r}")
        self.i += 1
        return t

    def at(self, kind: str) -> bool:
        return self.tok.kind == kind

    def skip_to_period(self):
        while not self.at("eof"):
            kind = self.tok.kind
            self.i += 1
            if kind == ".":
                return

    def term(self):
        t = self.tok
        if t.kind == "var":
            self.i += 1
            if t.text == "_":
                self.anon += 1
                return Var(f"_G{self.anon}")
            return Var(t.text)
        if t.kind == "name":
            self.i += 1
            return Fn(t.text, self.args())
        raise _Fail(t.line, t.col, f"expected a term, found {t.text or 'end of input'!r}")

    def args(self) -> tuple:
        if not self.at("("):
            return ()
        self.take("(")
        out = [self.term()]
        while self.at(","):
            self.take(",")
            out.append(self.term())
        self.take(")")
        return tuple(out)

    def atom(self) -> tuple[Atom, _Tok]:
        t = self.tok
        if t.kind != "name" or t.text[0].isdigit():
            found = t.text or "end of input"
            raise _Fail(t.line, t.col, f"expected a predicate name, found {found!r}")
        self.i += 1
        return Atom(t.text, self.args()), t


# -- parsing ---------------------------------------------------------------


def load_source(text: str, path: str | None = None) -> SourceProgram:
    """Parse program text, collecting every diagnostic; never raises."""
    src = SourceProgram(text=text, path=path)
    try:
        p = _Parser(text)
    except _Fail as e:
        src.diagnostics.append(Diagnostic("error", e.line, e.col, e.message))
        return src
    except Exception as e:  # pragma: no cover - defensive totality
        src.diagnostics.append(Diagnostic("error", 1, 1, f"internal error: {e}"))
        return src

    clauses: list[tuple[Clause, _Tok, list[_Tok]]] = []
    while not p.at("eof"):
        try:
            head, head_tok = p.atom()
            body, body_toks = [], []
            if p.at("neck"):
                p.take("neck")
                a, at = p.atom()
                body.append(a)
                body_toks.append(at)
                while p.at(","):
                    p.take(",")
                    a, at = p.atom()
                    body.append(a)
                    body_toks.append(at)
            p.take(".")
        except _Fail as e:
            src.diagnostics.append(Diagnostic("error", e.line, e.col, e.message))
            p.skip_to_period()
            continue
        dup = _first_duplicate(body)
        if dup is not None:
            tok = body_toks[dup]
            src.diagnostics.append(
                Diagnostic(
                    "error",
                    tok.line,
                    tok.col,
                    f"duplicate body atom {body[dup]} (body atoms must be distinct)",
                )
            )
            continue
        clauses.append((Clause(head, tuple(body)), head_tok, body_toks))

    src.diagnostics.extend(_arity_diagnostics(clauses))
    if not src.errors:
        src.program = Program.from_clauses(c for c, _, _ in clauses)
    return src


def _first_duplicate(atoms):
    seen = set()
    for i, a in enumerate(atoms):
        if a in seen:
            return i
        seen.add(a)
    return None


def _arity_diagnostics(clauses):
    out = []
    functions: dict[str, int] = {}
    predicates: dict[str, int] = {}
    for clause, head_tok, body_toks in clauses:
        for atom, tok in zip((clause.head, *clause.body), (head_tok, *body_toks)):
            try:
                _check(predicates, "predicate", atom.pred, atom.arity)
                stack = list(atom.args)
                while stack:
                    t = stack.pop()
                    if isinstance(t, Fn):
                        _check(functions, "function", t.name, t.arity)
                        stack.extend(t.args)
            except ArityError as e:
                out.append(Diagnostic("error", tok.line, tok.col, f"arity mismatch: {e}"))
    return out


def _check(table, kind, name, arity):
    seen = table.setdefault(name, arity)
    if seen != arity:
        raise ArityError(kind, name, seen, arity)


def parse_program(text: str) -> Program:
    src = load_source(text)
    if src.program is None:
        raise ParseError(src.diagnostics)
    return src.program


def load_program(path) -> SourceProgram:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        return SourceProgram(
            text="", path=str(path), diagnostics=[Diagnostic("error", 1, 1, str(e))]
        )
    return load_source(text, str(path))


def parse_goal(text: str) -> Atom:
    """Parse a single atomic goal; conjunctions are rejected."""
    try:
        p = _Parser(text)
        if p.at("query"):
            p.take("query")
        goal, _ = p.atom()
        if p.at(","):
            t = p.tok
            raise _Fail(
                t.line,
                t.col,
                "goals must be a single atom (conjunctive goals are not supported)",
            )
        if p.at("."):
            p.take(".")
        p.take("eof")
    except _Fail as e:
        raise ParseError([Diagnostic("error", e.line, e.col, e.message)]) from None
    return goal


def parse_term(text: str):
    try:
        p = _Parser(text)
        t = p.term()
        p.take("eof")
    except _Fail as e:
        raise ParseError([Diagnostic("error", e.line, e.col, e.message)]) from None
    return t


def parse_atom(text: str) -> Atom:
    return parse_goal(text)


def parse_clause(text: str) -> Clause:
    prog = parse_program(text)
    if len(prog.clauses) != 1:
        raise ValueError(f"expected exactly one clause in {text!r}")
    return prog.clauses[0]


# -- printing --------------------------------------------------------------


def format_program(program: Program) -> str:
    return "".join(f"{c}\n" for c in program.clauses)


def _dependency_order(chain: Substitution, roots) -> list:
    """Bindings reachable from ``roots``, depth first, then the rest."""
    order = []
    seen = set()
    stack = list(reversed(list(roots)))
    while stack:
        v = stack.pop()
        if v in seen or v not in chain:
            continue
        seen.add(v)
        order.append(v)
        stack.extend(reversed(variables_of(chain[v])))
    order.extend(v for v in chain if v not in seen)
    return order


def format_answer(chain: Substitution, goal_vars=(), solved: bool = False) -> str:
    """Print an answer chain as ``{x/cons(x1,y1), x1/0, y1/nil}``.

    Bindings are listed depth first from the goal variables, so each
    variable introduced on a right-hand side is explained next.  With
    ``solved`` the chain is composed and only goal variables are shown.
    """
    goal_vars = list(goal_vars)
    if solved:
        flat = chain.resolve()
        parts = [f"{v}/{flat[v]}" for v in goal_vars if v in flat]
        return "{" + ", ".join(parts) + "}"
    parts = [f"{v}/{chain[v]}" for v in _dependency_order(chain, goal_vars)]
    return "{" + ", ".join(parts) + "}"


def solved_form(chain: Substitution, goal_vars) -> Substitution:
    return chain.resolve().restrict(goal_vars)


def canonical_key(goal: Atom, chain: Substitution) -> str:
    """Goal instance under the chain, with leftover variables renumbered
    by first occurrence; equal keys mean the same solution."""
    inst = apply_substitution(goal, chain.resolve())
    renaming = Substitution(
        (v, Var(f"_V{i}")) for i, v in enumerate(variables_of(inst))
    )
    return str(apply_substitution(inst, renaming))


def export_dot(tree, name: str = "cotree") -> str:
    """DOT digraph for a coinductive tree.

    And-nodes carry their atom, or-nodes are filled points and each
    unit-clause or-node gets a ``box`` child standing for the empty goal.
    Node ids are preorder indices, so output is deterministic.
    """
    lines = [f"digraph {name} {{", "  node [fontname=\"monospace\"];"]
    counter = 0

    def fresh():
        nonlocal counter
        counter += 1
        return f"n{counter - 1}"

    root_id = fresh()
    root_attrs = "shape=ellipse"
    if tree.root.candidates:
        root_attrs += ", style=dashed"
    lines.append(f"  {root_id} [label={_q(str(tree.root.atom))}, {root_attrs}];")
    stack = [(root_id, tree.root)]
    while stack:
        nid, node = stack.pop()
        emitted = []
        for orn in node.or_children:
            oid = fresh()
            lines.append(f"  {oid} [shape=point, style=filled, width=0.1];")
            lines.append(f"  {nid} -> {oid};")
            if not orn.children:
                bid = fresh()
                lines.append(f"  {bid} [label=\"□\", shape=box];")
                lines.append(f"  {oid} -> {bid};")
            for child in orn.children:
                cid = fresh()
                attrs = "shape=ellipse"
                if child.candidates:
                    attrs += ", style=dashed"
                lines.append(f"  {cid} [label={_q(str(child.atom))}, {attrs}];")
                lines.append(f"  {oid} -> {cid};")
                emitted.append((cid, child))
        stack.extend(reversed(emitted))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'
