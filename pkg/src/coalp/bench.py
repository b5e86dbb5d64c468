"""Seeded Datalog workloads for timing the engine at several worker counts.

A generated program has a layer of extensional predicates given by random
facts and a few layers of rules whose bodies only mention lower layers,
so every program is acyclic.  Grounding substitutes constants for rule
variables, drops instances that need a missing fact and collapses
repeated body atoms; the result is what the engine and the T_P oracle
both run on.
"""
from __future__ import annotations

import csv
import hashlib
import itertools
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from .derive import DeriveOptions, derive_answers
from .guard import guard_program
from .sld import ground_tp
from .syntax import parse_program
from .terms import Atom, Clause, Fn, Program, Substitution, apply_substitution, variables_of

CSV_FIELDS = ["program", "size", "workers", "wall_ms", "speedup", "answers_hash"]


@dataclass(frozen=True)
class DatalogConfig:
    seed: int = 42
    size: int = 4  # predicates per layer
    layers: int = 3  # rule layers above the fact layer
    constants: int = 4
    fact_density: float = 0.35
    rules_per_pred: int = 2
    max_body: int = 3


def generate_datalog(cfg: DatalogConfig) -> str:
    """Program text for ``cfg``; the same config always gives the same text."""
    rng = random.Random(f"{cfg.seed}:{cfg.size}:{cfg.layers}")
    consts = [f"c{i}" for i in range(cfg.constants)]
    lines = [f"% datalog seed={cfg.seed} size={cfg.size} layers={cfg.layers}"]
    layer_preds = [[f"e{i}" for i in range(cfg.size)]]
    for p in layer_preds[0]:
        pairs = [(a, b) for a in consts for b in consts if rng.random() < cfg.fact_density]
        if not pairs:
            pairs = [(rng.choice(consts), rng.choice(consts))]
        lines.extend(f"{p}({a},{b})." for a, b in pairs)
    for k in range(1, cfg.layers + 1):
        preds = [f"p{k}_{i}" for i in range(cfg.size)]
        lower = [q for layer in layer_preds for q in layer]
        for p in preds:
            for _ in range(cfg.rules_per_pred):
                n = rng.randint(1, cfg.max_body)
                # a chain X -> V1 -> ... -> Y through the body atoms
                names = ["X"] + [f"V{j}" for j in range(1, n)] + ["Y"]
                chosen = []
                for j in range(n):
                    atom = f"{rng.choice(lower)}({names[j]},{names[j + 1]})"
                    if atom not in chosen:
                        chosen.append(atom)
                lines.append(f"{p}(X,Y) :- {', '.join(chosen)}.")
        layer_preds.append(preds)
    return "\n".join(lines) + "\n"


def ground_program(program: Program) -> Program:
    """All constant instances of the rules, minus those needing absent facts."""
    consts = sorted(
        {t.name for c in program.clauses for a in (c.head, *c.body) for t in a.args if isinstance(t, Fn)}
    )
    facts = {c.head for c in program.clauses if c.is_unit}
    edb = {a.pred for a in facts} - {c.head.pred for c in program.clauses if not c.is_unit}
    out = [c for c in program.clauses if c.is_unit]
    seen = set(out)
    for c in program.clauses:
        if c.is_unit:
            continue
        vs = variables_of(c)
        for combo in itertools.product(consts, repeat=len(vs)):
            theta = Substitution(zip(vs, (Fn(k) for k in combo)))
            body = tuple(dict.fromkeys(apply_substitution(c.body, theta)))
            if any(b.pred in edb and b not in facts for b in body):
                continue
            inst = Clause(apply_substitution(c.head, theta), body)
            if inst not in seen:
                seen.add(inst)
                out.append(inst)
    return Program.from_clauses(out)


def top_goals(program: Program) -> list[Atom]:
    """Every ground binary atom over the highest rule layer (or over all
    rule predicates when names do not follow the generator's scheme)."""
    rules = sorted({c.head.pred for c in program.clauses if not c.is_unit})
    layered = [p for p in rules if p.startswith("p") and "_" in p and p[1:].split("_")[0].isdigit()]
    if layered:
        top = max(int(p[1:].split("_")[0]) for p in layered)
        rules = [p for p in layered if int(p[1:].split("_")[0]) == top]
    consts = sorted(
        {t.name for c in program.clauses for a in (c.head, *c.body) for t in a.args if isinstance(t, Fn)}
    )
    return [Atom(p, (Fn(a), Fn(b))) for p in rules for a in consts for b in consts]


def answers_hash(atoms) -> str:
    text = "\n".join(sorted(str(a) for a in atoms))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def solve_goals(program: Program, goals, workers: int, report=None, threshold: int = 8) -> set:
    opts = DeriveOptions(workers=workers, max_answers=1, level1_threshold=threshold)
    proved = set()
    for g in goals:
        if next(iter(derive_answers(program, g, options=opts, report=report)), None) is not None:
            proved.add(g)
    return proved


@dataclass
class BenchRow:
    program: str
    size: int
    workers: int
    wall_ms: float
    speedup: float
    answers_hash: str

    def as_dict(self) -> dict:
        return {
            "program": self.program,
            "size": self.size,
            "workers": self.workers,
            "wall_ms": f"{self.wall_ms:.1f}",
            "speedup": f"{self.speedup:.3f}",
            "answers_hash": self.answers_hash,
        }


@dataclass
class BenchResult:
    rows: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def run_bench(
    seed: int = 42,
    sizes=(2, 4),
    workers=(1, 2, 4),
    out_dir: Path | None = None,
    programs: dict | None = None,
) -> BenchResult:
    """Time every (program, worker count) pair and cross-check answers.

    ``programs`` maps names to program text; by default programs are
    generated from ``seed`` for each size.  Generated texts are written to
    ``out_dir`` when given.
    """
    if programs is None:
        programs = {}
        for size in sizes:
            cfg = DatalogConfig(seed=seed, size=size)
            programs[f"datalog_s{seed}_n{size}"] = (size, generate_datalog(cfg))
    else:
        programs = {k: (0, v) for k, v in programs.items()}
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, (_, text) in programs.items():
            (out_dir / f"{name}.coalp").write_text(text, encoding="utf-8")

    result = BenchResult()
    for name, (size, text) in programs.items():
        ground = ground_program(parse_program(text))
        goals = top_goals(ground)
        expected = ground_tp(ground) & set(goals)
        report = guard_program(ground)
        base = None
        for w in workers:
            start = time.perf_counter()
            got = solve_goals(ground, goals, w, report)
            ms = (time.perf_counter() - start) * 1000.0
            if base is None:
                base = ms
            if got != expected:
                result.mismatches.append((name, w))
            result.rows.append(
                BenchRow(name, size, w, ms, base / ms if ms > 0 else 0.0, answers_hash(got))
            )
    return result


def write_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for r in rows:
            writer.writerow(r.as_dict())


def format_table(rows) -> str:
    lines = [f"{'program':<22} {'size':>4} {'workers':>7} {'wall_ms':>10} {'speedup':>8}  answers"]
    for r in rows:
        lines.append(
            f"{r.program:<22} {r.size:>4} {r.workers:>7} {r.wall_ms:>10.1f} {r.speedup:>8.3f}  {r.answers_hash}"
        )
    return "\n".join(lines)
