import csv

from coalp.bench import (
    CSV_FIELDS,
    DatalogConfig,
    generate_datalog,
    ground_program,
    run_bench,
    top_goals,
    write_csv,
)
from coalp.sld import ground_tp
from coalp.syntax import parse_program


def test_generator_deterministic(tmp_path):
    a = run_bench(seed=7, sizes=(2,), workers=(1,), out_dir=tmp_path / "a")
    b = run_bench(seed=7, sizes=(2,), workers=(1,), out_dir=tmp_path / "b")
    fa = (tmp_path / "a" / "datalog_s7_n2.coalp").read_text()
    fb = (tmp_path / "b" / "datalog_s7_n2.coalp").read_text()
    assert fa == fb
    assert a.rows[0].answers_hash == b.rows[0].answers_hash
    assert generate_datalog(DatalogConfig(seed=8)) != generate_datalog(DatalogConfig(seed=7))


def test_grounding_is_ground_and_acyclic():
    prog = ground_program(parse_program(generate_datalog(DatalogConfig(seed=3, size=2))))
    assert prog.is_ground
    assert all(len(set(c.body)) == len(c.body) for c in prog.clauses)
    assert top_goals(prog)
    assert ground_tp(prog)


def test_bench_csv(tmp_path):
    res = run_bench(seed=42, sizes=(2,), workers=(1, 2))
    assert res.ok
    assert res.rows[0].speedup == 1.0
    assert len({r.answers_hash for r in res.rows}) == 1
    out = tmp_path / "bench.csv"
    write_csv(res.rows, out)
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == CSV_FIELDS
    assert [int(r["workers"]) for r in rows] == [1, 2]
    assert all(float(r["speedup"]) >= 0 for r in rows)


def test_shipped_seed_programs_match_generator():
    from coalp import FIXTURES

    for n in (2, 4):
        shipped = (FIXTURES / f"datalog_s42_n{n}.coalp").read_text()
        assert shipped == generate_datalog(DatalogConfig(seed=42, size=n))
