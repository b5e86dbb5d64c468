"""Print the first answers of a goal, with ranks and solved forms.

    python scripts/enumerate.py listnat "list(X)." -n 6
"""
import argparse
import time

from coalp import DeriveOptions, derive_answers, fixture, load_program, parse_goal
from coalp import FIXTURES


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("program", help="fixture stem or path to a .coalp file")
    ap.add_argument("goal")
    ap.add_argument("-n", "--answers", type=int, default=5)
    ap.add_argument("--states", type=int, default=10_000)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    if (FIXTURES / f"{args.program}.coalp").exists():
        prog = fixture(args.program)
    else:
        prog = load_program(args.program)
    opts = DeriveOptions(workers=args.workers, max_states=args.states, max_answers=args.answers)
    start = time.perf_counter()
    stream = derive_answers(prog, parse_goal(args.goal), options=opts)
    for i, ans in enumerate(stream, 1):
        print(f"{i:>3}  rank {ans.rank:<3} {ans.format():<50} {ans.format(solved=True)}")
    ms = (time.perf_counter() - start) * 1000
    print(f"status: {stream.status}, states: {stream.states}, {ms:.1f} ms")


if __name__ == "__main__":
    main()
