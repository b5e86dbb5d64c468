"""Guardedness verdicts for every bundled fixture."""
import argparse
import time

from coalp import FIXTURES, fixture, guard_program


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true", help="print full reports")
    args = ap.parse_args()

    start = time.perf_counter()
    for path in sorted(FIXTURES.glob("*.coalp")):
        if path.stem.startswith("datalog_"):
            continue
        report = guard_program(fixture(path.stem))
        first = report.failures()[0] if report.failures() else ""
        print(f"{path.stem:<12} {report.verdict:<12} {first}")
        if args.verbose:
            print("    " + report.format().replace("\n", "\n    "))
    print(f"{(time.perf_counter() - start) * 1000:.0f} ms")


if __name__ == "__main__":
    main()
