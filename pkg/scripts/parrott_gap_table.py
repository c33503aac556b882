"""os-norm versus MIN norm of (I, U, V) for every admissible truncation m."""
import argparse
import json

from l1ops.cli import cmd_parrott_gap


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=720)
    args = ap.parse_args()
    print(f"{'m':>2} {'dim':>5} {'os_value':>20} {'min_value':>20} {'gap':>12}")
    for m in range(2, 7):
        r = cmd_parrott_gap(m=m, grid=args.grid)
        res = r.results
        print(f"{m:>2} {r.parameters['dim']:>5} {res['os_value']!r:>20} {res['min_value']!r:>20} {res['gap']:>12.9f}")


if __name__ == "__main__":
    main()
