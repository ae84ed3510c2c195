"""Tabulate the guaranteed one-step decrement curves.

Emits a CSV grid of the increase-branch and decrease-branch worst-case
objective decrements as functions of the driving quadratic form, one pair
of curves per dimension.  Useful for eyeballing where single steps stop
paying for themselves.
"""

import argparse

from mvee.harness import emit_decrement_curves


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", nargs="+", type=int, default=[1, 2, 3, 10, 30])
    ap.add_argument("--out", default="curves.csv")
    args = ap.parse_args(argv)

    emit_decrement_curves(args.dims, args.out)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
