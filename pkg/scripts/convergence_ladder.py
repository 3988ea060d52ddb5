#!/usr/bin/env python3
"""Fit empirical convergence orders across spline degrees.

Runs one refinement ladder per degree for a fixed operator kind and test
function, printing the per-size sup-norm errors and the fitted order. The
derivative-based operator should come out near m+1; the three-point stencils
near min(m+1, 3) with the uniform bonus order at m = 2.
"""

import argparse

from splineqi import (
    BUILTIN_FUNCTIONS,
    PartitionSpec,
    convergence_study,
    operator_recipe,
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", default="dqi",
                    choices=["dqi", "q2star", "qp2star", "nearbest"])
    ap.add_argument("--m", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--f", default="sin", choices=sorted(BUILTIN_FUNCTIONS))
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128])
    ap.add_argument("--family", default="uniform",
                    choices=["uniform", "geometric", "arithmetic", "random"])
    ap.add_argument("--ratio", type=float, default=1.0)
    ap.add_argument("--p", type=int, default=None,
                    help="offset radius; defaults to m for the wide kinds")
    args = ap.parse_args(argv)

    f = BUILTIN_FUNCTIONS[args.f]
    print("kind,m,f,family,ratio,n,h_max,error,order_running,fitted_order")
    for m in args.m:
        p = args.p
        if p is None and args.kind in ("qp2star", "nearbest"):
            p = m
        recipe = operator_recipe(args.kind, p)
        template = PartitionSpec(family=args.family, a=0.0, b=1.0,
                                 n=args.sizes[0], ratio=args.ratio)
        report = convergence_study(recipe, f, tuple(args.sizes), template, m)
        for row in report.rows:
            print(f"{args.kind},{m},{args.f},{args.family},{args.ratio!r},"
                  f"{row.n},{row.h_max!r},{row.error!r},{row.order_running!r},"
                  f"{report.fitted_order!r}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
