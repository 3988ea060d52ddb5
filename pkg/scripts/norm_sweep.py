#!/usr/bin/env python3
"""Sweep interior operator norms against their theoretical bounds.

One CSV row per (degree, partition family, operator) cell; the norm column is
the worst interior stencil l1 norm seen across the cell's partitions. The
margin column should stay positive everywhere.
"""

import argparse

from splineqi import (
    PartitionSpec,
    SplineSpace,
    build_nearbest_qi,
    build_q2star,
    build_qp2star,
    generate_partition,
    norm_upper_bound,
    theoretical_bound,
)


def worst_norm(family, m, n, ratio, seeds, build):
    worst = 0.0
    for seed in seeds:
        spec = PartitionSpec(family=family, a=0.0, b=1.0, n=n, ratio=ratio, seed=seed)
        space = SplineSpace.from_knots(generate_partition(spec, m))
        worst = max(worst, norm_upper_bound(build(space), interior_only=True))
    return worst


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--n", type=int, default=28, help="subintervals per partition")
    ap.add_argument("--ratios", type=float, nargs="+", default=[1.5, 2.0, 4.0],
                    help="grading ratios for the geometric family")
    ap.add_argument("--seeds", type=int, default=20,
                    help="number of random partitions per cell")
    args = ap.parse_args(argv)

    print("m,family,ratio,operator,p,nu1_interior,bound,margin")
    for m in args.m:
        operators = [
            ("q2star", 1, build_q2star, theoretical_bound("q2star", m)),
            ("qp2star", m, lambda sp, m=m: build_qp2star(sp, m),
             theoretical_bound("qp2star", m)),
            ("nearbest", m, lambda sp, m=m: build_nearbest_qi(sp, m),
             theoretical_bound("nearbest", m)),
        ]
        cells = [("uniform", 1.0, [0])]
        cells += [("geometric", r, [0]) for r in args.ratios]
        cells += [("random", 1.0, list(range(args.seeds)))]
        for family, ratio, seeds in cells:
            for name, p, build, bound in operators:
                nu = worst_norm(family, m, args.n, ratio, seeds, build)
                print(f"{m},{family},{ratio!r},{name},{p},{nu!r},{bound!r},"
                      f"{bound - nu!r}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
