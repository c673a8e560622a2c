#!/usr/bin/env python3
"""Verdict stability of the loglog cusp family under the operator scale.

Classifies cusp domains with profile sqrt(c * s * loglog(1/s)) for several
widths c and operator coefficients beta (the operator is (1/beta) Laplace
- d/dt; the admissible exponents scale as a = b = beta / 4).  REGULAR
verdicts should be downward-closed in beta: seeing REGULAR at some beta
and IRREGULAR at a smaller one would violate the comparison structure.

With --force-series the exterior-cone shortcut is disabled (impossible
density threshold) so the ring-series criteria decide and the exponents
actually enter.

Usage:
    python3 scripts/beta_sweep.py [--c 0.5 1 2] [--betas 0.5 1 2 4]
        [--force-series]
"""

import argparse

import wienercap as wc
from wienercap.domain import cusp
from wienercap.kernel import euclidean_bounds
from wienercap.metric import euclidean


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", type=float, nargs="+", default=[0.5, 1.0, 2.0],
                    help="loglog profile widths (default 0.5 1 2)")
    ap.add_argument("--betas", type=float, nargs="+",
                    default=[0.5, 1.0, 2.0, 4.0])
    ap.add_argument("--resolution", type=int, default=3)
    ap.add_argument("--k-max", type=int, default=12)
    ap.add_argument("--force-series", action="store_true",
                    help="disable the cone shortcut so series decide")
    args = ap.parse_args()

    m = euclidean(1)
    theta_min = 0.999 if args.force_series else 0.01
    betas = sorted(args.betas)
    print("c \\ beta   " + "  ".join(f"{b:>12g}" for b in betas))
    violations = []
    for c in args.c:
        dom = cusp(m, profile="loglog", c=c)
        cells = []
        for beta in betas:
            cls = wc.classify(dom, euclidean_bounds(1, beta), lam=0.25,
                              K_max=args.k_max, H_max=24,
                              resolution=args.resolution,
                              cone_theta_min=theta_min)
            cells.append((cls.verdict, cls.basis))
        print(f"c={c:<8g} " + "  ".join(f"{v:>12}" for v, _ in cells))
        print(" " * 10 + "  ".join(f"({b:>10})" for _, b in cells))
        for i in range(len(betas)):
            for j in range(i + 1, len(betas)):
                if cells[j][0] == "REGULAR" and cells[i][0] == "IRREGULAR":
                    violations.append((c, betas[i], betas[j]))

    if violations:
        print(f"\ndownward-closedness VIOLATED: {violations}")
        return 1
    print("\nREGULAR verdicts are downward-closed in beta")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
