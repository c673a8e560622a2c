#!/usr/bin/env python3
"""Classify every registry benchmark and cross-check the verdicts.

For each benchmark this runs the three-step classifier (exterior cone,
sufficient series, necessary series), the measure-integral criterion, and
— on Euclidean metrics — a Monte Carlo boundary probe with
distance-to-z0 boundary data.  It prints one row per benchmark and
optionally dumps the full reports as JSON.

Usage:
    python3 scripts/run_benchmarks.py [--resolution 3] [--k-max 16]
        [--walkers 2000] [--out report.json]
"""

import argparse
import json
from dataclasses import asdict

import wienercap as wc
from wienercap.kernel import euclidean_bounds
from wienercap.pde import PDEError, WalkConfig, classification_probe
from wienercap.wiener import integral_test


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=3,
                    help="capacity sampling resolution (default 3)")
    ap.add_argument("--k-max", type=int, default=16,
                    help="series depth (default 16)")
    ap.add_argument("--walkers", type=int, default=2000,
                    help="Monte Carlo walkers per probe (default 2000)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="write full JSON reports here")
    args = ap.parse_args()

    bounds = euclidean_bounds(1, 1.0)
    rows, reports = [], {}
    for name in wc.benchmark_names():
        dom = wc.benchmark(name)
        cls = wc.classify(dom, bounds, lam=0.25, K_max=args.k_max,
                          resolution=args.resolution)
        irep = integral_test(dom, 0.25, 2 * bounds.b0,
                             probes=[0.4, 0.28, 0.2, 0.14, 0.1, 0.07, 0.05,
                                     0.035])
        suff = cls.sufficient.verdict if cls.sufficient else None
        consistent = not (irep.divergent and suff == "CONVERGENT")
        pde_status = "-"
        if dom.metric.kind == "euclidean":
            try:
                walk = WalkConfig(1.0, 1e-3, args.walkers, args.seed, 4.0)
                fit, contradicts = classification_probe(
                    dom, cls.verdict, [0.12 * 0.55 ** j for j in range(8)],
                    walk)
                pde_status = fit.status + (" (CONTRADICTS)" if contradicts
                                           else "")
            except PDEError as exc:
                pde_status = f"SKIPPED ({exc})"
        pinned = wc.BENCHMARK_STATUS[name] or "-"
        rows.append((name, cls.verdict, cls.basis, pinned,
                     "yes" if consistent else "NO", pde_status))
        reports[name] = {
            "verdict": cls.verdict, "basis": cls.basis,
            "structural_constant": cls.structural_constant,
            "integral": asdict(irep), "pde_status": pde_status,
        }

    hdr = ("benchmark", "verdict", "basis", "pinned", "consistent", "pde")
    widths = [max(len(str(r[i])) for r in rows + [hdr]) for i in range(len(hdr))]
    for r in (hdr, *rows):
        print("  ".join(str(v).ljust(w) for v, w in zip(r, widths)))

    bad = [r[0] for r in rows
           if r[3] != "-" and r[1] != r[3]] + [r[0] for r in rows if r[4] == "NO"]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(reports, fh, indent=2, sort_keys=True)
        print(f"\nwrote {args.out}")
    if bad:
        print(f"\nMISMATCH on: {sorted(set(bad))}")
        return 1
    print("\nall verdicts match the pinned registry statuses")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
