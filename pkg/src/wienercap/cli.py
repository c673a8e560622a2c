"""Command-line front door.

Subcommands:
    capacity         capacity of a configured target set, with refinement
    series           ring-capacity series table and divergence verdict
    integral         measure-based integral criterion along probes
    cone             exterior cone condition check
    classify         combined regularity verdict (exit 0/1/2)
    pde-verify       Monte Carlo solver calibration battery
    benchmark-suite  classify + consistency checks over the registry
    list-domains     available benchmarks, families and config keys

Every run writes a bundle directory: manifest.json (config hash, seed,
versions), config.txt (byte-exact copy), and per-command JSON/CSV files.
Exit codes: 0 success (classify: REGULAR), 1 IRREGULAR, 2 INCONCLUSIVE,
3 analysis failure, 64 invalid config.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .capacity import (CapacityConvergenceError, CapacityInputError,
                       capacity_of_target, refine_capacity)
from .config import (ConfigError, RunConfig, describe_schema, load_config)
from .domain import (BallComplementTarget, DomainError, DomainSpec, RingSpec,
                     RingTarget, SectionTarget, BENCHMARK_STATUS, benchmark,
                     benchmark_names, cone as cone_domain, cusp, cylinder,
                     halfspace_time, mask_domain, punctured, spatial_halfspace)
from .kernel import GaussBounds, GaussianKernel, HeatKernel, euclidean_bounds
from .metric import (MetricSpace, euclidean, heisenberg_koranyi,
                     parabolic_dist_many, stp)
from .pde import (PDEError, WalkConfig, boundary_holder,
                  boundary_phi_distance, classification_probe,
                  interior_axis_probes, pwb_solve)
from .regularity import RegularityError, classify, cone_check
from .report import ReportBundle
from .wiener import (WienerError, divergence_verdict, integral_test,
                     series_table, wiener_function)

EXIT_OK = 0
EXIT_IRREGULAR = 1
EXIT_INCONCLUSIVE = 2
EXIT_FAILURE = 3
EXIT_CONFIG = 64


# ---------------------------------------------------------------------------
# builders

def build_metric(cfg: RunConfig) -> MetricSpace:
    kind = cfg["metric.kind"]
    if kind == "euclidean":
        return euclidean(cfg["metric.N"], cfg["metric.volume-mode"],
                         cfg["metric.mc-samples"], cfg["seed"])
    if kind == "heisenberg-koranyi":
        return heisenberg_koranyi(cfg["metric.volume-mode"],
                                  cfg["metric.mc-samples"], cfg["seed"])
    raise ConfigError("table metrics must be constructed programmatically; "
                      "the CLI supports euclidean and heisenberg-koranyi")


def build_domain(cfg: RunConfig, metric: MetricSpace) -> DomainSpec:
    name = cfg["domain.benchmark"]
    if name:
        return benchmark(name, metric)
    fam = cfg["domain.family"]
    if fam == "halfspace-time":
        return halfspace_time(metric, cfg["domain.t0"], cfg["domain.halfwidth"])
    if fam == "spatial-halfspace":
        return spatial_halfspace(metric, cfg["domain.wall"], cfg["domain.t0"],
                                 cfg["domain.halfwidth"])
    if fam == "cylinder":
        return cylinder(metric, cfg["domain.radius"], cfg["domain.t1"],
                        cfg["domain.t2"], z0=cfg["domain.z0-position"])
    if fam == "cone":
        return cone_domain(metric, cfg["domain.M0"], cfg["domain.theta"],
                           cfg["domain.depth"], cfg["domain.t0"],
                           cfg["domain.halfwidth"])
    if fam == "cusp":
        return cusp(metric, cfg["domain.profile"], cfg["domain.p"],
                    cfg["domain.c"], cfg["domain.depth"], cfg["domain.t0"],
                    cfg["domain.halfwidth"])
    if fam == "punctured":
        return punctured(metric, cfg["domain.radius"], cfg["domain.tau"],
                         halfwidth=cfg["domain.halfwidth"])
    if fam == "mask":
        path = cfg["domain.mask-path"]
        if not path:
            raise ConfigError("family=mask requires domain.mask-path")
        return mask_domain(path, metric, stp(np.zeros(metric.N),
                                             cfg["domain.t0"]))
    raise ConfigError(f"unknown domain.family {fam!r}")


def build_bounds(cfg: RunConfig, metric: MetricSpace) -> GaussBounds:
    lam_c, a0, b0 = cfg["bounds.Lambda"], cfg["bounds.a0"], cfg["bounds.b0"]
    beta = cfg["pde.beta"]
    if metric.kind == "euclidean" and lam_c == 0.0 and a0 == 0.0 and b0 == 0.0:
        return euclidean_bounds(metric.N, beta)
    auto = euclidean_bounds(metric.N if metric.kind == "euclidean" else 1, beta)
    return GaussBounds(lam_c or auto.Lambda, a0 or beta / 4.0,
                       b0 or beta / 4.0, metric.c_d)


def exponents(cfg: RunConfig, bounds: GaussBounds) -> tuple[float, float]:
    a = cfg["wiener.a"] or bounds.a0
    b = cfg["wiener.b"] or 2.0 * bounds.b0
    return a, b


def series_kernel(cfg, metric, bounds) -> GaussianKernel:
    a, _ = exponents(cfg, bounds)
    return GaussianKernel(metric, a)


def wiener_kernel(cfg, metric, bounds):
    """Balayage kernel for the Wiener function: the exact heat kernel on
    Euclidean runs, the lower Gaussian bound G_{b0}/Lambda otherwise."""
    if metric.kind == "euclidean":
        return HeatKernel(metric.N, cfg["pde.beta"]), "heat-kernel"
    return (GaussianKernel(metric, bounds.b0, scale=1.0 / bounds.Lambda),
            "lower-gaussian-bound")


def default_probe_offsets(cfg) -> list[float]:
    offs = list(cfg["wiener.probes"])
    if offs:
        return offs
    lam = cfg["wiener.lambda"]
    return [0.15 * lam ** (0.45 * j) for j in range(12)]


def _domain_summary(dom: DomainSpec) -> dict:
    return {
        "family": dom.family,
        "metric": dom.metric.kind,
        "N": dom.N,
        "z0_x": list(dom.z0.x),
        "z0_t": dom.z0.t,
        "params": {k: (list(v) if isinstance(v, np.ndarray) else v)
                   for k, v in dom.params.items()},
        "assumption_unverified": dom.metric.kind == "table",
    }


def _equilibrium_rows(est, prob):
    xs, ts, mu = prob.support.xs, prob.support.ts, est.mu
    for i in range(len(mu)):
        yield list(xs[i]) + [ts[i], mu[i]]


def _eq_header(N):
    return [f"x{i+1}" for i in range(N)] + ["t", "mass"]


# ---------------------------------------------------------------------------
# subcommands

def cmd_capacity(cfg, bundle, quiet):
    metric = build_metric(cfg)
    dom = build_domain(cfg, metric)
    kern = GaussianKernel(metric, cfg["capacity.exponent"])
    tgt_kind = cfg["capacity.target"]
    lam = cfg["wiener.lambda"]
    if tgt_kind == "ring":
        target = RingTarget(RingSpec(lam, cfg["capacity.k"], cfg["capacity.h"],
                                     cfg["capacity.variant"]))
    elif tgt_kind == "section":
        target = SectionTarget(lam, cfg["capacity.rho"], cfg["capacity.tau"])
    elif tgt_kind == "ball-complement":
        target = BallComplementTarget(cfg["capacity.l"], lam)
    else:
        raise ConfigError(f"unknown capacity.target {tgt_kind!r}")
    levels = max(1, cfg["capacity.refine-levels"])
    steps = refine_capacity(dom, target, kern, levels,
                            cfg["capacity.resolution"],
                            cfg["capacity.tolerance"], cfg["seed"])
    last = steps[-1]
    est, prob = capacity_of_target(dom, target, kern, last.resolution,
                                   cfg["capacity.tolerance"], cfg["seed"])
    record = {
        "domain": _domain_summary(dom),
        "target": repr(target),
        "kernel_exponent": cfg["capacity.exponent"],
        "value": est.value,
        "dual_value": est.dual_value,
        "gap": est.gap,
        "relative_gap": est.rel_gap(),
        "n_atoms": est.n_atoms,
        "n_constraints": est.n_constraints,
        "resolution": est.resolution,
        "measure_estimate": prob.support.measure_estimate,
        "measure_standard_error": prob.support.standard_error,
        "refinement": [{"resolution": s.resolution, "value": s.estimate.value,
                        "dual_value": s.estimate.dual_value,
                        "gap": s.estimate.gap, "measure": s.measure}
                       for s in steps],
    }
    bundle.write_json("capacity.json", record)
    bundle.write_csv("equilibrium_measure.csv", _eq_header(dom.N),
                     _equilibrium_rows(est, prob))
    if not quiet:
        print(f"capacity value={est.value:.6e} dual={est.dual_value:.6e} "
              f"gap={est.gap:.2e} atoms={est.n_atoms}")
    return EXIT_OK


def _write_series(bundle, dom, tab, rep, prefix=""):
    from .metric import ball_volume
    rows = []
    w = tab.weight_exponent
    for k in range(1, tab.K_max + 1):
        vol = ball_volume(dom.metric, dom.z0.x, tab.lam ** (k / 2.0))
        for h in range(1, tab.H_max + 1):
            term = tab.terms[k - 1, h - 1]
            est = tab.capacities.get((k, h))
            cap = est.value if est is not None else (
                term * vol / tab.lam ** (w * h) if term else 0.0)
            if term == 0.0 and est is None and (k, h) not in tab.failed:
                continue
            rows.append([k, h, cap, vol, tab.lam ** (w * h), term])
    bundle.write_csv(f"{prefix}series_table.csv",
                     ["k", "h", "capacity", "ball_volume", "weight", "term"],
                     rows)
    S = tab.partial_sums()
    bundle.write_csv(f"{prefix}series_partial_sums.csv", ["K", "S"],
                     [[k + 1, S[k]] for k in range(len(S))])
    payload = asdict(rep)
    payload["truncation_bound"] = tab.truncation_bound
    bundle.write_json(f"{prefix}series_report.json", payload)


def cmd_series(cfg, bundle, quiet):
    metric = build_metric(cfg)
    dom = build_domain(cfg, metric)
    bounds = build_bounds(cfg, metric)
    a, b = exponents(cfg, bounds)
    tab = series_table(dom, cfg["wiener.lambda"], a, b, cfg["wiener.variant"],
                       cfg["wiener.K-max"], cfg["wiener.H-max"],
                       cfg["capacity.resolution"], cfg["capacity.tolerance"])
    rep = divergence_verdict(tab)
    _write_series(bundle, dom, tab, rep)
    if not quiet:
        S = tab.partial_sums()
        print(f"series variant={tab.variant} verdict={rep.verdict} "
              f"S({tab.K_max})={S[-1]:.6g}")
    return EXIT_OK


def cmd_integral(cfg, bundle, quiet):
    metric = build_metric(cfg)
    dom = build_domain(cfg, metric)
    bounds = build_bounds(cfg, metric)
    _, b = exponents(cfg, bounds)
    rep = integral_test(dom, cfg["wiener.lambda"], b,
                        list(cfg["integral.probes"]),
                        n_u=cfg["integral.n-u"],
                        U_max=cfg["integral.U-max"] or None,
                        resolution=cfg["integral.resolution"] or None)
    bundle.write_json("integral_report.json", asdict(rep))
    bundle.write_csv("integral_curve.csv", ["log_inv_dhat2", "M"],
                     [[math.log(1.0 / dh ** 2), m]
                      for dh, m in zip(rep.probe_dhats, rep.M_values)])
    if not quiet:
        print(f"integral slope={rep.slope:.4f} divergent={rep.divergent}")
    return EXIT_OK


def cmd_cone(cfg, bundle, quiet):
    metric = build_metric(cfg)
    dom = build_domain(cfg, metric)
    rep = cone_check(dom, cfg["cone.M0"], cfg["cone.r0"], cfg["cone.levels"],
                     cfg["cone.theta-min"], cfg["cone.resolution"])
    bundle.write_json("cone_report.json", asdict(rep))
    if not quiet:
        print(f"cone satisfied={rep.satisfied} theta={rep.theta:.4f}")
    return EXIT_OK


def _classification_payload(cls, dom):
    payload = {
        "verdict": cls.verdict,
        "basis": cls.basis,
        "structural_constant": cls.structural_constant,
        "notes": cls.notes,
        "domain": _domain_summary(dom),
        "cone": asdict(cls.cone),
        "sufficient": asdict(cls.sufficient) if cls.sufficient else None,
        "necessary": asdict(cls.necessary) if cls.necessary else None,
    }
    return payload


def cmd_classify(cfg, bundle, quiet):
    metric = build_metric(cfg)
    dom = build_domain(cfg, metric)
    bounds = build_bounds(cfg, metric)
    a, b = exponents(cfg, bounds)
    cls = classify(dom, bounds, cfg["wiener.lambda"], a, b,
                   cfg["wiener.K-max"], cfg["wiener.H-max"],
                   cfg["capacity.resolution"],
                   cfg["cone.M0"], cfg["cone.r0"], cfg["cone.levels"],
                   cfg["cone.theta-min"], cfg["cone.resolution"],
                   cfg["capacity.tolerance"])
    bundle.write_json("classification.json", _classification_payload(cls, dom))
    # attach one representative equilibrium measure for provenance
    kern = GaussianKernel(metric, a)
    try:
        est, prob = capacity_of_target(
            dom, RingTarget(RingSpec(cfg["wiener.lambda"], 2, 1)), kern,
            cfg["capacity.resolution"], cfg["capacity.tolerance"])
        bundle.write_csv("equilibrium_measure.csv", _eq_header(dom.N),
                         _equilibrium_rows(est, prob))
    except (CapacityInputError, CapacityConvergenceError):
        pass
    if not quiet:
        print(f"classify verdict={cls.verdict} basis={cls.basis}")
    if cls.verdict == "REGULAR":
        return EXIT_OK
    if cls.verdict == "IRREGULAR":
        return EXIT_IRREGULAR
    return EXIT_INCONCLUSIVE


def cmd_pde_verify(cfg, bundle, quiet):
    metric = build_metric(cfg)
    if metric.kind != "euclidean":
        raise ConfigError("pde-verify requires a Euclidean metric")
    beta = cfg["pde.beta"]
    walk = WalkConfig(beta, cfg["pde.step"], cfg["pde.walkers"], cfg["seed"],
                      cfg["pde.max-time"])
    dom = halfspace_time(metric)
    z = stp(np.full(metric.N, 0.3), 0.25)
    checks = {}

    sol_c = pwb_solve(dom, lambda X, T: np.ones(T.shape[0]), z, walk)
    checks["constant_data"] = {
        "value": sol_c.value, "std_error": sol_c.std_error,
        "pass": bool(sol_c.value == 1.0 and sol_c.std_error == 0.0),
    }

    sol_l = pwb_solve(dom, lambda X, T: X[:, 0], z, walk)
    tol_l = 4.0 * sol_l.std_error + 1e-3
    checks["linear_data"] = {
        "value": sol_l.value, "expected": z.x[0], "std_error": sol_l.std_error,
        "pass": bool(abs(sol_l.value - z.x[0]) <= tol_l),
    }

    s = z.t
    target = (1.0 + 4.0 * s / beta) ** (-metric.N / 2.0) * math.exp(
        -float(np.sum(z.x ** 2)) / (1.0 + 4.0 * s / beta))
    phi_g = lambda X, T: np.exp(-np.sum(X ** 2, axis=-1))
    sol_g = pwb_solve(dom, phi_g, z, walk)
    checks["gaussian_data_vs_closed_form"] = {
        "value": sol_g.value, "expected": target, "std_error": sol_g.std_error,
        "pass": bool(abs(sol_g.value - target) <= 4.0 * sol_g.std_error + 2e-3),
    }

    half = WalkConfig(beta, walk.step / 2.0, walk.walkers, walk.seed + 1,
                      walk.max_time)
    sol_h = pwb_solve(dom, phi_g, z, half)
    tol_h = 4.0 * math.hypot(sol_g.std_error, sol_h.std_error) + 2e-3
    checks["step_halving"] = {
        "value_h": sol_g.value, "value_h_over_2": sol_h.value,
        "pass": bool(abs(sol_g.value - sol_h.value) <= tol_h),
    }

    ok = all(c["pass"] for c in checks.values())
    bundle.write_json("pde_verify.json",
                      {"beta": beta, "checks": checks, "all_pass": ok})
    if not quiet:
        for name, c in checks.items():
            print(f"pde-verify {name}: {'PASS' if c['pass'] else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_benchmark_suite(cfg, bundle, quiet):
    metric = build_metric(cfg)
    bounds = build_bounds(cfg, metric)
    a, b = exponents(cfg, bounds)
    summary = []
    all_ok = True
    for name in benchmark_names():
        dom = benchmark(name, metric)
        cls = classify(dom, bounds, cfg["wiener.lambda"], a, b,
                       cfg["wiener.K-max"], cfg["wiener.H-max"],
                       cfg["capacity.resolution"],
                       cfg["cone.M0"], cfg["cone.r0"], cfg["cone.levels"],
                       cfg["cone.theta-min"], cfg["cone.resolution"],
                       cfg["capacity.tolerance"])
        bundle.write_json(f"{name}_classification.json",
                          _classification_payload(cls, dom))
        if cls.sufficient is not None:
            suff_verdict = cls.sufficient.verdict
        else:
            suff_verdict = None
        # integral-consistency: integral divergence must not meet a
        # CONVERGENT sufficient series
        probes = [0.4, 0.28, 0.2, 0.14, 0.1, 0.07, 0.05, 0.035]
        irep = integral_test(dom, cfg["wiener.lambda"], b, probes,
                             resolution=cfg["integral.resolution"] or None)
        consistent = not (irep.divergent and suff_verdict == "CONVERGENT")
        bundle.write_json(f"{name}_integral.json", asdict(irep))
        # PDE cross-check on Euclidean metrics: probe for the solution
        # behavior that would falsify the verdict
        pde_status, pde_contradicts = None, None
        if metric.kind == "euclidean":
            offsets = [0.12 * 0.55 ** j for j in range(8)]
            try:
                walk = WalkConfig(cfg["pde.beta"], cfg["pde.step"],
                                  cfg["pde.walkers"], cfg["seed"],
                                  cfg["pde.max-time"])
                fit, pde_contradicts = classification_probe(
                    dom, cls.verdict, offsets, walk)
                pde_status = fit.status
                bundle.write_json(f"{name}_pde_probe.json", asdict(fit))
            except PDEError as exc:
                pde_status = f"SKIPPED: {exc}"
        expected = BENCHMARK_STATUS[name]
        match = None if expected is None else (cls.verdict == expected)
        if match is False or not consistent:
            all_ok = False
        summary.append({
            "benchmark": name, "verdict": cls.verdict, "basis": cls.basis,
            "expected": expected, "match": match,
            "integral_divergent": irep.divergent,
            "integral_consistent": consistent,
            "pde_status": pde_status,
            "pde_contradicts": pde_contradicts,
        })
        if not quiet:
            note = " (CONTRADICTS)" if pde_contradicts else ""
            print(f"{name}: verdict={cls.verdict} basis={cls.basis} "
                  f"expected={expected} pde={pde_status}{note}")
    bundle.write_json("suite_summary.json",
                      {"results": summary, "all_pinned_match": all_ok})
    return EXIT_OK if all_ok else EXIT_FAILURE


def cmd_list_domains(cfg, bundle, quiet):
    print("registry benchmarks:")
    for name in benchmark_names():
        status = BENCHMARK_STATUS[name] or "unpinned"
        print(f"  {name:<20} known status: {status}")
    print("\ndomain families: halfspace-time, spatial-halfspace, cylinder,"
          " cone, cusp, punctured, mask")
    print("\nconfig keys:\n")
    print(describe_schema())
    return EXIT_OK


COMMANDS = {
    "capacity": cmd_capacity,
    "series": cmd_series,
    "integral": cmd_integral,
    "cone": cmd_cone,
    "classify": cmd_classify,
    "pde-verify": cmd_pde_verify,
    "benchmark-suite": cmd_benchmark_suite,
    "list-domains": cmd_list_domains,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wienercap",
        description="capacity-based boundary regularity workbench")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key-value config file")
        p.add_argument("--out", help="bundle output directory")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    try:
        if args.config:
            cfg = load_config(args.config)
        elif args.command == "list-domains":
            cfg = RunConfig()
        else:
            print("error: --config is required", file=sys.stderr)
            return EXIT_CONFIG
        if args.seed is not None:
            cfg = cfg.with_override("seed", args.seed)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "list-domains":
        return cmd_list_domains(cfg, None, args.quiet)

    out_dir = args.out or f"wienercap-{args.command}"
    bundle = ReportBundle(out_dir, args.command, cfg.source_text, cfg["seed"])
    try:
        code = COMMANDS[args.command](cfg, bundle, args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, RegularityError, WienerError, PDEError,
            CapacityInputError, CapacityConvergenceError, ValueError) as exc:
        print(f"analysis failure: {exc}", file=sys.stderr)
        bundle.write_json("failure.json", {"error": str(exc)})
        bundle.finalize()
        return EXIT_FAILURE
    bundle.finalize()
    return code


if __name__ == "__main__":
    sys.exit(main())
