"""Wiener-type series, the integral criterion, and the decay bound check.

The regularity tests aggregate ring-set capacities into the double series

    S = sum_k sum_h  lam^(w h) * C(ring(k, h)) / |B(x0, lam^(k/2))|

where the kernel exponent and the weight exponent w depend on the variant:

    sufficient:  capacity under G_a, weight lam^(b h), band rings
    necessary:   capacity under G_b, weight lam^(a h), band rings
    nested:      capacity under G_a, weight lam^(b h), nested rings

Divergence of the sufficient series certifies regularity of z0, convergence
of the necessary one certifies irregularity; the nested variant feeds the
partial sums z(lam; s) used by the quantitative decay bound

    W_rho(z) <= C exp(-Z / C),   Z = z(lam; floor(log dhat^2 / log lam)).

W_rho is the discrete Wiener function built from balayage surrogates of
parabolic-ball complements.  The integral criterion replaces capacities by
section measures of the complement and is divergent for cone-like sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats

from .capacity import (CapacityConvergenceError, CapacityEstimate,
                       build_problem, potential_many, solve_capacity)
from .domain import (BallComplementTarget, DomainSpec, RingSpec, RingTarget,
                     SectionTarget, max_nonempty_band, sample_set_and_measure)
from .kernel import GaussianKernel
from .metric import SpaceTimePoint, ball_volume, parabolic_dist, stp

VARIANTS = ("sufficient", "necessary", "nested")


class WienerError(ValueError):
    pass


@dataclass
class SeriesTable:
    """Weighted ring-capacity table c[k-1, h-1] plus solve provenance."""

    variant: str
    lam: float
    a: float
    b: float
    K_max: int
    H_max: int
    resolution: int
    terms: np.ndarray                       # (K_max, H_max) weighted terms
    capacities: dict = field(default_factory=dict)   # (k, h) -> CapacityEstimate
    failed: list = field(default_factory=list)       # (k, h) of failed solves
    truncation_bound: float = 0.0
    partial: bool = False

    @property
    def kernel_exponent(self) -> float:
        return self.b if self.variant == "necessary" else self.a

    @property
    def weight_exponent(self) -> float:
        return self.a if self.variant == "necessary" else self.b

    def partial_sums(self) -> np.ndarray:
        """S(K) for K = 1..K_max (cumulative over time levels)."""
        return np.cumsum(self.terms.sum(axis=1))


def _row_tail(C_fit: float, Q: float, w: float, lam: float, h_from: int) -> float:
    """sum_{h >= h_from} C_fit h^(Q/2) lam^(w h), summed to convergence."""
    if C_fit == 0.0:
        return 0.0
    total, h = 0.0, h_from
    r = lam ** w
    while h < h_from + 10000:
        t = C_fit * h ** (Q / 2.0) * r ** h
        total += t
        if t < 1e-18 * max(total, 1e-30):
            break
        h += 1
    return total


def series_table(dom: DomainSpec, lam: float, a: float, b: float,
                 variant: str = "sufficient", K_max: int = 40,
                 H_max: int = 40, resolution: int = 4,
                 tolerance: float = 1e-6, stop_rel: float = 1e-9) -> SeriesTable:
    """Assemble the weighted ring-capacity table.

    Within each time level k the band loop stops once the fitted tail
    bound (capacity ratios grow at most like h^(Q/2), weights decay like
    lam^(w h)) falls below stop_rel of the running sum; the unexplored
    tail is accumulated into truncation_bound.  Terms whose ring sample is
    empty are exactly zero and cost no solve.  Failed solves are recorded
    and flag the table PARTIAL.
    """
    if variant not in VARIANTS:
        raise WienerError(f"variant must be one of {VARIANTS}")
    if not (0.0 < lam < 1.0):
        raise WienerError("lam must lie in (0, 1)")
    if a <= 0 or b <= 0:
        raise WienerError("exponents must be positive")
    kern = GaussianKernel(dom.metric, b if variant == "necessary" else a)
    w = a if variant == "necessary" else b
    ring_variant = "nested" if variant == "nested" else "band"
    Q = dom.metric.Q
    tab = SeriesTable(variant, lam, a, b, K_max, H_max, resolution,
                      np.zeros((K_max, H_max)))
    running = 0.0
    C_fit = 0.0
    for k in range(1, K_max + 1):
        vol = ball_volume(dom.metric, dom.z0.x, lam ** (k / 2.0))
        h_cap = max_nonempty_band(lam, k)
        stable_ratio = None  # nested variant: capacity freezes past h_cap
        for h in range(1, H_max + 1):
            weight = lam ** (w * h)
            if h > h_cap and ring_variant == "band":
                break
            if h > h_cap and stable_ratio is not None:
                ratio = stable_ratio
            else:
                rs = RingSpec(lam, k, h, ring_variant)
                try:
                    prob = build_problem(dom, RingTarget(rs), kern,
                                         resolution, tolerance)
                    if prob.support.is_empty():
                        if ring_variant == "band":
                            continue
                        ratio = 0.0
                    else:
                        est = solve_capacity(prob)
                        tab.capacities[(k, h)] = est
                        ratio = est.value / vol
                except CapacityConvergenceError as exc:
                    tab.failed.append((k, h))
                    tab.partial = True
                    est = exc.estimate
                    tab.capacities[(k, h)] = est
                    ratio = (est.value / vol) if est is not None else 0.0
                if ring_variant == "nested" and h >= h_cap:
                    stable_ratio = ratio
            term = weight * ratio
            tab.terms[k - 1, h - 1] = term
            running += term
            if ratio > 0:
                C_fit = max(C_fit, ratio / h ** (Q / 2.0))
            tail = _row_tail(C_fit, Q, w, lam, h + 1)
            if tail < stop_rel * max(running, 1e-30) and h >= 2:
                tab.truncation_bound += tail
                break
        else:
            # h loop exhausted H_max: account for the un-walked tail
            tab.truncation_bound += _row_tail(C_fit, Q, w, lam, H_max + 1)
    return tab


# ---------------------------------------------------------------------------
# divergence verdicts

@dataclass
class SeriesReport:
    verdict: str                   # DIVERGENT | CONVERGENT | INCONCLUSIVE
    partial_sums: np.ndarray
    increments: np.ndarray
    growth_ratio: float            # S(K_max) / S(K_max // 2)
    geometric_q: float
    geometric_r2: float
    geometric_tail: float
    thresholds: dict
    table_partial: bool
    truncation_bound: float
    variant: str
    lam: float
    a: float
    b: float


def _geometric_fit(ks: np.ndarray, inc: np.ndarray):
    """Least squares on log increments; returns (q, r2)."""
    y = np.log(inc)
    A = np.vstack([ks, np.ones_like(ks)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(math.exp(coef[0])), r2


@dataclass
class TermTailFit:
    """Geometric model fitted to the tail of the flattened term sequence."""

    ratio: float
    r2: float
    n_terms: int
    n_tail: int


def term_tail_fit(tab: SeriesTable, tail_frac: float = 0.5) -> TermTailFit:
    """Fit log(term) ~ index over the tail of the nonzero term sequence.

    The tail is the h-run of the deepest time level with at least three
    nonzero terms (the trailing stretch of the series in (k, h) order);
    when no level has such a run the trailing tail_frac of the flattened
    nonzero terms is used instead.  A series whose rows are geometric runs
    in h shows up as ratio < 1 with high r2 even when the row sums decay
    faster than geometrically in k."""
    flat = tab.terms.reshape(-1)
    nonzero = flat[flat > 0]
    n = nonzero.size
    if n < 3:
        return TermTailFit(math.nan, math.nan, n, 0)
    tail = None
    for k in range(tab.K_max, 0, -1):
        row = tab.terms[k - 1]
        run = row[row > 0]
        if run.size >= 3:
            tail = run
            break
    if tail is None:
        start = min(n - 3, int(math.floor(n * (1.0 - tail_frac))))
        tail = nonzero[start:]
    idx = np.arange(tail.size, dtype=float)
    q, r2 = _geometric_fit(idx, tail)
    return TermTailFit(q, r2, n, tail.size)


def divergence_verdict(tab: SeriesTable, inc_floor_frac: float = 0.1,
                       growth_min: float = 1.5, q_max: float = 0.9,
                       r2_min: float = 0.95, tail_frac: float = 0.05) -> SeriesReport:
    """Classify the truncated series as DIVERGENT / CONVERGENT / INCONCLUSIVE.

    DIVERGENT: the median increment over the last half of the levels stays
    above inc_floor_frac of the largest increment AND S(K_max) grew by at
    least growth_min over S(K_max/2).  CONVERGENT: the tail is exactly
    zero, or the last-half increments fit a geometric decay with ratio
    <= q_max, fit r2 >= r2_min and a geometric tail bound below tail_frac
    of the total.  Everything else is INCONCLUSIVE.
    """
    S = tab.partial_sums()
    K = tab.K_max
    inc = tab.terms.sum(axis=1)
    half = K // 2
    last = inc[half:]
    total = float(S[-1])
    S_half = float(S[half - 1]) if half >= 1 else 0.0
    ratio = math.inf if S_half == 0 else total / S_half
    thresholds = dict(inc_floor_frac=inc_floor_frac, growth_min=growth_min,
                      q_max=q_max, r2_min=r2_min, tail_frac=tail_frac)

    verdict = "INCONCLUSIVE"
    q, r2, tail = math.nan, math.nan, math.nan
    zero_tail = float(last.max(initial=0.0)) <= 1e-12 * max(total, 1e-300)
    if total == 0.0 or zero_tail:
        verdict, q, r2, tail = "CONVERGENT", 0.0, 1.0, 0.0
    else:
        divergent = (float(np.median(last)) >= inc_floor_frac * float(inc.max())
                     and (ratio >= growth_min))
        if divergent:
            verdict = "DIVERGENT"
        else:
            pos = last > 0
            ks = np.arange(half + 1, K + 1, dtype=float)
            if pos.sum() >= 3:
                q, r2 = _geometric_fit(ks[pos], last[pos])
                if q < 1.0:
                    tail = float(last[pos][-1]) * q / (1.0 - q)
                    if q <= q_max and r2 >= r2_min and tail < tail_frac * total:
                        verdict = "CONVERGENT"
    return SeriesReport(verdict, S, inc, ratio, q, r2, tail, thresholds,
                        tab.partial, tab.truncation_bound, tab.variant,
                        tab.lam, tab.a, tab.b)


# ---------------------------------------------------------------------------
# scale comparability of the nested partial sums

@dataclass
class ComparabilityReport:
    lam: float
    mu: float
    sigma: float
    s_values: list
    z_lam: list
    z_mu: list
    constants: list
    constant: float          # max over s
    stability: float         # max/min over s


def nested_partial_value(tab: SeriesTable, s: float) -> float:
    """z(lam; s): nested-table partial sum through level floor(s)."""
    kf = int(math.floor(s))
    if kf < 1:
        return 0.0
    S = tab.partial_sums()
    return float(S[min(kf, tab.K_max) - 1])


def lambda_comparability(dom: DomainSpec, a: float, b: float, lam: float,
                         mu: float, s_values, resolution: int = 3,
                         tolerance: float = 1e-6) -> ComparabilityReport:
    """Empirical constants C(s) = z(lam; s) / (z(mu; sigma s) + 1) with
    sigma = log lam / log mu; one nested table per scale, partial sums
    reused across all s."""
    if not (0 < lam < 1 and 0 < mu < 1) or lam == mu:
        raise WienerError("need distinct scales in (0, 1)")
    sigma = math.log(lam) / math.log(mu)
    s_values = sorted(float(s) for s in s_values)
    K_lam = max(1, int(math.floor(max(s_values))))
    K_mu = max(1, int(math.floor(sigma * max(s_values))))
    t_lam = series_table(dom, lam, a, b, "nested", K_lam,
                         H_max=40, resolution=resolution, tolerance=tolerance)
    t_mu = series_table(dom, mu, a, b, "nested", K_mu,
                        H_max=60, resolution=resolution, tolerance=tolerance)
    z1 = [nested_partial_value(t_lam, s) for s in s_values]
    z2 = [nested_partial_value(t_mu, sigma * s) for s in s_values]
    consts = [zz1 / (zz2 + 1.0) for zz1, zz2 in zip(z1, z2)]
    pos = [c for c in consts if c > 0]
    stability = (max(pos) / min(pos)) if pos else math.inf
    return ComparabilityReport(lam, mu, sigma, s_values, z1, z2, consts,
                               max(consts) if consts else 0.0, stability)


# ---------------------------------------------------------------------------
# integral criterion

@dataclass
class IntegralReport:
    lam: float
    b: float
    probe_dhats: list
    M_values: list
    slope: float
    slope_r2: float
    divergent: bool
    inner_truncation: float
    U_max: float
    n_u: int
    n_v: int
    resolution: int


def integral_test(dom: DomainSpec, lam: float, b: float, probes,
                  n_u: int = 32, U_max: float | None = None,
                  n_v: int | None = None, resolution: int | None = None,
                  slope_min: float = 0.05, r2_min: float = 0.9) -> IntegralReport:
    """Measure-based criterion

        M(z) = int_{dhat^2}^{lam} int_1^inf m(rho, t0 - eta) / |B(x0, sqrt(eta))|
               drho / rho^(1+b) deta / eta

    evaluated by nested log-substituted trapezoid rules; m is the section
    measure of the complement.  Probes may be SpaceTimePoints or plain
    dhat values.  M is computed from one shared cumulative grid, so it is
    exactly nonincreasing in dhat; `divergent` reports whether M grows
    along log(1/dhat^2) with slope >= slope_min at fit quality r2_min.
    """
    if b <= 0:
        raise WienerError("b must be positive")
    dhats = []
    for pz in probes:
        if isinstance(pz, SpaceTimePoint):
            dhats.append(parabolic_dist(dom.metric, dom.z0, pz))
        else:
            dhats.append(float(pz))
    if any(dh <= 0 or dh * dh >= lam for dh in dhats):
        raise WienerError("probes must satisfy 0 < dhat^2 < lam")
    if resolution is None:
        resolution = 8 if dom.metric.N == 1 else 5
    if U_max is None:
        U_max = max(40.0, 16.0 / b)
    Q, c_d = dom.metric.Q, dom.metric.c_d
    v_lo = math.log(min(dh * dh for dh in dhats))
    v_hi = math.log(lam)
    if n_v is None:
        n_v = max(33, int(8 * (v_hi - v_lo)) | 1)
    # quadratic grading resolves the u^(N/2) kink of the integrand at rho=1
    u_grid = U_max * (np.arange(n_u) / (n_u - 1)) ** 2
    v_grid = np.linspace(v_lo, v_hi, n_v)
    t0 = dom.z0.t
    inner = np.zeros(n_v)
    for iv, v in enumerate(v_grid):
        eta = math.exp(v)
        volB = ball_volume(dom.metric, dom.z0.x, math.sqrt(eta))
        vals = np.zeros(n_u)
        for iu, u in enumerate(u_grid):
            if u == 0.0:
                continue  # rho = 1: section has zero Gaussian radius
            samp = sample_set_and_measure(
                dom, SectionTarget(lam, math.exp(u), t0 - eta), resolution)
            vals[iu] = samp.measure_estimate / volB * math.exp(-b * u)
        inner[iv] = float(np.trapezoid(vals, u_grid))
    # cumulative from the top so every probe shares one quadrature
    M_cum = np.zeros(n_v)
    for iv in range(n_v - 2, -1, -1):
        M_cum[iv] = M_cum[iv + 1] + 0.5 * (inner[iv] + inner[iv + 1]) \
            * (v_grid[iv + 1] - v_grid[iv])
    M_vals = [float(np.interp(math.log(dh * dh), v_grid, M_cum)) for dh in dhats]
    # growth fit on the closest half of the probes
    order = np.argsort(dhats)
    xs = np.array([math.log(1.0 / dhats[i] ** 2) for i in order])
    ys = np.array([M_vals[i] for i in order])
    sel = xs >= np.median(xs)
    if sel.sum() < 3:
        sel = np.ones_like(sel, dtype=bool)
    slope, r2 = 0.0, 0.0
    if sel.sum() >= 3:
        A = np.vstack([xs[sel], np.ones(int(sel.sum()))]).T
        coef, *_ = np.linalg.lstsq(A, ys[sel], rcond=None)
        pred = A @ coef
        ss_res = float(np.sum((ys[sel] - pred) ** 2))
        ss_tot = float(np.sum((ys[sel] - ys[sel].mean()) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        slope = float(coef[0])
    tail_env, _ = integrate.quad(
        lambda u: (1.0 + c_d * u ** (Q / 2.0)) * math.exp(-b * u),
        U_max, U_max + 400.0 / b)
    return IntegralReport(lam, b, dhats, M_vals, slope, r2,
                          bool(slope >= slope_min and r2 >= r2_min),
                          tail_env * (v_hi - v_lo), U_max, n_u, n_v, resolution)


# ---------------------------------------------------------------------------
# Wiener function from balayage surrogates

@dataclass
class WienerFunctionEstimate:
    rho: float
    lam: float
    L_max: int
    probes: list
    W: np.ndarray                  # (P,)
    V: np.ndarray                  # (L_max, P) clamped potentials
    truncation: float
    partial: bool
    level_estimates: dict          # l -> CapacityEstimate


def wiener_function(dom: DomainSpec, kernel, rho: float, L_max: int,
                    probes, resolution: int = 4, lam: float = 0.25,
                    tolerance: float = 1e-6) -> WienerFunctionEstimate:
    """W(z) = sum_{l=1..L_max} rho^l (1 - V_l(z)) with V_l the clamped
    potential of the discrete equilibrium measure of the parabolic-ball
    complement at scale lam^(l/2).  Empty complements give V_l = 0."""
    if not (0.0 < rho < 1.0):
        raise WienerError("rho must lie in (0, 1)")
    P = len(probes)
    X = np.stack([pz.x for pz in probes])
    T = np.array([pz.t for pz in probes])
    V = np.zeros((L_max, P))
    level_estimates = {}
    partial = False
    for l in range(1, L_max + 1):
        prob = build_problem(dom, BallComplementTarget(l, lam), kernel,
                             resolution, tolerance)
        if prob.support.is_empty():
            continue
        try:
            est = solve_capacity(prob)
        except CapacityConvergenceError as exc:
            partial = True
            est = exc.estimate
            if est is None:
                continue
        level_estimates[l] = est
        V[l - 1] = np.clip(potential_many(est, prob, X, T), 0.0, 1.0)
    weights = rho ** np.arange(1, L_max + 1)
    W = weights @ (1.0 - V)
    truncation = rho ** (L_max + 1) / (1.0 - rho)
    return WienerFunctionEstimate(rho, lam, L_max, list(probes), W, V,
                                  truncation, partial, level_estimates)


# ---------------------------------------------------------------------------
# quantitative decay bound

@dataclass
class BoundCheckReport:
    lam: float
    a: float
    b: float
    rho: float
    probe_dhats: list
    s_values: list
    Z_values: list
    W_values: list
    C: float
    spearman: float
    truncation: float
    partial: bool


def _fit_C(Z: np.ndarray, W: np.ndarray) -> float:
    """Smallest C >= 1 with W_i <= C exp(-Z_i / C) for all probes."""
    C = 1.0
    for z, wv in zip(Z, W):
        if wv <= 0:
            continue
        g = lambda c: c * math.exp(-z / c) - wv
        if g(C) >= 0:
            continue
        lo, hi = C, max(2.0 * C, 2.0)
        while g(hi) < 0:
            hi *= 2.0
            if hi > 1e12:
                return math.inf
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if g(mid) < 0:
                lo = mid
            else:
                hi = mid
        C = hi
    return C


def axis_probes(dom: DomainSpec, offsets) -> list[SpaceTimePoint]:
    """Probes directly above z0 in time: z = (x0, t0 + s); dhat = sqrt(s)."""
    return [stp(dom.z0.x.copy(), dom.z0.t + float(s)) for s in offsets]


def bound_check(dom: DomainSpec, kernel, lam: float, a: float, b: float,
                rho: float, probes, L_max: int = 8, resolution: int = 4,
                tolerance: float = 1e-6) -> BoundCheckReport:
    """Empirical test of W_rho(z) <= C exp(-Z/C) along a probe sequence.

    Z is the nested-series partial sum through floor(log dhat^2 / log lam);
    reported are the fitted smallest C and the Spearman rank correlation
    between Z and log W (expected strongly negative when the bound is
    active)."""
    dhats = np.array([parabolic_dist(dom.metric, dom.z0, pz) for pz in probes])
    if np.any(dhats <= 0):
        raise WienerError("probes must be distinct from z0")
    s_vals = np.log(dhats ** 2) / math.log(lam)
    K_need = max(1, int(math.floor(float(s_vals.max()))))
    tab = series_table(dom, lam, a, b, "nested", K_max=K_need,
                       H_max=40, resolution=resolution, tolerance=tolerance)
    Z = np.array([nested_partial_value(tab, s) for s in s_vals])
    west = wiener_function(dom, kernel, rho, L_max, probes,
                           resolution=resolution, lam=lam, tolerance=tolerance)
    W = west.W
    mask = W > 0
    if mask.sum() >= 3 and np.ptp(Z[mask]) > 0:
        sr = stats.spearmanr(Z[mask], np.log(W[mask]))
        corr = float(getattr(sr, "statistic", getattr(sr, "correlation", math.nan)))
    else:
        corr = math.nan
    C = _fit_C(Z, W)
    return BoundCheckReport(lam, a, b, rho, list(map(float, dhats)),
                            list(map(float, s_vals)), list(map(float, Z)),
                            list(map(float, W)), C, corr,
                            west.truncation, west.partial or tab.partial)
