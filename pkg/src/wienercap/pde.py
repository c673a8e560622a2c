"""Monte Carlo Perron-Wiener solver for (1/beta) Laplace u - du/dt = 0.

Backward-in-time Euler random walk: from z = (x, t) the walker moves

    X <- X + sqrt(2 h / beta) * xi,   xi ~ N(0, I_N),   t <- t - h,

whose one-step transition density matches the fundamental solution of the
operator, so the first-exit average E[phi(exit)] estimates the
Perron-Wiener solution with boundary data phi.  Exit detection bisects
the last step segment to a time tolerance of step / 64.  Euclidean
domains only: the walk has no intrinsic meaning for the other metrics.

The boundary-behavior probe fits |u(z) - phi(z0)| against dhat(z, z0)
along an interior approach path; at regular points the Hoelder exponent
of the fit is positive, at irregular points the gap fails to decay
(status NO-DECAY).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import DomainSpec, contains, contains_many
from .metric import SpaceTimePoint, parabolic_dist, parabolic_dist_many, stp


class PDEError(ValueError):
    pass


@dataclass(frozen=True)
class WalkConfig:
    beta: float = 1.0
    step: float = 1e-3
    walkers: int = 2000
    seed: int = 0
    max_time: float = 4.0      # elapsed backward-time budget per walker

    def __post_init__(self):
        if self.beta <= 0 or self.step <= 0 or self.walkers < 1:
            raise PDEError("beta, step must be positive; walkers >= 1")


EXIT_KINDS = ("bottom", "lateral", "cap")


def _time_floor(dom: DomainSpec) -> float:
    if dom.family == "halfspace-time":
        return dom.params["t0"]
    if dom.family == "cylinder":
        return dom.params["t1"]
    return dom.t_lo


def classify_exit(dom: DomainSpec, X: np.ndarray, T: np.ndarray) -> np.ndarray:
    """0 = bottom (time floor), 1 = lateral (side walls), 2 = cap (obstacle
    or top face)."""
    X = np.atleast_2d(X)
    T = np.atleast_1d(T)
    out = np.full(T.shape[0], 2, dtype=int)
    eps = 1e-12
    lateral = np.any(X <= dom.x_lo + eps, axis=-1) | np.any(X >= dom.x_hi - eps, axis=-1)
    if dom.family == "spatial-halfspace":
        lateral |= X[..., 0] <= dom.params["wall"]
    elif dom.family == "cylinder":
        from .metric import dist
        lateral |= dist(dom.metric, X, np.asarray(dom.params["center"])[None, :]) \
            >= dom.params["radius"]
    out[lateral] = 1
    out[T <= _time_floor(dom) + eps] = 0
    return out


@dataclass
class SolutionEstimate:
    value: float
    std_error: float
    n_exited: int
    n_timed_out: int
    exit_fractions: dict
    mean_exit_time: float
    reliable: bool
    config: WalkConfig


def pwb_solve(dom: DomainSpec, phi, z: SpaceTimePoint,
              cfg: WalkConfig) -> SolutionEstimate:
    """Estimate the Perron-Wiener solution at z from cfg.walkers walks.

    phi is vectorized boundary data: phi(X, T) -> array over rows of X.
    Walkers that exhaust cfg.max_time are excluded from the average; if
    more than 1% time out the estimate is flagged unreliable.
    """
    if dom.metric.kind != "euclidean":
        raise PDEError("the random-walk solver is Euclidean-only")
    if not contains(dom, z):
        raise PDEError("evaluation point must lie inside Omega")
    w, N = cfg.walkers, dom.N
    h = cfg.step
    sigma = math.sqrt(2.0 * h / cfg.beta)
    rng = np.random.default_rng(cfg.seed)
    X = np.tile(z.x, (w, 1))
    T = np.full(w, z.t)
    active = np.ones(w, dtype=bool)
    exit_x = np.zeros((w, N))
    exit_t = np.zeros(w)
    max_steps = int(math.ceil(cfg.max_time / h))
    for _ in range(max_steps):
        if not active.any():
            break
        xi = rng.standard_normal((w, N))
        Xn = X + sigma * xi
        Tn = T - h
        idx = np.flatnonzero(active)
        inside = contains_many(dom, Xn[idx], Tn[idx])
        hit = idx[~inside]
        if hit.size:
            lo = np.zeros(hit.size)
            hi = np.ones(hit.size)
            for _ in range(6):  # to time tolerance h / 64
                mid = 0.5 * (lo + hi)
                Xm = X[hit] + mid[:, None] * (Xn[hit] - X[hit])
                Tm = T[hit] - mid * h
                ins = contains_many(dom, Xm, Tm)
                lo = np.where(ins, mid, lo)
                hi = np.where(ins, hi, mid)
            exit_x[hit] = X[hit] + hi[:, None] * (Xn[hit] - X[hit])
            exit_t[hit] = T[hit] - hi * h
            active[hit] = False
        keep = idx[inside]
        X[keep] = Xn[keep]
        T[keep] = Tn[keep]
    exited = ~active
    n_exited = int(exited.sum())
    n_timed_out = w - n_exited
    if n_exited == 0:
        raise PDEError("no walker exited within the time budget")
    vals = np.asarray(phi(exit_x[exited], exit_t[exited]), dtype=float)
    value = float(vals.mean())
    std_error = float(vals.std(ddof=1) / math.sqrt(n_exited)) if n_exited > 1 else math.inf
    kinds = classify_exit(dom, exit_x[exited], exit_t[exited])
    fracs = {name: float(np.mean(kinds == code))
             for code, name in enumerate(EXIT_KINDS)}
    mean_exit = float(np.mean(z.t - exit_t[exited]))
    return SolutionEstimate(value, std_error, n_exited, n_timed_out, fracs,
                            mean_exit, n_timed_out <= 0.01 * w, cfg)


# ---------------------------------------------------------------------------
# boundary behavior

def boundary_phi_distance(dom: DomainSpec):
    """Continuous boundary data phi = min(1, dhat(., z0)); phi(z0) = 0, so
    the solution must decay to 0 along interior probes iff z0 is regular."""
    z0, metric = dom.z0, dom.metric

    def phi(X, T):
        return np.minimum(1.0, parabolic_dist_many(metric, X, T, z0))

    return phi


def boundary_phi_cutoff(dom: DomainSpec, r0: float = 0.1):
    """Indicator data: 1 outside the parabolic r0-ball around z0, else 0.

    At a regular point the solution must relax to 0 along any interior
    approach; a solution pinned near 1 falsifies regularity claims and is
    the expected signature at irregular points whose nearby boundary is
    invisible to backward walks.  r0 must stay below the distance from z0
    to the boundary pieces the walks actually reach, or those pieces are
    zeroed and the probe loses its meaning."""
    metric = dom.metric

    def phi(X, T):
        return (parabolic_dist_many(metric, X, T, dom.z0) >= r0).astype(float)

    return phi


def interior_axis_probes(dom: DomainSpec, offsets) -> list[SpaceTimePoint]:
    """Probes approaching z0 from inside Omega, one per offset s.

    Tries (x0, t0 + s), then (x0, t0 - s), then the spatial offset
    (x0 + s e1, t0) for walls through z0; raises if none is interior."""
    out = []
    for s in offsets:
        s = float(s)
        side = dom.z0.x.copy()
        side[0] += s
        for cand in (stp(dom.z0.x.copy(), dom.z0.t + s),
                     stp(dom.z0.x.copy(), dom.z0.t - s),
                     stp(side, dom.z0.t)):
            if contains(dom, cand):
                out.append(cand)
                break
        else:
            raise PDEError(f"no interior probe at offset {s}")
    return out


@dataclass
class ProbeResult:
    dhat: float
    value: float
    gap: float
    std_error: float
    usable: bool


@dataclass
class HolderFit:
    status: str                  # DECAY-FIT | NO-DECAY | INSUFFICIENT
    alpha0: float
    c: float
    r2: float
    phi0: float
    probes: list = field(default_factory=list)
    closest_gap_sigma: float = math.nan


def boundary_holder(dom: DomainSpec, phi, probes, cfg: WalkConfig,
                    phi0: float | None = None) -> HolderFit:
    """Fit |u(z) - phi(z0)| ~ c dhat^alpha0 along an approach path.

    Probes with gap below 3 standard errors are dropped from the fit.  If
    the closest usable probe keeps a gap of at least 5 standard errors and
    at least half the largest usable gap, the point is reported NO-DECAY
    instead (irregular signature)."""
    if phi0 is None:
        phi0 = float(np.asarray(phi(dom.z0.x[None, :],
                                    np.array([dom.z0.t])))[0])
    rows = []
    for j, pz in enumerate(probes):
        sub = WalkConfig(cfg.beta, cfg.step, cfg.walkers,
                         cfg.seed + 7919 * j, cfg.max_time)
        sol = pwb_solve(dom, phi, pz, sub)
        gap = abs(sol.value - phi0)
        rows.append(ProbeResult(parabolic_dist(dom.metric, dom.z0, pz),
                                sol.value, gap, sol.std_error,
                                gap > 3.0 * sol.std_error))
    usable = [r for r in rows if r.usable]
    if len(usable) < 3:
        return HolderFit("INSUFFICIENT", math.nan, math.nan, math.nan,
                         phi0, rows)
    closest = min(usable, key=lambda r: r.dhat)
    max_gap = max(r.gap for r in usable)
    sig = closest.gap / closest.std_error if closest.std_error > 0 else math.inf
    if sig >= 5.0 and closest.gap >= 0.5 * max_gap:
        return HolderFit("NO-DECAY", 0.0, math.nan, math.nan, phi0, rows, sig)
    xs = np.log([r.dhat for r in usable])
    ys = np.log([r.gap for r in usable])
    A = np.vstack([xs, np.ones_like(xs)]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return HolderFit("DECAY-FIT", float(coef[0]), float(math.exp(coef[1])),
                     r2, phi0, rows, sig)


def classification_probe(dom: DomainSpec, verdict: str, offsets,
                         cfg: WalkConfig,
                         r0: float = 0.1) -> tuple[HolderFit, bool]:
    """Probe the solution for the signature that would falsify a verdict.

    REGULAR points are probed with distance data, which must decay
    (NO-DECAY contradicts); IRREGULAR points with cutoff data vanishing
    near z0, which must stay pinned away from 0 (DECAY-FIT contradicts).
    Other verdicts are probed with distance data and never contradicted."""
    probes = interior_axis_probes(dom, offsets)
    if verdict == "IRREGULAR":
        fit = boundary_holder(dom, boundary_phi_cutoff(dom, r0), probes,
                              cfg, phi0=0.0)
        return fit, fit.status == "DECAY-FIT"
    fit = boundary_holder(dom, boundary_phi_distance(dom), probes, cfg)
    return fit, verdict == "REGULAR" and fit.status == "NO-DECAY"
