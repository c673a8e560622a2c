"""Metric-measure structure for the spatial variable and its parabolic lift.

Everything downstream runs on (R^N, d, Lebesgue) where d is a doubling
distance: the Euclidean norm, the Koranyi gauge on the first Heisenberg
group (coordinates (x1, x2, x3), homogeneous dimension 4), or a 1-D
distance table interpolated from a user grid.  Space-time points live in a
strip R^N x (T1, T2) and carry the parabolic gauge

    dhat(z, w) = (d(x, y)^4 + (t - s)^2)^(1/4).

Ball volumes are either analytic (Euclidean, Koranyi) or Monte Carlo
hit-count estimates (always used for table metrics).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special


@dataclass(frozen=True)
class SpaceTimePoint:
    """Point z = (x, t) of the strip; x is a shape-(N,) float array."""

    x: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "t", float(self.t))

    @property
    def N(self) -> int:
        return self.x.shape[0]


def stp(x, t) -> SpaceTimePoint:
    """Shorthand constructor; accepts a scalar x when N = 1."""
    return SpaceTimePoint(np.atleast_1d(np.asarray(x, dtype=float)), float(t))


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricSpace:
    """A distance on R^N together with how ball volumes are computed.

    kind             one of "euclidean", "heisenberg-koranyi", "table"
    N                topological dimension of the coordinate chart
    Q                volume-doubling exponent (|B(x, 2r)| <= c_d |B(x, r)|,
                     |B(x, r)| ~ r^Q for the built-in kinds)
    c_d              doubling constant
    volume_mode      "analytic" or "monte-carlo"
    mc_samples       sample count for monte-carlo volumes
    seed             seed for the volume-estimate stream
    table_axis       (table kind only) shared 1-D coordinate grid
    table_values     (table kind only) matrix d(axis_i, axis_j)
    """

    kind: str
    N: int
    Q: float
    c_d: float
    volume_mode: str = "analytic"
    mc_samples: int = 20000
    seed: int = 0
    table_axis: np.ndarray | None = field(default=None, repr=False)
    table_values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("euclidean", "heisenberg-koranyi", "table"):
            raise MetricError(f"unknown metric kind {self.kind!r}")
        if self.volume_mode not in ("analytic", "monte-carlo"):
            raise MetricError(f"unknown volume mode {self.volume_mode!r}")
        if self.kind == "table" and self.volume_mode != "monte-carlo":
            raise MetricError("table metrics support monte-carlo volumes only")
        if self.Q <= 0 or self.c_d <= 1:
            raise MetricError("need Q > 0 and c_d > 1")


def euclidean(N: int, volume_mode: str = "analytic", mc_samples: int = 20000,
              seed: int = 0) -> MetricSpace:
    if N < 1:
        raise MetricError("N must be >= 1")
    return MetricSpace("euclidean", N, float(N), 2.0 ** N, volume_mode,
                       mc_samples, seed)


def heisenberg_koranyi(volume_mode: str = "analytic", mc_samples: int = 20000,
                       seed: int = 0) -> MetricSpace:
    """First Heisenberg group, Koranyi gauge; N = 3, Q = 4."""
    return MetricSpace("heisenberg-koranyi", 3, 4.0, 16.0, volume_mode,
                       mc_samples, seed)


def table_metric(axis, values, Q: float, c_d: float, mc_samples: int = 20000,
                 seed: int = 0) -> MetricSpace:
    """1-D metric given by a distance matrix over a shared axis grid.

    Distances between off-grid points are interpolated bilinearly.  The
    doubling data (Q, c_d) are taken on trust from the caller; runs on
    table metrics are labelled assumption-unverified by the reporting
    layer.
    """
    axis = np.asarray(axis, dtype=float)
    values = np.asarray(values, dtype=float)
    if axis.ndim != 1 or axis.size < 2 or np.any(np.diff(axis) <= 0):
        raise MetricError("table axis must be strictly increasing, length >= 2")
    if values.shape != (axis.size, axis.size):
        raise MetricError("table values must be square over the axis grid")
    if not np.allclose(values, values.T, atol=1e-12):
        raise MetricError("distance table must be symmetric")
    if not np.allclose(np.diag(values), 0.0, atol=1e-12):
        raise MetricError("distance table must vanish on the diagonal")
    if np.any(values < 0):
        raise MetricError("distance table must be nonnegative")
    return MetricSpace("table", 1, float(Q), float(c_d), "monte-carlo",
                       mc_samples, seed, table_axis=axis, table_values=values)


# ---------------------------------------------------------------------------
# distances

def _heis_group_diff(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Coordinates of x^{-1} o y for the polarized group law
    (a o b)_3 = a3 + b3 + (a1 b2 - a2 b1) / 2."""
    u = y - x
    u[..., 2] -= 0.5 * (x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0])
    return u


def _koranyi_gauge(u: np.ndarray) -> np.ndarray:
    horiz = u[..., 0] ** 2 + u[..., 1] ** 2
    return (horiz ** 2 + 16.0 * u[..., 2] ** 2) ** 0.25


def _table_lookup(m: MetricSpace, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    ax = m.table_axis
    vals = m.table_values
    xq = np.clip(x[..., 0], ax[0], ax[-1])
    yq = np.clip(y[..., 0], ax[0], ax[-1])
    i = np.clip(np.searchsorted(ax, xq) - 1, 0, ax.size - 2)
    j = np.clip(np.searchsorted(ax, yq) - 1, 0, ax.size - 2)
    fx = (xq - ax[i]) / (ax[i + 1] - ax[i])
    fy = (yq - ax[j]) / (ax[j + 1] - ax[j])
    v00 = vals[i, j]
    v10 = vals[i + 1, j]
    v01 = vals[i, j + 1]
    v11 = vals[i + 1, j + 1]
    return ((1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10
            + (1 - fx) * fy * v01 + fx * fy * v11)


def dist(m: MetricSpace, x, y) -> np.ndarray | float:
    """d(x, y); broadcasts over leading axes of x and y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != m.N or y.shape[-1] != m.N:
        raise MetricError(f"points must have {m.N} spatial coordinates")
    x, y = np.broadcast_arrays(x, y)
    if m.kind == "euclidean":
        out = np.sqrt(np.sum((x - y) ** 2, axis=-1))
    elif m.kind == "heisenberg-koranyi":
        out = _koranyi_gauge(_heis_group_diff(x.copy(), y))
    else:
        out = _table_lookup(m, x, y)
    return float(out) if out.ndim == 0 else out


def parabolic_dist(m: MetricSpace, z: SpaceTimePoint, w: SpaceTimePoint) -> float:
    """dhat(z, w) = (d(x, y)^4 + (t - s)^2)^(1/4)."""
    return float((dist(m, z.x, w.x) ** 4 + (z.t - w.t) ** 2) ** 0.25)


def parabolic_dist_many(m: MetricSpace, X: np.ndarray, T: np.ndarray,
                        z: SpaceTimePoint) -> np.ndarray:
    d = dist(m, X, z.x[None, :])
    return (d ** 4 + (np.asarray(T, dtype=float) - z.t) ** 2) ** 0.25


# ---------------------------------------------------------------------------
# ball volumes

def unit_ball_volume_euclidean(N: int) -> float:
    """Lebesgue volume of the Euclidean unit ball in R^N."""
    return math.pi ** (N / 2.0) / special.gamma(N / 2.0 + 1.0)


@lru_cache(maxsize=None)
def koranyi_ball_constant() -> float:
    """kappa with |B_Koranyi(x, r)| = kappa r^4, by quadrature of the
    horizontal slice areas (cached)."""
    val, _ = integrate.quad(lambda v: math.pi * math.sqrt(1.0 - 16.0 * v * v),
                            -0.25, 0.25, epsabs=1e-14, epsrel=1e-13)
    return val


def ball_coord_halfwidths(m: MetricSpace, r: float) -> np.ndarray:
    """Per-axis halfwidths of the coordinate bounding box of B_d(x, r).

    For the Koranyi gauge the box of the UNtranslated ball is
    [-r, r]^2 x [-r^2/4, r^2/4]; translation by x adds a twist of at most
    (|x1| + |x2|) r / 2 in the vertical coordinate, which callers that
    re-center handle themselves (see mc path in ball_volume).
    """
    r = float(r)
    if m.kind == "heisenberg-koranyi":
        return np.array([r, r, 0.25 * r * r])
    return np.full(m.N, r)


def ball_volume_with_error(m: MetricSpace, x, r: float) -> tuple[float, float]:
    """|B_d(x, r)| and the standard error of the estimate (0 if analytic)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = float(r)
    if r <= 0:
        return 0.0, 0.0
    if m.volume_mode == "analytic":
        if m.kind == "euclidean":
            return unit_ball_volume_euclidean(m.N) * r ** m.N, 0.0
        if m.kind == "heisenberg-koranyi":
            return koranyi_ball_constant() * r ** 4, 0.0
        raise MetricError("analytic volumes unavailable for table metrics")
    # monte-carlo: uniform proposals over a coordinate box containing the
    # ball, unbiased hit-count estimate.
    rng = np.random.default_rng(m.seed)
    half = ball_coord_halfwidths(m, r)
    center = x.copy()
    if m.kind == "heisenberg-koranyi":
        half = half.copy()
        half[2] += 0.5 * (abs(x[0]) + abs(x[1])) * r
    pts = center + rng.uniform(-1.0, 1.0, size=(m.mc_samples, m.N)) * half
    if m.kind == "table":
        lo, hi = m.table_axis[0], m.table_axis[-1]
        pts = np.clip(pts, lo, hi)
    hits = dist(m, pts, center[None, :]) < r
    p = hits.mean()
    box = float(np.prod(2.0 * half))
    se = box * math.sqrt(max(p * (1.0 - p), 0.0) / m.mc_samples)
    return box * p, se


def ball_volume(m: MetricSpace, x, r: float) -> float:
    return ball_volume_with_error(m, x, r)[0]


def ball_volume_many(m: MetricSpace, x, r: np.ndarray) -> np.ndarray:
    """Vectorized |B_d(x, r_i)| for analytic modes; loops otherwise."""
    r = np.asarray(r, dtype=float)
    if m.volume_mode == "analytic":
        if m.kind == "euclidean":
            return unit_ball_volume_euclidean(m.N) * r ** m.N
        if m.kind == "heisenberg-koranyi":
            return koranyi_ball_constant() * r ** 4
    flat = r.reshape(-1)
    out = np.array([ball_volume(m, x, ri) for ri in flat])
    return out.reshape(r.shape)
