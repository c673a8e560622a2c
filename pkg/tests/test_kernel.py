"""Gaussian kernels, heat kernel, and the two-sided bound bookkeeping."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import wienercap as wc
from wienercap.kernel import GaussianKernel, HeatKernel
from wienercap.metric import stp

times = st.floats(-2.0, 2.0, allow_nan=False)
coords = st.floats(-2.0, 2.0, allow_nan=False)


# ---------------------------------------------------------------------------
# pointwise values against the defining formula

def test_gaussian_value_euclidean_n1(m1):
    # exp(-a d^2 / dt) / |B(x, sqrt(dt))| with |B| = 2 sqrt(dt)
    z = stp([1.0], 1.0)
    w = stp([0.0], 0.0)
    got = wc.gaussian_eval(m1, 0.25, z, w)
    assert got == pytest.approx(math.exp(-0.25) / 2.0, rel=1e-13)


def test_gaussian_value_euclidean_n2(m2):
    z = stp([1.0, 0.0], 0.0)
    w = stp([0.0, 0.0], -1.0)
    got = wc.gaussian_eval(m2, 0.25, z, w)
    assert got == pytest.approx(math.exp(-0.25) / math.pi, rel=1e-13)


def test_gaussian_value_heisenberg(heis):
    z = stp([1.0, 0.0, 0.0], 1.0)
    w = stp([0.0, 0.0, 0.0], 0.0)
    # gauge distance 1, |B(x, 1)| = pi^2/8
    got = wc.gaussian_eval(heis, 0.5, z, w)
    assert got == pytest.approx(math.exp(-0.5) / (math.pi ** 2 / 8),
                                rel=1e-9)


def test_kernel_vanishes_without_time_order(m1):
    z = stp([0.0], 0.0)
    w = stp([1.0], 0.0)
    assert wc.gaussian_eval(m1, 0.25, z, w) == 0.0
    assert wc.gaussian_eval(m1, 0.25, w, stp([0.0], 1.0)) == 0.0


def test_heat_kernel_closed_form():
    # (4 pi dt / beta)^(-N/2) exp(-beta d^2 / (4 dt))
    got = wc.heat_eval(1, 2.0, stp([0.0], 1.0), stp([0.0], 0.0))
    assert got == pytest.approx((2 * math.pi) ** -0.5, rel=1e-13)
    got = wc.heat_eval(1, 1.0, stp([0.5], 1.0), stp([0.0], 0.0))
    assert got == pytest.approx((4 * math.pi) ** -0.5 * math.exp(-0.0625),
                                rel=1e-13)


def test_heat_equals_scaled_gaussian(m1):
    """The Euclidean heat kernel is gaussian_factor * G_(beta/4)."""
    beta = 2.0
    hk = HeatKernel(1, beta)
    gk = GaussianKernel(m1, beta / 4.0)
    rng = np.random.default_rng(0)
    Zx = rng.normal(size=(6, 1))
    Zt = rng.uniform(0.5, 2.0, size=6)
    Wx = rng.normal(size=(5, 1))
    Wt = rng.uniform(-1.0, 0.4, size=5)
    A = hk.matrix(Zx, Zt, Wx, Wt)
    B = gk.matrix(Zx, Zt, Wx, Wt) * hk.gaussian_factor
    assert np.allclose(A, B, rtol=1e-12, atol=1e-300)


def test_two_sided_bound_brackets_heat_kernel(m1, bounds1):
    """(1/Lambda) G_b0 <= heat kernel <= Lambda G_a0 pointwise."""
    beta = 2.0
    lam = bounds1.Lambda
    ka = GaussianKernel(m1, bounds1.a0)
    kb = GaussianKernel(m1, bounds1.b0)
    rng = np.random.default_rng(1)
    for _ in range(50):
        z = stp(rng.normal(size=1), rng.uniform(0.1, 2.0))
        w = stp(rng.normal(size=1), rng.uniform(-2.0, 0.0))
        gamma = wc.heat_eval(1, beta, z, w)
        assert gamma <= lam * ka.eval(z, w) * (1 + 1e-12)
        assert gamma >= kb.eval(z, w) / lam * (1 - 1e-12)


# ---------------------------------------------------------------------------
# monotonicity and matrix plumbing

@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_kernel_antitone_in_exponent(m1, a1, a2):
    if a1 > a2:
        a1, a2 = a2, a1
    z = stp([0.7], 0.5)
    w = stp([0.0], 0.0)
    assert wc.gaussian_eval(m1, a1, z, w) >= wc.gaussian_eval(m1, a2, z, w)


def test_matrix_matches_pointwise_eval(m2):
    kern = GaussianKernel(m2, 0.3)
    rng = np.random.default_rng(2)
    Zx = rng.normal(size=(4, 2))
    Zt = rng.uniform(-1, 1, size=4)
    Wx = rng.normal(size=(3, 2))
    Wt = rng.uniform(-1, 1, size=3)
    K = kern.matrix(Zx, Zt, Wx, Wt)
    assert K.shape == (4, 3)
    for i in range(4):
        for j in range(3):
            assert K[i, j] == pytest.approx(
                kern.eval(stp(Zx[i], Zt[i]), stp(Wx[j], Wt[j])),
                rel=1e-12, abs=1e-300)


def test_matrix_scale_factor(m1):
    k1 = GaussianKernel(m1, 0.25)
    k2 = GaussianKernel(m1, 0.25, scale=3.5)
    Zx = np.array([[0.0], [1.0]])
    Zt = np.array([1.0, 2.0])
    Wx = np.array([[0.2]])
    Wt = np.array([0.0])
    assert np.allclose(k2.matrix(Zx, Zt, Wx, Wt),
                       3.5 * k1.matrix(Zx, Zt, Wx, Wt))


def test_kernel_rejects_bad_exponent(m1):
    with pytest.raises(wc.KernelError):
        GaussianKernel(m1, 0.0)
    with pytest.raises(wc.KernelError):
        GaussianKernel(m1, -1.0)


# ---------------------------------------------------------------------------
# bounds bookkeeping

def test_euclidean_bounds_exact_fit():
    b = wc.euclidean_bounds(1, 2.0)
    assert b.a0 == pytest.approx(0.5)
    assert b.b0 == pytest.approx(0.5)
    factor = 2.0 / math.sqrt(2 * math.pi)
    assert b.Lambda == pytest.approx(max(factor, 1.0 / factor), rel=1e-12)
    b2 = wc.euclidean_bounds(2, 1.0)
    assert b2.Lambda == pytest.approx(4.0, rel=1e-12)
    assert b2.c_d == pytest.approx(4.0)


def test_structural_constant_formula():
    b = wc.euclidean_bounds(2, 1.0)
    assert wc.structural_constant(b) == pytest.approx(
        b.Lambda + 1.0 / b.a0 + b.b0 + b.c_d, rel=1e-14)


def test_bounds_validation():
    with pytest.raises(wc.KernelError):
        wc.GaussBounds(Lambda=0.5, a0=0.5, b0=0.5, c_d=2.0)
    with pytest.raises(wc.KernelError):
        wc.GaussBounds(Lambda=2.0, a0=-0.1, b0=0.5, c_d=2.0)


def test_kernel_flushes_denormal_tails(m1):
    """Entries below the representable range flush to exact zero."""
    kern = GaussianKernel(m1, 0.5)
    K = kern.matrix(np.array([[60.0]]), np.array([1e-3]),
                    np.array([[0.0]]), np.array([0.0]))
    assert K[0, 0] == 0.0
