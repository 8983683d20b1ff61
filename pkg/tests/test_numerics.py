import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st
from scipy import special
from scipy.integrate import quad

from atomwall.core import QuadratureSettings, TrapConfig
from atomwall.numerics import (G_SERIES_SWITCH, GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES,
                               QuadratureError, SummationError, _g_scaled_closed, _g_series,
                               g_kernel, g_kernel_scaled, integrate_finite,
                               integrate_semi_infinite, matsubara_sum, scaled_i1)

import oracles

# e^-1 I1(1), power series summed in 40-digit arithmetic
I1E_AT_1 = 0.20791041534970844
# g(1) from the defining formula in 60-digit arithmetic
G_AT_1 = 1.0734430519421174


# ---------------------------------------------------------------- scaled_i1

def test_scaled_i1_at_one():
    assert oracles.i1_scaled_series(1.0) == pytest.approx(I1E_AT_1, rel=1e-15)
    assert scaled_i1(1.0) == pytest.approx(I1E_AT_1, rel=1e-14)


def test_scaled_i1_small_and_large():
    for z in (1e-12, 1e-8, 1e-4):
        assert scaled_i1(z) / z == pytest.approx(0.5, rel=1e-3)
    assert scaled_i1(0.0) == 0.0
    for z in (1e4, 1e8, 1e300):
        v = scaled_i1(z)
        assert math.isfinite(v)
        assert v * math.sqrt(2 * math.pi * z) == pytest.approx(1.0, rel=1e-3)


@pytest.mark.parametrize("z", np.geomspace(1e-3, 30, 17))
def test_scaled_i1_against_mp(z):
    assert scaled_i1(z) == pytest.approx(oracles.i1_scaled_series(z), rel=1e-12)


@pytest.mark.parametrize("z", [200.0, 999.0])
def test_scaled_i1_large_against_mp(z):
    import mpmath as mp
    with mp.workdps(30):
        ref = float(mp.exp(-z) * mp.besseli(1, z))
    assert scaled_i1(z) == pytest.approx(ref, rel=1e-12)


def test_scaled_i1_array_and_domain():
    v = scaled_i1(np.array([0.5, 1.0]))
    assert v.shape == (2,) and v[1] == pytest.approx(I1E_AT_1)
    for bad in (-1.0, math.nan, math.inf):
        with pytest.raises(ValueError):
            scaled_i1(bad)


# ---------------------------------------------------------------- g kernel

def test_g_at_one():
    assert oracles.g_scaled_mp(1.0) * math.e == pytest.approx(G_AT_1, rel=1e-15)
    assert g_kernel(1.0) == pytest.approx(G_AT_1, rel=1e-13)


def test_g_limits():
    assert g_kernel(1e-8) == pytest.approx(1.0, rel=1e-14)
    assert g_kernel(1e-3) == pytest.approx(1 + 1e-6 / 14, rel=1e-14)
    for z in (50.0, 500.0, 1e5):
        ratio = g_kernel_scaled(z) * 2 * z**5 / (15 * (z * z - 3 * z + 3))
        assert ratio == pytest.approx(1.0, rel=1e-12)
    assert math.isfinite(g_kernel_scaled(1e300))


@pytest.mark.parametrize("z", np.geomspace(1e-3, 30, 23))
def test_g_scaled_against_mp(z):
    assert g_kernel_scaled(z) == pytest.approx(oracles.g_scaled_mp(z), rel=1e-12)


def test_g_continuity_at_switch():
    z = np.array([G_SERIES_SWITCH])
    series = float(np.exp(-z[0]) * _g_series(z)[0])
    closed = float(_g_scaled_closed(z)[0])
    assert abs(series - closed) / closed < 1e-12
    below = g_kernel_scaled(np.nextafter(G_SERIES_SWITCH, 0))
    above = g_kernel_scaled(np.nextafter(G_SERIES_SWITCH, 2))
    assert abs(below - above) / above < 1e-12


def test_g_domain():
    with pytest.raises(ValueError):
        g_kernel(math.nan)
    with pytest.raises(ValueError):
        g_kernel(-1.0)


# ---------------------------------------------------------------- averaging identities

@pytest.mark.parametrize("z", np.geomspace(0.01, 20, 9))
def test_time_average_identity(z):
    th = np.linspace(0, 2 * math.pi, 512, endpoint=False)
    avg = np.mean(np.cos(th) * np.exp(-z * np.cos(th)))
    assert avg == pytest.approx(-scaled_i1(z) * math.exp(z), rel=1e-8)


@pytest.mark.parametrize("kR", np.geomspace(0.01, 15, 9))
def test_space_average_identity(kR):
    R = TrapConfig().R_x
    k = kR / R
    v = quad(lambda x: 15 / (16 * R) * (1 - x * x / R**2) ** 2 * math.exp(-2 * k * x),
             -R, R, epsabs=0, epsrel=1e-13, limit=200)[0]
    assert g_kernel(2 * kR) == pytest.approx(v, rel=1e-8)


# ---------------------------------------------------------------- Gauss-Kronrod rule

def test_gk_rule_exactness():
    x = NODES
    for n in range(0, 32):
        exact = (1 - (-1) ** (n + 1)) / (n + 1)
        assert np.dot(KRONROD_WEIGHTS, x**n) == pytest.approx(exact, abs=1e-14)
    for n in range(0, 20):
        exact = (1 - (-1) ** (n + 1)) / (n + 1)
        assert np.dot(GAUSS_WEIGHTS, x**n) == pytest.approx(exact, abs=1e-14)


def test_gauss_nodes_match_legendre():
    xg, _ = np.polynomial.legendre.leggauss(10)
    assert np.allclose(np.sort(NODES[GAUSS_WEIGHTS > 0]), xg, atol=1e-15)


# ---------------------------------------------------------------- quadrature

X7 = 7e-4


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_gamma_integrals(n):
    r = integrate_semi_infinite(lambda k: k**n * np.exp(-2 * k * X7), 1 / (2 * X7))
    assert r.value == pytest.approx(math.factorial(n) / (2 * X7) ** (n + 1), rel=1e-10)
    assert r.error_estimate >= 0 and r.evaluations > 0


def test_unit_exponential():
    assert integrate_semi_infinite(lambda k: np.exp(-k), 1.0).value == pytest.approx(1.0, rel=1e-12)


def test_scaled_kernel_product_against_fixed_grid():
    t = TrapConfig()
    L = 6.5e-4 - t.a - t.R_x
    gmp = np.vectorize(oracles.g_scaled_mp)

    def oracle_f(k):
        return k * np.exp(-2 * k * L) * special.i1e(2 * k * t.a) * gmp(2 * k * t.R_x)

    def f(k):
        return k * np.exp(-2 * k * L) * scaled_i1(2 * k * t.a) * g_kernel_scaled(2 * k * t.R_x)

    ref = oracles.fixed_grid_semi_infinite(oracle_f, 1 / (2 * L), n=300)
    assert integrate_semi_infinite(f, 1 / (2 * L)).value == pytest.approx(ref, rel=1e-10)


def test_finite_with_points_and_reversed():
    r = integrate_finite(lambda x: np.abs(x - 0.3), 0.0, 1.0, points=(0.3,))
    assert r.value == pytest.approx(0.045 + 0.245, rel=1e-13)
    assert integrate_finite(np.sin, math.pi, 0.0).value == pytest.approx(-2.0, rel=1e-12)
    assert integrate_finite(np.sin, 1.0, 1.0).value == 0.0


def test_vector_integrand():
    def f(x):
        return np.stack([np.exp(-x), x * np.exp(-x)], axis=1)
    v = integrate_semi_infinite(f, 1.0).value
    assert v == pytest.approx([1.0, 1.0], rel=1e-10)


def test_nonconvergence_carries_best_estimate():
    s = QuadratureSettings(rel_tol=1e-14, max_subdivisions=3)
    with pytest.raises(QuadratureError) as info:
        integrate_finite(lambda x: np.sqrt(x) * np.sin(40 * x), 0.0, 1.0, s)
    assert math.isfinite(info.value.best) and info.value.error > 0


def test_quadrature_is_deterministic():
    def f(k):
        return k**3 * np.exp(-2 * k * X7) * g_kernel_scaled(k * 1e-4)
    a = integrate_semi_infinite(f, 1 / (2 * X7))
    b = integrate_semi_infinite(f, 1 / (2 * X7))
    assert a == b


@hsettings(max_examples=30, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_exponential_scale_invariance(s):
    r = integrate_semi_infinite(lambda x: np.exp(-x / s) / s, s)
    assert r.value == pytest.approx(1.0, rel=1e-10)


# ---------------------------------------------------------------- Matsubara sum

def test_matsubara_zero_terms():
    assert matsubara_sum(lambda l, xi: 0.0, 310.0) == 0.0


def test_matsubara_geometric():
    r = math.exp(-2 * 2.55e14 * 6.5e-4 / 2.99792458e10)
    got = matsubara_sum(lambda l, xi: r**l, 310.0)
    assert got == pytest.approx(r / (1 - r), rel=1e-12)


def test_matsubara_passes_frequencies():
    seen = []

    def term(l, xi):
        seen.append((l, xi))
        return 0.5**l
    matsubara_sum(term, 310.0)
    l, xi = seen[2]
    assert l == 3 and xi == pytest.approx(3 * 255004992876236.44, rel=1e-14)


def test_matsubara_nondecaying_raises():
    s = QuadratureSettings(max_matsubara_terms=50)
    with pytest.raises(SummationError, match="l_max=50"):
        matsubara_sum(lambda l, xi: 1.0, 310.0, s)
    with pytest.raises(SummationError):
        matsubara_sum(lambda l, xi: math.nan, 310.0)
