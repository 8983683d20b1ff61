import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from atomwall.core import ConfigError, QuadratureSettings, ThermalScenario, TrapConfig
from atomwall.equilibrium import (casimir_polder_force, casimir_polder_terms, h_kernel,
                                  phi_e, phi_e_terms, reflection_imag, static_term_closed_form)
from atomwall.materials import Oscillator, PermittivityModel, matsubara_frequency, r0_static
from atomwall.shift import gamma_x, gamma_x_direct

UM = 1e-4
BARE = PermittivityModel()
COND = PermittivityModel(sigma0=1e2)

# Frozen oracle values (tests/oracles.py): k-variable scipy quadrature with
# brute-force Matsubara summation, unscaled special functions in mpmath.
H_ORACLE = 46994225.331533715  # h at eps 3.81, xi_1(310 K), k = 1/(2 * 7 um)
FCP_7UM_310K = -3.7046120887137514e-24
FCP_7UM_310K_COND = -6.3340331659069875e-24
FCP_11UM_605K = -1.1823649971902126e-24
PHIE_65UM_310K_STATIC = -1.465956250174045e-23
PHIE_65UM_310K_SERIES = -5.976251474011543e-24
PHIE_7UM_310K = -9.416187747953285e-24


def test_reflection_pair():
    xi = matsubara_frequency(310.0, 1)
    r = reflection_imag(3.81, xi, 1e3)
    assert 0 <= r.r_tm <= 1 and -1 <= r.r_te <= 0
    r0 = reflection_imag(3.81, 0.0, 1e3)
    assert r0.r_te == 0.0 and r0.r_tm == pytest.approx((3.81 - 1) / (3.81 + 1))
    r1 = reflection_imag(1.0, xi, 1e3)
    assert r1.r_tm == 0.0 and r1.r_te == 0.0


@hsettings(max_examples=60, deadline=None)
@given(st.floats(1.0, 100.0), st.floats(1e10, 1e17), st.floats(1e-2, 1e8))
def test_reflection_bounds(eps, xi, k):
    r = reflection_imag(eps, xi, k)
    # r_te = (q - k_l)/(q + k_l) is never positive
    assert 0.0 <= r.r_tm <= 1.0 and -1.0 <= r.r_te <= 0.0


def test_h_kernel_oracle():
    xi = matsubara_frequency(310.0, 1)
    assert h_kernel(3.81, xi, 1 / (2 * 7 * UM)) == pytest.approx(H_ORACLE, rel=1e-13)


def test_static_closed_form():
    for x in (6.5 * UM, 8 * UM, 11 * UM):
        for T in (310.0, 605.0):
            got = casimir_polder_terms(BARE, x, T).static
            assert got == pytest.approx(static_term_closed_form(BARE, x, T), rel=1e-9)
    k_B = 1.380649e-16
    ref = -0.75 * k_B * 310 * 4.73e-23 * (2.81 / 4.81) / (7 * UM) ** 4
    assert static_term_closed_form(BARE, 7 * UM, 310.0) == pytest.approx(ref, rel=1e-14)


def test_fcp_oracle():
    assert casimir_polder_force(BARE, 7 * UM, 310.0) == pytest.approx(FCP_7UM_310K, rel=1e-8)
    assert casimir_polder_force(COND, 7 * UM, 310.0) == pytest.approx(FCP_7UM_310K_COND, rel=1e-8)
    assert casimir_polder_force(BARE, 11 * UM, 605.0) == pytest.approx(FCP_11UM_605K, rel=1e-8)


def test_fcp_negative_and_monotone():
    x = np.linspace(6.5, 11, 10) * UM
    f = [casimir_polder_force(BARE, xi, 310.0) for xi in x]
    assert all(v < 0 for v in f)
    assert all(abs(a) > abs(b) for a, b in zip(f, f[1:]))


def test_fcp_vanishes_for_vacuum_wall():
    assert casimir_polder_force(PermittivityModel(1.0), 7 * UM, 310.0) == 0.0


def test_conductivity_only_changes_static_term():
    a = casimir_polder_terms(BARE, 8 * UM, 310.0)
    for s in (1e-9, 1e2):
        b = casimir_polder_terms(BARE.with_conductivity(s), 8 * UM, 310.0)
        assert b.matsubara == pytest.approx(a.matsubara, rel=1e-9)
        assert b.static / a.static == pytest.approx(1 / r0_static(BARE), rel=1e-12)


def test_phi_e_brute_force_series():
    t = phi_e_terms(BARE, 6.5 * UM, 310.0)
    assert t.static == pytest.approx(PHIE_65UM_310K_STATIC, rel=1e-9)
    assert t.matsubara == pytest.approx(PHIE_65UM_310K_SERIES, rel=1e-8)


def test_phi_e_oracle():
    assert phi_e(BARE, 7 * UM, 310.0) == pytest.approx(PHIE_7UM_310K, rel=1e-8)


def test_phi_e_conductivity_only_static():
    for d in (6.5 * UM, 11 * UM):
        a = phi_e_terms(BARE, d, 310.0)
        b = phi_e_terms(COND, d, 310.0)
        assert b.matsubara == pytest.approx(a.matsubara, rel=1e-9)
        assert b.static / a.static == pytest.approx(1 / r0_static(BARE), rel=1e-10)


def test_phi_e_matches_direct_average():
    # direct average of the pointwise equilibrium force, equilibrium at 310 K
    trap = TrapConfig()
    sc = ThermalScenario(7 * UM, 310.0, 310.0)
    analytic = gamma_x(BARE, sc, trap).gamma_x
    direct = gamma_x_direct(BARE, sc, trap,
                            force=lambda s: casimir_polder_force(BARE, s, 310.0)).gamma_x
    assert direct == pytest.approx(analytic, rel=1e-3)


def test_phi_e_rejects_overlap():
    with pytest.raises(ConfigError):
        phi_e(BARE, 5.0 * UM, 310.0)


def test_oscillator_model_force_between_limits():
    # eps falls from 3.81 to 2.0 above 1e13 rad/s: |F| lies between the two constant models
    disp = PermittivityModel(3.81, (Oscillator(1.81, 1e13, 0.0),))
    f = casimir_polder_force(disp, 7 * UM, 310.0)
    lo = casimir_polder_force(PermittivityModel(2.0), 7 * UM, 310.0)
    hi = casimir_polder_force(BARE, 7 * UM, 310.0)
    assert abs(lo) < abs(f) < abs(hi)


def test_tolerance_tightening_converges():
    loose = casimir_polder_force(BARE, 7 * UM, 310.0, QuadratureSettings(rel_tol=1e-6))
    tight = casimir_polder_force(BARE, 7 * UM, 310.0, QuadratureSettings(rel_tol=1e-12))
    assert loose == pytest.approx(tight, rel=1e-6)
    assert tight == pytest.approx(FCP_7UM_310K, rel=1e-10)


def test_input_validation():
    with pytest.raises(ValueError):
        casimir_polder_force(BARE, 0.0, 310.0)
    with pytest.raises(ValueError):
        casimir_polder_force(BARE, 7 * UM, -1.0)
    with pytest.raises(ValueError):
        reflection_imag(0.5, 1e14, 1.0)
    assert math.isfinite(casimir_polder_force(BARE, 1.0, 310.0))


def test_phi_e_small_trap_limit():
    # a, R_x -> 0: Phi_e / a -> -(1/2) dF_CP/dx at x = d
    tiny = TrapConfig(a=1e-7, R_x=1e-7)
    d, h = 8 * UM, 1e-3 * UM
    deriv = (casimir_polder_force(BARE, d + h, 310.0)
             - casimir_polder_force(BARE, d - h, 310.0)) / (2 * h)
    assert phi_e(BARE, d, 310.0, tiny) / tiny.a == pytest.approx(-0.5 * deriv, rel=1e-4)
