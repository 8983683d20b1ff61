import math

import numpy as np
import pytest

from atomwall.core import ConfigError
from atomwall.materials import (DivergentStaticLimit, Oscillator, PermittivityModel, eps_imag,
                                eps_real, matsubara_frequency, r0_static)

# xi_1 at 310 K from 2 pi k_B T / hbar with exact 2019-SI k_B and h
XI1_310 = 255004992876236.44


def test_constant_model():
    m = PermittivityModel()
    assert m.eps0 == 3.81
    assert eps_imag(m, 1e14) == 3.81
    assert np.all(eps_imag(m, np.array([1e10, 1e15])) == 3.81)
    assert eps_real(m, 1e13) == 3.81 + 0j
    assert not m.absorbing and not m.conducting
    assert m.label() == "bare"


def test_conductivity_addition_negligible():
    m = PermittivityModel(sigma0=1e2)
    v = eps_imag(m, 2.5e14)
    assert v - 3.81 == pytest.approx(4 * math.pi * 1e2 / 2.5e14, rel=1e-3)
    assert v - 3.81 < 1e-11
    assert m.label() == "sigma0=100"


def test_conductivity_addition_bound_over_matsubara():
    for T in (310.0, 479.0, 605.0):
        xi = np.array([matsubara_frequency(T, l) for l in range(1, 500)])
        for s in (1e-9, 1.0, 1e2):
            rel = np.abs(eps_imag(PermittivityModel(sigma0=s), xi) - 3.81) / 3.81
            assert np.all(rel < 1e-10)


def test_static_limit_diverges():
    with pytest.raises(DivergentStaticLimit):
        eps_imag(PermittivityModel(sigma0=1.0), 0.0)
    assert eps_imag(PermittivityModel(), 0.0) == 3.81


def test_eps_real_conductivity_is_imaginary():
    v = eps_real(PermittivityModel(sigma0=1e3), 1e4)
    assert v.real == 3.81
    assert v.imag == pytest.approx(4 * math.pi * 1e3 / 1e4)


def test_r0_switch():
    m = PermittivityModel()
    assert r0_static(m) == (3.81 - 1) / (3.81 + 1)
    assert r0_static(PermittivityModel(sigma0=0.0)) == r0_static(m)
    for s in (1e-300, 1e-9, 1.0, 1e2, 1e3):
        assert r0_static(m.with_conductivity(s)) == 1.0


def test_oscillator_model():
    m = PermittivityModel(3.81, (Oscillator(1.5, 2e14, 1e12),))
    assert m.eps_infinity == pytest.approx(2.31)
    assert m.absorbing
    assert eps_imag(m, 0.0) == 3.81
    assert eps_imag(m, 1e20) == pytest.approx(2.31, rel=1e-9)
    xi = np.geomspace(1e10, 1e18, 50)
    assert np.all(np.diff(eps_imag(m, xi)) < 0)
    # static limit on the real axis matches eps0
    assert eps_real(m, 1.0).real == pytest.approx(3.81, rel=1e-12)
    assert eps_real(m, 2e14).imag > 0


def test_model_validation():
    with pytest.raises(ConfigError):
        PermittivityModel(0.5)
    with pytest.raises(ConfigError):
        PermittivityModel(3.81, ((3.0, 1e14, 0.0),))
    with pytest.raises(ConfigError):
        PermittivityModel(sigma0=-1.0)
    with pytest.raises(ConfigError):
        Oscillator(0.5, 0.0)
    with pytest.raises(ValueError):
        eps_imag(PermittivityModel(), -1.0)
    with pytest.raises(ValueError):
        eps_real(PermittivityModel(), 0.0)


def test_with_conductivity_and_bare():
    m = PermittivityModel(4.0, ((1.0, 1e14, 1e11),))
    c = m.with_conductivity(5.0)
    assert c.sigma0 == 5.0 and c.oscillators == m.oscillators
    assert c.bare() == m


def test_matsubara_frequency():
    assert matsubara_frequency(310.0, 1) == pytest.approx(XI1_310, rel=1e-14)
    assert matsubara_frequency(310.0, 1) == pytest.approx(2.55e14, rel=0.01)
    assert matsubara_frequency(310.0, 0) == 0.0
    assert matsubara_frequency(620.0, 3) == pytest.approx(6 * XI1_310, rel=1e-14)
    with pytest.raises(ValueError):
        matsubara_frequency(310.0, 1.5)
    with pytest.raises(ValueError):
        matsubara_frequency(-1.0, 1)
