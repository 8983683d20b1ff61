"""Equilibrium Casimir-Polder force on an atom above a dielectric wall.

Lifshitz formula with the static polarizability ``alpha0`` used at every
Matsubara frequency::

    F_CP(x, T) = -2 k_B T [ alpha0 r0 int k^3 exp(-2kx) dk
                            + sum_{l>=1} alpha0 int k exp(-2 q_l x) h(xi_l, k) dk ]

and its average over the oscillating Thomas-Fermi condensate, obtained by
attaching ``I1(2qa) g(2qR_x)`` to each exponential ``exp(-2qd)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CONSTANTS, DEFAULT_SETTINGS, ConfigError, QuadratureSettings, TrapConfig
from .materials import PermittivityModel, eps_imag, r0_static
from .numerics import g_kernel_scaled, integrate_semi_infinite, matsubara_sum, scaled_i1

__all__ = [
    "ReflectionPair",
    "EquilibriumTerms",
    "reflection_imag",
    "h_kernel",
    "casimir_polder_force",
    "casimir_polder_terms",
    "phi_e",
    "phi_e_terms",
    "static_term_closed_form",
]

ALPHA0_RB = TrapConfig().alpha0


@dataclass(frozen=True)
class ReflectionPair:
    r_tm: float | np.ndarray
    r_te: float | np.ndarray


@dataclass(frozen=True)
class EquilibriumTerms:
    """The l = 0 contribution and the l >= 1 Matsubara sum, in dyn."""

    static: float
    matsubara: float

    @property
    def total(self):
        return self.static + self.matsubara


def _check_eps(eps):
    if np.any(np.asarray(eps) < 1.0):
        raise ValueError("eps must be >= 1 at imaginary frequency")


def reflection_imag(eps, xi, k, constants=CONSTANTS):
    """TM and TE reflection coefficients at imaginary frequency ``i xi``.

    With this sign convention ``r_te <= 0`` for ``eps > 1``.
    """
    _check_eps(eps)
    k = np.asarray(k, dtype=float)
    w2 = (np.asarray(xi, dtype=float) / constants.c) ** 2
    q = np.sqrt(k * k + w2)
    kw = np.sqrt(k * k + eps * w2)
    pair = ReflectionPair((eps * q - kw) / (eps * q + kw), (q - kw) / (q + kw))
    if np.ndim(pair.r_tm) == 0:
        return ReflectionPair(float(pair.r_tm), float(pair.r_te))
    return pair


def _h_of_q(eps, w2, q):
    # h as a function of q = sqrt(k^2 + xi^2/c^2); w2 = xi^2/c^2
    kw = np.sqrt(q * q + (eps - 1.0) * w2)
    r_tm = (eps * q - kw) / (eps * q + kw)
    r_te = (q - kw) / (q + kw)
    return (2.0 * q * q - w2) * r_tm - w2 * r_te


def h_kernel(eps, xi, k, constants=CONSTANTS):
    """``(2 q^2 - xi^2/c^2) r_TM - (xi^2/c^2) r_TE`` in cm^-2."""
    _check_eps(eps)
    k = np.asarray(k, dtype=float)
    w2 = (np.asarray(xi, dtype=float) / constants.c) ** 2
    out = _h_of_q(eps, w2, np.sqrt(k * k + w2))
    return float(out) if np.ndim(out) == 0 else out


# A kernel is (decay length L, extra(q)) standing for exp(-2 q L) * extra(q),
# where extra carries no exponential growth.

def _point_kernel(x):
    return x, None


def _averaged_kernel(d, trap: TrapConfig):
    if d <= trap.reach:
        raise ConfigError(f"d = {d:.6g} cm must exceed a + R_x = {trap.reach:.6g} cm")
    a, R = trap.a, trap.R_x

    def extra(q):
        return scaled_i1(2.0 * q * a) * g_kernel_scaled(2.0 * q * R)

    return d - a - R, extra


def _terms(model, T, kernel, settings, alpha0, constants):
    if not T > 0:
        raise ValueError("T must be > 0")
    length, extra = kernel
    c = constants.c

    def static_integrand(k):
        out = k**3 * np.exp(-2.0 * k * length)
        return out if extra is None else out * extra(k)

    res = integrate_semi_infinite(static_integrand, 1.0 / (2.0 * length), settings)
    static = alpha0 * r0_static(model) * res.value

    def term(l, xi):
        qmin = xi / c
        pre = np.exp(-2.0 * qmin * length)
        if pre == 0.0:
            return 0.0
        eps = eps_imag(model, xi)
        w2 = qmin * qmin

        # q = qmin + u; k dk = q dq
        def integrand(u):
            q = qmin + u
            out = q * _h_of_q(eps, w2, q) * np.exp(-2.0 * u * length)
            return out if extra is None else out * extra(q)

        scale = 1.0 / (2.0 * length)
        return alpha0 * pre * integrate_semi_infinite(integrand, scale, settings).value

    series = matsubara_sum(term, T, settings, constants=constants)
    prefactor = -2.0 * constants.k_B * T
    return EquilibriumTerms(prefactor * static, prefactor * series)


def casimir_polder_terms(model: PermittivityModel, x, T,
                         settings: QuadratureSettings = DEFAULT_SETTINGS,
                         alpha0=ALPHA0_RB, constants=CONSTANTS):
    """Equilibrium force at separation ``x`` split into l = 0 and l >= 1 parts."""
    if not x > 0:
        raise ValueError("x must be > 0")
    return _terms(model, T, _point_kernel(x), settings, alpha0, constants)


def casimir_polder_force(model: PermittivityModel, x, T,
                         settings: QuadratureSettings = DEFAULT_SETTINGS,
                         alpha0=ALPHA0_RB, constants=CONSTANTS):
    """Equilibrium Casimir-Polder force in dyn; negative means attraction."""
    return casimir_polder_terms(model, x, T, settings, alpha0, constants).total


def static_term_closed_form(model: PermittivityModel, x, T, alpha0=ALPHA0_RB,
                            constants=CONSTANTS):
    """``-(3/4) k_B T alpha0 r0 / x^4``, the l = 0 term in closed form."""
    return -0.75 * constants.k_B * T * alpha0 * r0_static(model) / x**4


def phi_e_terms(model: PermittivityModel, d, T, trap: TrapConfig = TrapConfig(),
                settings: QuadratureSettings = DEFAULT_SETTINGS, constants=CONSTANTS):
    """Condensate-averaged equilibrium force split into l = 0 and l >= 1 parts."""
    return _terms(model, T, _averaged_kernel(d, trap), settings, trap.alpha0, constants)


def phi_e(model: PermittivityModel, d, T, trap: TrapConfig = TrapConfig(),
          settings: QuadratureSettings = DEFAULT_SETTINGS, constants=CONSTANTS):
    """Equilibrium force averaged over density and oscillation phase (dyn).

    Each ``exp(-2qd)`` is evaluated as
    ``exp(-2q(d-a-R_x)) * [exp(-2qa) I1(2qa)] * [exp(-2qR_x) g(2qR_x)]``.
    """
    return phi_e_terms(model, d, T, trap, settings, constants).total
