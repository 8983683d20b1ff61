"""Atom-wall force out of thermal equilibrium.

When the substrate sits at ``T_S`` and the surroundings at ``T_E``::

    F(x, T_S, T_E) = F_CP(x, T_E) + F_n(x, T_S) - F_n(x, T_E)
    F_n(x, T) = -K int_0^inf dw int_0^inf dt f(w, t) exp(-2 w t x / c)
    K = 2 sqrt(2) hbar alpha0 / (pi c^4)

The t-integration region
------------------------
For real ``eps`` the integrand vanishes identically for ``t^2 >= eps - 1``:
only waves that propagate inside the substrate contribute. By default
(``t_domain="window"``) the t-integral is carried over ``0 < t < sqrt(Re eps(w) - 1)``
for every model, which is exact for real permittivities.

With ``t_domain="full"`` an absorbing model also gets the region beyond the
window. For a static conductivity that region adds a low-frequency,
quasi-static piece whose size does not depend on ``sigma0`` once
``sigma0 > 0`` (it comes from ``w`` of order ``4 pi sigma0``), so it does not
vanish as ``sigma0 -> 0+``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CONSTANTS, DEFAULT_SETTINGS, ConfigError, QuadratureSettings, TrapConfig
from .equilibrium import ALPHA0_RB, casimir_polder_force
from .materials import PermittivityModel, eps_real
from .numerics import (g_kernel_scaled, integrate_finite, integrate_semi_infinite,
                       scaled_i1)

__all__ = [
    "ForceDecomposition",
    "NoneqIntegrandPoint",
    "noneq_prefactor",
    "f_integrand",
    "f_n_force",
    "phi_n",
    "total_force",
]

T_DOMAINS = ("window", "full")

# Inner integrals run tighter than the outer one so their error does not dominate.
_INNER_TOL_FACTOR = 0.1


@dataclass(frozen=True)
class ForceDecomposition:
    """Pointwise forces and their condensate averages (dyn).

    Fields that were not computed are ``None``.
    """

    f_cp: float | None = None
    f_n_ts: float | None = None
    f_n_te: float | None = None
    phi_e: float | None = None
    phi_n_ts: float | None = None
    phi_n_te: float | None = None

    # The nonequilibrium difference is taken first so equilibrium totals are exact.
    @property
    def total_force(self):
        return self.f_cp + (self.f_n_ts - self.f_n_te)

    @property
    def total_phi(self):
        return self.phi_e + (self.phi_n_ts - self.phi_n_te)


@dataclass(frozen=True)
class NoneqIntegrandPoint:
    omega: float
    t: float
    value: float


def noneq_prefactor(alpha0=ALPHA0_RB, constants=CONSTANTS):
    """``K = 2 sqrt(2) hbar alpha0 / (pi c^4)``."""
    return 2.0 * math.sqrt(2.0) * constants.hbar * alpha0 / (math.pi * constants.c**4)


def _planck_w4(omega, T, constants):
    # w^4 / (exp(hbar w / k_B T) - 1), written to avoid overflow
    u = constants.hbar * omega / (constants.k_B * T)
    return omega**4 * np.exp(-u) / -np.expm1(-u)


def _f_core(eps, omega, t, T, constants):
    eps = np.asarray(eps, dtype=complex)
    # Im eps >= 0; force a +0 imaginary part so sqrt picks the upper branch for p < 0.
    eps = eps.real + 1j * np.abs(eps.imag)
    t2 = t * t
    p = eps - 1.0 - t2
    abs_p = np.abs(p)
    re_p = p.real
    # |p| + Re p, without cancellation when Re p < 0
    with np.errstate(invalid="ignore", divide="ignore"):
        root_arg = np.where(re_p >= 0.0, abs_p + re_p,
                            p.imag**2 / np.where(re_p < 0.0, abs_p - re_p, 1.0))
    sqrt_p = np.sqrt(p)
    first = 1.0 / np.abs(sqrt_p + 1j * t) ** 2
    second = (2.0 * t2 + 1.0) * (t2 + 1.0 + abs_p) / np.abs(sqrt_p + 1j * eps * t) ** 2
    out = _planck_w4(omega, T, constants) * t2 * np.sqrt(root_arg) * (first + second)
    return np.where(root_arg > 0.0, out, 0.0)


def f_integrand(model: PermittivityModel, omega, t, T, constants=CONSTANTS):
    """The nonequilibrium spectral integrand f(w, t) (broadcasts over arrays).

    ``f = w^4 t^2 / (exp(hbar w/k_B T) - 1) * sqrt(|p| + Re eps - 1 - t^2)
    * [1/|sqrt(p) + i t|^2 + (2t^2+1)(t^2+1+|p|)/|sqrt(p) + i eps t|^2]``
    with ``p = eps(w) - 1 - t^2`` and the principal square root.
    """
    omega = np.asarray(omega, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(omega <= 0) or np.any(t <= 0) or not T > 0:
        raise ValueError("omega, t and T must all be > 0")
    out = _f_core(eps_real(model, omega), omega, t, T, constants)
    return float(out) if out.ndim == 0 else out


def _window_part(model, T, length, extra, settings, constants):
    c = constants.c
    inner_tol = settings.rel_tol * _INNER_TOL_FACTOR

    def over_omega(omega):
        eps = np.asarray(eps_real(model, omega))
        tw = np.sqrt(np.maximum(eps.real - 1.0, 0.0))
        if not np.any(tw > 0):
            return np.zeros_like(omega)

        # t = tw sin(phi), dt = tw cos(phi) dphi
        def over_phi(phi):
            s = np.sin(phi)[:, None]
            t = tw[None, :] * s
            val = _f_core(eps[None, :], omega[None, :], t, T, constants)
            val = val * np.exp(-2.0 * omega[None, :] * t * length / c)
            if extra is not None:
                val = val * extra(omega[None, :], t)
            return val * (tw[None, :] * np.cos(phi)[:, None])

        return integrate_finite(over_phi, 0.0, 0.5 * math.pi, settings, rel_tol=inner_tol).value

    scale = constants.k_B * T / constants.hbar
    return integrate_semi_infinite(over_omega, scale, settings).value


def _tail_part(model, T, length, extra, settings, constants):
    # Only absorbing models have a nonzero integrand beyond the window.
    if not model.absorbing:
        return 0.0
    c = constants.c
    inner_tol = settings.rel_tol * _INNER_TOL_FACTOR
    w_thermal = constants.k_B * T / constants.hbar
    marks = [w_thermal]
    if model.conducting:
        marks.append(4.0 * math.pi * model.sigma0 / (1.0 + model.eps0))
    marks += [o.resonance for o in model.oscillators]
    y_lo = math.log(min(marks)) - 40.0
    y_hi = math.log(60.0 * w_thermal)
    points = [math.log(m) for m in marks if y_lo < math.log(m) < y_hi]

    def over_logomega(y):
        omega = np.exp(y)
        eps = np.asarray(eps_real(model, omega))
        tw = np.sqrt(np.maximum(eps.real - 1.0, 0.0))
        b = 2.0 * omega * length / c

        # t = tw + s / b
        def over_s(s):
            t = tw[None, :] + s[:, None] / b[None, :]
            val = _f_core(eps[None, :], omega[None, :], t, T, constants) * np.exp(-s)[:, None]
            if extra is not None:
                val = val * extra(omega[None, :], t)
            return val

        inner = integrate_semi_infinite(over_s, 1.0, settings, rel_tol=inner_tol).value
        return inner * np.exp(-b * tw) / b * omega

    return integrate_finite(over_logomega, y_lo, y_hi, settings, points=points).value


def _noneq(model, T, length, extra, settings, t_domain, alpha0, constants):
    if t_domain not in T_DOMAINS:
        raise ValueError(f"t_domain must be one of {T_DOMAINS}, got {t_domain!r}")
    if not T > 0:
        raise ValueError("T must be > 0")
    total = _window_part(model, T, length, extra, settings, constants)
    if t_domain == "full":
        total += _tail_part(model, T, length, extra, settings, constants)
    return -noneq_prefactor(alpha0, constants) * total


def f_n_force(model: PermittivityModel, x, T, settings: QuadratureSettings = DEFAULT_SETTINGS,
              alpha0=ALPHA0_RB, t_domain="window", constants=CONSTANTS):
    """Nonequilibrium contribution ``F_n(x, T)`` in dyn (negative: attraction)."""
    if not x > 0:
        raise ValueError("x must be > 0")
    return _noneq(model, T, x, None, settings, t_domain, alpha0, constants)


def phi_n(model: PermittivityModel, d, T, trap: TrapConfig = TrapConfig(),
          settings: QuadratureSettings = DEFAULT_SETTINGS, t_domain="window",
          constants=CONSTANTS):
    """Condensate average of ``F_n``: f picks up ``I1(2awt/c) g(2R_x wt/c)``.

    Evaluated with scaled kernels against ``exp(-2wt(d - a - R_x)/c)``.
    """
    if d <= trap.reach:
        raise ConfigError(f"d = {d:.6g} cm must exceed a + R_x = {trap.reach:.6g} cm")
    c = constants.c
    a, R = trap.a, trap.R_x

    def extra(omega, t):
        z = omega * t / c
        return scaled_i1(2.0 * a * z) * g_kernel_scaled(2.0 * R * z)

    return _noneq(model, T, d - a - R, extra, settings, t_domain, trap.alpha0, constants)


def total_force(model: PermittivityModel, x, T_S, T_E,
                settings: QuadratureSettings = DEFAULT_SETTINGS, alpha0=ALPHA0_RB,
                t_domain="window", constants=CONSTANTS):
    """``F_CP(x, T_E) + F_n(x, T_S) - F_n(x, T_E)`` with its parts.

    For ``T_S == T_E`` the two nonequilibrium terms are identical and the
    total reduces to ``F_CP`` exactly.
    """
    f_cp = casimir_polder_force(model, x, T_E, settings, alpha0, constants)
    f_te = f_n_force(model, x, T_E, settings, alpha0, t_domain, constants)
    f_ts = f_te if T_S == T_E else f_n_force(model, x, T_S, settings, alpha0, t_domain,
                                             constants)
    return ForceDecomposition(f_cp=f_cp, f_n_ts=f_ts, f_n_te=f_te)
