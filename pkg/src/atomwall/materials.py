"""Dielectric response of the wall.

A :class:`PermittivityModel` is a static permittivity ``eps0``, optionally
dressed with damped oscillators (dispersion) and a static conductivity
``sigma0`` (Gaussian units, s^-1). The conductivity enters as
``eps(omega) + 4 pi i sigma0 / omega`` on the real axis and as
``eps(i xi) + 4 pi sigma0 / xi`` on the imaginary axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CONSTANTS, AtomWallError, ConfigError

__all__ = [
    "Oscillator",
    "PermittivityModel",
    "DivergentStaticLimit",
    "FUSED_SILICA_EPS0",
    "eps_imag",
    "eps_real",
    "r0_static",
    "matsubara_frequency",
]

FUSED_SILICA_EPS0 = 3.81


class DivergentStaticLimit(AtomWallError, ValueError):
    """eps(i xi) diverges at xi = 0 for a conducting model; use r0_static."""


@dataclass(frozen=True)
class Oscillator:
    """Lorentz oscillator: strength (dimensionless), resonance and damping (rad/s)."""

    strength: float
    resonance: float
    damping: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.strength) and self.strength >= 0):
            raise ConfigError("oscillator strength must be finite and >= 0")
        if not (math.isfinite(self.resonance) and self.resonance > 0):
            raise ConfigError("oscillator resonance must be finite and > 0")
        if not (math.isfinite(self.damping) and self.damping >= 0):
            raise ConfigError("oscillator damping must be finite and >= 0")


@dataclass(frozen=True)
class PermittivityModel:
    """Wall permittivity.

    The oscillators describe how the response falls from ``eps0`` at zero
    frequency towards ``eps0 - sum(strengths)`` at high frequency::

        eps(i xi) = eps0 - sum_j C_j (xi^2 + g_j xi) / (w_j^2 + xi^2 + g_j xi)

    so ``eps0`` is always the static value, and the high-frequency limit must
    stay >= 1. ``sigma0=None`` or ``0`` means conductivity is neglected.
    """

    eps0: float = FUSED_SILICA_EPS0
    oscillators: tuple = ()
    sigma0: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.eps0) and self.eps0 >= 1.0):
            raise ConfigError(f"eps0 must be finite and >= 1, got {self.eps0!r}")
        osc = tuple(o if isinstance(o, Oscillator) else Oscillator(*o) for o in self.oscillators)
        object.__setattr__(self, "oscillators", osc)
        if self.eps0 - sum(o.strength for o in osc) < 1.0:
            raise ConfigError("oscillator strengths exceed eps0 - 1; "
                              "high-frequency permittivity would drop below 1")
        if self.sigma0 is not None and not (math.isfinite(self.sigma0) and self.sigma0 >= 0):
            raise ConfigError(f"sigma0 must be finite and >= 0, got {self.sigma0!r}")

    @property
    def conducting(self):
        return self.sigma0 is not None and self.sigma0 > 0

    @property
    def eps_infinity(self):
        return self.eps0 - sum(o.strength for o in self.oscillators)

    def with_conductivity(self, sigma0):
        return PermittivityModel(self.eps0, self.oscillators, sigma0)

    def bare(self):
        """The same dielectric with conductivity neglected."""
        return PermittivityModel(self.eps0, self.oscillators, None)

    @property
    def absorbing(self):
        """True if eps(omega) has a nonzero imaginary part somewhere on the real axis."""
        return self.conducting or any(o.damping > 0 and o.strength > 0 for o in self.oscillators)

    def label(self):
        return "bare" if not self.conducting else f"sigma0={self.sigma0:g}"


def eps_imag(model: PermittivityModel, xi):
    """Permittivity at imaginary frequency ``i xi`` (real, >= 1)."""
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr < 0) or not np.all(np.isfinite(xi_arr)):
        raise ValueError("xi must be finite and >= 0")
    eps = np.full_like(xi_arr, model.eps0)
    for o in model.oscillators:
        eps = eps - o.strength * (xi_arr**2 + o.damping * xi_arr) / (
            o.resonance**2 + xi_arr**2 + o.damping * xi_arr)
    if model.conducting:
        if np.any(xi_arr == 0):
            raise DivergentStaticLimit(
                "eps(i xi) diverges at xi = 0 when sigma0 > 0; use r0_static for l = 0")
        eps = eps + 4.0 * math.pi * model.sigma0 / xi_arr
    return float(eps) if eps.ndim == 0 else eps


def eps_real(model: PermittivityModel, omega):
    """Complex permittivity on the real frequency axis, ``Im >= 0``."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise ValueError("omega must be finite and > 0")
    eps = np.full(w.shape, model.eps_infinity, dtype=complex)
    for o in model.oscillators:
        eps = eps + o.strength * o.resonance**2 / (o.resonance**2 - w**2 - 1j * o.damping * w)
    if model.conducting:
        eps = eps + 1j * (4.0 * math.pi * model.sigma0 / w)
    return complex(eps) if eps.ndim == 0 else eps


def r0_static(model: PermittivityModel):
    """Zero-frequency TM reflection coefficient.

    ``(eps0 - 1)/(eps0 + 1)`` for a dielectric, exactly 1 once any static
    conductivity is present, whatever its size.
    """
    if model.conducting:
        return 1.0
    return (model.eps0 - 1.0) / (model.eps0 + 1.0)


def matsubara_frequency(T, l, constants=CONSTANTS):
    """``xi_l = 2 pi k_B T l / hbar`` in rad/s."""
    if not (math.isfinite(T) and T > 0):
        raise ValueError("T must be finite and > 0")
    if int(l) != l or l < 0:
        raise ValueError("l must be a non-negative integer")
    return 2.0 * math.pi * constants.k_B * T * l / constants.hbar
