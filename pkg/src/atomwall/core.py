"""Units, physical constants and configuration types.

Everything inside the package works in Gaussian-CGS: lengths in cm, masses in
g, forces in dyn, temperatures in K, frequencies in rad/s. Human units (um, Hz,
kg) are converted once, at the boundary, through :func:`to_internal_units`.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path

from scipy import constants as _si


class AtomWallError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(AtomWallError, ValueError):
    """Invalid configuration value, unit or file."""


class UnitError(ConfigError):
    pass


class NumericalError(AtomWallError, RuntimeError):
    """A quadrature, series or shift computation failed to converge."""


def _check_positive(owner, **values):
    for name, value in values.items():
        if not isinstance(value, numbers.Real) or isinstance(value, bool):
            raise ConfigError(f"{owner}.{name} must be a real number, got {value!r}")
        if not math.isfinite(value) or value <= 0:
            raise ConfigError(f"{owner}.{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants in Gaussian-CGS."""

    k_B: float = _si.k * 1e7  # erg/K
    hbar: float = _si.hbar * 1e7  # erg s
    c: float = _si.c * 1e2  # cm/s

    def __post_init__(self):
        _check_positive("PhysicalConstants", k_B=self.k_B, hbar=self.hbar, c=self.c)


CONSTANTS = PhysicalConstants()


# Unit table: tag -> (dimension, factor to CGS). Hz is special-cased (2 pi).
_UNITS = {
    "cm": ("length", 1.0),
    "mm": ("length", 1e-1),
    "um": ("length", 1e-4),
    "µm": ("length", 1e-4),  # micro sign
    "μm": ("length", 1e-4),  # greek mu
    "nm": ("length", 1e-7),
    "K": ("temperature", 1.0),
    "rad/s": ("angular_frequency", 1.0),
    "Hz": ("angular_frequency", 2.0 * math.pi),
    "g": ("mass", 1.0),
    "kg": ("mass", 1e3),
    "cm3": ("volume", 1.0),
    "cm^3": ("volume", 1.0),
    "cm³": ("volume", 1.0),
    "/s": ("rate", 1.0),
    "1/s": ("rate", 1.0),
    "s^-1": ("rate", 1.0),
    "s-1": ("rate", 1.0),
    "s⁻¹": ("rate", 1.0),
}


def _lookup(unit):
    try:
        return _UNITS[unit.strip()]
    except (KeyError, AttributeError):
        raise UnitError(f"unknown unit tag {unit!r}; accepted: {', '.join(_UNITS)}") from None


def to_internal_units(value, unit):
    """Convert ``value`` given in ``unit`` to Gaussian-CGS.

    A frequency tagged ``Hz`` is taken as a cyclic frequency and becomes an
    angular frequency, so ``229 Hz`` maps to ``2*pi*229 rad/s``.
    """
    _, factor = _lookup(unit)
    return value * factor


def from_internal_units(value, unit):
    """Inverse of :func:`to_internal_units`."""
    _, factor = _lookup(unit)
    return value / factor


def unit_dimension(unit):
    return _lookup(unit)[0]


@dataclass(frozen=True)
class TrapConfig:
    """Trap and condensate parameters (CGS).

    Defaults are those of the 87Rb experiment at a fused-silica surface. The
    polarizability is a volume in cm^3; it is sometimes quoted with the unit
    misprinted as cm^-3.
    """

    omega0: float = 2.0 * math.pi * 229.0
    a: float = 2.50e-4
    R_x: float = 2.69e-4
    m: float = 1.443e-25 * 1e3
    alpha0: float = 4.73e-23

    def __post_init__(self):
        _check_positive("TrapConfig", omega0=self.omega0, a=self.a, R_x=self.R_x,
                        m=self.m, alpha0=self.alpha0)

    @property
    def reach(self):
        """Largest excursion of a condensate atom from the trap centre, a + R_x."""
        return self.a + self.R_x


@dataclass(frozen=True)
class ThermalScenario:
    """Separation of the trap centre from the wall and the two temperatures."""

    d: float
    T_S: float
    T_E: float

    def __post_init__(self):
        _check_positive("ThermalScenario", d=self.d, T_S=self.T_S, T_E=self.T_E)

    @property
    def in_equilibrium(self):
        return self.T_S == self.T_E

    def check_clearance(self, trap: TrapConfig):
        """Reject separations at which the oscillating cloud would touch the wall."""
        if self.d <= trap.reach:
            raise ConfigError(
                f"d = {self.d:.6g} cm must exceed a + R_x = {trap.reach:.6g} cm; "
                "the condensate would reach the wall")


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances for every integral and for the Matsubara series.

    ``abs_tol`` is an absolute floor in the natural units of whichever
    integrand is being integrated; the default of zero makes every
    convergence test purely relative.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 0.0
    max_subdivisions: int = 400
    matsubara_tail_tol: float = 1e-12
    max_matsubara_terms: int = 100_000

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise ConfigError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")
        if not (math.isfinite(self.abs_tol) and self.abs_tol >= 0.0):
            raise ConfigError(f"abs_tol must be finite and >= 0, got {self.abs_tol!r}")
        if not (math.isfinite(self.matsubara_tail_tol) and self.matsubara_tail_tol > 0):
            raise ConfigError("matsubara_tail_tol must be finite and > 0")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ConfigError("max_subdivisions must be an integer >= 1")
        if int(self.max_matsubara_terms) != self.max_matsubara_terms or self.max_matsubara_terms < 2:
            raise ConfigError("max_matsubara_terms must be an integer >= 2")


DEFAULT_SETTINGS = QuadratureSettings()


# --------------------------------------------------------------------------
# Config file
# --------------------------------------------------------------------------

# key -> (section, field, expected dimension or None for dimensionless)
_CONFIG_KEYS = {
    "omega0": ("trap", "omega0", "angular_frequency"),
    "a": ("trap", "a", "length"),
    "R_x": ("trap", "R_x", "length"),
    "m": ("trap", "m", "mass"),
    "alpha0": ("trap", "alpha0", "volume"),
    "d": ("scenario", "d", "length"),
    "d_min": ("scan", "d_min", "length"),
    "d_max": ("scan", "d_max", "length"),
    "steps": ("scan", "steps", None),
    "T_S": ("scenario", "T_S", "temperature"),
    "T_E": ("scenario", "T_E", "temperature"),
    "eps0": ("material", "eps0", None),
    "sigma0": ("material", "sigma0", "rate"),
    "rel_tol": ("settings", "rel_tol", None),
    "abs_tol": ("settings", "abs_tol", None),
    "max_subdivisions": ("settings", "max_subdivisions", None),
    "matsubara_tail_tol": ("settings", "matsubara_tail_tol", None),
    "max_matsubara_terms": ("settings", "max_matsubara_terms", None),
}

_INT_KEYS = {"steps", "max_subdivisions", "max_matsubara_terms"}


@dataclass
class ConfigFile:
    """Parsed contents of a key-value config file, already in CGS.

    Each section maps field names to values; ``oscillators`` holds
    ``(strength, resonance, damping)`` triples.
    """

    trap: dict = field(default_factory=dict)
    scenario: dict = field(default_factory=dict)
    scan: dict = field(default_factory=dict)
    material: dict = field(default_factory=dict)
    settings: dict = field(default_factory=dict)
    oscillators: list = field(default_factory=list)

    def trap_config(self):
        return TrapConfig(**self.trap)

    def quadrature_settings(self):
        return QuadratureSettings(**self.settings)


def _parse_number(text, where):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{where}: cannot parse number {text!r}") from None


def parse_config(text, source="<config>"):
    """Parse the key-value config format.

    One ``key = value [unit]`` per line; ``#`` starts a comment. Dimensional
    keys require a unit tag of the right kind, e.g.::

        d = 7 um
        T_S = 605 K
        omega0 = 229 Hz
        eps0 = 3.81
        sigma0 = 1e2 /s
        oscillator = 0.5 2e14 rad/s 1e12 rad/s
    """
    cfg = ConfigFile()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value [unit]', got {raw!r}")
        key, rhs = (s.strip() for s in line.split("=", 1))
        tokens = rhs.split()
        if not tokens:
            raise ConfigError(f"{where}: missing value for {key!r}")

        if key == "oscillator":
            cfg.oscillators.append(_parse_oscillator(tokens, where))
            continue
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        section, name, dim = _CONFIG_KEYS[key]
        value = _parse_number(tokens[0], where)
        unit = " ".join(tokens[1:])
        if dim is None:
            if unit:
                raise ConfigError(f"{where}: {key!r} is dimensionless, got unit {unit!r}")
        else:
            if not unit:
                raise ConfigError(f"{where}: {key!r} needs an explicit unit tag")
            if unit_dimension(unit) != dim:
                raise ConfigError(f"{where}: unit {unit!r} is not a {dim.replace('_', ' ')}")
            value = to_internal_units(value, unit)
        if key in _INT_KEYS:
            if value != int(value):
                raise ConfigError(f"{where}: {key!r} must be an integer")
            value = int(value)
        getattr(cfg, section)[name] = value
    return cfg


def _parse_oscillator(tokens, where):
    # strength resonance unit damping unit
    if len(tokens) != 5:
        raise ConfigError(f"{where}: oscillator needs 'strength resonance unit damping unit'")
    strength = _parse_number(tokens[0], where)
    out = [strength]
    for num, unit in ((tokens[1], tokens[2]), (tokens[3], tokens[4])):
        if unit_dimension(unit) != "angular_frequency":
            raise ConfigError(f"{where}: oscillator frequencies need rad/s or Hz, got {unit!r}")
        out.append(to_internal_units(_parse_number(num, where), unit))
    return tuple(out)


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))

