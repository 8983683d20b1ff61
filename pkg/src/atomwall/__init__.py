"""Thermal Casimir-Polder force on an atom near a dielectric wall.

Equilibrium (Lifshitz) and nonequilibrium atom-wall forces, their average
over an oscillating Thomas-Fermi condensate, and the resulting fractional
shift of the condensate's dipole-oscillation frequency. All quantities are
in Gaussian-CGS units.
"""
from .core import (CONSTANTS, DEFAULT_SETTINGS, AtomWallError, ConfigError, NumericalError,
                   PhysicalConstants, QuadratureSettings, ThermalScenario, TrapConfig,
                   from_internal_units, load_config, parse_config, to_internal_units)
from .equilibrium import casimir_polder_force, casimir_polder_terms, phi_e, phi_e_terms
from .materials import (DivergentStaticLimit, Oscillator, PermittivityModel, eps_imag, eps_real,
                        matsubara_frequency, r0_static)
from .nonequilibrium import ForceDecomposition, f_integrand, f_n_force, phi_n, total_force
from .shift import FrequencyShiftResult, density_profile, gamma_x, gamma_x_direct

__version__ = "0.1.0"
