"""Fast self-checks of the numerical invariants, run by ``atomwall validate``."""
from __future__ import annotations

import math
import time

import numpy as np
from scipy.integrate import quad

from .core import CONSTANTS, DEFAULT_SETTINGS, ThermalScenario, TrapConfig
from .equilibrium import casimir_polder_terms, phi_e_terms, static_term_closed_form
from .materials import PermittivityModel, eps_imag, matsubara_frequency, r0_static
from .nonequilibrium import f_n_force, phi_n
from .numerics import g_kernel, g_kernel_scaled, integrate_semi_infinite, scaled_i1
from .shift import gamma_x

UM = 1e-4


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_static_term():
    m = PermittivityModel()
    worst = 0.0
    for x in (6.5 * UM, 8 * UM, 11 * UM):
        for T in (310.0, 605.0):
            worst = max(worst, _rel(casimir_polder_terms(m, x, T).static,
                                    static_term_closed_form(m, x, T)))
    return worst < 1e-9, f"max rel. error {worst:.2e} (< 1e-9)"


def check_r0_switch():
    m = PermittivityModel()
    ok = r0_static(m) == (m.eps0 - 1) / (m.eps0 + 1)
    ok &= all(r0_static(m.with_conductivity(s)) == 1.0 for s in (1e-9, 1e-3, 1.0, 1e2, 1e3))
    return ok, "r0 = (eps0-1)/(eps0+1) without, exactly 1 with conductivity"


def check_eps_additions():
    m, mc = PermittivityModel(), PermittivityModel(sigma0=1e2)
    xi = np.array([matsubara_frequency(310.0, l) for l in range(1, 200)])
    worst = float(np.max(np.abs(eps_imag(mc, xi) - eps_imag(m, xi)) / eps_imag(m, xi)))
    return worst < 1e-10, f"max relative conductivity addition {worst:.2e} (< 1e-10)"


def check_gamma_integrals():
    worst = 0.0
    x = 7 * UM
    for n in (1, 2, 3, 4):
        r = integrate_semi_infinite(lambda k: k**n * np.exp(-2 * k * x), 1 / (2 * x))
        worst = max(worst, _rel(r.value, math.factorial(n) / (2 * x) ** (n + 1)))
    return worst < DEFAULT_SETTINGS.rel_tol, f"max rel. error {worst:.2e}"


def check_time_average():
    worst = 0.0
    for z in np.geomspace(0.01, 20, 12):
        # periodic trapezoid rule: exponentially convergent here
        th = np.linspace(0.0, 2 * math.pi, 256, endpoint=False)
        v = float(np.mean(np.cos(th) * np.exp(-z * np.cos(th))))
        worst = max(worst, _rel(v, -scaled_i1(z) * math.exp(z)))
    return worst < 1e-8, f"max rel. error {worst:.2e} (< 1e-8)"


def check_space_average():
    R = TrapConfig().R_x
    worst = 0.0
    for kR in np.geomspace(0.01, 15, 12):
        k = kR / R
        v = quad(lambda x: 15 / (16 * R) * (1 - x * x / R**2) ** 2 * math.exp(-2 * k * x),
                 -R, R, epsabs=0, epsrel=1e-12, limit=200)[0]
        worst = max(worst, _rel(v, g_kernel(2 * kR)))
    return worst < 1e-8, f"max rel. error {worst:.2e} (< 1e-8)"


def check_g_continuity():
    from .numerics import G_SERIES_SWITCH, _g_scaled_closed, _g_series

    z = np.array([G_SERIES_SWITCH])
    a = float(np.exp(-z[0]) * _g_series(z)[0])
    b = float(_g_scaled_closed(z)[0])
    return _rel(a, b) < 1e-12, f"jump {_rel(a, b):.2e} at z = {G_SERIES_SWITCH}"


def check_conductivity_only_static():
    m, mc = PermittivityModel(), PermittivityModel(sigma0=1e2)
    a = phi_e_terms(m, 11 * UM, 310.0)
    b = phi_e_terms(mc, 11 * UM, 310.0)
    ok = _rel(b.matsubara, a.matsubara) < 1e-9 and _rel(b.static / a.static, 1 / r0_static(m)) < 1e-9
    return ok, f"l>=1 rel. diff {_rel(b.matsubara, a.matsubara):.2e}"


def check_sigma_independence():
    m = PermittivityModel()
    ref = phi_n(m, 7 * UM, 605.0)
    worst = max(_rel(phi_n(m.with_conductivity(s), 7 * UM, 605.0), ref) for s in (1e-9, 1e2, 1e3))
    return worst < 5e-7, f"max rel. spread {worst:.2e} at d = 7 um, T = 605 K"


def check_monotone_temperature():
    m = PermittivityModel()
    v = [abs(f_n_force(m, 7 * UM, T)) for T in (310.0, 479.0, 605.0)]
    return v[0] < v[1] < v[2], "|F_n| increases with T at 7 um"


def check_gamma_ordering():
    m = PermittivityModel()
    g = [gamma_x(m, ThermalScenario(8 * UM, T, 310.0)).gamma_x for T in (310.0, 479.0, 605.0)]
    return g[0] < g[1] < g[2], "gamma_x(310) < gamma_x(479) < gamma_x(605) at 8 um"


def check_constants():
    c = CONSTANTS
    xi1 = matsubara_frequency(310.0, 1)
    return abs(xi1 - 2.55e14) / 2.55e14 < 0.01, f"xi_1(310 K) = {xi1:.4e} rad/s (c = {c.c:.6e} cm/s)"


CHECKS = [
    ("closed-form l=0 term", check_static_term),
    ("r0 switch", check_r0_switch),
    ("negligible conductivity at xi_l>0", check_eps_additions),
    ("Gamma-function integrals", check_gamma_integrals),
    ("I1 phase-average identity", check_time_average),
    ("g density-average identity", check_space_average),
    ("g series/closed-form continuity", check_g_continuity),
    ("conductivity acts only at l=0", check_conductivity_only_static),
    ("sigma0-independence of Phi_n", check_sigma_independence),
    ("F_n monotone in T", check_monotone_temperature),
    ("gamma_x monotone in T_S", check_gamma_ordering),
    ("Matsubara frequency scale", check_constants),
]


def run_checks(stream=None):
    """Run every check, print one line each; return True if all pass."""
    import sys

    stream = sys.stdout if stream is None else stream
    all_ok = True
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= bool(ok)
        stream.write(f"{'PASS' if ok else 'FAIL'}  {name}: {detail} "
                     f"[{time.perf_counter() - t0:.2f} s]\n")
    return all_ok
