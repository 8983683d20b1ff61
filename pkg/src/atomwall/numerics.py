"""Special functions, adaptive quadrature and Matsubara summation.

The kernels ``I1`` and ``g`` that appear in the condensate average grow like
``exp(z)``; only their scaled forms ``exp(-z) I1(z)`` and ``exp(-z) g(z)`` are
used inside integrands so that the products stay finite.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import DEFAULT_SETTINGS, NumericalError, QuadratureSettings

__all__ = [
    "IntegralResult",
    "QuadratureError",
    "SummationError",
    "scaled_i1",
    "g_kernel",
    "g_kernel_scaled",
    "integrate_finite",
    "integrate_semi_infinite",
    "matsubara_sum",
]


class QuadratureError(NumericalError):
    """Adaptive quadrature ran out of subdivisions.

    ``best`` and ``error`` carry the estimate reached so far.
    """

    def __init__(self, message, best, error, evaluations):
        super().__init__(message)
        self.best = best
        self.error = error
        self.evaluations = evaluations


class SummationError(NumericalError):
    pass


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def _as_checked(z, allow_zero=True):
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("argument must be finite")
    if np.any(arr < 0) or (not allow_zero and np.any(arr == 0)):
        raise ValueError("argument must be non-negative" if allow_zero else "argument must be > 0")
    return arr


def _out(arr, value):
    return float(value) if arr.ndim == 0 else value


def scaled_i1(z):
    """``exp(-z) * I1(z)`` for ``z >= 0``; finite for every finite ``z``."""
    arr = _as_checked(z)
    return _out(arr, special.i1e(arr))


# Below this argument the closed form of g loses digits to cancellation.
G_SERIES_SWITCH = 1.0
_G_SERIES_TERMS = 16
_G_COEFFS = np.array([60.0 * (j + 1) * (j + 2) / math.factorial(2 * j + 5)
                      for j in range(_G_SERIES_TERMS)])


def _g_series(z):
    # g(z) = sum_j 60 (j+1)(j+2) z^(2j) / (2j+5)!
    z2 = z * z
    acc = np.zeros_like(z)
    for coeff in _G_COEFFS[::-1]:
        acc = acc * z2 + coeff
    return acc


def _g_scaled_closed(z):
    # z^2 factored out of the bracket so huge z underflows to 0 instead of inf/inf
    e2 = np.exp(-2.0 * z)
    u = 1.0 / z
    return 7.5 * u**3 * ((1.0 - 3.0 * u + 3.0 * u * u) - (1.0 + 3.0 * u + 3.0 * u * u) * e2)


def g_kernel_scaled(z):
    """``exp(-z) * g(z)`` with ``g(z) = 15 [(3+z^2) sinh z - 3 z cosh z] / z^5``.

    g is the average of ``exp(-z u)`` over the normalized Thomas-Fermi profile
    ``(15/16)(1-u^2)^2`` on ``[-1, 1]``, so ``g(0) = 1``.
    """
    arr = _as_checked(z)
    small = arr < G_SERIES_SWITCH
    out = np.empty_like(arr)
    zs = arr[small]
    out[small] = np.exp(-zs) * _g_series(zs)
    zl = arr[~small]
    out[~small] = _g_scaled_closed(zl)
    return _out(arr, out)


def g_kernel(z):
    """Unscaled averaging kernel g(z); overflows to inf beyond z ~ 700."""
    arr = _as_checked(z)
    small = arr < G_SERIES_SWITCH
    out = np.empty_like(arr)
    out[small] = _g_series(arr[small])
    zl = arr[~small]
    with np.errstate(over="ignore"):
        out[~small] = _g_scaled_closed(zl) * np.exp(zl)
    return _out(arr, out)


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod (10/21) quadrature, vector-valued integrands
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# Full 21-point rule on [-1, 1] and the embedded 10-point Gauss weights.
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG
GAUSS_WEIGHTS[11:20:2] = _WG[::-1]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class IntegralResult:
    """Value, error estimate and integrand evaluation count of a quadrature."""

    value: float | np.ndarray
    error_estimate: float | np.ndarray
    evaluations: int


def _panel_rules(fx, half):
    # fx: (21, ...) samples on one panel.
    w = KRONROD_WEIGHTS.reshape((21,) + (1,) * (fx.ndim - 1))
    wg = GAUSS_WEIGHTS.reshape(w.shape)
    kron = half * np.sum(w * fx, axis=0)
    gauss = half * np.sum(wg * fx, axis=0)
    mean = kron / (2.0 * half)
    resasc = half * np.sum(w * np.abs(fx - mean), axis=0)
    resabs = half * np.sum(w * np.abs(fx), axis=0)
    err = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    err = np.maximum(err, 50.0 * _EPS * resabs)
    return kron, err


def _eval_panels(f, bounds):
    # Evaluate all panels in a single integrand call.
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = (centre[:, None] + half[:, None] * NODES[None, :]).ravel()
    fx = np.asarray(f(x), dtype=float)
    if fx.shape[0] != x.size:
        raise ValueError("integrand must return one row per abscissa")
    if not np.all(np.isfinite(fx)):
        raise NumericalError("integrand returned a non-finite value")
    fx = fx.reshape((len(bounds), 21) + fx.shape[1:])
    out = []
    for i in range(len(bounds)):
        out.append(_panel_rules(fx[i], half[i]))
    return out, x.size


def _norm(v):
    return float(np.max(np.abs(v))) if np.ndim(v) else abs(float(v))


def integrate_finite(f, a, b, settings: QuadratureSettings = DEFAULT_SETTINGS, points=(),
                     rel_tol=None):
    """Adaptive 21-point Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    ``f`` receives a 1-D array of abscissae and returns either an array of the
    same length or an array of shape ``(len(x), m)`` for ``m`` integrands at
    once; for the vector case the tolerance applies to the largest component.
    ``points`` adds initial breakpoints. Panels are bisected in order of
    decreasing error until ``error <= max(rel_tol*|value|, abs_tol)``.
    """
    rel = settings.rel_tol if rel_tol is None else rel_tol
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if a == b:
        return IntegralResult(0.0, 0.0, 0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = sorted({a, b, *[p for p in points if a < p < b]})
    bounds = list(zip(edges[:-1], edges[1:]))

    results, nev = _eval_panels(f, bounds)
    heap = []
    total = 0.0
    total_err = 0.0
    for key, ((lo, hi), (val, err)) in enumerate(zip(bounds, results)):
        heapq.heappush(heap, (-_norm(err), key, lo, hi, val, err))
        total = total + val
        total_err = total_err + err
    counter = len(bounds)

    while True:
        target = max(rel * _norm(total), settings.abs_tol)
        if _norm(total_err) <= target:
            break
        if len(heap) >= settings.max_subdivisions:
            raise QuadratureError(
                f"no convergence within {settings.max_subdivisions} subdivisions "
                f"(error {_norm(total_err):.3e}, target {target:.3e})",
                sign * total, total_err, nev)
        _, _, lo, hi, val, err = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            raise QuadratureError("interval became too small to bisect",
                                  sign * total, total_err, nev)
        (r1, r2), n = _eval_panels(f, [(lo, mid), (mid, hi)])
        nev += n
        total = total - val + r1[0] + r2[0]
        total_err = total_err - err + r1[1] + r2[1]
        for (plo, phi), (v, e) in (((lo, mid), r1), ((mid, hi), r2)):
            counter += 1
            heapq.heappush(heap, (-_norm(e), counter, plo, phi, v, e))

    # Re-sum to shed the drift of the running totals.
    vals = [item[4] for item in heap]
    errs = [item[5] for item in heap]
    value = np.sum(vals, axis=0)
    error = np.sum(errs, axis=0)
    if np.ndim(value) == 0:
        value, error = float(value), float(error)
    return IntegralResult(sign * value, error, nev)


def integrate_semi_infinite(f, scale, settings: QuadratureSettings = DEFAULT_SETTINGS,
                            rel_tol=None):
    """Integral of ``f`` over ``(0, inf)``.

    ``scale`` is the characteristic decay length of the integrand. The map
    ``x = scale * u / (1 - u)`` sends ``(0, inf)`` to ``(0, 1)``; the initial
    breakpoints place roughly equal work below and above ``x ~ scale``.
    """
    if not (math.isfinite(scale) and scale > 0):
        raise ValueError("scale must be finite and > 0")

    def mapped(u):
        one_minus = 1.0 - u
        x = scale * u / one_minus
        jac = scale / (one_minus * one_minus)
        fx = np.asarray(f(x), dtype=float)
        return fx * jac.reshape((-1,) + (1,) * (fx.ndim - 1))

    return integrate_finite(mapped, 0.0, 1.0, settings,
                            points=(0.125, 0.25, 0.5, 0.75, 0.9), rel_tol=rel_tol)


# ---------------------------------------------------------------------------
# Matsubara summation
# ---------------------------------------------------------------------------

def matsubara_sum(term, T, settings: QuadratureSettings = DEFAULT_SETTINGS, start=1,
                  constants=None):
    """Sum ``term(l, xi_l)`` over ``l = start, start+1, ...``.

    ``xi_l = 2 pi k_B T l / hbar`` is passed alongside ``l``. Summation stops
    once the geometric tail estimated from the last two terms,
    ``|t_l| r / (1 - r)`` with ``r = |t_l / t_{l-1}|``, is below
    ``matsubara_tail_tol`` times the accumulated sum. Terms that have not
    started to decay by ``max_matsubara_terms`` raise :class:`SummationError`.
    """
    from .core import CONSTANTS

    const = CONSTANTS if constants is None else constants
    if not (math.isfinite(T) and T > 0):
        raise ValueError("temperature must be finite and > 0")
    step = 2.0 * math.pi * const.k_B * T / const.hbar
    tol = settings.matsubara_tail_tol
    l_max = start + settings.max_matsubara_terms - 1

    total = 0.0
    prev = None
    for l in range(start, l_max + 1):
        t = float(term(l, step * l))
        if not math.isfinite(t):
            raise SummationError(f"Matsubara term l={l} at T={T} K is not finite")
        total += t
        if prev is not None:
            if t == 0.0 and prev == 0.0:
                return total
            if prev != 0.0:
                r = abs(t / prev)
                if r < 1.0:
                    tail = abs(t) * r / (1.0 - r)
                    if tail <= tol * abs(total):
                        return total
        prev = t
    raise SummationError(
        f"Matsubara series at T={T} K not converged after l_max={l_max} terms")
