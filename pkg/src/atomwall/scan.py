"""Separation scans, delimited tables and comparison with measured points."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (DEFAULT_SETTINGS, AtomWallError, ConfigError, QuadratureSettings,
                   ThermalScenario, TrapConfig)
from .materials import PermittivityModel
from .shift import gamma_x

log = logging.getLogger(__name__)

CM_PER_UM = 1e-4
UM_PER_CM = 1e4
QUANTITIES = ("gamma", "phi_e", "phi_n_ts", "phi_n_te")


@dataclass(frozen=True)
class ScanSpec:
    d_min: float
    d_max: float
    steps: int
    T_S: float
    T_E: float
    variants: tuple = (PermittivityModel(),)
    trap: TrapConfig = TrapConfig()
    settings: QuadratureSettings = DEFAULT_SETTINGS
    t_domain: str = "window"

    def __post_init__(self):
        object.__setattr__(self, "variants", tuple(self.variants))
        if not self.variants:
            raise ConfigError("at least one permittivity model is required")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ConfigError("steps must be an integer >= 2")
        if not self.d_min < self.d_max:
            raise ConfigError("d_min must be smaller than d_max")
        if self.d_min <= self.trap.reach:
            raise ConfigError(f"d_min = {self.d_min * UM_PER_CM:.4g} um must exceed "
                              f"a + R_x = {self.trap.reach * UM_PER_CM:.4g} um")
        ThermalScenario(self.d_min, self.T_S, self.T_E)
        labels = [v.label() for v in self.variants]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate model variants: {labels}")

    def grid(self):
        return np.linspace(self.d_min, self.d_max, self.steps)


@dataclass
class ScanTable:
    """Scan results: one row per separation, one column per (quantity, variant)."""

    d_um: np.ndarray
    columns: dict
    header: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def gamma_columns(self):
        return [name for name in self.columns if name.startswith("gamma[")]


def _row(args):
    d, spec = args
    out = {}
    failures = []
    scenario = ThermalScenario(d, spec.T_S, spec.T_E)
    for model in spec.variants:
        label = model.label()
        try:
            res = gamma_x(model, scenario, spec.trap, spec.settings, spec.t_domain)
            vals = (res.gamma_x, res.decomposition.phi_e, res.decomposition.phi_n_ts,
                    res.decomposition.phi_n_te)
        except (AtomWallError, ArithmeticError) as exc:
            failures.append((d, label, str(exc)))
            vals = (math.nan,) * 4
        for q, v in zip(QUANTITIES, vals):
            out[f"{q}[{label}]"] = v
    return out, failures


def run_scan(spec: ScanSpec, workers=1):
    """Compute every grid row; rows that fail are logged and left as NaN."""
    grid = spec.grid()
    jobs = [(float(d), spec) for d in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, jobs))
    else:
        rows = [_row(j) for j in jobs]

    names = [f"{q}[{m.label()}]" for m in spec.variants for q in QUANTITIES]
    columns = {n: np.array([r[0][n] for r in rows]) for n in names}
    failures = [f for r in rows for f in r[1]]
    for d, label, msg in failures:
        log.warning("row d=%.6g um, model %s failed: %s", d * UM_PER_CM, label, msg)
    header = [
        "atomwall gamma_x scan",
        f"T_S = {spec.T_S!r} K, T_E = {spec.T_E!r} K, t_domain = {spec.t_domain}",
        (f"trap: omega0 = {spec.trap.omega0!r} rad/s, a = {spec.trap.a!r} cm, "
         f"R_x = {spec.trap.R_x!r} cm, m = {spec.trap.m!r} g, "
         f"alpha0 = {spec.trap.alpha0!r} cm^3"),
        "units: d in um, gamma dimensionless, phi_* in dyn",
    ]
    # rounded so 6.5e-4 cm prints as 6.5 um, not 6.500000000000001
    return ScanTable(np.round(grid * UM_PER_CM, 10), columns, header, failures)


def format_table(table: ScanTable):
    lines = [f"# {h}" for h in table.header]
    lines.append("# " + "\t".join(["d_um", *table.columns]))
    cols = list(table.columns.values())
    for i, d in enumerate(table.d_um):
        lines.append("\t".join(repr(float(v)) for v in [d, *(c[i] for c in cols)]))
    return "\n".join(lines) + "\n"


def write_table(table: ScanTable, path):
    Path(path).write_text(format_table(table), encoding="utf-8")


def parse_table(text):
    header, names, rows = [], None, []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("d_um"):
                names = body.split("\t")
            else:
                header.append(body)
            continue
        try:
            rows.append([float(tok) for tok in line.split("\t")])
        except ValueError:
            raise ConfigError(f"table row is not numeric: {line!r}") from None
    if names is None:
        raise ConfigError("table has no '# d_um ...' column header")
    data = np.array(rows, dtype=float).reshape(-1, len(names))
    columns = {n: data[:, i] for i, n in enumerate(names[1:], 1)}
    return ScanTable(data[:, 0], columns, header)


def read_table(path):
    return parse_table(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Measured data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DataPoint:
    """One measured point: separation and shift with their absolute errors (cm, 1)."""

    d: float
    gamma: float
    d_err: float = 0.0
    gamma_err: float = 0.0

    def __post_init__(self):
        if not (self.d > 0 and self.gamma >= 0 and self.d_err >= 0 and self.gamma_err >= 0):
            raise ConfigError(f"invalid data point {self}")


def parse_data(text, source="<data>"):
    """Four columns per line: ``d_um gamma d_err_um gamma_err`` (space or comma)."""
    points = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.replace(",", " ").split()
        if len(toks) != 4:
            raise ConfigError(f"{source}:{lineno}: expected 4 columns, got {len(toks)}")
        try:
            d, g, de, ge = (float(t) for t in toks)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: non-numeric entry in {raw!r}") from None
        points.append(DataPoint(d * CM_PER_UM, g, de * CM_PER_UM, ge))
    if not points:
        raise ConfigError(f"{source}: no data points")
    return points


def read_data(path):
    path = Path(path)
    return parse_data(path.read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class PointResidual:
    d_um: float
    gamma: float
    theory: float | None
    residual: float | None
    normalized: float | None
    excludes: bool | None
    in_range: bool


@dataclass(frozen=True)
class ComparisonReport:
    column: str
    points: list

    @property
    def counted(self):
        """Points that enter the exclusion summary."""
        return [p for p in self.points if p.in_range and p.normalized is not None]

    @property
    def exclusions(self):
        return sum(1 for p in self.counted if p.excludes)

    @property
    def out_of_range(self):
        return sum(1 for p in self.points if not p.in_range)

    def format(self):
        lines = [f"# comparison against {self.column}",
                 "# d_um\tgamma\ttheory\tresidual\tnormalized\texcludes"]
        for p in self.points:
            if not p.in_range:
                lines.append(f"{p.d_um!r}\t{p.gamma!r}\tout-of-range")
                continue
            norm = "undefined" if p.normalized is None else repr(p.normalized)
            excl = "-" if p.excludes is None else ("yes" if p.excludes else "no")
            lines.append(f"{p.d_um!r}\t{p.gamma!r}\t{p.theory!r}\t{p.residual!r}\t{norm}\t{excl}")
        lines.append(f"# {self.exclusions} of {len(self.counted)} points exclude the curve; "
                     f"{self.out_of_range} out of range")
        return "\n".join(lines)


def _curve_range(d_um, y, lo, hi):
    lo, hi = max(lo, d_um[0]), min(hi, d_um[-1])
    inside = y[(d_um > lo) & (d_um < hi)]
    ends = np.interp([lo, hi], d_um, y)
    vals = np.concatenate([inside, ends])
    return vals.min(), vals.max()


def compare_with_data(table: ScanTable, data, column=None):
    """Residuals of measured points against one gamma column of a scan table.

    The theory curve is interpolated linearly in ``d``. A point excludes the
    curve when its error box ``[d +- d_err] x [gamma +- gamma_err]`` does not
    touch the curve. Points with ``gamma_err == 0`` get no normalized
    residual and are not counted; points outside the table are flagged.
    """
    if column is None:
        column = table.gamma_columns()[0]
    if column not in table.columns:
        raise ConfigError(f"no column {column!r} in table; have {list(table.columns)}")
    if not data:
        raise ConfigError("no data points to compare")
    d_um = table.d_um
    y = table.columns[column]
    out = []
    for p in data:
        pd_um = p.d * UM_PER_CM
        if not d_um[0] * (1 - 1e-12) <= pd_um <= d_um[-1] * (1 + 1e-12):
            out.append(PointResidual(pd_um, p.gamma, None, None, None, None, False))
            continue
        # a point that sits on a grid node (up to unit-conversion rounding)
        # takes that node's value exactly
        node = int(np.argmin(np.abs(d_um - pd_um)))
        if abs(d_um[node] - pd_um) <= 1e-12 * abs(pd_um):
            theory = float(y[node])
        else:
            theory = float(np.interp(pd_um, d_um, y))
        residual = p.gamma - theory
        if p.gamma_err > 0:
            normalized = residual / p.gamma_err
            derr = p.d_err * UM_PER_CM
            lo, hi = _curve_range(d_um, y, pd_um - derr, pd_um + derr)
            excludes = bool(p.gamma + p.gamma_err < lo or p.gamma - p.gamma_err > hi)
        else:
            normalized, excludes = None, None
        out.append(PointResidual(pd_um, p.gamma, theory, residual, normalized, excludes, True))
    return ComparisonReport(column, out)
