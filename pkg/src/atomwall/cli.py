"""Command line: ``atomwall scan | compare | validate``.

Exit status: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .core import ConfigError, NumericalError, QuadratureSettings, TrapConfig, load_config
from .materials import FUSED_SILICA_EPS0, Oscillator, PermittivityModel
from .scan import CM_PER_UM, ScanSpec, compare_with_data, format_table, read_data, read_table, run_scan

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

log = logging.getLogger("atomwall")


def _build_parser():
    p = argparse.ArgumentParser(prog="atomwall", description=(
        "Thermal Casimir-Polder force on an atom near a dielectric wall and the "
        "resulting shift of a trapped condensate's dipole-oscillation frequency."))
    p.add_argument("--log-level", default="warning",
                   choices=["debug", "info", "warning", "error"])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scan", help="gamma_x versus separation, as a delimited table")
    s.add_argument("--config", metavar="FILE", help="key = value [unit] config file")
    s.add_argument("--d-min", type=float, metavar="UM", help="smallest separation (um), default 6.5")
    s.add_argument("--d-max", type=float, metavar="UM", help="largest separation (um), default 11")
    s.add_argument("--steps", type=int, help="grid points, default 50")
    s.add_argument("--ts", type=float, metavar="K", help="substrate temperature, default 310")
    s.add_argument("--te", type=float, metavar="K", help="environment temperature, default 310")
    s.add_argument("--eps0", type=float, help=f"static permittivity, default {FUSED_SILICA_EPS0}")
    s.add_argument("--sigma0", type=float, action="append", metavar="PER_S",
                   help="static conductivity in s^-1; adds a conducting variant next to "
                        "the bare one (repeatable). Absent: conductivity neglected")
    s.add_argument("--t-domain", choices=["window", "full"], default="window",
                   help="t-range of the nonequilibrium integral (default: window)")
    s.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    s.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    s.add_argument("--out", metavar="FILE", help="write the table here instead of stdout")

    c = sub.add_parser("compare", help="residuals of measured points against a scan table")
    c.add_argument("--table", required=True, metavar="FILE")
    c.add_argument("--data", required=True, metavar="FILE",
                   help="columns: d_um gamma d_err_um gamma_err")
    c.add_argument("--column", help="gamma column to compare (default: every gamma column)")

    sub.add_parser("validate", help="run the numerical invariant checks")
    return p


def _spec_from_args(args):
    cfg = load_config(args.config) if args.config else None
    scan = dict(cfg.scan) if cfg else {}
    scenario = dict(cfg.scenario) if cfg else {}
    material = dict(cfg.material) if cfg else {}

    def um(flag, key, default):
        return flag * CM_PER_UM if flag is not None else scan.get(key, default * CM_PER_UM)

    d_min = um(args.d_min, "d_min", 6.5)
    d_max = um(args.d_max, "d_max", 11.0)
    steps = args.steps if args.steps is not None else scan.get("steps", 50)
    T_S = args.ts if args.ts is not None else scenario.get("T_S", 310.0)
    T_E = args.te if args.te is not None else scenario.get("T_E", 310.0)
    eps0 = args.eps0 if args.eps0 is not None else material.get("eps0", FUSED_SILICA_EPS0)
    oscillators = tuple(Oscillator(*o) for o in cfg.oscillators) if cfg else ()

    sigmas = args.sigma0 if args.sigma0 is not None else (
        [material["sigma0"]] if "sigma0" in material else [])
    bare = PermittivityModel(eps0, oscillators)
    variants = [bare] + [bare.with_conductivity(s) for s in sigmas if s > 0]

    trap = cfg.trap_config() if cfg else TrapConfig()
    settings = cfg.quadrature_settings() if cfg else QuadratureSettings()
    if args.rel_tol is not None:
        settings = replace(settings, rel_tol=args.rel_tol)
    return ScanSpec(d_min, d_max, steps, T_S, T_E, tuple(variants), trap, settings, args.t_domain)


def _cmd_scan(args):
    spec = _spec_from_args(args)
    table = run_scan(spec, workers=max(1, args.workers))
    text = format_table(table)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_NUMERICAL if table.failures else EXIT_OK


def _cmd_compare(args):
    table = read_table(args.table)
    data = read_data(args.data)
    columns = [args.column] if args.column else table.gamma_columns()
    for col in columns:
        print(compare_with_data(table, data, col).format())
    return EXIT_OK


def _cmd_validate(args):
    from .validation import run_checks

    return EXIT_OK if run_checks() else EXIT_NUMERICAL


def main(argv=None):
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    handler = {"scan": _cmd_scan, "compare": _cmd_compare, "validate": _cmd_validate}[args.command]
    try:
        return handler(args)
    except (ConfigError, ValueError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
