"""Command-line front end: ``magneto-casimir {epsilon,force,point,validate}``.

Settings come from built-in defaults, then an optional flat JSON config file
(``--config``), then command-line flags, later sources winning. Config keys
are the long flag names with dashes turned into underscores, e.g.
``{"eps_l": 15.4, "omega_c": [0, 0.2], "l_points": 50}``.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 some force
points failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional

import numpy as np

from .errors import DomainError
from .lifshitz import (
    SweepSpec,
    ThermalState,
    force_sweep,
    material_reflectances,
    pressure,
)
from .material import Material, imaginary_axis_components
from .reflection import SlabGeometry
from .validation import FAULTS, run_checks

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3

EPSILON_COLUMNS = ("zeta", "eps_xx", "eps_yy", "eps_yz")
FORCE_COLUMNS = ("omega_c", "L", "ratio", "pressure", "terms", "err_estimate")

DEFAULTS = {
    "eps_l": 15.4,
    "omega_c": None,  # per command: [0.2] for epsilon, [0, 0.2, 0.5, 1.0] for force, [0] for point
    "gamma": 0.0,
    "zeta_min": 0.02,
    "zeta_max": 3.0,
    "zeta_points": 200,
    "l_min": 0.1,
    "l_max": 2.0,
    "l_points": 50,
    "separation": None,
    "theta": None,
    "zero_t": False,
    "thickness": None,
    "output": None,
    "format": "csv",
    "tolerance": None,
    "inject_fault": None,
}

_COMMAND_OMEGA_C = {
    "epsilon": [0.2],
    "force": [0.0, 0.2, 0.5, 1.0],
    "point": [0.0],
    "validate": [0.0],
}


class UsageError(Exception):
    pass


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magneto-casimir",
        description="Casimir force between magnetoplasma slabs in the Voigt geometry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="flat JSON file of settings")
    common.add_argument("--eps-l", type=float, help="background permittivity (default 15.4)")
    common.add_argument("--omega-c", type=_float_list, help="comma list of Omega_c = omega_c / omega_p")
    common.add_argument("--gamma", type=float, help="damping gamma / omega_p (default 0)")
    common.add_argument("--zeta-min", type=float)
    common.add_argument("--zeta-max", type=float)
    common.add_argument("--zeta-points", type=int)
    common.add_argument("--l-min", type=float, help="smallest separation in c / omega_p")
    common.add_argument("--l-max", type=float)
    common.add_argument("--l-points", type=int)
    common.add_argument(
        "--separation", type=_float_list,
        help="explicit comma list of separations; replaces the --l-* range",
    )
    thermal = common.add_mutually_exclusive_group()
    thermal.add_argument("--theta", type=float, help="2 pi k_B T / (hbar omega_p)")
    thermal.add_argument("--zero-t", action="store_true", help="zero temperature (default)")
    common.add_argument("--thickness", type=float, help="slab thickness; half-space if omitted")
    common.add_argument("--output", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))

    sub.add_parser("epsilon", parents=[common], help="imaginary-axis Voigt permittivity")
    sub.add_parser("force", parents=[common], help="F/F0 over separation and field")
    sub.add_parser("point", parents=[common], help="one force point with diagnostics")
    val = sub.add_parser("validate", parents=[common], help="run the oracle checks")
    val.add_argument(
        "--tolerance", type=float, default=argparse.SUPPRESS,
        help="use this tolerance for every check",
    )
    val.add_argument("--inject-fault", choices=FAULTS, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and flags into the effective settings."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a flat JSON object")
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in DEFAULTS:
            cfg[key] = value
    cfg["command"] = args.command

    if cfg["omega_c"] is None:
        cfg["omega_c"] = list(_COMMAND_OMEGA_C[args.command])
    try:
        cfg["omega_c"] = _float_list(cfg["omega_c"])
        if cfg["separation"] is not None:
            cfg["separation"] = _float_list(cfg["separation"])
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc))
    if cfg["theta"] is not None and cfg["zero_t"]:
        raise UsageError("--theta and --zero-t are mutually exclusive")
    if cfg["theta"] is None or cfg["theta"] == 0:
        cfg["theta"] = 0.0
        cfg["zero_t"] = True
    if cfg["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {cfg['format']!r}")
    _check(cfg)
    return cfg


def _check(cfg):
    if not cfg["omega_c"]:
        raise UsageError("--omega-c needs at least one value")
    if any(not (w >= 0 and math.isfinite(w)) for w in cfg["omega_c"]):
        raise UsageError("--omega-c values must be finite and >= 0")
    command = cfg["command"]
    if command == "epsilon":
        _check_range(cfg, "zeta", positive=True)
        if len(cfg["omega_c"]) != 1:
            raise UsageError("epsilon takes exactly one --omega-c value")
    if command in ("force", "point"):
        if cfg["separation"] is not None:
            if not cfg["separation"] or any(not (s > 0 and math.isfinite(s)) for s in cfg["separation"]):
                raise UsageError("--separation values must be finite and > 0")
        elif command == "force":
            _check_range(cfg, "l", positive=True)
    if command == "point":
        seps = cfg["separation"] or [1.0]
        if len(seps) != 1 or len(cfg["omega_c"]) != 1:
            raise UsageError("point takes exactly one separation and one --omega-c value")
    for key in ("eps_l", "gamma", "theta"):
        if not isinstance(cfg[key], (int, float)) or not math.isfinite(cfg[key]):
            raise UsageError(f"{key} must be a finite number")
    if cfg["eps_l"] < 1:
        raise UsageError("--eps-l must be >= 1")
    if cfg["gamma"] < 0 or cfg["theta"] < 0:
        raise UsageError("--gamma and --theta must be >= 0")
    if cfg["thickness"] is not None and not cfg["thickness"] > 0:
        raise UsageError("--thickness must be > 0")


def _check_range(cfg, name, positive):
    lo, hi, n = cfg[f"{name}_min"], cfg[f"{name}_max"], cfg[f"{name}_points"]
    flag = f"--{name}"
    if not (isinstance(n, int) and n >= 2):
        raise UsageError(f"{flag}-points must be an integer >= 2, got {n!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise UsageError(f"{flag}-min must be < {flag}-max")
    if positive and not lo > 0:
        raise UsageError(f"{flag}-min must be > 0")


def zeta_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """Log-spaced grid; when 1 lies inside, the nearest node is moved onto it."""
    grid = np.geomspace(lo, hi, n)
    if lo <= 1.0 <= hi:
        i = int(np.argmin(np.abs(np.log(grid))))
        grid[i] = 1.0
    return grid


def separations(cfg) -> list:
    if cfg["separation"] is not None:
        return list(cfg["separation"])
    return np.linspace(cfg["l_min"], cfg["l_max"], cfg["l_points"]).tolist()


def _material(cfg, omega_c=0.0) -> Material:
    return Material(float(cfg["eps_l"]), float(omega_c), float(cfg["gamma"]))


def _geometry(cfg) -> SlabGeometry:
    return SlabGeometry() if cfg["thickness"] is None else SlabGeometry(float(cfg["thickness"]))


def _thermal(cfg) -> ThermalState:
    return ThermalState() if cfg["zero_t"] else ThermalState(float(cfg["theta"]))


def fmt(value) -> str:
    """Shortest round-trip decimal for floats, plain digits for ints."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def run_epsilon(cfg) -> list:
    material = _material(cfg, cfg["omega_c"][0])
    zetas = zeta_grid(cfg["zeta_min"], cfg["zeta_max"], cfg["zeta_points"])
    eps = imaginary_axis_components(zetas, material)
    xx, yy, yz = (np.real(np.broadcast_to(c, zetas.shape)) for c in (eps.eps_xx, eps.eps_yy, eps.eps_yz))
    return [
        {"zeta": float(z), "eps_xx": float(a), "eps_yy": float(b), "eps_yz": float(c)}
        for z, a, b, c in zip(zetas, xx, yy, yz)
    ]


def run_force(cfg) -> tuple:
    spec = SweepSpec(
        separations=separations(cfg),
        omega_c_values=cfg["omega_c"],
        material=_material(cfg),
        thermal=_thermal(cfg),
        geometry=_geometry(cfg),
    )
    rows, failed = [], False
    for row in force_sweep(spec):
        out = {"omega_c": row.omega_c_reduced, "L": row.separation}
        if row.result is None:
            failed = True
            out.update(ratio=None, pressure=None, terms=None, err_estimate=None, error=row.error)
        else:
            r = row.result
            out.update(
                ratio=r.ratio, pressure=r.pressure,
                terms=r.matsubara_terms_used, err_estimate=r.quadrature_error_estimate,
            )
        rows.append(out)
    return rows, failed


def run_point(cfg) -> dict:
    sep = (cfg["separation"] or [1.0])[0]
    material = _material(cfg, cfg["omega_c"][0])
    geometry = _geometry(cfg)
    result = pressure(sep, material, _thermal(cfg), geometry)
    refl = material_reflectances(material, geometry)
    probes = []
    kappa = 1.0 / sep
    for zeta, k in ((0.0, kappa), (0.5 * kappa, kappa), (kappa, 2.0 * kappa)):
        r_s, r_p = refl(np.array([zeta]), np.array([k]))
        probes.append({"zeta": zeta, "kappa": k, "R_s": float(r_s[0]), "R_p": float(r_p[0])})
    return {
        "omega_c": material.omega_c_reduced,
        "L": sep,
        "eps_l": material.eps_l,
        "gamma": material.gamma_reduced,
        "theta": cfg["theta"],
        "thickness": geometry.thickness if not geometry.is_half_space else None,
        "ratio": result.ratio,
        "pressure": result.pressure,
        "ideal_pressure": result.ideal_pressure,
        "terms": result.matsubara_terms_used,
        "err_estimate": result.quadrature_error_estimate,
        "reflectance_probes": probes,
    }


def render_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if row.get(c) is None else (row[c] if c == "error" else fmt(row[c])) for c in columns])
    return buf.getvalue()


def render_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(text: str, cfg) -> None:
    if cfg["output"]:
        with open(cfg["output"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        sidecar = {k: v for k, v in cfg.items() if k != "output"}
        with open(cfg["output"] + ".config.json", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_json(sidecar))
    else:
        sys.stdout.write(text)


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = resolve_config(args)
    except (UsageError, DomainError) as exc:
        print(f"magneto-casimir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    command = cfg["command"]
    if command == "epsilon":
        rows = run_epsilon(cfg)
        text = render_csv(rows, EPSILON_COLUMNS) if cfg["format"] == "csv" else render_json(rows)
        _emit(text, cfg)
        return EXIT_OK

    if command == "force":
        rows, failed = run_force(cfg)
        columns = FORCE_COLUMNS + (("error",) if failed else ())
        text = render_csv(rows, columns) if cfg["format"] == "csv" else render_json(rows)
        _emit(text, cfg)
        return EXIT_PARTIAL if failed else EXIT_OK

    if command == "point":
        try:
            doc = run_point(cfg)
        except (DomainError, ArithmeticError, RuntimeError) as exc:
            print(f"magneto-casimir: point failed: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_PARTIAL
        _emit(render_json(doc), cfg)
        return EXIT_OK

    results = run_checks(tolerance=cfg["tolerance"], fault=cfg["inject_fault"])
    if cfg["format"] == "json":
        text = render_json([
            {"check": r.name, "passed": r.passed,
             "max_deviation": r.max_deviation if math.isfinite(r.max_deviation) else None,
             "tolerance": r.tolerance, "detail": r.detail}
            for r in results
        ])
    else:
        lines = []
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            line = f"{status} {r.name}: max deviation {r.max_deviation:.3e} (tolerance {r.tolerance:.1e})"
            if r.detail:
                line += f" [{r.detail}]"
            lines.append(line)
        failed = [r.name for r in results if not r.passed]
        lines.append("all checks passed" if not failed else f"failed: {', '.join(failed)}")
        text = "\n".join(lines) + "\n"
    _emit(text, cfg)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
