"""Command-line front end: ``dipolechain {validate,steady,scan,peaks,sweep}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import io
from .analysis import SUPERBUNCHED, predict_g1_extrema, verify_extrema
from .chain import ChainConfig, ChainConfigError, validate_config
from .correlations import pair_coherence
from .couplings import build_couplings
from .pipeline import SWEEPABLE, SweepSpec, run_scan, run_sweep, solve

_FLAG_FIELDS = {
    "atoms": "n_atoms",
    "spacing": "spacing_over_lambda",
    "drive_index": "driven_atom",
    "rabi": "rabi_over_gamma",
    "damping_weight": "damping_weight",
}


def _add_config_flags(p):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--atoms", type=int)
    p.add_argument("--spacing", type=float, help="spacing in wavelengths")
    p.add_argument("--drive-index", type=int, help="1-based driven atom")
    p.add_argument("--rabi", type=float, help="Rabi frequency in units of gamma")
    p.add_argument("--damping-weight", type=float)


def config_from_args(args) -> ChainConfig:
    data = {}
    if args.config:
        data.update(vars(io.load_config(args.config)))
    for flag, key in _FLAG_FIELDS.items():
        val = getattr(args, flag, None)
        if val is not None:
            data[key] = val
    if "n_atoms" not in data or "spacing_over_lambda" not in data:
        raise ChainConfigError("need --atoms and --spacing (or a --config file)")
    return validate_config(io.config_from_dict(data))


def _matrix(name, m):
    print(f"{name}:")
    for row in m:
        print("  " + " ".join(f"{v: .6f}" for v in row))


def cmd_validate(args):
    cfg = config_from_args(args)
    print(f"valid: {cfg}")
    cpl = build_couplings(cfg)
    _matrix("gamma_ij / gamma", cpl.gamma)
    _matrix("Omega_ij / gamma", cpl.omega)
    return 0


def cmd_steady(args):
    cfg = config_from_args(args)
    sol = solve(cfg)
    n = cfg.n_atoms
    print(f"residual {sol.diagnostics.residual:.3e}  kernel_dim {sol.diagnostics.kernel_dim}")
    print(f"{'i':>3} {'j':>3} {'Re<Si+Sj->':>15} {'Im<Si+Sj->':>15}")
    for i in range(n):
        for j in range(i, n):
            c = sol.corr.first_order[i, j]
            print(f"{i + 1:>3} {j + 1:>3} {c.real:>15.6e} {c.imag:>15.6e}")
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            pc = pair_coherence(sol.corr, i, j)
            print(f"v{i}{j} = {pc.v:.6f}  psi{i}{j} = {pc.psi / np.pi:+.4f} pi")
    if args.out:
        io.write_density_matrix(sol.rho, args.out)
    return 0


def cmd_scan(args):
    cfg = config_from_args(args)
    doc = run_scan(cfg, args.points)
    if args.out:
        io.write_scan_csv(doc, args.out)
    else:
        io.write_scan_csv(doc, sys.stdout)
    if args.doc:
        io.write_document(doc, args.doc)
    return 0


def _check_expectation(doc, path) -> list:
    with open(path) as fh:
        spec = json.load(fh)
    tol = float(spec.get("tolerance_deg", 2.0))
    superb = [p for p in doc.peaks if p[3] == SUPERBUNCHED]
    problems = []
    if "n_superbunched" in spec and len(superb) != spec["n_superbunched"]:
        problems.append(f"expected {spec['n_superbunched']} superbunched peaks, found {len(superb)}")
    for angle in spec.get("angles_deg", []):
        if not any(abs((p[0] - angle + 180) % 360 - 180) <= tol for p in superb):
            problems.append(f"no superbunched peak within {tol} deg of {angle}")
    return problems


def cmd_peaks(args):
    cfg = config_from_args(args)
    doc = run_scan(cfg, args.points)
    print(f"{'theta_deg':>10} {'g2':>12} {'fwhm_deg':>9}  class")
    for t, v, w, kind in doc.peaks:
        print(f"{t:>10.2f} {v:>12.4g} {w:>9.3f}  {kind}")
    for t, c in doc.divergent:
        print(f"{t:>10.2f} {'undefined':>12} {'':>9}  divergent (C2={c:.3e})")
    if cfg.n_atoms == 2:
        checks = verify_extrema(doc.scan, predict_g1_extrema(cfg, pair_coherence(doc.scan.corr, 1, 2)))
        print("G1 extrema check:")
        for c in checks:
            status = "pass" if c.passed else "FAIL"
            print(f"  {np.degrees(c.prediction.theta):8.3f} deg  {c.prediction.branch:<12} "
                  f"n={c.prediction.order_n:+d}  slope {c.slope:+.2e}  {status}")
    if args.expect:
        problems = _check_expectation(doc, args.expect)
        for msg in problems:
            print(f"EXPECTATION FAILED: {msg}", file=sys.stderr)
        if problems:
            return 1
    return 0


def _parse_value(param, text):
    return int(text) if param in ("driven_atom", "n_atoms") else float(text)


def cmd_sweep(args):
    base = config_from_args(args)
    values = [] if not args.values else [_parse_value(args.param, v) for v in args.values.split(",")]
    spec = SweepSpec(base=base, parameter=args.param, values=values, out_dir=args.out)
    points = run_sweep(spec, grid_points=args.points, workers=args.workers)
    failed = sum(p.document is None for p in points)
    print(f"{len(points)} points, {failed} failed" + (f"; results in {args.out}" if args.out else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dipolechain", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a config and print the coupling matrices")
    _add_config_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("steady", help="steady-state populations and coherences")
    _add_config_flags(p)
    p.add_argument("--out", help="write rho_ss as text (row-major re,im pairs)")
    p.set_defaults(func=cmd_steady)

    for name, func, helptext in [("scan", cmd_scan, "angular scan as CSV"),
                                 ("peaks", cmd_peaks, "g2 peak table")]:
        p = sub.add_parser(name, help=helptext)
        _add_config_flags(p)
        p.add_argument("--points", type=int, default=3600)
        p.set_defaults(func=func)
        if name == "scan":
            p.add_argument("--out", help="CSV path (default stdout)")
            p.add_argument("--doc", help="also write the full JSON result document")
        else:
            p.add_argument("--expect", help="JSON file with n_superbunched / angles_deg / tolerance_deg")

    p = sub.add_parser("sweep", help="parameter sweep with summary CSV")
    _add_config_flags(p)
    p.add_argument("--param", required=True, choices=SWEEPABLE)
    p.add_argument("--values", default="", help="comma-separated values")
    p.add_argument("--points", type=int, default=3600)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ChainConfigError, io.ConfigFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
