"""File formats: config files, result documents, scan CSVs, density-matrix dumps.

Config file
    JSON object with keys ``n_atoms``, ``spacing_over_lambda``,
    ``driven_atom``, ``rabi_over_gamma`` and optionally ``damping_weight``.

Scan CSV
    header ``theta_deg,g1_over_u,g2_over_u2,g2_norm,c2``; ``g2_norm`` is an
    empty field where undefined.

Summary CSV
    header ``swept_value,n_peaks,max_g2,peak_angles_deg,v12``.

Density-matrix text dump
    ``#`` comment lines, then one matrix row per line; entries are
    ``re,im`` pairs separated by single spaces (row-major).

Result document
    JSON; complex numbers are stored as ``[re, im]`` and undefined g2 as
    ``null``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, fields

import numpy as np

from .chain import ChainConfig
from .correlations import PairCoherence
from .pipeline import ResultDocument, summary_row

SCAN_HEADER = ["theta_deg", "g1_over_u", "g2_over_u2", "g2_norm", "c2"]
SUMMARY_HEADER = ["swept_value", "n_peaks", "max_g2", "peak_angles_deg", "v12"]

_CONFIG_KEYS = {f.name for f in fields(ChainConfig)}


class ConfigFileError(ValueError):
    pass


def config_from_dict(data: dict) -> ChainConfig:
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigFileError(f"unknown config keys: {sorted(unknown)}")
    missing = {"n_atoms", "spacing_over_lambda"} - set(data)
    if missing:
        raise ConfigFileError(f"missing config keys: {sorted(missing)}")
    return ChainConfig(**data)


def load_config(path) -> ChainConfig:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigFileError(f"{path}: expected a JSON object")
    return config_from_dict(data)


def save_config(cfg: ChainConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(asdict(cfg), fh, indent=2)
        fh.write("\n")


def _fmt(x) -> str:
    return "" if x is None or (isinstance(x, float) and np.isnan(x)) else repr(float(x))


def _complex_to_json(a: np.ndarray):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _complex_from_json(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def document_to_dict(doc: ResultDocument) -> dict:
    return {
        "config": asdict(doc.config),
        "couplings": {"gamma": doc.gamma.tolist(), "omega": doc.omega.tolist()},
        "populations": doc.populations.tolist(),
        "first_order": _complex_to_json(doc.first_order),
        "second_order": _complex_to_json(doc.second_order),
        "pair_coherences": [asdict(pc) for pc in doc.pair_coherences],
        "scan": {
            "theta_deg": doc.theta_deg.tolist(),
            "g1_over_u": doc.g1_over_u.tolist(),
            "g2_over_u2": doc.g2_over_u2.tolist(),
            "g2_norm": [None if np.isnan(v) else float(v) for v in doc.g2_norm],
            "c2": doc.c2.tolist(),
        },
        "peaks": [{"theta_deg": t, "g2": v, "fwhm_deg": None if np.isnan(w) else w,
                   "kind": k} for t, v, w, k in doc.peaks],
        "divergent": [{"theta_deg": t, "c2": c} for t, c in doc.divergent],
        "diagnostics": {"residual": doc.residual, "kernel_dim": doc.kernel_dim},
    }


def document_from_dict(data: dict) -> ResultDocument:
    scan = data["scan"]
    return ResultDocument(
        config=config_from_dict(data["config"]),
        gamma=np.asarray(data["couplings"]["gamma"], dtype=float),
        omega=np.asarray(data["couplings"]["omega"], dtype=float),
        first_order=_complex_from_json(data["first_order"]),
        second_order=_complex_from_json(data["second_order"]),
        pair_coherences=[PairCoherence(**pc) for pc in data["pair_coherences"]],
        theta_deg=np.asarray(scan["theta_deg"], dtype=float),
        g1_over_u=np.asarray(scan["g1_over_u"], dtype=float),
        g2_over_u2=np.asarray(scan["g2_over_u2"], dtype=float),
        g2_norm=np.array([np.nan if v is None else v for v in scan["g2_norm"]], dtype=float),
        c2=np.asarray(scan["c2"], dtype=float),
        peaks=[(p["theta_deg"], p["g2"], np.nan if p["fwhm_deg"] is None else p["fwhm_deg"],
                p["kind"]) for p in data["peaks"]],
        divergent=[(d["theta_deg"], d["c2"]) for d in data["divergent"]],
        residual=data["diagnostics"]["residual"],
        kernel_dim=data["diagnostics"]["kernel_dim"],
    )


def write_document(doc: ResultDocument, path) -> None:
    with open(path, "w") as fh:
        json.dump(document_to_dict(doc), fh)


def read_document(path) -> ResultDocument:
    with open(path) as fh:
        return document_from_dict(json.load(fh))


def scan_rows(doc: ResultDocument):
    for row in zip(doc.theta_deg, doc.g1_over_u, doc.g2_over_u2, doc.g2_norm, doc.c2):
        yield [_fmt(v) for v in row]


def write_scan_csv(doc: ResultDocument, path_or_file) -> None:
    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCAN_HEADER)
        w.writerows(scan_rows(doc))

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


def write_summary_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_HEADER, lineterminator="\n")
        w.writeheader()
        for p in points:
            row = summary_row(p)
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def write_density_matrix(rho: np.ndarray, path_or_file) -> None:
    def _write(fh):
        fh.write(f"# density matrix, dim {rho.shape[0]}, row-major re,im pairs\n")
        for row in rho:
            fh.write(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row) + "\n")

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w") as fh:
            _write(fh)


def read_density_matrix(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([complex(float(re), float(im))
                         for re, im in (tok.split(",") for tok in line.split())])
    return np.array(rows, dtype=complex)
