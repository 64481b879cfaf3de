"""End-to-end runs: couplings -> steady state -> correlations -> scan -> peaks."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .analysis import PeakSet, find_peaks
from .chain import ChainConfig, ChainConfigError, validate_config
from .correlations import (AngularScan, AtomicCorrelations, PairCoherence,
                           angular_scan, expectations, pair_coherence)
from .couplings import CouplingMatrices, build_couplings
from .liouvillian import (SolverDiagnostics, check_density_matrix, generator_for,
                          steady_state)

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    """A stage of :func:`run_scan` failed; the cause is chained."""


SWEEPABLE = ("spacing_over_lambda", "rabi_over_gamma", "driven_atom", "n_atoms")


@dataclass
class Solution:
    cfg: ChainConfig
    couplings: CouplingMatrices
    rho: np.ndarray
    diagnostics: SolverDiagnostics
    corr: AtomicCorrelations


def solve(cfg: ChainConfig) -> Solution:
    """Steady state and atomic correlations for a validated configuration."""
    validate_config(cfg)
    cpl = build_couplings(cfg)
    L = generator_for(cfg, cpl)
    rho, info = steady_state(L, return_info=True)
    check_density_matrix(rho)
    return Solution(cfg, cpl, rho, info, expectations(rho))


def _arrays_equal(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    if np.issubdtype(a.dtype, np.number) and np.issubdtype(b.dtype, np.number):
        return bool(np.array_equal(a, b, equal_nan=True))
    return bool(np.array_equal(a, b))


@dataclass(eq=False)
class ResultDocument:
    """Everything one run produces, in the units and angles used on disk.

    Angles are in degrees.  ``g2_norm`` is NaN where undefined.  ``peaks``
    rows are ``(theta_deg, g2, fwhm_deg, kind)``; ``divergent`` rows are
    ``(theta_deg, c2)``.
    """

    config: ChainConfig
    gamma: np.ndarray
    omega: np.ndarray
    first_order: np.ndarray
    second_order: np.ndarray
    pair_coherences: List[PairCoherence]
    theta_deg: np.ndarray
    g1_over_u: np.ndarray
    g2_over_u2: np.ndarray
    g2_norm: np.ndarray
    c2: np.ndarray
    peaks: List[tuple]
    divergent: List[tuple]
    residual: float
    kernel_dim: int
    scan: Optional[AngularScan] = field(default=None, repr=False)
    peak_set: Optional[PeakSet] = field(default=None, repr=False)

    _ARRAYS = ("gamma", "omega", "first_order", "second_order", "theta_deg",
               "g1_over_u", "g2_over_u2", "g2_norm", "c2")

    @property
    def populations(self) -> np.ndarray:
        return self.first_order.diagonal().real.copy()

    def __eq__(self, other):
        if not isinstance(other, ResultDocument):
            return NotImplemented
        if any(not _arrays_equal(getattr(self, k), getattr(other, k)) for k in self._ARRAYS):
            return False
        return (self.config == other.config
                and self.pair_coherences == other.pair_coherences
                and [tuple(p) for p in self.peaks] == [tuple(p) for p in other.peaks]
                and [tuple(d) for d in self.divergent] == [tuple(d) for d in other.divergent]
                and self.residual == other.residual
                and self.kernel_dim == other.kernel_dim)


def run_scan(cfg: ChainConfig, grid_points: int = 3600) -> ResultDocument:
    if grid_points < 360:
        raise ValueError("grid_points must be >= 360")
    validate_config(cfg)
    try:
        sol = solve(cfg)
        scan = angular_scan(sol.corr, cfg, grid_points)
        peak_set = find_peaks(scan)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        raise PipelineError(f"{type(exc).__name__}: {exc} [config {cfg}]") from exc
    n = cfg.n_atoms
    pcs = [pair_coherence(sol.corr, i, j)
           for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return ResultDocument(
        config=cfg,
        gamma=sol.couplings.gamma,
        omega=sol.couplings.omega,
        first_order=sol.corr.first_order,
        second_order=sol.corr.second_order,
        pair_coherences=pcs,
        theta_deg=np.degrees(scan.theta),
        g1_over_u=scan.g1_over_u,
        g2_over_u2=scan.g2_over_u2,
        g2_norm=scan.g2_norm,
        c2=scan.c2,
        peaks=[(p.theta_deg, p.value, float(np.degrees(p.width_fwhm)), p.kind)
               for p in peak_set.peaks],
        divergent=[(d.theta_deg, d.c2) for d in peak_set.divergent],
        residual=sol.diagnostics.residual,
        kernel_dim=sol.diagnostics.kernel_dim,
        scan=scan,
        peak_set=peak_set,
    )


@dataclass(frozen=True)
class SweepSpec:
    base: ChainConfig
    parameter: str
    values: Sequence
    out_dir: Optional[str] = None

    def configs(self) -> List[ChainConfig]:
        if self.parameter not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.parameter!r}; choose from {SWEEPABLE}")
        return [self.base.replace(**{self.parameter: v}) for v in self.values]


@dataclass
class SweepPoint:
    value: object
    document: Optional[ResultDocument]
    error: Optional[str] = None


def _run_point(args):
    cfg, grid_points = args
    try:
        return run_scan(cfg, grid_points), None
    except (ChainConfigError, ArithmeticError, RuntimeError, ValueError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def summary_row(point: SweepPoint) -> dict:
    doc = point.document
    if doc is None:
        return {"swept_value": point.value, "n_peaks": "", "max_g2": "",
                "peak_angles_deg": f"error: {point.error}", "v12": ""}
    finite = doc.g2_norm[np.isfinite(doc.g2_norm)]
    v12 = next((pc.v for pc in doc.pair_coherences if (pc.i, pc.j) == (1, 2)), "")
    return {
        "swept_value": point.value,
        "n_peaks": len(doc.peaks),
        "max_g2": float(finite.max()) if finite.size else "",
        "peak_angles_deg": ";".join(f"{p[0]:.4f}" for p in doc.peaks),
        "v12": v12,
    }


def run_sweep(spec: SweepSpec, grid_points: int = 3600,
              workers: int = 1) -> List[SweepPoint]:
    """Run one scan per swept value; failures are recorded, not raised.

    With ``out_dir`` set, writes ``point_XXX.json`` and ``point_XXX.csv`` per
    value plus ``summary.csv``.
    """
    from . import io

    points = []
    jobs = [(cfg, grid_points) for cfg in spec.configs()]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]
    for v, (doc, err) in zip(spec.values, results):
        if err:
            log.warning("sweep point %s=%r failed: %s", spec.parameter, v, err)
        points.append(SweepPoint(v, doc, err))

    if spec.out_dir is not None:
        os.makedirs(spec.out_dir, exist_ok=True)
        for k, p in enumerate(points):
            if p.document is not None:
                io.write_document(p.document, os.path.join(spec.out_dir, f"point_{k:03d}.json"))
                io.write_scan_csv(p.document, os.path.join(spec.out_dir, f"point_{k:03d}.csv"))
        io.write_summary_csv(points, os.path.join(spec.out_dir, "summary.csv"))
    return points
