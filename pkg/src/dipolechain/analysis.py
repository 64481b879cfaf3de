"""Extrema of the two-atom intensity pattern and peak detection in g2 scans."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .chain import ChainConfig, K_WAVE
from .correlations import AngularScan, PairCoherence, g1_angular

ANTIBUNCHED = "antibunched"
BUNCHED = "bunched"
SUPERBUNCHED = "superbunched"

MERGE_DEG = 0.5
NOISE_REL = 1e-12


class UnsupportedConfiguration(ValueError):
    pass


def classify(g2: float) -> str:
    """Photon-statistics class of a g2 value (thresholds 1 and 2)."""
    if g2 < 1:
        return ANTIBUNCHED
    if g2 <= 2:
        return BUNCHED
    return SUPERBUNCHED


@dataclass(frozen=True)
class ExtremumPrediction:
    theta: float
    branch: str  # "axis" or "interference"
    order_n: int


def _wrap(theta):
    return np.mod(theta, 2 * np.pi)


def _circ_dist(a, b):
    d = np.abs(_wrap(a) - _wrap(b))
    return np.minimum(d, 2 * np.pi - d)


def predict_g1_extrema(cfg: ChainConfig, pc: PairCoherence) -> List[ExtremumPrediction]:
    """Directions where the two-atom G1 is stationary.

    dG1/dtheta vanishes either on the axis (sin theta = 0) or where
    sin(k r cos theta - psi) = 0, i.e. cos theta = (n pi + psi) / (k r) for
    every integer n keeping the right-hand side in [-1, 1].
    """
    if cfg.n_atoms != 2:
        raise UnsupportedConfiguration("closed-form extrema apply to two atoms only")
    kr = K_WAVE * cfg.spacing_over_lambda
    out = [ExtremumPrediction(0.0, "axis", 0), ExtremumPrediction(np.pi, "axis", 1)]
    n_lo = int(np.floor((-kr - pc.psi) / np.pi))
    n_hi = int(np.ceil((kr - pc.psi) / np.pi))
    for n in range(n_lo, n_hi + 1):
        c = (n * np.pi + pc.psi) / kr
        if abs(c) > 1 + 1e-12:
            continue
        base = float(np.arccos(np.clip(c, -1, 1)))
        for th in (base, float(_wrap(2 * np.pi - base))):
            if all(_circ_dist(th, p.theta) > 1e-9 for p in out):
                out.append(ExtremumPrediction(th, "interference", n))
    return sorted(out, key=lambda p: p.theta)


@dataclass(frozen=True)
class ExtremumCheck:
    prediction: ExtremumPrediction
    slope: float
    threshold: float

    @property
    def passed(self) -> bool:
        return abs(self.slope) <= self.threshold


def verify_extrema(scan: AngularScan, predictions, h: float = 1e-5) -> List[ExtremumCheck]:
    """Central-difference dG1/dtheta at each predicted angle.

    An angle passes when |dG1/dtheta| <= 1e-6 max|dG1/dtheta| over the grid.
    """
    if scan.corr is None or scan.cfg is None:
        raise ValueError("scan must carry its correlations and configuration")
    corr, cfg = scan.corr, scan.cfg
    grid = scan.theta
    slopes = (g1_angular(corr, cfg, grid + h) - g1_angular(corr, cfg, grid - h)) / (2 * h)
    threshold = 1e-6 * float(np.max(np.abs(slopes)))
    checks = []
    for p in predictions:
        s = (g1_angular(corr, cfg, p.theta + h) - g1_angular(corr, cfg, p.theta - h)) / (2 * h)
        checks.append(ExtremumCheck(p, float(s), threshold))
    return checks


@dataclass(frozen=True)
class Peak:
    theta: float
    value: float
    width_fwhm: float
    kind: str

    @property
    def theta_deg(self) -> float:
        return float(np.degrees(self.theta))


@dataclass(frozen=True)
class DivergentCandidate:
    """Run of grid points where G1 vanishes and g2 is undefined."""

    theta: float
    c2: float

    @property
    def theta_deg(self) -> float:
        return float(np.degrees(self.theta))


@dataclass
class PeakSet:
    peaks: List[Peak] = field(default_factory=list)
    divergent: List[DivergentCandidate] = field(default_factory=list)

    def of_kind(self, kind: str) -> List[Peak]:
        return [p for p in self.peaks if p.kind == kind]

    @property
    def superbunched(self) -> List[Peak]:
        return self.of_kind(SUPERBUNCHED)

    def __len__(self):
        return len(self.peaks)


def _half_crossing(g, i, half, step):
    """Angle offset (in samples) from i to where g falls below ``half``."""
    n = len(g)
    prev = g[i]
    for s in range(1, n // 2):
        cur = g[(i + step * s) % n]
        if not np.isfinite(cur):
            return np.nan
        if cur < half:
            return (s - 1) + (prev - half) / (prev - cur)
        prev = cur
    return np.nan


def find_peaks(scan: AngularScan, threshold: float = 1.0) -> PeakSet:
    """Local maxima of g2 above ``threshold`` on the periodic angle grid.

    Peak positions and heights are refined by a parabola through the log
    of the three bracketing samples; widths are full widths at half maximum
    on the linear scale.  Maxima closer than 0.5 degrees are merged.
    Undefined stretches (vanishing G1) with positive C2 are returned as
    divergent candidates.
    """
    g = np.asarray(scan.g2_norm, dtype=float)
    n = len(g)
    if n < 360:
        raise ValueError("peak search needs at least 360 grid points")
    h = 2 * np.pi / n
    left = np.roll(g, 1)
    right = np.roll(g, -1)
    finite = np.isfinite(g) & np.isfinite(left) & np.isfinite(right)
    with np.errstate(invalid="ignore"):
        is_max = finite & (g > left) & (g >= right) & (g > threshold)
        # drop rounding-level ripples on flat stretches
        is_max &= (g - np.minimum(left, right)) > NOISE_REL * np.abs(g)

    peaks = []
    for i in np.flatnonzero(is_max):
        ym, y0, yp = np.log(left[i]), np.log(g[i]), np.log(right[i])
        curv = ym - 2 * y0 + yp
        delta = 0.5 * (ym - yp) / curv if curv < 0 else 0.0
        value = float(np.exp(y0 - 0.25 * (ym - yp) * delta))
        theta = float(_wrap(scan.theta[i] + delta * h))
        half = 0.5 * value
        width = (_half_crossing(g, i, half, -1) + _half_crossing(g, i, half, +1)) * h
        peaks.append(Peak(theta, value, float(width), classify(value)))

    peaks.sort(key=lambda p: -p.value)
    merged: List[Peak] = []
    for p in peaks:
        if all(_circ_dist(p.theta, q.theta) > np.radians(MERGE_DEG) for q in merged):
            merged.append(p)
    merged.sort(key=lambda p: p.theta)
    return PeakSet(peaks=merged, divergent=_divergent_runs(scan))


def _divergent_runs(scan: AngularScan) -> List[DivergentCandidate]:
    mask = np.asarray(scan.undefined, dtype=bool) & (np.asarray(scan.c2) > 0)
    n = len(mask)
    if not mask.any():
        return []
    if mask.all():
        i = int(np.argmax(scan.c2))
        return [DivergentCandidate(float(scan.theta[i]), float(scan.c2[i]))]
    # rotate so index 0 is outside every run, then walk runs
    start = int(np.flatnonzero(~mask)[0])
    order = (np.arange(n) + start) % n
    out, run = [], []
    for idx in list(order) + [start]:
        if mask[idx]:
            run.append(idx)
        elif run:
            centre = run[len(run) // 2]
            out.append(DivergentCandidate(float(scan.theta[centre]),
                                          float(np.max(scan.c2[run]))))
            run = []
    return sorted(out, key=lambda c: c.theta)
