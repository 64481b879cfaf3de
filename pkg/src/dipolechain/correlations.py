"""Atomic expectation values and angular photon-correlation functions.

All angular functions return values pre-divided by the single-dipole pattern
``u`` (``u**2`` for second order) and by gamma (gamma**2), i.e. exactly the
quantities G1/u and G2/u^2 in units where gamma = 1.

Index pairing in the second-order sum: the term <S_i^+ S_j^+ S_k^- S_l^->
carries the phase exp[i k ((x_i - x_l) cos th1 + (x_j - x_k) cos th2)], so
the outer operator pair (i, l) is tied to the first detector.  For two atoms
this reduces to 2 <S1+ S2+ S1- S2-> {1 + cos[k x12 (cos th1 - cos th2)]}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .chain import ChainConfig, K_WAVE, atom_positions
from .liouvillian import lowering_operators

#: G1^2 below this is treated as zero when forming g2 = G2 / G1^2
G1_SQUARED_FLOOR = 1e-30

#: |<S_i^+ S_j^->| below this leaves the phase psi_ij undefined
COHERENCE_FLOOR = 1e-15


class ConsistencyError(ArithmeticError):
    """A quantity that must be real came out with a sizeable imaginary part."""


@dataclass(frozen=True)
class AtomicCorrelations:
    """``first_order[i, j] = <S_i^+ S_j^->``,
    ``second_order[i, j, k, l] = <S_i^+ S_j^+ S_k^- S_l^->`` (0-based)."""

    first_order: np.ndarray
    second_order: np.ndarray

    @property
    def n_atoms(self) -> int:
        return self.first_order.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return self.first_order.diagonal().real.copy()


def expectations(rho: np.ndarray) -> AtomicCorrelations:
    n = int(round(np.log2(rho.shape[0])))
    lower = lowering_operators(n, sparse=True)
    raise_ = [op.getH().tocsr() for op in lower]
    rho_t = rho.T

    def expval(op):
        # tr(rho A) = sum_ab rho_ba A_ab
        return complex(op.multiply(rho_t).sum())

    first = np.zeros((n, n), dtype=complex)
    for i, j in itertools.product(range(n), repeat=2):
        first[i, j] = expval(raise_[i] @ lower[j])
    first[np.diag_indices(n)] = first.diagonal().real

    second = np.zeros((n, n, n, n), dtype=complex)
    pairs = [(i, j) for i in range(n) for j in range(n) if i < j]
    up = {p: raise_[p[0]] @ raise_[p[1]] for p in pairs}
    down = {p: lower[p[0]] @ lower[p[1]] for p in pairs}
    for p in pairs:
        for q in pairs:
            if pairs.index(q) < pairs.index(p):
                continue
            val = expval(up[p] @ down[q])
            for i, j in (p, p[::-1]):
                for k, l in (q, q[::-1]):
                    second[i, j, k, l] = val
                    second[l, k, j, i] = np.conj(val)
            if p == q:
                for i, j in (p, p[::-1]):
                    for k, l in (p, p[::-1]):
                        second[i, j, k, l] = val.real
    return AtomicCorrelations(first_order=first, second_order=second)


def _as_angles(theta):
    th = np.asarray(theta, dtype=float)
    return th, th.ndim == 0


def _real_or_raise(values: np.ndarray, scale: float) -> np.ndarray:
    imag = np.max(np.abs(values.imag)) if values.size else 0.0
    if imag > 1e-10 * max(scale, 1e-300) and imag > 1e-300:
        raise ConsistencyError(f"imaginary residual {imag:.2e} (scale {scale:.2e})")
    return values.real


def g1_angular(corr: AtomicCorrelations, cfg: ChainConfig, theta):
    """G1(theta) / (u gamma) = sum_ij <S_i^+ S_j^-> exp(i k x_ij cos theta)."""
    th, scalar = _as_angles(theta)
    x = atom_positions(cfg)
    proj = np.cos(th.ravel())
    phase = np.exp(1j * K_WAVE * proj[:, None, None] * (x[:, None] - x[None, :]))
    vals = np.einsum("ij,tij->t", corr.first_order, phase)
    out = _real_or_raise(vals, np.abs(corr.first_order).sum()).reshape(th.shape)
    return float(out) if scalar else out


def g2_angular(corr: AtomicCorrelations, cfg: ChainConfig, theta1, theta2):
    """G2(theta1, theta2) / (u1 u2 gamma^2), equal-time, i != j and k != l."""
    t1, s1 = _as_angles(theta1)
    t2, s2 = _as_angles(theta2)
    t1, t2 = np.broadcast_arrays(t1, t2)
    shape = t1.shape
    x = atom_positions(cfg)
    dx = x[:, None] - x[None, :]
    p1 = np.exp(1j * K_WAVE * np.cos(t1.ravel())[:, None, None] * dx)
    p2 = np.exp(1j * K_WAVE * np.cos(t2.ravel())[:, None, None] * dx)
    # i,l paired with detector 1; j,k with detector 2
    vals = np.einsum("ijkl,til,tjk->t", corr.second_order, p1, p2)
    out = _real_or_raise(vals, np.abs(corr.second_order).sum()).reshape(shape)
    return float(out) if (s1 and s2) else out


def g2_normalized(corr: AtomicCorrelations, cfg: ChainConfig, theta):
    """g2(theta) = G2(theta, theta) / G1(theta)^2; NaN where G1^2 < 1e-30."""
    th, scalar = _as_angles(theta)
    g1 = np.atleast_1d(g1_angular(corr, cfg, th))
    g2 = np.atleast_1d(g2_angular(corr, cfg, th, th))
    g1sq = g1 * g1
    out = np.full(g1.shape, np.nan)
    ok = g1sq >= G1_SQUARED_FLOOR
    out[ok] = g2[ok] / g1sq[ok]
    out = out.reshape(th.shape)
    return float(out) if scalar else out


def c2(corr: AtomicCorrelations, cfg: ChainConfig, theta):
    """C2 = G2(theta, theta) - G1(theta)^2 (both divided by u, u^2)."""
    g1 = g1_angular(corr, cfg, theta)
    return g2_angular(corr, cfg, theta, theta) - g1 * g1


@dataclass
class AngularScan:
    """Correlation functions on a full-circle grid of detection angles."""

    theta: np.ndarray
    g1_over_u: np.ndarray
    g2_over_u2: np.ndarray
    g2_norm: np.ndarray
    c2: np.ndarray
    undefined: np.ndarray
    corr: Optional[AtomicCorrelations] = field(default=None, repr=False)
    cfg: Optional[ChainConfig] = field(default=None, repr=False)

    @property
    def theta_deg(self) -> np.ndarray:
        return np.degrees(self.theta)


def theta_grid(n_points: int = 3600) -> np.ndarray:
    return 2 * np.pi * np.arange(n_points) / n_points


def angular_scan(corr: AtomicCorrelations, cfg: ChainConfig,
                 n_points: int = 3600) -> AngularScan:
    th = theta_grid(n_points)
    g1 = g1_angular(corr, cfg, th)
    g2 = g2_angular(corr, cfg, th, th)
    g1sq = g1 * g1
    undefined = g1sq < G1_SQUARED_FLOOR
    g2n = np.full_like(g1, np.nan)
    g2n[~undefined] = g2[~undefined] / g1sq[~undefined]
    return AngularScan(theta=th, g1_over_u=g1, g2_over_u2=g2, g2_norm=g2n,
                       c2=g2 - g1sq, undefined=undefined, corr=corr, cfg=cfg)


@dataclass(frozen=True)
class PairCoherence:
    i: int
    j: int
    v: float
    psi: float
    defined: bool


def pair_coherence(corr: AtomicCorrelations, i: int, j: int) -> PairCoherence:
    """Degree v_ij and phase psi_ij of the first-order coherence (1-based).

    v_ij = 2 |<S_i^+ S_j^->| / (I_i + I_j) and psi_ij = arg <S_i^+ S_j^-> in
    (-pi, pi].  Both are reported as 0 with ``defined=False`` when the
    coherence vanishes.
    """
    if i == j:
        raise ValueError("pair coherence needs two distinct atoms")
    c = corr.first_order[i - 1, j - 1]
    if abs(c) < COHERENCE_FLOOR:
        return PairCoherence(i, j, 0.0, 0.0, False)
    pops = corr.populations
    psi = float(np.arctan2(c.imag, c.real))
    if psi == -np.pi:
        psi = np.pi
    v = 2 * abs(c) / (pops[i - 1] + pops[j - 1])
    return PairCoherence(i, j, float(v), psi, True)


@dataclass(frozen=True)
class SecondOrderCoherences:
    """eta[(i, j)] = 4 <S_i^+ S_j^+ S_i^- S_j^-> / (I_i + I_j)^2 for i < j.

    For three atoms also the pair-of-pair amplitudes of the equal-angle G2:
    ``G[(i, j)]`` (G1, G2, G3), ``sigma[(i, j)]`` and ``phi[(i, j)]`` keyed by
    the atom pair whose separation sets the fringe, (1,2), (2,3), (1,3).
    Entries are ``None`` where undefined.
    """

    eta: dict
    G: Optional[dict] = None
    sigma: Optional[dict] = None
    phi: Optional[dict] = None


# fringe pair -> (pair-of-atoms P, pair Q) with <A_P^dag A_Q> carrying exp(-i k r cos th)
_THREE_ATOM_TERMS = {
    (1, 2): ((1, 2), (1, 3)),
    (2, 3): ((1, 3), (2, 3)),
    (1, 3): ((1, 2), (2, 3)),
}
_THREE_ATOM_DIAG = {(1, 2): ((1, 2), (2, 3)), (2, 3): ((2, 3), (1, 3)),
                    (1, 3): ((1, 3), (1, 2))}


def second_order_coherences(corr: AtomicCorrelations) -> SecondOrderCoherences:
    n = corr.n_atoms
    if n < 2:
        raise ValueError("second-order coherences need at least two atoms")
    pops = corr.populations
    G4 = corr.second_order

    def pair_amp(p, q):
        return G4[p[0] - 1, p[1] - 1, q[0] - 1, q[1] - 1]

    eta = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            s = pops[i - 1] + pops[j - 1]
            eta[(i, j)] = None if s <= 0 else float(4 * pair_amp((i, j), (i, j)).real / s ** 2)
    if n != 3:
        return SecondOrderCoherences(eta=eta)

    Gd = {p: float(pair_amp(p, p).real) for p in [(1, 2), (2, 3), (1, 3)]}
    sigma, phi = {}, {}
    for fringe, (p, q) in _THREE_ATOM_TERMS.items():
        amp = pair_amp(p, q)
        a, b = _THREE_ATOM_DIAG[fringe]
        denom = Gd[a] + Gd[b]
        sigma[fringe] = None if denom <= 0 else float(2 * abs(amp) / denom)
        phi[fringe] = float(np.angle(amp))
    return SecondOrderCoherences(eta=eta, G=Gd, sigma=sigma, phi=phi)
