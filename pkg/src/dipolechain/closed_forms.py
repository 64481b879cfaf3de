"""Closed-form angular distributions for two- and three-atom chains.

These re-express G1, G2 and g2 through pair coherences (v, psi) and
second-order amplitudes (eta, sigma, phi).  They share no code with the
generic sums in :mod:`dipolechain.correlations` beyond the expectation
values themselves, and serve as independent cross-checks of those sums.
"""

from __future__ import annotations

import numpy as np

from .chain import ChainConfig, K_WAVE
from .correlations import AtomicCorrelations, pair_coherence, second_order_coherences


def _require(corr, n):
    if corr.n_atoms != n:
        raise ValueError(f"closed form is for {n} atoms, got {corr.n_atoms}")


def g1_two_atoms(corr: AtomicCorrelations, cfg: ChainConfig, theta):
    """(I1 + I2) [1 + v12 cos(k r12 cos th - psi12)]."""
    _require(corr, 2)
    pc = pair_coherence(corr, 1, 2)
    pops = corr.populations
    kr = K_WAVE * cfg.spacing_over_lambda
    return (pops[0] + pops[1]) * (1 + pc.v * np.cos(kr * np.cos(theta) - pc.psi))


def g2_two_atoms(corr: AtomicCorrelations, cfg: ChainConfig, theta1, theta2):
    """2 <S1+ S2+ S1- S2-> {1 + cos[k r12 (cos th1 - cos th2)]}."""
    _require(corr, 2)
    amp = corr.second_order[0, 1, 0, 1].real
    kr = K_WAVE * cfg.spacing_over_lambda
    return 2 * amp * (1 + np.cos(kr * (np.cos(theta1) - np.cos(theta2))))


def g2_norm_two_atoms(corr: AtomicCorrelations, cfg: ChainConfig, theta):
    """eta_1212 / [1 + v12 cos(k r12 cos th - psi12)]^2."""
    _require(corr, 2)
    pc = pair_coherence(corr, 1, 2)
    eta = second_order_coherences(corr).eta[(1, 2)]
    kr = K_WAVE * cfg.spacing_over_lambda
    return eta / (1 + pc.v * np.cos(kr * np.cos(theta) - pc.psi)) ** 2


def g1_three_atoms(corr: AtomicCorrelations, cfg: ChainConfig, theta):
    """Sum over the three atom pairs of (I_i + I_j)[1/2 + v_ij cos(k r_ij cos th - psi_ij)]."""
    _require(corr, 3)
    pops = corr.populations
    d = cfg.spacing_over_lambda
    total = 0.0
    for i, j in [(1, 2), (2, 3), (1, 3)]:
        pc = pair_coherence(corr, i, j)
        kr = K_WAVE * (j - i) * d
        total = total + (pops[i - 1] + pops[j - 1]) * (
            0.5 + pc.v * np.cos(kr * np.cos(theta) - pc.psi))
    return total


def g2_three_atoms(corr: AtomicCorrelations, cfg: ChainConfig, theta):
    """Equal-angle G2 as 4 sum (G_a + G_b)[1/2 + sigma cos(k r cos th - phi)]."""
    _require(corr, 3)
    so = second_order_coherences(corr)
    G = so.G
    d = cfg.spacing_over_lambda
    blocks = {(1, 2): (G[(1, 2)] + G[(2, 3)]),
              (2, 3): (G[(2, 3)] + G[(1, 3)]),
              (1, 3): (G[(1, 3)] + G[(1, 2)])}
    total = 0.0
    for (i, j), weight in blocks.items():
        kr = K_WAVE * (j - i) * d
        sigma = so.sigma[(i, j)] or 0.0
        total = total + weight * (0.5 + sigma * np.cos(kr * np.cos(theta) - so.phi[(i, j)]))
    return 4 * total
