"""Collective damping and dipole-dipole shift between atoms of the chain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainConfig, K_WAVE, validate_config

_SERIES_CUTOFF = 0.1


class CoincidentAtoms(ValueError):
    """Raised for a zero or negative separation (the shift diverges)."""


@dataclass(frozen=True)
class CouplingMatrices:
    """Pairwise couplings in units of gamma.

    ``gamma[i, j]`` is the collective decay rate (diagonal 1), ``omega[i, j]``
    the dipole-dipole shift (diagonal 0, the self shift being absorbed into
    the transition frequency).
    """

    gamma: np.ndarray
    omega: np.ndarray

    @property
    def n_atoms(self) -> int:
        return self.gamma.shape[0]


def xi(separation_over_lambda):
    """Dimensionless separation 2 pi r / lambda."""
    r = np.asarray(separation_over_lambda, dtype=float)
    if np.any(r <= 0):
        raise CoincidentAtoms(f"separation must be > 0, got {separation_over_lambda!r}")
    out = K_WAVE * r
    return out.item() if out.ndim == 0 else out


def _check_xi(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise CoincidentAtoms(f"xi must be > 0, got {x!r}")
    return x


def _j1_over_x(x):
    # (sin x - x cos x) / x**3; the direct form cancels catastrophically for small x
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_CUTOFF
    out = np.empty_like(x)
    xs = x[small]
    x2 = xs * xs
    out[small] = 1 / 3 - x2 / 30 + x2 * x2 / 840 - x2 ** 3 / 45360
    xl = x[~small]
    out[~small] = (np.sin(xl) - xl * np.cos(xl)) / xl ** 3
    return out


def collective_decay(x, mu_dot_rhat=0.0):
    """Collective decay rate gamma_ij / gamma at dimensionless separation ``x``.

    ``mu_dot_rhat`` is the cosine between the dipole moment and the
    interatomic axis; the chain pipeline always uses 0.
    """
    x = _check_xi(x)
    m2 = np.asarray(mu_dot_rhat, dtype=float) ** 2
    val = 1.5 * ((1 - m2) * np.sin(x) / x - (1 - 3 * m2) * _j1_over_x(x))
    return val.item() if val.ndim == 0 else val


def dipole_shift(x, mu_dot_rhat=0.0):
    """Dipole-dipole level shift Omega_ij / gamma at separation ``x``."""
    x = _check_xi(x)
    m2 = np.asarray(mu_dot_rhat, dtype=float) ** 2
    c, s = np.cos(x), np.sin(x)
    val = 0.75 * (-(1 - m2) * c / x + (1 - 3 * m2) * (s / x ** 2 + c / x ** 3))
    return val.item() if val.ndim == 0 else val


def build_couplings(cfg: ChainConfig) -> CouplingMatrices:
    validate_config(cfg)
    n = cfg.n_atoms
    gamma = np.eye(n)
    omega = np.zeros((n, n))
    idx = np.arange(n)
    sep = np.abs(idx[:, None] - idx[None, :])
    off = sep > 0
    if off.any():
        x = K_WAVE * sep[off] * float(cfg.spacing_over_lambda)
        gamma[off] = collective_decay(x)
        omega[off] = dipole_shift(x)
    return CouplingMatrices(gamma=gamma, omega=omega)
