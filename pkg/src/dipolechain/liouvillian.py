"""Master-equation generator, steady state and a time-evolution oracle.

Operator convention: the N-atom Hilbert space is the Kronecker product of
single-atom spaces with atom 1 as the most significant factor.  Each atom
uses the basis (|g>, |e>), so the all-ground state is basis index 0 and
``S^- = |g><e| = [[0, 1], [0, 0]]``.

Superoperators act on row-major vectorized density matrices
(``rho.ravel()``), for which ``vec(A X B) = kron(A, B.T) vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .chain import ChainConfig
from .couplings import CouplingMatrices

_SIGMA_MINUS = sp.csr_matrix(np.array([[0, 1], [0, 0]], dtype=complex))


class SteadyStateError(RuntimeError):
    pass


class DegenerateKernel(SteadyStateError):
    def __init__(self, kernel_dim: int):
        super().__init__(f"generator kernel has dimension {kernel_dim}; "
                         "steady state is not unique")
        self.kernel_dim = kernel_dim


class ResidualTooLarge(SteadyStateError):
    def __init__(self, residual: float, tol: float):
        super().__init__(f"steady-state residual {residual:.3e} exceeds {tol:.1e}")
        self.residual = residual


class StepSizeError(RuntimeError):
    pass


class InvalidDensityMatrix(ValueError):
    pass


@lru_cache(maxsize=None)
def _lowering_sparse(n_atoms: int) -> tuple:
    ops = []
    for i in range(n_atoms):
        left = sp.identity(2 ** i, dtype=complex, format="csr")
        right = sp.identity(2 ** (n_atoms - i - 1), dtype=complex, format="csr")
        ops.append(sp.kron(sp.kron(left, _SIGMA_MINUS), right, format="csr"))
    return tuple(ops)


def lowering_operators(n_atoms: int, sparse: bool = False) -> list:
    """``S_i^-`` for i = 1..N (returned 0-based in a list)."""
    ops = _lowering_sparse(n_atoms)
    if sparse:
        return list(ops)
    return [op.toarray() for op in ops]


def ground_state(n_atoms: int) -> np.ndarray:
    dim = 2 ** n_atoms
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def build_hamiltonian(cfg: ChainConfig, cpl: CouplingMatrices) -> np.ndarray:
    """Rotating-frame Hamiltonian in units of hbar * gamma.

    H = (Omega/2)(S_l^+ + S_l^-) + sum_{i != j} Omega_ij S_i^+ S_j^-
    """
    lower = _lowering_sparse(cfg.n_atoms)
    drive = lower[cfg.driven_atom - 1]
    H = 0.5 * cfg.rabi_over_gamma * (drive + drive.getH())
    n = cfg.n_atoms
    for i in range(n):
        for j in range(n):
            if i != j and cpl.omega[i, j] != 0:
                H = H + cpl.omega[i, j] * (lower[i].getH() @ lower[j])
    return sp.csr_matrix(H).toarray()


def build_generator(H: np.ndarray, cpl: CouplingMatrices,
                    damping_weight: float = 1.0) -> np.ndarray:
    """Dense superoperator L with d vec(rho)/dt = L vec(rho).

    L[rho] = -i[H, rho] - (w/2) sum_ij gamma_ij (S_i^+ S_j^- rho + rho S_i^+ S_j^-
             - 2 S_j^- rho S_i^+),  with w = ``damping_weight``.
    """
    n = cpl.n_atoms
    lower = _lowering_sparse(n)
    Hs = sp.csr_matrix(H)
    eye = sp.identity(Hs.shape[0], dtype=complex, format="csr")
    L = -1j * (sp.kron(Hs, eye) - sp.kron(eye, Hs.T))
    K = sp.csr_matrix(Hs.shape, dtype=complex)
    jump = sp.csr_matrix(L.shape, dtype=complex)
    for i in range(n):
        raise_i = lower[i].getH()
        for j in range(n):
            g = cpl.gamma[i, j]
            if g == 0:
                continue
            K = K + g * (raise_i @ lower[j])
            # vec(S_j^- rho S_i^+) = kron(S_j^-, (S_i^+)^T) vec(rho)
            jump = jump + g * sp.kron(lower[j], raise_i.T)
    L = L - 0.5 * damping_weight * (sp.kron(K, eye) + sp.kron(eye, K.T) - 2 * jump)
    return sp.csr_matrix(L).toarray()


def generator_for(cfg: ChainConfig, cpl: CouplingMatrices) -> np.ndarray:
    """Generator for ``cfg`` using its configured damping weight."""
    return build_generator(build_hamiltonian(cfg, cpl), cpl, cfg.damping_weight)


@dataclass(frozen=True)
class SolverDiagnostics:
    residual: float
    kernel_dim: int
    smallest_singular_values: tuple


def _excitation_levels(dim: int) -> np.ndarray:
    """Total excitation number of |a><b| for each vectorized element."""
    counts = np.array([bin(a).count("1") for a in range(dim)])
    return (counts[:, None] + counts[None, :]).ravel()


def steady_state(L: np.ndarray, tol: float = 1e-10, return_info: bool = False):
    """Unique normalized kernel vector of ``L`` as a density matrix.

    Solves ``[L; tr] vec(rho) = [0; 1]`` by SVD-based least squares.  The
    trace row lifts a one-dimensional kernel, so any further numerically
    zero singular value of the stacked system signals a degenerate kernel.

    Under weak driving the elements of rho fall off geometrically with their
    excitation number, and a plain solve resolves the doubly excited block
    only to absolute (not relative) precision.  A second solve rescales each
    unknown by ``r**level``, with ``r`` the one-excitation magnitude from
    the first pass, which restores relative accuracy to the small elements.

    The residual is ``||L vec(rho)|| / (||L||_F ||vec(rho)||)``.
    """
    dim2 = L.shape[0]
    dim = int(round(np.sqrt(dim2)))
    trace_row = np.eye(dim, dtype=complex).reshape(1, -1)
    A = np.vstack([L, trace_row])
    b = np.zeros(dim2 + 1, dtype=complex)
    b[-1] = 1.0
    x, _, _, sv = np.linalg.lstsq(A, b, rcond=None)
    svmax = sv[0] if sv.size else 1.0
    # rank deficiency of the stacked system = extra kernel dimensions of L
    kernel_dim = 1 + int(np.sum(sv < 1e-10 * svmax))
    if kernel_dim > 1:
        raise DegenerateKernel(kernel_dim)

    if dim > 1:
        levels = _excitation_levels(dim)
        ratio = np.abs(x[levels == 1]).max() / np.abs(x[levels == 0]).max()
        ratio = min(1.0, max(ratio, 1e-30))
        if ratio < 1.0:
            scale = ratio ** levels
            row_scale = np.append(scale, 1.0)
            y = np.linalg.lstsq(A * (scale[None, :] / row_scale[:, None]), b, rcond=None)[0]
            x = scale * y

    rho = x.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    vec = rho.ravel()
    residual = float(np.linalg.norm(L @ vec)
                     / (np.linalg.norm(L) * np.linalg.norm(vec)))
    if residual > tol:
        raise ResidualTooLarge(residual, tol)
    if return_info:
        info = SolverDiagnostics(residual=residual, kernel_dim=kernel_dim,
                                 smallest_singular_values=tuple(float(s) for s in sv[-3:]))
        return rho, info
    return rho


def evolve(rho0: np.ndarray, L: np.ndarray, t_final: float,
           dt: float = 0.01) -> np.ndarray:
    """Integrate d rho/dt = L[rho] to ``t_final`` with fixed-step RK4.

    The step is shrunk slightly so that an integer number of steps lands
    exactly on ``t_final``.
    """
    if t_final <= 0:
        raise ValueError("t_final must be > 0")
    if dt <= 0:
        raise ValueError("dt must be > 0")
    steps = int(np.ceil(t_final / dt - 1e-12))
    h = t_final / steps
    v = np.asarray(rho0, dtype=complex).ravel().copy()
    dim = rho0.shape[0]
    diag = np.arange(dim) * (dim + 1)
    tr0 = v[diag].sum()
    for n in range(steps):
        k1 = L @ v
        k2 = L @ (v + 0.5 * h * k1)
        k3 = L @ (v + 0.5 * h * k2)
        k4 = L @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if n % 100 == 99 or n == steps - 1:
            # RK4 conserves the trace of a trace-preserving L up to rounding,
            # so blow-up is caught by the |rho_ab| <= 1 bound as well
            drift = abs(v[diag].sum() - tr0)
            peak = np.abs(v).max()
            if not np.isfinite(peak) or drift > 1e-6 or peak > 1 + 1e-6:
                raise StepSizeError(
                    f"integration unstable at t={(n + 1) * h:.3g} (trace drift "
                    f"{drift:.2e}, max |rho_ab| {peak:.3g}); reduce dt (currently {dt})")
    return v.reshape(dim, dim)


def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-12,
                         trace_tol: float = 1e-12, psd_tol: float = 1e-10) -> None:
    """Raise :class:`InvalidDensityMatrix` unless ``rho`` is a valid state."""
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise InvalidDensityMatrix(f"not Hermitian (max deviation {herm:.2e})")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        raise InvalidDensityMatrix(f"trace {tr} != 1")
    emin = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if emin < -psd_tol:
        raise InvalidDensityMatrix(f"negative eigenvalue {emin:.2e}")
