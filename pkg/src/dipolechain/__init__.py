"""Steady-state photon correlations of a laser-driven chain of two-level atoms.

A chain of N identical two-level atoms couples through the dipole-dipole
interaction and collective spontaneous emission; a single atom is driven on
resonance.  The package builds the master-equation generator, finds its
steady state, and evaluates the angular distributions of G1, G2, g2 and C2
in the detection plane.
"""

from .chain import (U_DIPOLE, ChainConfig, ChainConfigError, DrivenAtomOutOfRange,
                    NonPositiveSpacing, SpacingTooSmall, UnsupportedAtomCount,
                    atom_positions, validate_config)
from .couplings import (CouplingMatrices, build_couplings, collective_decay,
                        dipole_shift, xi)
from .liouvillian import (build_generator, build_hamiltonian, evolve, generator_for,
                          ground_state, lowering_operators, steady_state)
from .correlations import (AngularScan, AtomicCorrelations, angular_scan, c2,
                           expectations, g1_angular, g2_angular, g2_normalized,
                           pair_coherence, second_order_coherences)
from .analysis import find_peaks, predict_g1_extrema, verify_extrema
from .pipeline import SweepSpec, run_scan, run_sweep, solve

__version__ = "0.1.0"
