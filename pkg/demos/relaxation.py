"""
How long does a weakly driven chain take to settle?
===================================================

The steady state is found directly from the kernel of the generator.  Time
evolution from the ground state reaches it only after the slowest
(subradiant) modes have died out, which can take far longer than 1/gamma.
"""

import numpy as np

from dipolechain import ChainConfig
from dipolechain.couplings import build_couplings
from dipolechain.liouvillian import evolve, generator_for, ground_state, steady_state

for n in (2, 3, 4):
    cfg = ChainConfig(n, 0.25, 1, 0.02)
    L = generator_for(cfg, build_couplings(cfg))
    rho_ss = steady_state(L)
    gap = -np.sort(np.linalg.eigvals(L).real)[-2]
    print(f"N={n}: slowest relaxation rate {gap:.4f} gamma")
    for t in (10, 100, 30 / gap):
        dev = np.max(np.abs(evolve(ground_state(n), L, t, dt=0.05) - rho_ss))
        print(f"    t = {t:7.1f}/gamma   max |rho(t) - rho_ss| = {dev:.1e}")
