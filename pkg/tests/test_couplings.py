import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dipolechain.chain import ChainConfig
from dipolechain.couplings import (CoincidentAtoms, build_couplings, collective_decay,
                                   dipole_shift, xi)

PI = np.pi


def _decay_mp(x, m=0):
    # high-precision evaluation of the same closed form, independent of the series branch
    mpmath.mp.dps = 50
    x = mpmath.mpf(x)
    m2 = mpmath.mpf(m) ** 2
    val = mpmath.mpf(3) / 2 * ((1 - m2) * mpmath.sin(x) / x
                               + (1 - 3 * m2) * (mpmath.cos(x) / x ** 2 - mpmath.sin(x) / x ** 3))
    return float(val)


@pytest.mark.parametrize("r, expected", [(0.25, PI / 2), (0.5, PI), (1.0, 2 * PI)])
def test_xi(r, expected):
    assert xi(r) == pytest.approx(expected, rel=1e-15)


def test_xi_rejects_non_positive():
    with pytest.raises(CoincidentAtoms):
        xi(0.0)


def test_collective_decay_examples():
    assert abs(collective_decay(1e-6, 0.0) - 1.0) < 1e-9
    assert collective_decay(PI / 2) == pytest.approx(1.5 * (2 / PI - (2 / PI) ** 3), abs=1e-12)
    assert collective_decay(PI / 2) == pytest.approx(0.56791, abs=1e-5)
    assert collective_decay(PI) == pytest.approx(-3 / (2 * PI ** 2), abs=1e-12)


def test_dipole_shift_examples():
    assert dipole_shift(PI / 2) == pytest.approx(3 / PI ** 2, abs=1e-12)
    assert dipole_shift(PI) == pytest.approx(0.75 * (1 / PI - 1 / PI ** 3), abs=1e-12)
    assert dipole_shift(PI) == pytest.approx(0.21454, abs=1e-5)
    assert dipole_shift(0.01) == pytest.approx(0.75 * 0.01 ** -3, rel=1e-3)


@pytest.mark.parametrize("func", [collective_decay, dipole_shift])
def test_non_positive_xi_rejected(func):
    with pytest.raises(CoincidentAtoms):
        func(0.0)
    with pytest.raises(CoincidentAtoms):
        func(-1.0)


def test_small_and_large_separation_limits():
    assert abs(collective_decay(1e-6, 0) - 1) < 1e-9
    assert dipole_shift(1e-3, 0) * 1e-3 ** 3 == pytest.approx(0.75, rel=0.01)
    assert abs(collective_decay(1e3)) < 1e-2
    assert abs(dipole_shift(1e3)) < 1e-2


@pytest.mark.parametrize("x", [1e-6, 1e-3, 0.05, 0.0999, 0.1, 0.1001, 0.3, 1.0, 3.0])
@pytest.mark.parametrize("m", [0.0, 0.5, 1.0])
def test_collective_decay_matches_high_precision(x, m):
    assert collective_decay(x, m) == pytest.approx(_decay_mp(x, m), abs=1e-13)


def test_parallel_dipole_branch():
    # mu along the axis: only the near-field bracket survives, with weight -2
    x = PI / 2
    assert collective_decay(x, 1.0) == pytest.approx(3 / x ** 3, rel=1e-12)
    assert dipole_shift(x, 1.0) == pytest.approx(-1.5 / x ** 2, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=2 * PI * 0.01, max_value=200.0))
def test_decay_bounded_by_single_atom_rate(x):
    assert abs(collective_decay(x)) <= 1.0


def test_build_couplings_two_atoms():
    cpl = build_couplings(ChainConfig(2, 0.25))
    np.testing.assert_allclose(cpl.gamma, [[1, 0.56791], [0.56791, 1]], atol=1e-5)
    np.testing.assert_allclose(cpl.omega, [[0, 3 / PI ** 2], [3 / PI ** 2, 0]], atol=1e-12)


def test_build_couplings_single_atom():
    cpl = build_couplings(ChainConfig(1, 0.25))
    assert cpl.gamma.tolist() == [[1.0]]
    assert cpl.omega.tolist() == [[0.0]]


def test_build_couplings_three_atoms_next_nearest():
    cpl = build_couplings(ChainConfig(3, 0.25))
    assert cpl.gamma[0, 2] == pytest.approx(-3 / (2 * PI ** 2), abs=1e-12)
    assert cpl.gamma[0, 2] == pytest.approx(-0.15198, abs=1e-5)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("d", [0.125, 0.25, 0.5, 1.0])
def test_coupling_invariants(n, d):
    cpl = build_couplings(ChainConfig(n, d))
    for m in (cpl.gamma, cpl.omega):
        np.testing.assert_array_equal(m, m.T)
    np.testing.assert_array_equal(np.diag(cpl.gamma), 1.0)
    np.testing.assert_array_equal(np.diag(cpl.omega), 0.0)
    assert np.all(np.abs(cpl.gamma) <= 1.0)
    assert np.linalg.eigvalsh(cpl.gamma).min() >= -1e-10
    # Toeplitz: entries depend on |i - j| only
    for k in range(1, n):
        assert np.ptp(np.diagonal(cpl.gamma, k)) == 0
        assert np.ptp(np.diagonal(cpl.omega, k)) == 0
