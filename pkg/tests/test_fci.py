from math import comb

import numpy as np
import pytest

from qsceom.fci import (fci_energy_differences, fci_sector_spectrum,
                        projected_matrix, sector_determinants)
from qsceom.operators import PauliSum


def _sum_of_z(n):
    return PauliSum(n, {(0, 1 << k): 1.0 for k in range(n)})


def test_sum_of_z_sector_spectrum_analytic():
    """H = sum_k Z_k restricted to weight w: single eigenvalue n - 2w with
    multiplicity C(n, w)."""
    n = 5
    h = _sum_of_z(n)
    for w in range(n + 1):
        spec = fci_sector_spectrum(h, w)
        assert spec.dimension == comb(n, w)
        assert np.allclose(spec.eigenvalues, n - 2 * w, atol=1e-12)


def test_sector_determinants_sz_filter():
    dets = sector_determinants(4, 2, sz2=0)
    assert sorted(int(d) for d in dets) == [0b0011, 0b0110, 0b1001, 0b1100]
    with pytest.raises(ValueError):
        sector_determinants(4, 2, sz2=5)


def test_empty_sector_rejected():
    with pytest.raises(ValueError):
        fci_sector_spectrum(_sum_of_z(3), 7)


def test_dense_cap_enforced():
    with pytest.raises(ValueError):
        fci_sector_spectrum(PauliSum.identity(17), 1)


def test_ground_energy_consistent_with_adapt(h2_problem, h2_gs):
    spec = fci_sector_spectrum(h2_problem.hamiltonian, 2)
    assert h2_gs.energy == pytest.approx(spec.eigenvalues[0], abs=1e-8)
    assert spec.dimension == comb(4, 2)


def test_charged_sector_spectra_exist(h2_problem):
    ip = fci_sector_spectrum(h2_problem.hamiltonian, 1)
    ea = fci_sector_spectrum(h2_problem.hamiltonian, 3)
    assert ip.dimension == 4
    assert ea.dimension == 4
    assert np.all(np.diff(ip.eigenvalues) >= -1e-12)


def test_energy_differences_same_sector_start_at_zero(h2_problem):
    diffs = fci_energy_differences(h2_problem.hamiltonian, (2, 0), (2, 0))
    assert diffs[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.diff(diffs) >= -1e-12)


def test_union_of_sectors_is_full_spectrum(h2_problem):
    h = h2_problem.hamiltonian
    collected = np.concatenate([
        fci_sector_spectrum(h, w).eigenvalues for w in range(5)])
    dets = np.arange(16, dtype=np.uint64)
    full = np.linalg.eigvalsh(projected_matrix(h, dets))
    assert np.max(np.abs(np.sort(collected) - full)) < 1e-9


def test_projection_commutes_with_number_conserving_h(h2_problem):
    # assert_closed must pass for every particle sector
    for w in range(5):
        dets = sector_determinants(4, w)
        projected_matrix(h2_problem.hamiltonian, dets, assert_closed=True)


def test_projection_detects_sector_coupling():
    # X_0 flips qubit 0, leaving any fixed-weight sector
    h = PauliSum(2, {(1, 0): 1.0})
    with pytest.raises(RuntimeError):
        projected_matrix(h, sector_determinants(2, 1), assert_closed=True)
