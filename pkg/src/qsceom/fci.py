"""Exact sector-resolved spectra by dense diagonalization of the qubit
Hamiltonian restricted to fixed particle number (and optionally Sz)."""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .operators import PauliSum

DENSE_QUBIT_CAP = 16
# Pauli coefficients carry ~1e-13 accumulation noise on Hamiltonians with
# norms of tens of Hartree; genuine sector leakage would be orders larger.
CLOSURE_TOL = 1e-9

_ALPHA_MASK = int("55" * 16, 16)  # even bits


def determinant_sz2(det: int) -> int:
    alpha = bin(det & _ALPHA_MASK).count("1")
    beta = bin(det & ~_ALPHA_MASK).count("1")
    return alpha - beta


def sector_determinants(n_qubits: int, n_particles: int,
                        sz2: int | None = None) -> np.ndarray:
    """Sorted basis-state masks with the requested Hamming weight and Sz."""
    idx = np.arange(1 << n_qubits, dtype=np.uint64)
    weights = np.bitwise_count(idx)
    mask = weights == n_particles
    if sz2 is not None:
        alpha = np.bitwise_count(idx & np.uint64(_ALPHA_MASK & ((1 << n_qubits) - 1)))
        mask &= (2 * alpha.astype(int) - n_particles) == sz2
    dets = idx[mask]
    if dets.size == 0:
        raise ValueError(f"empty sector: n_particles={n_particles}, sz2={sz2}")
    return dets


def projected_matrix(hamiltonian: PauliSum, dets: np.ndarray,
                     assert_closed: bool = False) -> np.ndarray:
    """<D_row|H|D_col> over an explicit determinant list.

    With assert_closed the full action of H on the subspace must stay in
    the subspace (true for number-conserving H on a particle-number sector).
    """
    n = hamiltonian.n_qubits
    dim = 1 << n
    dets = np.asarray(dets, dtype=np.uint64)
    ncol = dets.size
    full = np.zeros((dim, ncol), dtype=complex)
    col_range = np.arange(ncol)
    i_powers = (1.0, 1.0j, -1.0, -1.0j)
    for (x, z), coeff in hamiltonian.terms.items():
        rows = (dets ^ np.uint64(x)).astype(np.int64)
        phase = coeff * i_powers[bin(x & z).count("1") % 4]
        signs = 1.0 - 2.0 * (np.bitwise_count(dets & np.uint64(z))
                             & np.uint64(1)).astype(float)
        full[rows, col_range] += phase * signs

    rows = dets.astype(np.int64)
    sector = full[rows, :].copy()
    if assert_closed:
        full[rows, :] = 0.0
        off = float(np.max(np.abs(full))) if full.size else 0.0
        if off > CLOSURE_TOL:
            raise RuntimeError(
                "Hamiltonian couples the sector to its complement "
                f"(max off-sector element {off})")
    return sector


@dataclass
class SectorSpectrum:
    n_particles: int
    sz2: int | None
    eigenvalues: np.ndarray
    dimension: int


def fci_sector_spectrum(hamiltonian: PauliSum, n_particles: int,
                        sz2: int | None = None) -> SectorSpectrum:
    """All eigenvalues of H restricted to one (N, Sz) sector."""
    n = hamiltonian.n_qubits
    if n > DENSE_QUBIT_CAP:
        raise ValueError(f"dense diagonalization capped at {DENSE_QUBIT_CAP} "
                         f"qubits, got {n}")
    if not 0 <= n_particles <= n:
        raise ValueError(f"invalid particle count {n_particles}")
    dets = sector_determinants(n, n_particles, sz2)
    mat = projected_matrix(hamiltonian, dets, assert_closed=True)
    herm_defect = np.max(np.abs(mat - mat.conj().T))
    if herm_defect > 1e-9:
        raise RuntimeError(f"sector Hamiltonian not Hermitian ({herm_defect})")
    eigenvalues = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    return SectorSpectrum(n_particles=n_particles, sz2=sz2,
                          eigenvalues=eigenvalues, dimension=dets.size)


def fci_energy_differences(hamiltonian: PauliSum, ground_sector,
                           target_sector) -> np.ndarray:
    """E_k(target) - E_0(ground), ascending.

    Sectors are (n_particles, sz2) pairs; sz2 may be None for no filter.
    """
    gn, gsz = ground_sector
    tn, tsz = target_sector
    e0 = fci_sector_spectrum(hamiltonian, gn, gsz).eigenvalues[0]
    target = fci_sector_spectrum(hamiltonian, tn, tsz).eigenvalues
    return np.sort(target - e0)
