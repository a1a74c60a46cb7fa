"""Determinant full CI used to record reference energies in the manifest.

Determinants are bitmasks over interleaved spin orbitals (alpha on even
bits, beta on odd bits); matrix elements follow the Slater-Condon rules.
"""

from itertools import combinations

import numpy as np


def antisymmetrized_spin_integrals(h1, eri):
    """Spin-orbital h and <pq||rs> from spatial MO integrals."""
    n = h1.shape[0]
    n_so = 2 * n
    h_so = np.zeros((n_so, n_so))
    for p in range(n_so):
        for q in range(n_so):
            if p % 2 == q % 2:
                h_so[p, q] = h1[p // 2, q // 2]
    # <pq|rs> = (pr|qs) with spin matching p~r, q~s
    v = np.zeros((n_so,) * 4)
    for p in range(n_so):
        for q in range(n_so):
            for r in range(n_so):
                for s in range(n_so):
                    direct = 0.0
                    exch = 0.0
                    if p % 2 == r % 2 and q % 2 == s % 2:
                        direct = eri[p // 2, r // 2, q // 2, s // 2]
                    if p % 2 == s % 2 and q % 2 == r % 2:
                        exch = eri[p // 2, s // 2, q // 2, r // 2]
                    v[p, q, r, s] = direct - exch
    return h_so, v


def _occ_list(det, n_so):
    return [k for k in range(n_so) if det >> k & 1]


def _excitation_sign(det, hole, particle):
    """Sign of a_particle^+ a_hole applied to det (hole occupied,
    particle unoccupied)."""
    sign = 1
    d = det
    sign *= (-1) ** bin(d & ((1 << hole) - 1)).count("1")
    d ^= 1 << hole
    sign *= (-1) ** bin(d & ((1 << particle) - 1)).count("1")
    return sign


def slater_condon(det_i, det_j, h_so, v_so, n_so):
    diff = det_i ^ det_j
    n_diff = bin(diff).count("1")
    if n_diff == 0:
        occ = _occ_list(det_i, n_so)
        val = sum(h_so[p, p] for p in occ)
        val += 0.5 * sum(v_so[p, q, p, q] for p in occ for q in occ)
        return val
    if n_diff == 2:
        hole = next(k for k in range(n_so) if det_i >> k & 1 and diff >> k & 1)
        part = next(k for k in range(n_so) if det_j >> k & 1 and diff >> k & 1)
        sign = _excitation_sign(det_i, hole, part)
        occ = [k for k in _occ_list(det_i, n_so) if k != hole]
        val = h_so[part, hole] + sum(v_so[part, q, hole, q] for q in occ)
        return sign * val
    if n_diff == 4:
        holes = [k for k in range(n_so) if det_i >> k & 1 and diff >> k & 1]
        parts = [k for k in range(n_so) if det_j >> k & 1 and diff >> k & 1]
        i, j = holes
        a, b = parts
        # sign of a_b^+ a_a^+ a_j a_i ordering via sequential application
        sign = 1
        d = det_i
        for k in (i, j):
            sign *= (-1) ** bin(d & ((1 << k) - 1)).count("1")
            d ^= 1 << k
        for k in (b, a):
            sign *= (-1) ** bin(d & ((1 << k) - 1)).count("1")
            d ^= 1 << k
        return sign * v_so[a, b, i, j]
    return 0.0


def fci_ground_energy(h1, eri, e_core, n_electrons, sz2=0):
    """Lowest eigenvalue in the (n_electrons, Sz) sector."""
    n = h1.shape[0]
    n_so = 2 * n
    n_alpha = (n_electrons + sz2) // 2
    n_beta = (n_electrons - sz2) // 2
    h_so, v_so = antisymmetrized_spin_integrals(h1, eri)

    dets = []
    for alphas in combinations(range(n), n_alpha):
        mask_a = sum(1 << (2 * p) for p in alphas)
        for betas in combinations(range(n), n_beta):
            dets.append(mask_a + sum(1 << (2 * p + 1) for p in betas))
    dets.sort()

    dim = len(dets)
    ham = np.zeros((dim, dim))
    for a in range(dim):
        for b in range(a + 1):
            val = slater_condon(dets[a], dets[b], h_so, v_so, n_so)
            ham[a, b] = ham[b, a] = val
    return float(np.linalg.eigvalsh(ham)[0]) + e_core
