"""Restricted Hartree-Fock with DIIS, plus the AO->MO transformation."""

import numpy as np


class SCFError(RuntimeError):
    pass


def restricted_hartree_fock(s, hcore, eri, e_nuc, n_electrons,
                            max_iter=200, conv_tol=1e-12):
    """Closed-shell RHF. Returns (e_total, mo_coeff, mo_energy).

    Raises SCFError if the energy fails to converge to conv_tol.
    """
    if n_electrons % 2 != 0:
        raise SCFError("RHF requires an even electron count")
    n_occ = n_electrons // 2
    n = s.shape[0]

    s_val, s_vec = np.linalg.eigh(s)
    if np.min(s_val) < 1e-10:
        raise SCFError("AO overlap is numerically singular")
    x = s_vec @ np.diag(s_val ** -0.5) @ s_vec.T

    def fock_matrix(dm):
        j = np.einsum("pqrs,rs->pq", eri, dm)
        k = np.einsum("prqs,rs->pq", eri, dm)
        return hcore + j - 0.5 * k

    def density(c):
        c_occ = c[:, :n_occ]
        return 2.0 * c_occ @ c_occ.T

    # Core guess.
    e_mo, c_ortho = np.linalg.eigh(x.T @ hcore @ x)
    c = x @ c_ortho
    dm = density(c)

    energy = 0.0
    diis_f, diis_e = [], []
    for _ in range(max_iter):
        f = fock_matrix(dm)
        err = x.T @ (f @ dm @ s - s @ dm @ f) @ x
        diis_f.append(f)
        diis_e.append(err)
        if len(diis_f) > 8:
            diis_f.pop(0)
            diis_e.pop(0)
        if len(diis_f) > 1:
            m = len(diis_f)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    b[i, j] = np.sum(diis_e[i] * diis_e[j])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(b, rhs)[:m]
                f = sum(wi * fi for wi, fi in zip(w, diis_f))
            except np.linalg.LinAlgError:
                pass

        e_mo, c_ortho = np.linalg.eigh(x.T @ f @ x)
        c = x @ c_ortho
        dm = density(c)
        e_new = 0.5 * np.sum(dm * (hcore + fock_matrix(dm))) + e_nuc
        if abs(e_new - energy) < conv_tol and len(diis_f) > 2:
            # Fix MO phases so regeneration is deterministic.
            for k in range(n):
                imax = int(np.argmax(np.abs(c[:, k])))
                if c[imax, k] < 0:
                    c[:, k] = -c[:, k]
            return e_new, c, e_mo
        energy = e_new
    raise SCFError(f"SCF did not converge in {max_iter} iterations")


def mo_integrals(hcore, eri, mo_coeff):
    """Transform AO integrals to the MO basis (chemists' notation ERI)."""
    c = mo_coeff
    h1 = c.T @ hcore @ c
    tmp = np.einsum("pqrs,pi->iqrs", eri, c, optimize=True)
    tmp = np.einsum("iqrs,qj->ijrs", tmp, c, optimize=True)
    tmp = np.einsum("ijrs,rk->ijks", tmp, c, optimize=True)
    eri_mo = np.einsum("ijks,sl->ijkl", tmp, c, optimize=True)
    return h1, eri_mo
