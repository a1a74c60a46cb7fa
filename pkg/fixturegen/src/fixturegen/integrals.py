"""Molecular integrals over contracted Cartesian Gaussians.

McMurchie-Davidson scheme: Hermite expansion coefficients for overlap-type
quantities and Hermite Coulomb integrals (via the Boys function) for the
nuclear-attraction and electron-repulsion integrals. Exact for any angular
momentum; the fixture basis only exercises s and p.
"""

import math

import numpy as np
from scipy.special import hyp1f1


def boys(n, x):
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0)


def hermite_expansion(i, j, t, qx, a, b):
    """Expansion coefficient E_t^{ij} of a 1D Gaussian product in Hermite
    Gaussians; qx = Ax - Bx."""
    p = a + b
    mu = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-mu * qx * qx)
    if j == 0:
        # decrement i
        return (hermite_expansion(i - 1, j, t - 1, qx, a, b) / (2.0 * p)
                - (mu * qx / a) * hermite_expansion(i - 1, j, t, qx, a, b)
                + (t + 1) * hermite_expansion(i - 1, j, t + 1, qx, a, b))
    # decrement j
    return (hermite_expansion(i, j - 1, t - 1, qx, a, b) / (2.0 * p)
            + (mu * qx / b) * hermite_expansion(i, j - 1, t, qx, a, b)
            + (t + 1) * hermite_expansion(i, j - 1, t + 1, qx, a, b))


def hermite_coulomb(t, u, v, n, p, pcx, pcy, pcz, r2):
    """Auxiliary Hermite Coulomb integral R^n_{tuv}."""
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, p * r2)
    if t > 0:
        return ((t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, pcx, pcy, pcz, r2)
                + pcx * hermite_coulomb(t - 1, u, v, n + 1, p, pcx, pcy, pcz, r2))
    if u > 0:
        return ((u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, pcx, pcy, pcz, r2)
                + pcy * hermite_coulomb(t, u - 1, v, n + 1, p, pcx, pcy, pcz, r2))
    return ((v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, pcx, pcy, pcz, r2)
            + pcz * hermite_coulomb(t, u, v - 1, n + 1, p, pcx, pcy, pcz, r2))


def _overlap_primitive(a, lmn1, ra, b, lmn2, rb):
    p = a + b
    s = (math.pi / p) ** 1.5
    for k in range(3):
        s *= hermite_expansion(lmn1[k], lmn2[k], 0, ra[k] - rb[k], a, b)
    return s


def overlap_contracted(f1, f2):
    s = 0.0
    for a, ca in zip(f1.exponents, f1.coefficients):
        for b, cb in zip(f2.exponents, f2.coefficients):
            s += ca * cb * _overlap_primitive(a, f1.lmn, f1.center,
                                              b, f2.lmn, f2.center)
    return s


def _kinetic_primitive(a, lmn1, ra, b, lmn2, rb):
    def s1d(i, j, k):
        return hermite_expansion(i, j, 0, ra[k] - rb[k], a, b)

    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    p = a + b
    pref = (math.pi / p) ** 1.5

    def t1d(i, j, k):
        term = b * (2 * j + 1) * s1d(i, j, k)
        term -= 2.0 * b * b * s1d(i, j + 2, k)
        if j >= 2:
            term -= 0.5 * j * (j - 1) * s1d(i, j - 2, k)
        return term

    tx = t1d(l1, l2, 0) * s1d(m1, m2, 1) * s1d(n1, n2, 2)
    ty = s1d(l1, l2, 0) * t1d(m1, m2, 1) * s1d(n1, n2, 2)
    tz = s1d(l1, l2, 0) * s1d(m1, m2, 1) * t1d(n1, n2, 2)
    return pref * (tx + ty + tz)


def kinetic_contracted(f1, f2):
    t = 0.0
    for a, ca in zip(f1.exponents, f1.coefficients):
        for b, cb in zip(f2.exponents, f2.coefficients):
            t += ca * cb * _kinetic_primitive(a, f1.lmn, f1.center,
                                              b, f2.lmn, f2.center)
    return t


def _nuclear_primitive(a, lmn1, ra, b, lmn2, rb, rc):
    p = a + b
    rp = (a * ra + b * rb) / p
    pc = rp - rc
    r2 = float(pc @ pc)
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    val = 0.0
    for t in range(l1 + l2 + 1):
        et = hermite_expansion(l1, l2, t, ra[0] - rb[0], a, b)
        for u in range(m1 + m2 + 1):
            eu = hermite_expansion(m1, m2, u, ra[1] - rb[1], a, b)
            for v in range(n1 + n2 + 1):
                ev = hermite_expansion(n1, n2, v, ra[2] - rb[2], a, b)
                val += et * eu * ev * hermite_coulomb(
                    t, u, v, 0, p, pc[0], pc[1], pc[2], r2)
    return 2.0 * math.pi / p * val


def nuclear_contracted(f1, f2, atoms):
    v = 0.0
    for a, ca in zip(f1.exponents, f1.coefficients):
        for b, cb in zip(f2.exponents, f2.coefficients):
            for z, rc in atoms:
                v -= z * ca * cb * _nuclear_primitive(
                    a, f1.lmn, f1.center, b, f2.lmn, f2.center, rc)
    return v


def _eri_primitive(a, lmn1, ra, b, lmn2, rb, c, lmn3, rc, d, lmn4, rd):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    pq = rp - rq
    r2 = float(pq @ pq)
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    l3, m3, n3 = lmn3
    l4, m4, n4 = lmn4

    e_bra = [[hermite_expansion(l1, l2, t, ra[0] - rb[0], a, b)
              for t in range(l1 + l2 + 1)],
             [hermite_expansion(m1, m2, u, ra[1] - rb[1], a, b)
              for u in range(m1 + m2 + 1)],
             [hermite_expansion(n1, n2, v, ra[2] - rb[2], a, b)
              for v in range(n1 + n2 + 1)]]
    e_ket = [[hermite_expansion(l3, l4, t, rc[0] - rd[0], c, d)
              for t in range(l3 + l4 + 1)],
             [hermite_expansion(m3, m4, u, rc[1] - rd[1], c, d)
              for u in range(m3 + m4 + 1)],
             [hermite_expansion(n3, n4, v, rc[2] - rd[2], c, d)
              for v in range(n3 + n4 + 1)]]

    val = 0.0
    for t in range(l1 + l2 + 1):
        for u in range(m1 + m2 + 1):
            for v in range(n1 + n2 + 1):
                ebra = e_bra[0][t] * e_bra[1][u] * e_bra[2][v]
                if ebra == 0.0:
                    continue
                for tau in range(l3 + l4 + 1):
                    for nu in range(m3 + m4 + 1):
                        for phi in range(n3 + n4 + 1):
                            eket = e_ket[0][tau] * e_ket[1][nu] * e_ket[2][phi]
                            if eket == 0.0:
                                continue
                            sign = (-1.0) ** (tau + nu + phi)
                            val += ebra * eket * sign * hermite_coulomb(
                                t + tau, u + nu, v + phi, 0, alpha,
                                pq[0], pq[1], pq[2], r2)
    val *= 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))
    return val


def eri_contracted(f1, f2, f3, f4):
    """Two-electron repulsion integral (f1 f2 | f3 f4), chemists' notation."""
    val = 0.0
    for a, ca in zip(f1.exponents, f1.coefficients):
        for b, cb in zip(f2.exponents, f2.coefficients):
            for c, cc in zip(f3.exponents, f3.coefficients):
                for d, cd in zip(f4.exponents, f4.coefficients):
                    val += ca * cb * cc * cd * _eri_primitive(
                        a, f1.lmn, f1.center, b, f2.lmn, f2.center,
                        c, f3.lmn, f3.center, d, f4.lmn, f4.center)
    return val


def integral_tensors(basis, atoms):
    """All AO integrals: overlap, core Hamiltonian, ERI tensor, E_nuc."""
    n = len(basis)
    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s[i, j] = s[j, i] = overlap_contracted(basis[i], basis[j])
            t[i, j] = t[j, i] = kinetic_contracted(basis[i], basis[j])
            v[i, j] = v[j, i] = nuclear_contracted(basis[i], basis[j], atoms)

    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if (i * (i + 1) // 2 + j) < (k * (k + 1) // 2 + l):
                        continue
                    val = eri_contracted(basis[i], basis[j], basis[k], basis[l])
                    for (p, q) in ((i, j), (j, i)):
                        for (r, w) in ((k, l), (l, k)):
                            eri[p, q, r, w] = val
                            eri[r, w, p, q] = val

    e_nuc = 0.0
    for a in range(len(atoms)):
        for b in range(a):
            za, ra = atoms[a]
            zb, rb = atoms[b]
            e_nuc += za * zb / float(np.linalg.norm(ra - rb))
    return s, t + v, eri, e_nuc
