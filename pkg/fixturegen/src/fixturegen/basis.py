"""STO-3G basis set data and contracted Gaussian construction.

Exponents and contraction coefficients are the standard published STO-3G
parameters (universal contraction coefficients, element-scaled exponents).
Only H, Li, and O are tabulated because the fixture set needs nothing else.
"""

import math

import numpy as np

ANGSTROM_TO_BOHR = 1.0 / 0.529177210903

# Per element: list of (shell_type, [exponents], [coefficients]).
# "sp" shells carry two coefficient sets sharing one exponent set.
STO3G = {
    "H": [
        ("s", [3.42525091, 0.62391373, 0.16885540],
              [0.15432897, 0.53532814, 0.44463454]),
    ],
    "Li": [
        ("s", [16.1195750, 2.9362007, 0.7946505],
              [0.15432897, 0.53532814, 0.44463454]),
        ("sp", [0.6362897, 0.1478601, 0.0480887],
               ([-0.09996723, 0.39951283, 0.70011547],
                [0.15591627, 0.60768372, 0.39195739])),
    ],
    "O": [
        ("s", [130.7093200, 23.8088610, 6.4436083],
              [0.15432897, 0.53532814, 0.44463454]),
        ("sp", [5.0331513, 1.1695961, 0.3803890],
               ([-0.09996723, 0.39951283, 0.70011547],
                [0.15591627, 0.60768372, 0.39195739])),
    ],
}

ATOMIC_NUMBER = {"H": 1, "Li": 3, "O": 8}


def _double_factorial(n):
    if n <= 0:
        return 1
    out = 1
    while n > 0:
        out *= n
        n -= 2
    return out


def primitive_norm(alpha, lmn):
    """Normalization constant of a Cartesian Gaussian primitive."""
    lx, ly, lz = lmn
    l = lx + ly + lz
    num = (2.0 * alpha / math.pi) ** 0.75 * (4.0 * alpha) ** (l / 2.0)
    den = math.sqrt(_double_factorial(2 * lx - 1)
                    * _double_factorial(2 * ly - 1)
                    * _double_factorial(2 * lz - 1))
    return num / den


class BasisFunction:
    """A contracted Cartesian Gaussian centered on an atom."""

    def __init__(self, center, lmn, exponents, coefficients):
        self.center = np.asarray(center, dtype=float)
        self.lmn = tuple(lmn)
        self.exponents = np.asarray(exponents, dtype=float)
        coeffs = np.array([c * primitive_norm(a, self.lmn)
                           for a, c in zip(exponents, coefficients)])
        # Renormalize the contraction so <phi|phi> = 1.
        from .integrals import overlap_contracted
        self.coefficients = coeffs
        s = overlap_contracted(self, self)
        self.coefficients = coeffs / math.sqrt(s)


def build_basis(geometry):
    """Expand a geometry [(element, xyz_angstrom), ...] into basis functions.

    Returns (basis_functions, atoms) where atoms is [(Z, xyz_bohr), ...].
    Basis function order follows atom order, s before p within each shell.
    """
    basis = []
    atoms = []
    for element, xyz in geometry:
        center = np.asarray(xyz, dtype=float) * ANGSTROM_TO_BOHR
        atoms.append((ATOMIC_NUMBER[element], center))
        for shell in STO3G[element]:
            kind, exps = shell[0], shell[1]
            if kind == "s":
                basis.append(BasisFunction(center, (0, 0, 0), exps, shell[2]))
            elif kind == "sp":
                s_coeffs, p_coeffs = shell[2]
                basis.append(BasisFunction(center, (0, 0, 0), exps, s_coeffs))
                for lmn in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]:
                    basis.append(BasisFunction(center, lmn, exps, p_coeffs))
            else:
                raise ValueError(f"unsupported shell type {kind!r}")
    return basis, atoms
