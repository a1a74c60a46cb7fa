"""Excitation manifolds for the EE, IP, and EA sectors.

The reference determinant occupies the lowest spin orbitals, so occupied
indices are 0..n_occ-1 and unoccupied ones n_occ..n_so-1. Entries are
canonically ordered: singles before doubles, lexicographic within each
block. Every entry's adjoint annihilates the reference by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .operators import ExcitationIndex

SECTORS = ("EE", "IP", "EA")


def reference_determinant(n_electrons: int, ms2: int = 0) -> int:
    """Hartree-Fock occupation bitmask in interleaved spin-orbital order."""
    n_alpha = (n_electrons + ms2) // 2
    n_beta = (n_electrons - ms2) // 2
    if n_alpha + n_beta != n_electrons or min(n_alpha, n_beta) < 0:
        raise ValueError(f"inconsistent n_electrons={n_electrons}, ms2={ms2}")
    mask = sum(1 << (2 * p) for p in range(n_alpha))
    mask += sum(1 << (2 * p + 1) for p in range(n_beta))
    return mask


@dataclass(frozen=True)
class Manifold:
    sector: str
    entries: tuple
    n_occ: int
    n_virt: int

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def to_text(self) -> str:
        lines = [f"{self.sector} {entry}" for entry in self.entries]
        return "\n".join(lines) + ("\n" if lines else "")


def enumerate_manifold(sector: str, n_occ: int, n_virt: int,
                       sz_filter: int | None = None) -> Manifold:
    """All single and double state-transfer operators of one sector,
    optionally restricted to a fixed Sz change (twice-Sz units)."""
    if sector not in SECTORS:
        raise ValueError(f"unknown sector {sector!r}")
    if n_occ < 1 or n_virt < 0:
        raise ValueError(f"invalid orbital counts n_occ={n_occ}, "
                         f"n_virt={n_virt}")
    occ = range(n_occ)
    virt = range(n_occ, n_occ + n_virt)

    singles, doubles = [], []
    if sector == "EE":
        singles = [ExcitationIndex("EE1", (i, a)) for i in occ for a in virt]
        doubles = [ExcitationIndex("EE2", (i, j, a, b))
                   for i, j in combinations(occ, 2)
                   for a, b in combinations(virt, 2)]
    elif sector == "IP":
        singles = [ExcitationIndex("IP1", (i,)) for i in occ]
        doubles = [ExcitationIndex("IP2", (i, j, a))
                   for i, j in combinations(occ, 2) for a in virt]
    else:
        singles = [ExcitationIndex("EA1", (a,)) for a in virt]
        doubles = [ExcitationIndex("EA2", (i, a, b))
                   for i in occ for a, b in combinations(virt, 2)]

    entries = singles + doubles
    if sz_filter is not None:
        entries = [e for e in entries if e.delta_sz2() == sz_filter]
    return Manifold(sector=sector, entries=tuple(entries),
                    n_occ=n_occ, n_virt=n_virt)
