"""FCIDUMP parsing, frozen-core reduction, and spin-orbital expansion."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-10
DUPLICATE_TOL = 1e-8


class FcidumpError(ValueError):
    """Base class for FCIDUMP format errors."""


class FcidumpParseError(FcidumpError):
    pass


class FcidumpBoundsError(FcidumpError):
    pass


class FcidumpConsistencyError(FcidumpError):
    pass


@dataclass
class MolecularIntegrals:
    """Spatial-orbital integrals in Hartree; eri in chemists' notation (pq|rs)."""

    n_spatial: int
    n_electrons: int
    ms2: int
    e_core: float
    h1: np.ndarray
    eri: np.ndarray

    def __post_init__(self):
        n = self.n_spatial
        if self.h1.shape != (n, n) or self.eri.shape != (n, n, n, n):
            raise ValueError("integral tensor shapes do not match n_spatial")
        if not (0 < self.n_electrons <= 2 * n):
            raise ValueError(f"invalid electron count {self.n_electrons} "
                             f"for {n} orbitals")
        if np.max(np.abs(self.h1 - self.h1.T)) > SYMMETRY_TOL:
            raise ValueError("h1 is not symmetric")
        for perm in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)]:
            if np.max(np.abs(self.eri - self.eri.transpose(perm))) > SYMMETRY_TOL:
                raise ValueError(f"eri violates permutation symmetry {perm}")

    def copy(self) -> "MolecularIntegrals":
        return MolecularIntegrals(self.n_spatial, self.n_electrons, self.ms2,
                                  self.e_core, self.h1.copy(), self.eri.copy())


@dataclass
class SpinOrbitalHamiltonianCoefficients:
    """Antisymmetrized spin-orbital coefficients, interleaved ordering
    (alpha on even indices, beta on odd)."""

    n_so: int
    h_so: np.ndarray
    v_asym: np.ndarray
    e_core: float

    def __post_init__(self):
        n = self.n_so
        v = self.v_asym
        checks = [
            np.max(np.abs(v + v.transpose(1, 0, 2, 3))),
            np.max(np.abs(v + v.transpose(0, 1, 3, 2))),
            np.max(np.abs(v - v.transpose(2, 3, 0, 1).conj())),
        ]
        if max(checks) > SYMMETRY_TOL:
            raise ValueError("v_asym violates antisymmetry relations")
        if self.h_so.shape != (n, n) or v.shape != (n, n, n, n):
            raise ValueError("spin-orbital tensor shapes do not match n_so")


_EIGHT_FOLD = [
    lambda i, j, k, l: (i, j, k, l),
    lambda i, j, k, l: (j, i, k, l),
    lambda i, j, k, l: (i, j, l, k),
    lambda i, j, k, l: (j, i, l, k),
    lambda i, j, k, l: (k, l, i, j),
    lambda i, j, k, l: (l, k, i, j),
    lambda i, j, k, l: (k, l, j, i),
    lambda i, j, k, l: (l, k, j, i),
]


def parse_fcidump(text: str) -> MolecularIntegrals:
    """Parse FCIDUMP text (namelist header plus `value i j k l` records)."""
    lines = text.splitlines()
    header_lines = []
    body_start = None
    for idx, line in enumerate(lines):
        header_lines.append(line)
        if "&END" in line.upper() or line.strip() == "/":
            body_start = idx + 1
            break
    if body_start is None:
        raise FcidumpParseError("header not terminated by &END or /")

    header = " ".join(header_lines)

    def int_key(name, required, default=None):
        match = re.search(rf"{name}\s*=\s*(-?\d+)", header, re.IGNORECASE)
        if match is None:
            if required:
                raise FcidumpParseError(f"missing or malformed header key {name}")
            return default
        return int(match.group(1))

    n_orb = int_key("NORB", required=True)
    n_elec = int_key("NELEC", required=True)
    ms2 = int_key("MS2", required=False, default=0)
    if n_orb <= 0:
        raise FcidumpParseError("NORB must be positive")

    h1 = np.zeros((n_orb, n_orb))
    eri = np.zeros((n_orb, n_orb, n_orb, n_orb))
    e_core = 0.0
    seen = {}

    def record(kind, key, value):
        if key in seen and abs(seen[key] - value) > DUPLICATE_TOL:
            raise FcidumpConsistencyError(
                f"conflicting duplicate {kind} entry {key}: "
                f"{seen[key]!r} vs {value!r}")
        seen[key] = value

    for raw in lines[body_start:]:
        stripped = raw.strip()
        if not stripped:
            continue
        fields = stripped.split()
        if len(fields) != 5:
            raise FcidumpParseError(f"malformed integral record: {raw!r}")
        try:
            value = float(fields[0])
            i, j, k, l = (int(f) for f in fields[1:])
        except ValueError as exc:
            if "(" in fields[0]:
                raise FcidumpParseError(
                    "complex-valued FCIDUMP entries are not supported") from exc
            raise FcidumpParseError(f"malformed integral record: {raw!r}") from exc
        for idx in (i, j, k, l):
            if idx < 0 or idx > n_orb:
                raise FcidumpBoundsError(
                    f"orbital index {idx} exceeds NORB={n_orb}")
        if i == j == k == l == 0:
            record("core", ("core",), value)
            e_core = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpParseError(f"invalid one-electron record: {raw!r}")
            key = ("h1", max(i, j), min(i, j))
            record("h1", key, value)
            h1[i - 1, j - 1] = value
            h1[j - 1, i - 1] = value
        elif min(i, j, k, l) == 0:
            raise FcidumpParseError(f"invalid integral record: {raw!r}")
        else:
            canon = min(perm(i, j, k, l) for perm in _EIGHT_FOLD)
            record("eri", ("eri",) + canon, value)
            for perm in _EIGHT_FOLD:
                p, q, r, s = perm(i, j, k, l)
                eri[p - 1, q - 1, r - 1, s - 1] = value

    return MolecularIntegrals(n_orb, n_elec, ms2, e_core, h1, eri)


def write_fcidump(mi: MolecularIntegrals) -> str:
    """Serialize integrals back to FCIDUMP text (round-trips with
    parse_fcidump)."""
    n = mi.n_spatial
    lines = [f" &FCI NORB={n:4d},NELEC={mi.n_electrons:3d},MS2={mi.ms2:2d},",
             "  ORBSYM=" + "1," * n,
             "  ISYM=1,",
             " &END"]
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                for l in range(k + 1):
                    if ij < k * (k + 1) // 2 + l:
                        continue
                    v = mi.eri[i, j, k, l]
                    if abs(v) > 1e-14:
                        lines.append(f"{v: .17e} {i + 1:4d} {j + 1:4d} "
                                     f"{k + 1:4d} {l + 1:4d}")
    for i in range(n):
        for j in range(i + 1):
            if abs(mi.h1[i, j]) > 1e-14:
                lines.append(f"{mi.h1[i, j]: .17e} {i + 1:4d} {j + 1:4d} "
                             f"{0:4d} {0:4d}")
    lines.append(f"{mi.e_core: .17e} {0:4d} {0:4d} {0:4d} {0:4d}")
    return "\n".join(lines) + "\n"


def freeze_core(mi: MolecularIntegrals, n_frozen: int) -> MolecularIntegrals:
    """Fold the lowest n_frozen doubly-occupied spatial orbitals into an
    effective one-electron operator and the scalar core energy."""
    if n_frozen < 0 or 2 * n_frozen > mi.n_electrons:
        raise ValueError(f"cannot freeze {n_frozen} orbitals with "
                         f"{mi.n_electrons} electrons")
    if n_frozen == 0:
        return mi.copy()

    frozen = range(n_frozen)
    e_core = mi.e_core
    e_core += 2.0 * sum(mi.h1[i, i] for i in frozen)
    e_core += sum(2.0 * mi.eri[i, i, j, j] - mi.eri[i, j, j, i]
                  for i in frozen for j in frozen)

    active = slice(n_frozen, mi.n_spatial)
    h_eff = mi.h1[active, active].copy()
    for i in frozen:
        h_eff += 2.0 * mi.eri[active, active, i, i] - mi.eri[active, i, i, active]

    return MolecularIntegrals(
        n_spatial=mi.n_spatial - n_frozen,
        n_electrons=mi.n_electrons - 2 * n_frozen,
        ms2=mi.ms2,
        e_core=e_core,
        h1=h_eff,
        eri=mi.eri[active, active, active, active].copy(),
    )


def to_spin_orbitals(mi: MolecularIntegrals) -> SpinOrbitalHamiltonianCoefficients:
    """Expand spatial integrals to antisymmetrized spin-orbital tensors.

    Interleaved ordering k = 2p + s (s = 0 alpha, 1 beta);
    <pq||rs> = (pr|qs) delta-spin - (ps|qr) delta-spin.
    """
    n_so = 2 * mi.n_spatial
    spatial = np.arange(n_so) // 2
    spin = np.arange(n_so) % 2

    h_so = np.kron(mi.h1, np.eye(2))

    expanded = mi.eri[np.ix_(spatial, spatial, spatial, spatial)]
    same = (spin[:, None] == spin[None, :])
    direct = np.transpose(expanded, (0, 2, 1, 3)) \
        * same[:, None, :, None] * same[None, :, None, :]
    exchange = np.transpose(expanded, (0, 2, 3, 1)) \
        * same[:, None, None, :] * same[None, :, :, None]
    return SpinOrbitalHamiltonianCoefficients(
        n_so=n_so, h_so=h_so, v_asym=direct - exchange, e_core=mi.e_core)


def direct_sum(a: MolecularIntegrals, b: MolecularIntegrals):
    """Non-interacting composite of two fragments (all cross integrals zero).

    Orbitals are reordered [occ_a, occ_b, virt_a, virt_b] so the composite
    Hartree-Fock reference occupies the lowest orbitals. Returns the
    composite integrals plus the new spatial-orbital indices of each
    fragment's orbitals (in the fragment's original order).
    """
    for mi in (a, b):
        if mi.n_electrons % 2 or mi.ms2 != 0:
            raise ValueError("direct_sum requires closed-shell fragments")
    occ_a, occ_b = a.n_electrons // 2, b.n_electrons // 2
    n = a.n_spatial + b.n_spatial

    map_a = [p if p < occ_a else occ_a + occ_b + (p - occ_a)
             for p in range(a.n_spatial)]
    map_b = [occ_a + q if q < occ_b
             else occ_a + occ_b + (a.n_spatial - occ_a) + (q - occ_b)
             for q in range(b.n_spatial)]

    h1 = np.zeros((n, n))
    eri = np.zeros((n, n, n, n))
    h1[np.ix_(map_a, map_a)] = a.h1
    h1[np.ix_(map_b, map_b)] = b.h1
    eri[np.ix_(map_a, map_a, map_a, map_a)] = a.eri
    eri[np.ix_(map_b, map_b, map_b, map_b)] = b.eri

    composite = MolecularIntegrals(
        n_spatial=n,
        n_electrons=a.n_electrons + b.n_electrons,
        ms2=0,
        e_core=a.e_core + b.e_core,
        h1=h1,
        eri=eri,
    )
    return composite, (tuple(map_a), tuple(map_b))
