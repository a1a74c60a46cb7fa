"""Fermionic and qubit operator algebra.

Pauli strings are stored symplectically as (x, z) bitmask pairs so that
products, phases, and statevector application reduce to integer bit
arithmetic. With the convention P(x, z) = i^{x.z} X^x Z^z every stored
string is Hermitian (I, X, Y, Z per qubit), so Hermitian conjugation of a
sum only conjugates coefficients.

Jordan-Wigner mapping:
    a_p^+ -> (X_p - i Y_p)/2 (x) Z_{p-1} ... Z_0
    a_p   -> (X_p + i Y_p)/2 (x) Z_{p-1} ... Z_0
with qubit k occupied <=> bit k set <=> Z_k eigenvalue -1.
"""

from __future__ import annotations

from dataclasses import dataclass

PRUNE_THRESHOLD = 1e-12

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Pauli operators."""

    n_qubits: int
    x: int
    z: int

    def __post_init__(self):
        if self.x >> self.n_qubits or self.z >> self.n_qubits:
            raise ValueError("Pauli mask exceeds qubit count")

    @property
    def letters(self) -> str:
        """Per-qubit symbols ordered qubit 0 ... n-1."""
        return "".join(_LETTERS[(self.x >> k & 1, self.z >> k & 1)]
                       for k in range(self.n_qubits))

    def __str__(self):
        # written qubit (n-1) ... 0, matching bitstring notation
        return self.letters[::-1]

    @classmethod
    def from_letters(cls, text: str) -> "PauliString":
        """Parse symbols written qubit (n-1) ... 0."""
        n = len(text)
        x = z = 0
        for k, ch in enumerate(reversed(text)):
            if ch == "X":
                x |= 1 << k
            elif ch == "Y":
                x |= 1 << k
                z |= 1 << k
            elif ch == "Z":
                z |= 1 << k
            elif ch != "I":
                raise ValueError(f"invalid Pauli letter {ch!r}")
        return cls(n, x, z)


def _phase_power(x1, z1, x2, z2):
    """Power of i picked up when multiplying P(x1,z1) * P(x2,z2)."""
    x3 = x1 ^ x2
    z3 = z1 ^ z2
    k = (bin(x1 & z1).count("1") + bin(x2 & z2).count("1")
         - bin(x3 & z3).count("1") + 2 * bin(z1 & x2).count("1"))
    return k % 4


_I_POWERS = (1.0, 1.0j, -1.0, -1.0j)


class PauliSum:
    """Sparse complex-weighted sum of Pauli strings on a fixed register.

    Instances are treated as immutable: every operation returns a new,
    canonicalized (merged and pruned) sum.
    """

    __slots__ = ("n_qubits", "terms")

    def __init__(self, n_qubits: int, terms=None, prune: bool = True):
        self.n_qubits = n_qubits
        raw = dict(terms) if terms else {}
        if prune:
            raw = {k: v for k, v in raw.items()
                   if abs(v) >= PRUNE_THRESHOLD}
        self.terms = raw

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int, coeff=1.0) -> "PauliSum":
        return cls(n_qubits, {(0, 0): complex(coeff)})

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits, {})

    @classmethod
    def from_string(cls, string: PauliString, coeff=1.0) -> "PauliSum":
        return cls(string.n_qubits, {(string.x, string.z): complex(coeff)})

    # -- inspection ---------------------------------------------------

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        """Yield (PauliString, coeff) in lexicographic letter order."""
        for (x, z) in sorted(self.terms,
                             key=lambda t: PauliString(self.n_qubits, *t).letters):
            yield PauliString(self.n_qubits, x, z), self.terms[(x, z)]

    def coefficient(self, string: PauliString) -> complex:
        return self.terms.get((string.x, string.z), 0.0 + 0.0j)

    def norm_inf(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self.terms.values())

    def __str__(self):
        parts = [f"({c.real:+.6g}{c.imag:+.6g}j) {s}" for s, c in self]
        return " + ".join(parts) if parts else "0"

    # -- algebra ------------------------------------------------------

    def _require_same_register(self, other):
        if self.n_qubits != other.n_qubits:
            raise ValueError("PauliSum qubit counts differ: "
                             f"{self.n_qubits} vs {other.n_qubits}")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._require_same_register(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0.0) + c
        return PauliSum(self.n_qubits, out)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __rmul__(self, scalar) -> "PauliSum":
        return PauliSum(self.n_qubits,
                        {k: scalar * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, PauliSum):
            return PauliSum(self.n_qubits,
                            {k: other * v for k, v in self.terms.items()})
        self._require_same_register(other)
        out = {}
        for (x1, z1), c1 in self.terms.items():
            for (x2, z2), c2 in other.terms.items():
                key = (x1 ^ x2, z1 ^ z2)
                c = c1 * c2 * _I_POWERS[_phase_power(x1, z1, x2, z2)]
                out[key] = out.get(key, 0.0) + c
        return PauliSum(self.n_qubits, out)

    def conjugate(self) -> "PauliSum":
        """Hermitian conjugate (strings are Hermitian; conjugate coefficients)."""
        return PauliSum(self.n_qubits,
                        {k: v.conjugate() for k, v in self.terms.items()})

    # -- text dump ----------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{c.real:.17e} {c.imag:.17e} {s}" for s, c in self]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "PauliSum":
        terms = {}
        n = None
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            re_part, im_part, letters = line.split()
            string = PauliString.from_letters(letters)
            if n is None:
                n = string.n_qubits
            elif n != string.n_qubits:
                raise ValueError("inconsistent qubit counts in Pauli dump")
            terms[(string.x, string.z)] = complex(float(re_part),
                                                  float(im_part))
        if n is None:
            raise ValueError("empty Pauli dump")
        return cls(n, terms)


def pauli_add(a: PauliSum, b: PauliSum) -> PauliSum:
    return a + b


def pauli_multiply(a: PauliSum, b: PauliSum) -> PauliSum:
    return a * b


def pauli_commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return a * b - b * a


def hermitian_conjugate(a: PauliSum) -> PauliSum:
    return a.conjugate()


# ---------------------------------------------------------------------
# Fermionic operators
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class FermionTerm:
    """Product of ladder operators with a coefficient.

    ops is an ordered tuple of (spin-orbital index, creation flag); the
    leftmost factor acts last, matching the written operator order.
    """

    ops: tuple
    coefficient: complex = 1.0

    def adjoint(self) -> "FermionTerm":
        flipped = tuple((idx, not cre) for idx, cre in reversed(self.ops))
        return FermionTerm(flipped, complex(self.coefficient).conjugate())


def _ladder(index: int, creation: bool, n_qubits: int) -> PauliSum:
    z_string = (1 << index) - 1
    x = 1 << index
    sign = -1.0 if creation else 1.0
    return PauliSum(n_qubits, {
        (x, z_string): 0.5,
        (x, z_string | x): sign * 0.5j,
    })


def jordan_wigner(term: FermionTerm, n_qubits: int) -> PauliSum:
    """Map a ladder-operator product to its qubit representation."""
    acc = PauliSum.identity(n_qubits, term.coefficient)
    for index, creation in term.ops:
        if index >= n_qubits or index < 0:
            raise ValueError(f"spin-orbital index {index} out of range "
                             f"for {n_qubits} qubits")
        acc = acc * _ladder(index, creation, n_qubits)
    return acc


def jordan_wigner_sum(terms, n_qubits: int) -> PauliSum:
    acc = PauliSum.zero(n_qubits)
    for term in terms:
        acc = acc + jordan_wigner(term, n_qubits)
    return acc


def build_qubit_hamiltonian(so) -> PauliSum:
    """Qubit Hamiltonian from spin-orbital coefficients.

    H = sum_pq h_pq a_p^+ a_q
      + 1/4 sum_pqrs <pq||rs> a_p^+ a_q^+ a_s a_r
      + e_core * identity
    """
    n = so.n_so
    ladders = {}

    def ladder(idx, cre):
        key = (idx, cre)
        if key not in ladders:
            ladders[key] = _ladder(idx, cre, n)
        return ladders[key]

    acc = {(0, 0): complex(so.e_core)}

    def accumulate(paulisum, weight):
        for key, c in paulisum.terms.items():
            acc[key] = acc.get(key, 0.0) + weight * c

    h = so.h_so
    v = so.v_asym
    for p in range(n):
        for q in range(n):
            if abs(h[p, q]) < PRUNE_THRESHOLD:
                continue
            accumulate(ladder(p, True) * ladder(q, False), h[p, q])
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            pq = ladder(p, True) * ladder(q, True)
            for r in range(n):
                for s in range(n):
                    if r == s or abs(v[p, q, r, s]) < PRUNE_THRESHOLD:
                        continue
                    term = pq * ladder(s, False) * ladder(r, False)
                    accumulate(term, 0.25 * v[p, q, r, s])
    return PauliSum(n, acc)


# ---------------------------------------------------------------------
# Excitation indices
# ---------------------------------------------------------------------

_KIND_ARITY = {"EE1": 2, "EE2": 4, "IP1": 1, "IP2": 3, "EA1": 1, "EA2": 3}


@dataclass(frozen=True, order=True)
class ExcitationIndex:
    """Label for one excitation-manifold operator G_I.

    kind and index layout:
        EE1 (i, a)        G = a_a^+ a_i
        EE2 (i, j, a, b)  G = a_a^+ a_b^+ a_j a_i      (i<j, a<b)
        IP1 (i,)          G = a_i
        IP2 (i, j, a)     G = a_a^+ a_j a_i            (i<j)
        EA1 (a,)          G = a_a^+
        EA2 (i, a, b)     G = a_a^+ a_b^+ a_i          (a<b)
    """

    kind: str
    indices: tuple

    def __post_init__(self):
        if self.kind not in _KIND_ARITY:
            raise ValueError(f"unknown excitation kind {self.kind!r}")
        if len(self.indices) != _KIND_ARITY[self.kind]:
            raise ValueError(f"{self.kind} needs {_KIND_ARITY[self.kind]} "
                             f"indices, got {self.indices}")
        if any(k < 0 for k in self.indices):
            raise ValueError("negative spin-orbital index")
        idx = self.indices
        if self.kind == "EE1" and idx[0] == idx[1]:
            raise ValueError("EE1 requires distinct orbitals")
        if self.kind == "EE2":
            i, j, a, b = idx
            if not (i < j and a < b):
                raise ValueError("EE2 indices must satisfy i<j and a<b")
            if {i, j} & {a, b}:
                raise ValueError("EE2 index sets must be disjoint")
        if self.kind == "IP2":
            i, j, a = idx
            if not i < j:
                raise ValueError("IP2 indices must satisfy i<j")
            if a in (i, j):
                raise ValueError("IP2 particle index collides with holes")
        if self.kind == "EA2":
            i, a, b = idx
            if not a < b:
                raise ValueError("EA2 indices must satisfy a<b")
            if i in (a, b):
                raise ValueError("EA2 hole index collides with particles")

    @property
    def creations(self) -> tuple:
        k, idx = self.kind, self.indices
        if k == "EE1":
            return (idx[1],)
        if k == "EE2":
            return (idx[2], idx[3])
        if k == "IP1":
            return ()
        if k == "IP2":
            return (idx[2],)
        if k == "EA1":
            return (idx[0],)
        return (idx[1], idx[2])

    @property
    def annihilations(self) -> tuple:
        k, idx = self.kind, self.indices
        if k == "EE1":
            return (idx[0],)
        if k == "EE2":
            return (idx[1], idx[0])
        if k == "IP1":
            return (idx[0],)
        if k == "IP2":
            return (idx[1], idx[0])
        if k == "EA1":
            return ()
        return (idx[0],)

    @property
    def delta_particles(self) -> int:
        return len(self.creations) - len(self.annihilations)

    def delta_sz2(self) -> int:
        """Twice the Sz change; alpha on even indices, beta on odd."""
        sz = lambda k: 1 if k % 2 == 0 else -1
        return (sum(sz(k) for k in self.creations)
                - sum(sz(k) for k in self.annihilations))

    def monomial(self) -> FermionTerm:
        ops = tuple((k, True) for k in self.creations)
        ops += tuple((k, False) for k in self.annihilations)
        return FermionTerm(ops)

    def __str__(self):
        return f"{self.kind} " + " ".join(str(k) for k in self.indices)


def generator_for(x: ExcitationIndex, n_qubits: int) -> PauliSum:
    """Anti-Hermitian generator G_I - G_I^+ in qubit form."""
    g = x.monomial()
    return jordan_wigner(g, n_qubits) - jordan_wigner(g.adjoint(), n_qubits)
