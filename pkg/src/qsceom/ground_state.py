"""Ground-state solvers: plain VQE for a fixed ansatz and ADAPT-VQE with a
generalized singles/doubles pool."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.optimize
import scipy.sparse

from .operators import ExcitationIndex, PauliSum
from .statevector import (Statevector, apply_ansatz, apply_excitation_generator,
                          apply_excitation_rotation, inner)

DEFAULT_GRAD_THRESHOLD = 1e-3
DEFAULT_INNER_GTOL = 1e-6
TIE_TOL = 1e-12


class AnsatzCircuit:
    """Ordered list of (anti-Hermitian excitation generator, angle) pairs;
    list order is application order (first entry acts first)."""

    def __init__(self, entries=None):
        self.entries = [(exc, float(angle)) for exc, angle in (entries or [])]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def append(self, exc: ExcitationIndex, angle: float = 0.0):
        self.entries.append((exc, float(angle)))

    @property
    def excitations(self):
        return [exc for exc, _ in self.entries]

    @property
    def angles(self):
        return np.array([angle for _, angle in self.entries])

    def with_angles(self, angles) -> "AnsatzCircuit":
        if len(angles) != len(self.entries):
            raise ValueError("angle count does not match ansatz size")
        return AnsatzCircuit([(exc, th)
                              for (exc, _), th in zip(self.entries, angles)])

    def to_text(self) -> str:
        lines = [f"{exc} {angle:.17e}" for exc, angle in self.entries]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "AnsatzCircuit":
        entries = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            kind = fields[0]
            indices = tuple(int(f) for f in fields[1:-1])
            entries.append((ExcitationIndex(kind, indices), float(fields[-1])))
        return cls(entries)


def save_ansatz(ansatz: AnsatzCircuit, path):
    with open(path, "w") as f:
        f.write(ansatz.to_text())


def load_ansatz(path) -> AnsatzCircuit:
    with open(path) as f:
        return AnsatzCircuit.from_text(f.read())


@dataclass
class GroundStateResult:
    energy: float
    ansatz: AnsatzCircuit
    state: Statevector
    gradient_norm_history: list
    energy_history: list
    stop_reason: str
    converged: bool
    reference: Statevector = None


@dataclass
class VqeResult:
    energy: float
    angles: np.ndarray
    converged: bool
    grad_max: float
    message: str = ""


# ---------------------------------------------------------------------
# Pool construction
# ---------------------------------------------------------------------

def build_gsd_pool(n_so: int):
    """Generalized singles and doubles over all spin orbitals.

    Singles p->q restricted to equal spin; doubles {p,q}->{r,s} over
    disjoint Sz-conserving index pairs, deduplicated by requiring the
    annihilated pair to precede the created pair lexicographically.
    """
    if n_so < 2:
        raise ValueError("need at least two spin orbitals")
    pool = []
    for p in range(n_so):
        for q in range(p + 1, n_so):
            if p % 2 == q % 2:
                pool.append(ExcitationIndex("EE1", (p, q)))

    sz2 = lambda k: 1 if k % 2 == 0 else -1
    pairs = list(combinations(range(n_so), 2))
    for (p, q) in pairs:
        for (r, s) in pairs:
            if (p, q) >= (r, s) or {p, q} & {r, s}:
                continue
            if sz2(p) + sz2(q) != sz2(r) + sz2(s):
                continue
            pool.append(ExcitationIndex("EE2", (p, q, r, s)))
    return pool


# ---------------------------------------------------------------------
# Sparse Hamiltonian application
# ---------------------------------------------------------------------

def to_sparse_matrix(op: PauliSum) -> scipy.sparse.csr_matrix:
    """Dense-register sparse matrix of a Pauli sum (2^n x 2^n CSR)."""
    n = op.n_qubits
    dim = 1 << n
    idx = np.arange(dim, dtype=np.uint64)
    rows, cols, vals = [], [], []
    i_powers = (1.0, 1.0j, -1.0, -1.0j)
    for (x, z), coeff in op.terms.items():
        phase = coeff * i_powers[bin(x & z).count("1") % 4]
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(z))
                             & np.uint64(1)).astype(float)
        rows.append((idx ^ np.uint64(x)).astype(np.int64))
        cols.append(idx.astype(np.int64))
        vals.append(phase * signs)
    if not rows:
        return scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    mat = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim)).tocsr()
    if op.is_hermitian() and np.max(np.abs(mat.data.imag)) < 1e-12:
        mat = scipy.sparse.csr_matrix(
            (mat.data.real, mat.indices, mat.indptr), shape=mat.shape)
    return mat


class HamiltonianAction:
    """Sparse application of a Hamiltonian to statevectors; the matrix is
    built on first use (one-off expectation values stay cheap)."""

    def __init__(self, hamiltonian: PauliSum):
        self.paulisum = hamiltonian
        self.n_qubits = hamiltonian.n_qubits
        self._matrix = None

    @property
    def matrix(self) -> scipy.sparse.csr_matrix:
        if self._matrix is None:
            self._matrix = to_sparse_matrix(self.paulisum)
        return self._matrix

    def apply(self, state: Statevector) -> Statevector:
        return Statevector(self.n_qubits, self.matrix @ state.amplitudes)

    def expectation(self, state: Statevector) -> float:
        if self._matrix is None:
            from .statevector import expectation as sv_expectation
            return float(sv_expectation(state, self.paulisum).real)
        val = np.vdot(state.amplitudes, self.matrix @ state.amplitudes)
        return float(val.real)


# ---------------------------------------------------------------------
# VQE
# ---------------------------------------------------------------------

def _energy_and_gradient(h_action, reference, excitations, angles):
    """Energy plus its analytic gradient via an adjoint sweep."""
    phi = reference
    for exc, theta in zip(excitations, angles):
        phi = apply_excitation_rotation(phi, exc, theta)
    lam = h_action.apply(phi)
    energy = float(np.real(inner(phi, lam)))

    grads = np.zeros(len(excitations))
    for k in range(len(excitations) - 1, -1, -1):
        grads[k] = 2.0 * np.real(inner(lam, apply_excitation_generator(
            phi, excitations[k])))
        phi = apply_excitation_rotation(phi, excitations[k], -angles[k])
        lam = apply_excitation_rotation(lam, excitations[k], -angles[k])
    return energy, grads


def vqe_minimize(hamiltonian, ansatz: AnsatzCircuit, reference: Statevector,
                 theta0=None, gtol: float = DEFAULT_INNER_GTOL,
                 max_iterations: int = 2000) -> VqeResult:
    """Minimize the ansatz energy over all angles (BFGS, analytic gradient)."""
    if len(ansatz) == 0:
        raise ValueError("ansatz is empty")
    h_action = (hamiltonian if isinstance(hamiltonian, HamiltonianAction)
                else HamiltonianAction(hamiltonian))
    excitations = ansatz.excitations
    theta0 = np.asarray(ansatz.angles if theta0 is None else theta0,
                        dtype=float)

    def objective(theta):
        return _energy_and_gradient(h_action, reference, excitations, theta)

    e0, _ = objective(theta0)
    result = scipy.optimize.minimize(
        objective, theta0, jac=True, method="BFGS",
        options={"gtol": gtol, "maxiter": max_iterations})
    if np.max(np.abs(result.jac)) > gtol:
        # one restart recovers from BFGS precision-loss stops
        result = scipy.optimize.minimize(
            objective, result.x, jac=True, method="BFGS",
            options={"gtol": gtol, "maxiter": max_iterations})
    grad_max = float(np.max(np.abs(result.jac)))
    converged = grad_max <= gtol
    energy = float(min(result.fun, e0))
    return VqeResult(energy=energy, angles=result.x, converged=converged,
                     grad_max=grad_max,
                     message="" if converged else str(result.message))


# ---------------------------------------------------------------------
# ADAPT-VQE
# ---------------------------------------------------------------------

def pool_gradients(h_action, pool, state):
    """<psi|[H, g]|psi> = 2 Re <H psi|g psi> for every pool generator."""
    h_psi = h_action.apply(state)
    return np.array([
        2.0 * np.real(inner(h_psi, apply_excitation_generator(state, exc)))
        for exc in pool])


def adapt_vqe(hamiltonian, pool, reference: Statevector,
              grad_threshold: float = DEFAULT_GRAD_THRESHOLD,
              max_operators=None, inner_gtol: float = DEFAULT_INNER_GTOL):
    """Grow an ansatz one pool operator at a time, selecting by commutator
    gradient magnitude, until the largest pool gradient drops below
    grad_threshold or max_operators is reached."""
    if not pool:
        raise ValueError("operator pool is empty")
    h_action = (hamiltonian if isinstance(hamiltonian, HamiltonianAction)
                else HamiltonianAction(hamiltonian))

    ansatz = AnsatzCircuit()
    state = reference.copy()
    energy = h_action.expectation(state)
    grad_history, energy_history = [], [energy]
    stop_reason = "max_operators" if max_operators == 0 else None
    if grad_threshold == float("inf"):
        stop_reason = "gradient_converged"
    converged = True

    while stop_reason is None:
        grads = pool_gradients(h_action, pool, state)
        abs_grads = np.abs(grads)
        grad_max = float(np.max(abs_grads))
        grad_history.append(grad_max)
        if grad_max < grad_threshold:
            stop_reason = "gradient_converged"
            break

        # deterministic tie-break: earliest pool index within TIE_TOL
        best = 0
        for k in range(1, len(pool)):
            if abs_grads[k] > abs_grads[best] + TIE_TOL:
                best = k

        ansatz.append(pool[best], 0.0)
        vqe = vqe_minimize(h_action, ansatz, reference, gtol=inner_gtol)
        if not vqe.converged:
            converged = False
        ansatz = ansatz.with_angles(vqe.angles)
        state = apply_ansatz(reference, ansatz)
        energy = vqe.energy
        energy_history.append(energy)
        if max_operators is not None and len(ansatz) >= max_operators:
            stop_reason = "max_operators"

    return GroundStateResult(
        energy=energy,
        ansatz=ansatz,
        state=state,
        gradient_norm_history=grad_history,
        energy_history=energy_history,
        stop_reason=stop_reason,
        converged=converged,
        reference=reference,
    )
