"""EOM engines: q-sc-EOM (direct and circuit-path builds), qEOM with the
paired generalized eigenproblem, and the quantum subspace expansion."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .ground_state import GroundStateResult, HamiltonianAction
from .manifolds import Manifold
from .operators import ExcitationIndex, PauliSum, jordan_wigner
from .statevector import (Statevector, apply_ansatz, apply_ansatz_adjoint,
                          apply_circuit, apply_paulisum, basis_state,
                          entangled_pair_circuit, entangled_pair_state,
                          extract_basis_state, inner)

HERMITICITY_TOL = 1e-9
ORTHO_THRESHOLD = 1e-10
DEGENERACY_TOL = 1e-12
MAX_PAIR_CNOTS = 7


@dataclass
class EomMatrixSet:
    method: str
    manifold: Manifold
    e_gr: float
    m: np.ndarray = None
    q: np.ndarray = None
    v: np.ndarray = None
    w: np.ndarray = None
    h_sub: np.ndarray = None
    s_sub: np.ndarray = None
    meta: dict = field(default_factory=dict)


@dataclass
class SpectrumResult:
    sector: str
    method: str
    roots: list  # ordered (delta_e, amplitude vector) pairs, ascending
    diagnostics: dict

    @property
    def energies(self) -> np.ndarray:
        return np.array([e for e, _ in self.roots])


# ---------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------

@lru_cache(maxsize=4096)
def monomial_paulisum(exc: ExcitationIndex, n_qubits: int,
                      dagger: bool = False) -> PauliSum:
    term = exc.monomial()
    if dagger:
        term = term.adjoint()
    return jordan_wigner(term, n_qubits)


def signed_manifold_determinants(reference: Statevector, manifold: Manifold):
    """Apply each G_I to the reference by Jordan-Wigner statevector
    application and read back the resulting signed determinant."""
    out = []
    for exc in manifold:
        image = apply_paulisum(reference,
                               monomial_paulisum(exc, reference.n_qubits))
        out.append(extract_basis_state(image))
    return out


def _h_action(hamiltonian, h_action=None) -> HamiltonianAction:
    if h_action is not None:
        return h_action
    if isinstance(hamiltonian, HamiltonianAction):
        return hamiltonian
    return HamiltonianAction(hamiltonian)


def _excited_state(gs: GroundStateResult, mask: int, amplitude: complex,
                   n_qubits: int) -> Statevector:
    ref = basis_state(mask, n_qubits)
    ref.amplitudes *= amplitude
    return apply_ansatz(ref, gs.ansatz)


# ---------------------------------------------------------------------
# q-sc-EOM
# ---------------------------------------------------------------------

def build_M_direct(gs: GroundStateResult, hamiltonian, manifold: Manifold,
                   h_action=None) -> EomMatrixSet:
    """M_IJ = <Phi_I|U^+ H U|Phi_J> - delta_IJ E_gr with |Phi_J> = G_J|Phi_0>."""
    action = _h_action(hamiltonian, h_action)
    n = action.n_qubits
    dets = signed_manifold_determinants(gs.reference, manifold)
    size = len(dets)
    m = np.zeros((size, size), dtype=complex)
    if size:
        states = np.empty((size, 1 << n), dtype=complex)
        for k, (mask, amp) in enumerate(dets):
            states[k] = _excited_state(gs, mask, amp, n).amplitudes
        h_states = action.matrix @ states.T
        m = states.conj() @ h_states
        m -= gs.energy * np.eye(size)
    return EomMatrixSet(method="QSCEOM", manifold=manifold, e_gr=gs.energy,
                        m=m)


def build_M_circuit_path(gs: GroundStateResult, hamiltonian,
                         manifold: Manifold, imaginary_part: bool = False,
                         preparation: str = "exact",
                         h_action=None) -> EomMatrixSet:
    """M from the two circuit evaluation paths: excited-determinant
    references for diagonals and entangled two-determinant references for
    off-diagonals.

    preparation="exact" uses direct signed superpositions; "gates" uses the
    ancilla-free NOT/H/CNOT sequence, which drops the fermionic phases (the
    spectrum is unaffected).
    """
    if preparation not in ("exact", "gates"):
        raise ValueError(f"unknown preparation {preparation!r}")
    if preparation == "gates" and imaginary_part:
        raise ValueError("the gate-sequence path only evaluates real parts")
    action = _h_action(hamiltonian, h_action)
    n = action.n_qubits
    dets = signed_manifold_determinants(gs.reference, manifold)
    size = len(dets)
    meta = {"max_cnots": 0, "preparation": preparation}

    def energy_of(state: Statevector) -> float:
        val = np.vdot(state.amplitudes, action.matrix @ state.amplitudes)
        return float(val.real)

    diag = np.zeros(size)
    for k, (mask, amp) in enumerate(dets):
        diag[k] = energy_of(_excited_state(gs, mask, amp, n))

    m = np.zeros((size, size), dtype=complex)
    for i in range(size):
        m[i, i] = diag[i] - gs.energy
    for i in range(size):
        mask_i, amp_i = dets[i]
        for j in range(i + 1, size):
            mask_j, amp_j = dets[j]
            rel = complex(amp_j) * complex(amp_i).conjugate()
            if preparation == "exact":
                pair = entangled_pair_state(mask_i, mask_j, n, phase=rel)
            else:
                gates, cnots = entangled_pair_circuit(mask_i, mask_j)
                meta["max_cnots"] = max(meta["max_cnots"], cnots)
                pair = apply_circuit(basis_state(0, n), gates)
            m_pair = energy_of(apply_ansatz(pair, gs.ansatz))
            real = m_pair - 0.5 * diag[i] - 0.5 * diag[j]
            imag = 0.0
            if imaginary_part:
                pair_i = entangled_pair_state(mask_i, mask_j, n,
                                              phase=1j * rel)
                m_pair_i = energy_of(apply_ansatz(pair_i, gs.ansatz))
                imag = 0.5 * diag[i] + 0.5 * diag[j] - m_pair_i
            m[i, j] = real + 1j * imag
            m[j, i] = real - 1j * imag
    return EomMatrixSet(method="QSCEOM", manifold=manifold, e_gr=gs.energy,
                        m=m, meta=meta)


def _order_degenerate(values, vectors):
    """Ascending order with deterministic sub-ordering of exact ties by
    lexicographic comparison of amplitude vectors."""
    order = list(np.argsort(values, kind="stable"))
    i = 0
    while i < len(order):
        j = i + 1
        while (j < len(order)
               and abs(values[order[j]] - values[order[i]]) <= DEGENERACY_TOL):
            j += 1
        if j - i > 1:
            order[i:j] = sorted(
                order[i:j],
                key=lambda k: tuple(np.round(vectors[:, k].real, 10)))
        i = j
    return order


def solve_qsceom(mats: EomMatrixSet) -> SpectrumResult:
    """Hermitian eigen-decomposition of M; eigenvalues are the energy
    differences."""
    if mats.method != "QSCEOM":
        raise ValueError("expected a QSCEOM matrix set")
    m = mats.m
    defect = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if defect > HERMITICITY_TOL:
        raise RuntimeError(f"M is not Hermitian (defect {defect}); "
                           "upstream build is inconsistent")
    if m.size == 0:
        return SpectrumResult(mats.manifold.sector, "QSCEOM", [],
                              {"hermiticity_defect": defect, "max_imag": 0.0})
    herm = 0.5 * (m + m.conj().T)
    values, vectors = np.linalg.eigh(herm)
    order = _order_degenerate(values, vectors)
    roots = [(float(values[k]), vectors[:, k].copy()) for k in order]
    residual = float(np.max(np.linalg.norm(herm @ vectors
                                           - vectors * values, axis=0)))
    return SpectrumResult(mats.manifold.sector, "QSCEOM", roots,
                          {"hermiticity_defect": defect, "max_imag": 0.0,
                           "max_residual_norm": residual})


# ---------------------------------------------------------------------
# qEOM
# ---------------------------------------------------------------------

def build_qeom(gs: GroundStateResult, hamiltonian, manifold: Manifold,
               dressed: bool = False, h_action=None) -> EomMatrixSet:
    """All four qEOM blocks from nested-commutator expectation values on
    the VQE state, with bare manifold operators by default. With
    dressed=True the operators are rotated by the ground-state unitary
    (self-consistent manifold), which zeroes Q and W."""
    action = _h_action(hamiltonian, h_action)
    n = action.n_qubits
    psi = gs.state
    size = len(manifold)
    dim = 1 << n

    def apply_g(state, exc, dagger):
        if dressed:
            inner_state = apply_ansatz_adjoint(state, gs.ansatz)
            mapped = apply_paulisum(inner_state,
                                    monomial_paulisum(exc, n, dagger))
            return apply_ansatz(mapped, gs.ansatz)
        return apply_paulisum(state, monomial_paulisum(exc, n, dagger))

    w_vec = action.apply(psi)
    a = np.empty((size, dim), dtype=complex)
    d = np.empty((size, dim), dtype=complex)
    f = np.empty((size, dim), dtype=complex)
    e = np.empty((size, dim), dtype=complex)
    for k, exc in enumerate(manifold):
        a[k] = apply_g(psi, exc, dagger=False).amplitudes
        d[k] = apply_g(psi, exc, dagger=True).amplitudes
        f[k] = apply_g(w_vec, exc, dagger=False).amplitudes
        e[k] = apply_g(w_vec, exc, dagger=True).amplitudes
    ha = (action.matrix @ a.T).T
    hd = (action.matrix @ d.T).T

    t1 = a.conj() @ ha.T
    t2 = a.conj() @ f.T
    t3 = d @ e.conj().T
    t4 = hd @ d.conj().T
    m = t1 - t2 - t3 + t4

    u1 = a.conj() @ hd.T
    u2 = a.conj() @ e.T
    u3 = d @ f.conj().T
    u4 = hd @ a.conj().T
    q = -(u1 - u2 - u3 + u4)

    v = a.conj() @ a.T - d @ d.conj().T
    w = -(a.conj() @ d.T - d @ a.conj().T)
    return EomMatrixSet(method="QEOM", manifold=manifold, e_gr=gs.energy,
                        m=m, q=q, v=v, w=w,
                        meta={"dressed": dressed})


def solve_paired_geneig(mats: EomMatrixSet,
                        ortho_threshold: float = ORTHO_THRESHOLD
                        ) -> SpectrumResult:
    """Solve the paired 2Nx2N generalized eigenproblem
    [[M,Q],[Q*,M*]] x = E [[V,W],[-W*,-V*]] x via canonical
    orthogonalization of the (indefinite) metric."""
    if mats.method != "QEOM":
        raise ValueError("expected a QEOM matrix set")
    m, q, v, w = mats.m, mats.q, mats.v, mats.w
    size = m.shape[0]
    h_blk = np.block([[m, q], [q.conj(), m.conj()]])
    s_blk = np.block([[v, w], [-w.conj(), -v.conj()]])

    metric_defect = float(np.max(np.abs(s_blk - s_blk.conj().T)))
    s_h = 0.5 * (s_blk + s_blk.conj().T)
    lam, u = np.linalg.eigh(s_h)
    keep = np.abs(lam) >= ortho_threshold
    discarded = int(np.sum(~keep))
    if not np.any(keep):
        raise RuntimeError("metric has no directions above the "
                           "canonical-orthogonalization threshold")
    x = u[:, keep] / np.sqrt(np.abs(lam[keep]))
    signs = np.sign(lam[keep])
    reduced = (signs[:, None]) * (x.conj().T @ h_blk @ x)
    values, vectors = scipy.linalg.eig(reduced)
    full = x @ vectors

    roots = []
    max_imag = 0.0
    max_residual = 0.0
    for k in range(values.size):
        val = values[k]
        max_imag = max(max_imag, abs(float(val.imag)))
        vec = full[:, k]
        a_part = vec[:size]
        b_part = vec[size:]
        if val.real > 0 and np.linalg.norm(a_part) >= np.linalg.norm(b_part):
            res = np.linalg.norm(h_blk @ vec - val * (s_blk @ vec)) \
                / max(np.linalg.norm(vec), 1e-300)
            max_residual = max(max_residual, float(res))
            nrm = np.linalg.norm(a_part)
            roots.append((float(val.real),
                          a_part / nrm if nrm > 0 else a_part))
    roots.sort(key=lambda t: t[0])
    diagnostics = {
        "max_imag": max_imag,
        "max_residual_norm": max_residual,
        "metric_defect": metric_defect,
        "discarded_directions": discarded,
        "n_candidate_roots": int(values.size),
    }
    return SpectrumResult(mats.manifold.sector, "QEOM", roots, diagnostics)


# ---------------------------------------------------------------------
# QSE
# ---------------------------------------------------------------------

def build_qse(gs: GroundStateResult, hamiltonian, manifold: Manifold,
              include_identity: bool = True, h_action=None) -> EomMatrixSet:
    """Subspace Hamiltonian and overlap over {|Psi>} u {G_I|Psi>}."""
    action = _h_action(hamiltonian, h_action)
    n = action.n_qubits
    vectors = []
    if include_identity:
        vectors.append(gs.state.amplitudes)
    for exc in manifold:
        vectors.append(apply_paulisum(gs.state,
                                      monomial_paulisum(exc, n)).amplitudes)
    basis = np.array(vectors)
    h_basis = (action.matrix @ basis.T).T
    h_sub = basis.conj() @ h_basis.T
    s_sub = basis.conj() @ basis.T
    return EomMatrixSet(method="QSE", manifold=manifold, e_gr=gs.energy,
                        h_sub=h_sub, s_sub=s_sub,
                        meta={"include_identity": include_identity})


def solve_generalized_symmetric(h_sub, s_sub,
                                ortho_threshold=ORTHO_THRESHOLD):
    """Canonical-orthogonalization solve of H c = E S c for Hermitian H and
    PSD S. Returns (energies, vectors_in_original_basis, discarded)."""
    lam, u = np.linalg.eigh(0.5 * (s_sub + s_sub.conj().T))
    keep = lam >= ortho_threshold
    discarded = int(np.sum(~keep))
    if not np.any(keep):
        raise RuntimeError("subspace overlap has no eigenvalues above the "
                           "orthogonalization threshold; empty spectrum")
    x = u[:, keep] / np.sqrt(lam[keep])
    reduced = x.conj().T @ (0.5 * (h_sub + h_sub.conj().T)) @ x
    values, vectors = np.linalg.eigh(0.5 * (reduced + reduced.conj().T))
    return values, x @ vectors, discarded


def solve_qse(mats: EomMatrixSet,
              ortho_threshold: float = ORTHO_THRESHOLD) -> SpectrumResult:
    """Generalized eigensolve; roots are energies above the lowest subspace
    root."""
    if mats.method != "QSE":
        raise ValueError("expected a QSE matrix set")
    values, vectors, discarded = solve_generalized_symmetric(
        mats.h_sub, mats.s_sub, ortho_threshold)
    order = _order_degenerate(values, vectors)
    e0 = float(values[order[0]])
    roots = [(float(values[k]) - e0, vectors[:, k].copy()) for k in order[1:]]
    h_herm = 0.5 * (mats.h_sub + mats.h_sub.conj().T)
    s_herm = 0.5 * (mats.s_sub + mats.s_sub.conj().T)
    residual = float(np.max(np.linalg.norm(
        h_herm @ vectors - (s_herm @ vectors) * values, axis=0))) \
        if values.size else 0.0
    diagnostics = {
        "e0": e0,
        "discarded_directions": discarded,
        "max_imag": 0.0,
        "max_residual_norm": residual,
    }
    return SpectrumResult(mats.manifold.sector, "QSE", roots, diagnostics)


# ---------------------------------------------------------------------
# Matrix dump format (consumed by the noise harness)
# ---------------------------------------------------------------------

def matrix_to_text(matrix: np.ndarray) -> str:
    matrix = np.atleast_2d(matrix)
    n = matrix.shape[0]
    lines = [str(n)]
    for row in matrix:
        lines.append(" ".join(f"{val.real:.17e} {val.imag:.17e}"
                              for val in row))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n = int(lines[0])
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        fields = [float(tok) for tok in lines[1 + i].split()]
        if len(fields) != 2 * n:
            raise ValueError(f"row {i} has {len(fields)} values, expected {2 * n}")
        out[i] = np.array(fields[0::2]) + 1j * np.array(fields[1::2])
    return out
