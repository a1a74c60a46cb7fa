"""Dense statevector engine.

Holds all 2^n complex amplitudes; basis index equals the occupation
bitmask (qubit k occupied <=> bit k set, bitstrings written with qubit 0
rightmost). All advertised-unitary operations preserve the norm and return
new Statevector values.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.linalg

from .operators import ExcitationIndex, PauliSum

MAX_QUBITS = 24
NORM_TOL = 1e-10


class SignTrackingError(RuntimeError):
    """A state expected to be a single signed determinant was not."""


class Statevector:
    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        if n_qubits > MAX_QUBITS:
            raise ValueError(f"refusing statevector with {n_qubits} qubits "
                             f"(cap {MAX_QUBITS})")
        if amplitudes.shape != (1 << n_qubits,):
            raise ValueError("amplitude count must be 2^n_qubits")
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())


@lru_cache(maxsize=32)
def _indices(n_qubits: int) -> np.ndarray:
    return np.arange(1 << n_qubits, dtype=np.uint64)


def _parity_signs(values: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * (np.bitwise_count(values) & np.uint64(1)).astype(float)


def basis_state(occupation: int, n_qubits: int) -> Statevector:
    if occupation >> n_qubits:
        raise ValueError("occupation mask does not fit in register")
    amp = np.zeros(1 << n_qubits, dtype=complex)
    amp[occupation] = 1.0
    return Statevector(n_qubits, amp)


def entangled_pair_state(mask_i: int, mask_j: int, n_qubits: int,
                         phase: complex = 1.0) -> Statevector:
    """(|I> + phase*|J>)/sqrt(2) prepared as an exact superposition."""
    if mask_i == mask_j:
        raise ValueError("entangled pair requires distinct determinants")
    amp = np.zeros(1 << n_qubits, dtype=complex)
    amp[mask_i] = 1.0 / np.sqrt(2.0)
    amp[mask_j] += phase / np.sqrt(2.0)
    return Statevector(n_qubits, amp)


# ---------------------------------------------------------------------
# Elementary gates
# ---------------------------------------------------------------------

def apply_gate(state: Statevector, gate) -> Statevector:
    """Apply NOT(q), H(q), or CNOT(c, t), given as ("NOT", q) etc."""
    name = gate[0]
    n = state.n_qubits
    amp = state.amplitudes
    idx = _indices(n)
    if name == "NOT":
        (_, q) = gate
        _check_qubit(q, n)
        out = amp[idx ^ np.uint64(1 << q)]
    elif name == "H":
        (_, q) = gate
        _check_qubit(q, n)
        flipped = amp[idx ^ np.uint64(1 << q)]
        signs = 1.0 - 2.0 * ((idx >> np.uint64(q)) & np.uint64(1)).astype(float)
        out = (signs * amp + flipped) / np.sqrt(2.0)
    elif name == "CNOT":
        (_, c, t) = gate
        _check_qubit(c, n)
        _check_qubit(t, n)
        if c == t:
            raise ValueError("CNOT control and target must differ")
        src = idx ^ (((idx >> np.uint64(c)) & np.uint64(1)) << np.uint64(t))
        out = amp[src]
    else:
        raise ValueError(f"unknown gate {name!r}")
    result = Statevector(n, out)
    _check_norm_preserved(state, result)
    return result


def _check_qubit(q: int, n: int):
    if not 0 <= q < n:
        raise ValueError(f"qubit index {q} out of range for {n} qubits")


def _check_norm_preserved(before: Statevector, after: Statevector):
    if abs(after.norm() - before.norm()) > NORM_TOL:
        raise RuntimeError("unitary operation failed to preserve the norm")


def apply_circuit(state: Statevector, gates) -> Statevector:
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def entangled_pair_circuit(mask_i: int, mask_j: int):
    """Gate sequence preparing (|I> + |J>)/sqrt(2) from |0...0> without an
    ancilla. Phase-free: fermionic signs of I and J are not reproduced.

    Returns (gates, cnot_count).
    """
    if mask_i == mask_j:
        raise ValueError("entangled pair requires distinct determinants")
    start, other = mask_i, mask_j
    if not (other & ~start):
        start, other = other, start
    differing = start ^ other
    pivot = (other & ~start).bit_length() - 1

    gates = [("NOT", b) for b in _bits(start)]
    gates.append(("H", pivot))
    cnots = 0
    for b in _bits(differing):
        if b != pivot:
            gates.append(("CNOT", pivot, b))
            cnots += 1
    return gates, cnots


def _bits(mask: int):
    out = []
    b = 0
    while mask >> b:
        if mask >> b & 1:
            out.append(b)
        b += 1
    return out


# ---------------------------------------------------------------------
# Pauli-sum application and expectation values
# ---------------------------------------------------------------------

_I_POWERS = (1.0, 1.0j, -1.0, -1.0j)


def apply_paulisum(state: Statevector, op: PauliSum) -> Statevector:
    """Linear (not necessarily unitary) action of a Pauli sum."""
    if op.n_qubits != state.n_qubits:
        raise ValueError("operator and state qubit counts differ")
    n = state.n_qubits
    idx = _indices(n)
    amp = state.amplitudes
    out = np.zeros_like(amp)
    for (x, z), coeff in op.terms.items():
        src = idx ^ np.uint64(x)
        phase = _I_POWERS[bin(x & z).count("1") % 4]
        if z:
            out += (coeff * phase) * _parity_signs(src & np.uint64(z)) * amp[src]
        else:
            out += (coeff * phase) * amp[src]
    return Statevector(n, out)


def inner(bra: Statevector, ket: Statevector) -> complex:
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def expectation(state: Statevector, op: PauliSum) -> complex:
    """<psi|op|psi>; for Hermitian op the imaginary part is asserted small."""
    val = inner(state, apply_paulisum(state, op))
    if op.is_hermitian() and abs(val.imag) > 1e-10:
        raise RuntimeError(f"Hermitian expectation has imaginary part {val.imag}")
    return val


def extract_basis_state(state: Statevector, tol: float = 1e-8):
    """Decompose a signed-determinant state into (mask, amplitude).

    Raises SignTrackingError unless exactly one amplitude of unit magnitude
    remains.
    """
    mags = np.abs(state.amplitudes)
    mask = int(np.argmax(mags))
    amplitude = complex(state.amplitudes[mask])
    residual = np.sqrt(max(state.norm() ** 2 - mags[mask] ** 2, 0.0))
    if abs(abs(amplitude) - 1.0) > tol or residual > tol:
        raise SignTrackingError(
            f"state is not a signed determinant (|amp|={abs(amplitude)}, "
            f"residual={residual})")
    return mask, amplitude


# ---------------------------------------------------------------------
# Excitation rotations (exact exponential of monomial-pair generators)
# ---------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _rotation_arrays(exc: ExcitationIndex, n_qubits: int):
    """(source, partner, sign) arrays for the determinant pairs coupled by
    G - G^+; signs are the Jordan-Wigner parities of the monomial."""
    idx = _indices(n_qubits)
    mask_c = np.uint64(sum(1 << k for k in exc.creations))
    mask_a = np.uint64(sum(1 << k for k in exc.annihilations))
    sel = idx[((idx & mask_a) == mask_a) & ((idx & mask_c) == 0)]
    partner = sel ^ mask_a ^ mask_c

    sign = np.ones(sel.shape, dtype=float)
    cur = sel.copy()
    for index, _creation in reversed(exc.monomial().ops):
        below = np.uint64((1 << index) - 1)
        sign *= _parity_signs(cur & below)
        cur ^= np.uint64(1 << index)
    if not np.array_equal(cur, partner):
        raise AssertionError("rotation bookkeeping failed")
    return sel, partner, sign


def apply_excitation_rotation(state: Statevector, exc: ExcitationIndex,
                              theta: float) -> Statevector:
    """exp(theta (G - G^+)) |state>, exact (Givens rotations over paired
    determinants)."""
    sel, partner, sign = _rotation_arrays(exc, state.n_qubits)
    out = state.amplitudes.copy()
    if sel.size:
        c, s = np.cos(theta), np.sin(theta)
        a_sel = state.amplitudes[sel]
        a_par = state.amplitudes[partner]
        out[sel] = c * a_sel - s * sign * a_par
        out[partner] = s * sign * a_sel + c * a_par
    result = Statevector(state.n_qubits, out)
    _check_norm_preserved(state, result)
    return result


def apply_excitation_generator(state: Statevector,
                               exc: ExcitationIndex) -> Statevector:
    """(G - G^+) |state> via the same determinant pairing."""
    sel, partner, sign = _rotation_arrays(exc, state.n_qubits)
    out = np.zeros_like(state.amplitudes)
    if sel.size:
        out[partner] = sign * state.amplitudes[sel]
        out[sel] -= sign * state.amplitudes[partner]
    return Statevector(state.n_qubits, out)


def apply_ansatz(state: Statevector, ansatz) -> Statevector:
    """Apply an ordered iterable of (ExcitationIndex, angle) pairs; the
    first entry acts first."""
    for exc, theta in ansatz:
        state = apply_excitation_rotation(state, exc, theta)
    return state


def apply_ansatz_adjoint(state: Statevector, ansatz) -> Statevector:
    for exc, theta in reversed(list(ansatz)):
        state = apply_excitation_rotation(state, exc, -theta)
    return state


# ---------------------------------------------------------------------
# Exponential of a general anti-Hermitian Pauli sum
# ---------------------------------------------------------------------

def apply_exp_generator(state: Statevector, generator: PauliSum,
                        theta: float) -> Statevector:
    """exp(theta * g)|state> for anti-Hermitian g, exact to ~1e-14.

    Lanczos in the Krylov space of i*g (Hermitian); excitation generators
    close the space after a handful of steps, so this is both exact and
    cheap. Falls back to time-halving if the space does not close.
    """
    if (generator.conjugate() + generator).norm_inf() > 1e-10:
        raise ValueError("generator is not anti-Hermitian")
    if theta == 0.0 or not generator.terms:
        return state.copy()
    return _lanczos_exp(state, generator, theta)


def _lanczos_exp(state, generator, theta, max_dim=80):
    nrm = state.norm()
    if nrm == 0.0:
        return state.copy()
    herm = 1.0j * generator  # Hermitian counterpart

    basis = [state.amplitudes / nrm]
    alphas, betas = [], []
    closed = False
    for _ in range(max_dim):
        v = Statevector(state.n_qubits, basis[-1])
        w = apply_paulisum(v, herm).amplitudes
        alpha = float(np.real(np.vdot(basis[-1], w)))
        alphas.append(alpha)
        w = w - alpha * basis[-1]
        if len(basis) > 1:
            w = w - betas[-1] * basis[-2]
        for b in basis:  # full reorthogonalization
            w = w - np.vdot(b, w) * b
        beta = float(np.linalg.norm(w))
        if beta < 1e-13:
            closed = True
            break
        betas.append(beta)
        basis.append(w / beta)

    if not closed:
        half = _lanczos_exp(state, generator, theta / 2.0, max_dim)
        return _lanczos_exp(half, generator, theta / 2.0, max_dim)

    m = len(alphas)
    tri = np.diag(np.array(alphas, dtype=complex))
    for k, b in enumerate(betas[:m - 1]):
        tri[k, k + 1] = b
        tri[k + 1, k] = b
    coeffs = scipy.linalg.expm(-1.0j * theta * tri)[:, 0]
    out = sum(c * b for c, b in zip(coeffs, basis)) * nrm
    result = Statevector(state.n_qubits, out)
    _check_norm_preserved(state, result)
    return result
