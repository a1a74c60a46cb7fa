"""Excited-state toolkit: q-sc-EOM with qEOM and QSE baselines on an exact
statevector simulator."""

from .chem_io import (MolecularIntegrals, SpinOrbitalHamiltonianCoefficients,
                      direct_sum, freeze_core, parse_fcidump, to_spin_orbitals,
                      write_fcidump)
from .eom import (EomMatrixSet, SpectrumResult, build_M_circuit_path,
                  build_M_direct, build_qeom, build_qse, solve_paired_geneig,
                  solve_qse, solve_qsceom)
from .fci import SectorSpectrum, fci_energy_differences, fci_sector_spectrum
from .ground_state import (AnsatzCircuit, GroundStateResult, adapt_vqe,
                           build_gsd_pool, vqe_minimize)
from .manifolds import Manifold, enumerate_manifold, reference_determinant
from .operators import (ExcitationIndex, FermionTerm, PauliString, PauliSum,
                        build_qubit_hamiltonian, generator_for,
                        hermitian_conjugate, jordan_wigner, pauli_add,
                        pauli_commutator, pauli_multiply)
from .statevector import (Statevector, apply_ansatz, apply_exp_generator,
                          apply_gate, basis_state, entangled_pair_circuit,
                          entangled_pair_state, expectation)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
