"""Config-driven experiment harness: dissociation scans with method/sector
sweeps, the matrix-perturbation noise study, and the size-intensivity test.

Every table row carries provenance columns (fixture tag, method, sector,
root index) and runs are deterministic for a fixed config and seed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import eom
from .chem_io import (MolecularIntegrals, direct_sum, freeze_core,
                      parse_fcidump, to_spin_orbitals)
from .fci import fci_energy_differences, fci_sector_spectrum
from .ground_state import (AnsatzCircuit, GroundStateResult,
                           HamiltonianAction, adapt_vqe, build_gsd_pool)
from .manifolds import enumerate_manifold, reference_determinant
from .operators import ExcitationIndex, build_qubit_hamiltonian
from .statevector import Statevector, apply_ansatz, basis_state

EV_PER_HARTREE = 27.211386245988

SCAN_COLUMNS = ["geometry_tag", "method", "sector", "root_index",
                "energy_hartree", "delta_e_hartree", "delta_e_ev",
                "error_vs_fci_hartree", "flags"]
NOISE_COLUMNS = ["geometry_tag", "method", "sector", "variant", "epsilon",
                 "mean_error_hartree", "stderr_hartree", "n_trials",
                 "n_flagged", "flags"]
SIZE_COLUMNS = ["geometry_tag", "method", "sector", "root_index",
                "ee_isolated_hartree", "ee_composite_hartree",
                "difference_hartree", "flags"]

SECTOR_SZ_RUNS = {"EE": (0,), "IP": (-1, 1), "EA": (-1, 1)}
SECTOR_DELTA_N = {"EE": 0, "IP": -1, "EA": 1}
MERGE_TOL = 1e-9
ROOT_MATCH_WINDOW = 0.5


@dataclass
class AdaptSettings:
    grad_threshold: float = 1e-3
    max_operators: int | None = None
    inner_gtol: float = 1e-6


@dataclass
class ScanConfig:
    fixtures: list  # (path, geometry_tag) pairs
    sectors: list
    methods: list
    n_frozen: int = 0
    adapt: AdaptSettings = field(default_factory=AdaptSettings)
    n_roots: int | None = None
    output: str | None = None

    def __post_init__(self):
        if not self.fixtures:
            raise ValueError("fixture list is empty")
        if not self.methods:
            raise ValueError("method list is empty")
        for m in self.methods:
            if m not in ("QSCEOM", "QEOM", "QSE", "FCI"):
                raise ValueError(f"unknown method {m!r}")
        for s in self.sectors:
            if s not in SECTOR_SZ_RUNS:
                raise ValueError(f"unknown sector {s!r}")


@dataclass
class NoiseStudyConfig:
    fixture: str = ""
    geometry_tag: str = ""
    epsilons: tuple = (1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3)
    n_trials: int = 2000
    seed: int = 0
    variant: str = "perturb_all"
    methods: tuple = ("QSCEOM", "QSE")
    n_roots: int = 3
    n_frozen: int = 0
    adapt: AdaptSettings = field(default_factory=AdaptSettings)
    output: str | None = None
    # matrix-dump inputs (written by eom.matrix_to_text) override the
    # fixture pipeline when all relevant paths are given
    m_dump: str | None = None
    h_sub_dump: str | None = None
    s_sub_dump: str | None = None

    def __post_init__(self):
        if any(e <= 0 for e in self.epsilons):
            raise ValueError("epsilons must be positive")
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if self.variant not in ("perturb_all", "exact_overlap"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not self.fixture and self.m_dump is None:
            raise ValueError("either a fixture or matrix dumps are required")


@dataclass
class SizeIntensivityConfig:
    fragment_fixture: str
    environment_fixture: str
    geometry_tag: str = ""
    max_operators: int | None = 3
    adapt: AdaptSettings = field(default_factory=AdaptSettings)
    methods: tuple = ("QSCEOM", "QSE")
    output: str | None = None


# ---------------------------------------------------------------------
# Problem assembly
# ---------------------------------------------------------------------

@dataclass
class Problem:
    tag: str
    integrals: MolecularIntegrals
    hamiltonian: object
    h_action: HamiltonianAction
    n_so: int
    n_electrons: int
    reference: Statevector


def build_problem(integrals: MolecularIntegrals, tag: str = "") -> Problem:
    so = to_spin_orbitals(integrals)
    hamiltonian = build_qubit_hamiltonian(so)
    h_action = HamiltonianAction(hamiltonian)
    reference = basis_state(
        reference_determinant(integrals.n_electrons, integrals.ms2), so.n_so)
    return Problem(tag=tag, integrals=integrals, hamiltonian=hamiltonian,
                   h_action=h_action, n_so=so.n_so,
                   n_electrons=integrals.n_electrons, reference=reference)


def load_problem(path, n_frozen: int = 0, tag: str = "") -> Problem:
    with open(path) as f:
        integrals = parse_fcidump(f.read())
    if n_frozen:
        integrals = freeze_core(integrals, n_frozen)
    return build_problem(integrals, tag=tag or Path(path).stem)


def solve_ground_state(problem: Problem,
                       adapt: AdaptSettings) -> GroundStateResult:
    pool = build_gsd_pool(problem.n_so)
    return adapt_vqe(problem.h_action, pool, problem.reference,
                     grad_threshold=adapt.grad_threshold,
                     max_operators=adapt.max_operators,
                     inner_gtol=adapt.inner_gtol)


def sector_manifold(problem: Problem, sector: str, sz: int | None):
    return enumerate_manifold(sector, problem.n_electrons,
                              problem.n_so - problem.n_electrons,
                              sz_filter=sz)


def fci_reference_diffs(problem: Problem, sector: str, sz: int) -> np.ndarray:
    """Sector FCI energy differences matched to the EOM root ordering
    (the zero self-difference is dropped for EE)."""
    target = (problem.n_electrons + SECTOR_DELTA_N[sector],
              problem.integrals.ms2 + sz)
    diffs = fci_energy_differences(problem.hamiltonian,
                                   (problem.n_electrons,
                                    problem.integrals.ms2), target)
    return diffs[1:] if sector == "EE" else diffs


def compute_spectrum(problem: Problem, gs: GroundStateResult, sector: str,
                     method: str, sz: int):
    manifold = sector_manifold(problem, sector, sz)
    if method == "QSCEOM":
        mats = eom.build_M_direct(gs, problem.h_action, manifold)
        return eom.solve_qsceom(mats)
    if method == "QEOM":
        mats = eom.build_qeom(gs, problem.h_action, manifold)
        return eom.solve_paired_geneig(mats)
    if method == "QSE":
        mats = eom.build_qse(gs, problem.h_action, manifold)
        return eom.solve_qse(mats)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------
# Scan
# ---------------------------------------------------------------------

def _merged_sector_roots(problem, gs, sector, method, n_roots):
    """Run every Sz filter of the sector, attach per-root FCI errors, then
    merge the runs and deduplicate by energy."""
    collected = []
    flags_common = []
    for sz in SECTOR_SZ_RUNS[sector]:
        reference = fci_reference_diffs(problem, sector, sz)
        if method == "FCI":
            values = reference
            errors = np.zeros_like(values)
            run_flags = ""
        else:
            result = compute_spectrum(problem, gs, sector, method, sz)
            values = result.energies
            errors = np.full(len(values), np.nan)
            upto = min(len(values), len(reference))
            errors[:upto] = values[:upto] - reference[:upto]
            run_flags = _diagnostic_flags(result)
        collected.extend((v, e, run_flags) for v, e in zip(values, errors))
        if run_flags:
            flags_common.append(run_flags)
    collected.sort(key=lambda t: t[0])
    merged = []
    for value, error, run_flags in collected:
        if merged and abs(value - merged[-1][0]) <= MERGE_TOL:
            continue
        merged.append((value, error, run_flags))
    if n_roots is not None:
        merged = merged[:n_roots]
    return merged


def _diagnostic_flags(result) -> str:
    flags = []
    diag = result.diagnostics
    if diag.get("max_imag", 0.0) > 1e-10:
        flags.append(f"max_imag={diag['max_imag']:.3e}")
    if diag.get("discarded_directions"):
        flags.append(f"rank_deficient={diag['discarded_directions']}")
    return ";".join(flags)


def run_scan(cfg: ScanConfig):
    """Per (geometry, method, sector, root): energies, differences in
    Hartree and eV, and errors against sector FCI."""
    rows = []
    for path, tag in cfg.fixtures:
        try:
            problem = load_problem(path, cfg.n_frozen, tag)
        except (OSError, ValueError) as exc:
            rows.append(_row(tag, "-", "-", 0, flags=f"error:{exc}"))
            continue
        gs = solve_ground_state(problem, cfg.adapt)
        e_fci = fci_sector_spectrum(problem.hamiltonian, problem.n_electrons,
                                    problem.integrals.ms2).eigenvalues[0]
        ground_flags = (f"operators={len(gs.ansatz)};stop={gs.stop_reason}"
                        + ("" if gs.converged else ";vqe_not_converged"))
        rows.append(_row(tag, "ADAPT", "GROUND", 0,
                         energy=gs.energy, delta=0.0,
                         error=gs.energy - e_fci, flags=ground_flags))
        for sector in cfg.sectors:
            for method in cfg.methods:
                merged = _merged_sector_roots(problem, gs, sector, method,
                                              cfg.n_roots)
                for k, (delta, error, run_flags) in enumerate(merged):
                    rows.append(_row(tag, method, sector, k,
                                     energy=gs.energy + delta, delta=delta,
                                     error=error, flags=run_flags))
    if cfg.output:
        write_table(rows, SCAN_COLUMNS, cfg.output)
    return rows


def _row(tag, method, sector, root_index, energy=np.nan, delta=np.nan,
         error=np.nan, flags=""):
    return {
        "geometry_tag": tag,
        "method": method,
        "sector": sector,
        "root_index": root_index,
        "energy_hartree": float(energy),
        "delta_e_hartree": float(delta),
        "delta_e_ev": float(delta) * EV_PER_HARTREE,
        "error_vs_fci_hartree": float(error),
        "flags": flags,
    }


# ---------------------------------------------------------------------
# Noise study
# ---------------------------------------------------------------------

def _symmetric_perturbation(rng, size, epsilon):
    """Uniform offsets in [-eps, eps] on the upper triangle, mirrored."""
    p = np.zeros((size, size))
    iu = np.triu_indices(size)
    p[iu] = rng.uniform(-epsilon, epsilon, size=iu[0].size)
    return p + np.triu(p, 1).T


def noise_base_matrices(cfg: NoiseStudyConfig):
    """Noise-free M and (H_sub, S_sub) for the configured fixture."""
    problem = load_problem(cfg.fixture, cfg.n_frozen,
                           cfg.geometry_tag or None)
    gs = solve_ground_state(problem, cfg.adapt)
    manifold = sector_manifold(problem, "EE", 0)
    mats_m = eom.build_M_direct(gs, problem.h_action, manifold)
    mats_qse = eom.build_qse(gs, problem.h_action, manifold)
    return problem, mats_m, mats_qse


def _real_symmetric(matrix, label):
    if np.max(np.abs(matrix.imag)) > 1e-10:
        raise ValueError(f"{label} is not real; the perturbation model "
                         "assumes real symmetric matrices")
    return np.ascontiguousarray(matrix.real)


def _read_matrix_dump(path):
    with open(path) as f:
        return eom.matrix_from_text(f.read())


def run_noise_study(cfg: NoiseStudyConfig, base_matrices=None):
    """Mean |dE_k(noisy) - dE_k(clean)| over the first n_roots, averaged
    over n_trials independent uniform matrix perturbations per epsilon.

    Base matrices come from the fixture pipeline, from a prebuilt
    (EomMatrixSet, EomMatrixSet) pair, or from matrix-dump files."""
    if base_matrices is not None:
        mats_m, mats_qse = base_matrices
        m, h_sub, s_sub = mats_m.m, mats_qse.h_sub, mats_qse.s_sub
        tag = cfg.geometry_tag or "prebuilt"
    elif cfg.m_dump is not None:
        m = _read_matrix_dump(cfg.m_dump)
        h_sub = (_read_matrix_dump(cfg.h_sub_dump)
                 if cfg.h_sub_dump else None)
        s_sub = (_read_matrix_dump(cfg.s_sub_dump)
                 if cfg.s_sub_dump else None)
        if "QSE" in cfg.methods and (h_sub is None or s_sub is None):
            raise ValueError("QSE requires h_sub_dump and s_sub_dump")
        tag = cfg.geometry_tag or "dump"
    else:
        problem, mats_m, mats_qse = noise_base_matrices(cfg)
        m, h_sub, s_sub = mats_m.m, mats_qse.h_sub, mats_qse.s_sub
        tag = problem.tag

    m = _real_symmetric(m, "M")
    if h_sub is not None:
        h_sub = _real_symmetric(h_sub, "H_sub")
        s_sub = _real_symmetric(s_sub, "S_sub")

    k = cfg.n_roots
    clean = {}
    if "QSCEOM" in cfg.methods:
        clean["QSCEOM"] = np.linalg.eigvalsh(m)[:k]
    if "QSE" in cfg.methods:
        vals, _, _ = eom.solve_generalized_symmetric(h_sub, s_sub)
        clean["QSE"] = (vals - vals[0])[1:k + 1]
    if any(len(clean[meth]) < k for meth in cfg.methods):
        raise ValueError("base matrices have fewer roots than n_roots")

    rows = []
    for ei, eps in enumerate(cfg.epsilons):
        errors = {meth: [] for meth in cfg.methods}
        flagged = {meth: 0 for meth in cfg.methods}
        for trial in range(cfg.n_trials):
            rng = np.random.default_rng([cfg.seed, ei, trial])
            for meth in cfg.methods:
                if meth == "QSCEOM":
                    noisy = np.linalg.eigvalsh(
                        m + _symmetric_perturbation(rng, m.shape[0], eps))[:k]
                    errors[meth].append(float(np.mean(np.abs(noisy
                                                             - clean[meth]))))
                else:
                    hp = h_sub + _symmetric_perturbation(rng, h_sub.shape[0],
                                                         eps)
                    sp = s_sub
                    if cfg.variant == "perturb_all":
                        sp = s_sub + _symmetric_perturbation(
                            rng, s_sub.shape[0], eps)
                    try:
                        vals, _, _ = eom.solve_generalized_symmetric(hp, sp)
                        diffs = (vals - vals[0])[1:k + 1]
                        if len(diffs) < k:
                            raise RuntimeError("rank collapse")
                        errors[meth].append(float(np.mean(np.abs(
                            diffs - clean[meth]))))
                    except RuntimeError:
                        flagged[meth] += 1
        for meth in cfg.methods:
            ok = np.array(errors[meth])
            mean = float(np.mean(ok)) if ok.size else np.nan
            stderr = (float(np.std(ok) / np.sqrt(ok.size))
                      if ok.size > 1 else np.nan)
            rows.append({
                "geometry_tag": tag,
                "method": meth,
                "sector": "EE",
                "variant": cfg.variant,
                "epsilon": eps,
                "mean_error_hartree": mean,
                "stderr_hartree": stderr,
                "n_trials": cfg.n_trials,
                "n_flagged": flagged[meth],
                "flags": "" if ok.size else "all_trials_flagged",
            })
    if cfg.output:
        write_table(rows, NOISE_COLUMNS, cfg.output)
    return rows


# ---------------------------------------------------------------------
# Size-intensivity test
# ---------------------------------------------------------------------

def _fragment_spin_orbitals(spatial_indices):
    return {2 * p + s for p in spatial_indices for s in (0, 1)}


def _project_fragment_ansatz(ansatz: AnsatzCircuit, spatial_indices):
    """Restrict a composite ansatz to one fragment's operators, remapping
    spin-orbital indices to the isolated-fragment register."""
    fragment_sos = _fragment_spin_orbitals(spatial_indices)
    inverse = {p_new: p_old for p_old, p_new in enumerate(spatial_indices)}
    kept, foreign = [], []
    for exc, angle in ansatz:
        indices = set(exc.indices)
        if indices <= fragment_sos:
            remapped = tuple(2 * inverse[k // 2] + k % 2 for k in exc.indices)
            kept.append((ExcitationIndex(exc.kind, remapped), angle))
        elif indices & fragment_sos:
            foreign.append(exc)
    return AnsatzCircuit(kept), foreign


def run_size_intensivity(cfg: SizeIntensivityConfig):
    """Fragment-local excitation energies of a non-interacting composite
    versus the isolated fragment, with the same (possibly truncated)
    ground-state preparation on both sides."""
    with open(cfg.fragment_fixture) as f:
        frag = parse_fcidump(f.read())
    with open(cfg.environment_fixture) as f:
        env = parse_fcidump(f.read())
    composite, (map_frag, _map_env) = direct_sum(frag, env)
    tag = cfg.geometry_tag or (f"{Path(cfg.fragment_fixture).stem}"
                               f"+{Path(cfg.environment_fixture).stem}")

    comp_problem = build_problem(composite, tag=tag)
    adapt = AdaptSettings(grad_threshold=cfg.adapt.grad_threshold,
                          max_operators=cfg.max_operators,
                          inner_gtol=cfg.adapt.inner_gtol)
    gs_comp = solve_ground_state(comp_problem, adapt)

    frag_ansatz, cross_ops = _project_fragment_ansatz(gs_comp.ansatz,
                                                      map_frag)
    cross_flag = (f"cross_fragment_operators={len(cross_ops)}"
                  if cross_ops else "")

    iso_problem = build_problem(frag, tag=Path(cfg.fragment_fixture).stem)
    iso_state = apply_ansatz(iso_problem.reference, frag_ansatz)
    gs_iso = GroundStateResult(
        energy=iso_problem.h_action.expectation(iso_state),
        ansatz=frag_ansatz, state=iso_state,
        gradient_norm_history=[], energy_history=[],
        stop_reason="projected_from_composite", converged=gs_comp.converged,
        reference=iso_problem.reference)

    iso_manifold = sector_manifold(iso_problem, "EE", 0)
    comp_manifold = sector_manifold(comp_problem, "EE", 0)

    rows = []
    for method in cfg.methods:
        if method == "QSCEOM":
            iso = eom.solve_qsceom(
                eom.build_M_direct(gs_iso, iso_problem.h_action,
                                   iso_manifold))
            comp = eom.solve_qsceom(
                eom.build_M_direct(gs_comp, comp_problem.h_action,
                                   comp_manifold))
        elif method == "QSE":
            iso = eom.solve_qse(
                eom.build_qse(gs_iso, iso_problem.h_action, iso_manifold))
            comp = eom.solve_qse(
                eom.build_qse(gs_comp, comp_problem.h_action, comp_manifold))
        else:
            raise ValueError(f"unsupported method {method!r}")
        comp_energies = comp.energies
        for k, e_iso in enumerate(iso.energies):
            nearest = float(comp_energies[np.argmin(np.abs(comp_energies
                                                           - e_iso))])
            flags = [cross_flag] if cross_flag else []
            if abs(nearest - e_iso) > ROOT_MATCH_WINDOW:
                flags.append("identification_failure")
            rows.append({
                "geometry_tag": tag,
                "method": method,
                "sector": "EE",
                "root_index": k,
                "ee_isolated_hartree": float(e_iso),
                "ee_composite_hartree": nearest,
                "difference_hartree": nearest - float(e_iso),
                "flags": ";".join(flags),
            })
    if cfg.output:
        write_table(rows, SIZE_COLUMNS, cfg.output)
    return rows


# ---------------------------------------------------------------------
# Table output
# ---------------------------------------------------------------------

def _format_cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(rows, columns, output_path):
    """CSV with a header row plus a JSON mirror alongside."""
    path = Path(output_path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row.get(col, "")) for col in columns])
    mirror = path.with_suffix(".json")
    with open(mirror, "w") as f:
        json.dump(rows, f, indent=1, default=float)
        f.write("\n")
    return path, mirror
