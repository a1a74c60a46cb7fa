"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line with the governing tolerance. Run with `pytest -s` (or -rA)
to see the lines.

Heavy ground-state solves are cached per session (conftest), so criteria
share ADAPT runs where they use the same settings.
"""

import time

import numpy as np
import pytest

from qsceom.eom import (build_M_circuit_path, build_M_direct, build_qeom,
                        monomial_paulisum, solve_paired_geneig,
                        solve_qsceom)
from qsceom.experiments import (EV_PER_HARTREE, NoiseStudyConfig,
                                SizeIntensivityConfig, run_noise_study,
                                run_size_intensivity)
from qsceom.fci import (fci_energy_differences, fci_sector_spectrum,
                        projected_matrix)
from qsceom.manifolds import enumerate_manifold
from qsceom.statevector import apply_paulisum, inner

from conftest import (H2_TAGS, H2O_TAGS, H4_TAGS, LIH_TAGS, fixture_path,
                      ground_state_for, problem_for)

EV = EV_PER_HARTREE
SECTOR_TARGET = {"EE": 0, "IP": -1, "EA": 1}
SECTOR_SZ = {"EE": (0,), "IP": (-1, 1), "EA": (-1, 1)}


def _report(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}: {name} ({detail})")
    assert ok, f"{name}: {detail}"


def _sector_fci(problem, sector, sz):
    target = (problem.n_electrons + SECTOR_TARGET[sector], sz)
    diffs = fci_energy_differences(problem.hamiltonian,
                                   (problem.n_electrons, 0), target)
    return diffs[1:] if sector == "EE" else diffs


def _qsceom_errors(problem, gs, sector, n_roots=None):
    """Max |qsc root - FCI root| over all Sz runs of one sector."""
    worst = 0.0
    for sz in SECTOR_SZ[sector]:
        man = enumerate_manifold(sector, problem.n_electrons,
                                 problem.n_so - problem.n_electrons,
                                 sz_filter=sz)
        result = solve_qsceom(build_M_direct(gs, problem.h_action, man))
        reference = _sector_fci(problem, sector, sz)
        values = result.energies
        upto = min(len(values), len(reference))
        if n_roots is not None:
            upto = min(upto, n_roots)
        worst = max(worst, float(np.max(np.abs(values[:upto]
                                               - reference[:upto]))))
    return worst


# ---------------------------------------------------------------------
# Criterion 1: H2 exactness across the bond-length grid
# ---------------------------------------------------------------------

def test_h2_exactness_all_sectors():
    start = time.time()
    worst = 0.0
    for tag in H2_TAGS:
        problem = problem_for("h2", tag)
        gs = ground_state_for("h2", tag, inner_gtol=1e-8)
        for sector in ("EE", "IP", "EA"):
            worst = max(worst, _qsceom_errors(problem, gs, sector))
    elapsed = time.time() - start
    _report("H2 exactness (9 geometries, EE/IP/EA vs FCI)",
            worst < 1e-8 and elapsed < 60.0,
            f"max |error| = {worst:.3e} Ha, tolerance 1e-8; "
            f"runtime {elapsed:.1f}s < 60s")


# ---------------------------------------------------------------------
# Criterion 2: LiH frozen core (10 qubits)
# ---------------------------------------------------------------------

def test_lih_ee_ip_exact_ea_within_accuracy():
    worst_exact = 0.0
    worst_ea_ev = 0.0
    for tag in LIH_TAGS:
        problem = problem_for("lih", tag, n_frozen=1)
        gs = ground_state_for("lih", tag, n_frozen=1)
        worst_exact = max(worst_exact,
                          _qsceom_errors(problem, gs, "EE"),
                          _qsceom_errors(problem, gs, "IP"))
        worst_ea_ev = max(worst_ea_ev,
                          _qsceom_errors(problem, gs, "EA", n_roots=3) * EV)
    _report("LiH EE/IP exactness (6 geometries)",
            worst_exact < 1e-8,
            f"max |error| = {worst_exact:.3e} Ha, tolerance 1e-8")
    _report("LiH EA accuracy (first 3 roots, 6 geometries)",
            worst_ea_ev <= 0.1,
            f"max |error| = {worst_ea_ev:.4f} eV, tolerance 0.1 eV")


# ---------------------------------------------------------------------
# Criterion 3: H2O frozen core (12 qubits)
# ---------------------------------------------------------------------

def test_h2o_ee_accuracy_and_charged_state_report():
    ee_short = {}
    reported = []
    for tag in H2O_TAGS:
        problem = problem_for("h2o", tag, n_frozen=1)
        gs = ground_state_for("h2o", tag, n_frozen=1)
        ee_short[tag] = _qsceom_errors(problem, gs, "EE", n_roots=2) * EV
        ip = _qsceom_errors(problem, gs, "IP", n_roots=3) * EV
        ea = _qsceom_errors(problem, gs, "EA", n_roots=3) * EV
        reported.append((tag, ee_short[tag], ip, ea))
    for tag, ee, ip, ea in reported:
        print(f"  H2O {tag}: EE(2 roots) {ee:.4f} eV, "
              f"IP(3 roots) {ip:.4f} eV, EA(3 roots) {ea:.4f} eV"
              + ("  [IP/EA reported; permitted above 0.1 eV]"
                 if max(ip, ea) > 0.1 else ""))
    short = {tag: err for tag, err in ee_short.items()
             if float(tag[1:]) <= 1.4 + 1e-12}
    worst = max(short.values())
    _report("H2O EE accuracy up to O-H = 1.4 A (first 2 roots)",
            worst <= 0.1,
            f"max |error| = {worst:.4f} eV over {sorted(short)}, "
            "tolerance 0.1 eV")


# ---------------------------------------------------------------------
# Criterion 4: qEOM IP/EA failure where q-sc-EOM stays exact
# ---------------------------------------------------------------------

def test_qeom_vac_failure_on_h2():
    worst_qeom_ev = 0.0
    worst_qsc = 0.0
    for tag in H2_TAGS:
        problem = problem_for("h2", tag)
        gs = ground_state_for("h2", tag, inner_gtol=1e-8)
        for sector in ("IP", "EA"):
            worst_qsc = max(worst_qsc, _qsceom_errors(problem, gs, sector))
            for sz in SECTOR_SZ[sector]:
                man = enumerate_manifold(sector, 2, 2, sz_filter=sz)
                result = solve_paired_geneig(
                    build_qeom(gs, problem.h_action, man))
                reference = _sector_fci(problem, sector, sz)
                upto = min(len(result.energies), len(reference))
                err = np.max(np.abs(result.energies[:upto]
                                    - reference[:upto])) * EV
                worst_qeom_ev = max(worst_qeom_ev, float(err))
    _report("qEOM IP/EA VAC violation vs q-sc-EOM exactness",
            worst_qeom_ev > 0.1 and worst_qsc < 1e-8,
            f"qEOM max |error| = {worst_qeom_ev:.3f} eV (> 0.1 eV); "
            f"q-sc-EOM max = {worst_qsc:.3e} Ha (< 1e-8)")


# ---------------------------------------------------------------------
# Criterion 5: structural invariants
# ---------------------------------------------------------------------

def _v_matrix_defect(problem, sector):
    ref = problem.reference
    n = problem.n_so
    man = enumerate_manifold(sector, problem.n_electrons,
                             n - problem.n_electrons)
    size = len(man)
    v = np.zeros((size, size), dtype=complex)
    images = [apply_paulisum(ref, monomial_paulisum(e, n)) for e in man]
    adjoints = [apply_paulisum(ref, monomial_paulisum(e, n, dagger=True))
                for e in man]
    for i in range(size):
        for j in range(size):
            v[i, j] = (inner(images[i], images[j])
                       - inner(adjoints[j], adjoints[i]))
    return float(np.max(np.abs(v - np.eye(size))))


def test_structural_invariants():
    h2 = problem_for("h2", "r0.75")
    h2_gs = ground_state_for("h2", "r0.75", inner_gtol=1e-8)
    h4 = problem_for("h4", "sep2.00")
    h4_gs = ground_state_for("h4", "sep2.00", inner_gtol=1e-8)

    v_defect = max(_v_matrix_defect(h2, s) for s in ("EE", "IP", "EA"))
    v_defect = max(v_defect, _v_matrix_defect(h4, "EE"))
    _report("V = identity", v_defect < 1e-12, f"max defect {v_defect:.2e}")

    # W vanishes algebraically for any circuit; Q vanishes up to the
    # ground-state residual, so its 1e-10 check runs on the numerically
    # exact H2 ADAPT states.
    q_defect = 0.0
    w_defect = 0.0
    for problem, gs, sectors in [(h2, h2_gs, ("EE", "IP", "EA")),
                                 (h4, h4_gs, ("EE",))]:
        for sector in sectors:
            man = enumerate_manifold(sector, problem.n_electrons,
                                     problem.n_so - problem.n_electrons)
            mats = build_qeom(gs, problem.h_action, man, dressed=True)
            w_defect = max(w_defect, float(np.max(np.abs(mats.w))))
            if problem is h2:
                q_defect = max(q_defect, float(np.max(np.abs(mats.q))))
    _report("Q = W = 0 with dressed operators",
            q_defect < 1e-10 and w_defect < 1e-10,
            f"max |Q| {q_defect:.2e} (exact-state H2), "
            f"max |W| {w_defect:.2e} (H2 and H4)")

    herm = 0.0
    path = 0.0
    cnots = 0
    for problem, gs, sectors in [(h2, h2_gs, ("EE", "IP", "EA")),
                                 (h4, h4_gs, ("EE",))]:
        for sector in sectors:
            man = enumerate_manifold(sector, problem.n_electrons,
                                     problem.n_so - problem.n_electrons)
            direct = build_M_direct(gs, problem.h_action, man)
            herm = max(herm, float(np.max(np.abs(direct.m
                                                 - direct.m.conj().T))))
            circuit = build_M_circuit_path(gs, problem.h_action, man,
                                           imaginary_part=True)
            path = max(path, float(np.max(np.abs(circuit.m - direct.m))))
            gates = build_M_circuit_path(gs, problem.h_action, man,
                                         preparation="gates")
            cnots = max(cnots, gates.meta["max_cnots"])
    _report("M Hermitian", herm < 1e-9, f"max defect {herm:.2e}")
    _report("circuit-path M equals direct M", path < 1e-10,
            f"max |difference| {path:.2e}")
    _report("entangled references need <= 7 CNOTs", cnots <= 7,
            f"max CNOT count {cnots}")

    vac = 0.0
    for problem in (h2, h4):
        for sector in ("EE", "IP", "EA"):
            man = enumerate_manifold(sector, problem.n_electrons,
                                     problem.n_so - problem.n_electrons)
            for entry in man:
                image = apply_paulisum(
                    problem.reference,
                    monomial_paulisum(entry, problem.n_so, dagger=True))
                vac = max(vac, image.norm())
    _report("vacuum annihilation on the reference", vac < 1e-14,
            f"max ||G+|Phi0>|| = {vac:.2e}")


# ---------------------------------------------------------------------
# Criterion 6: size-intensivity with a truncated ansatz
# ---------------------------------------------------------------------

def test_size_intensivity():
    cfg = SizeIntensivityConfig(
        fragment_fixture=str(fixture_path("h2", "r0.75")),
        environment_fixture=str(fixture_path("h4", "sep2.00")),
        max_operators=3)
    rows = run_size_intensivity(cfg)
    qsc = max(abs(r["difference_hartree"]) for r in rows
              if r["method"] == "QSCEOM")
    qse = max(abs(r["difference_hartree"]) for r in rows
              if r["method"] == "QSE")
    flags = {r["flags"] for r in rows}
    _report("size-intensivity: q-sc-EOM fragment-local EEs",
            qsc < 1e-8 and "identification_failure" not in ";".join(flags),
            f"max |composite - isolated| = {qsc:.3e} Ha, tolerance 1e-8")
    _report("size-intensivity: QSE discrepancy of order 1e-2 Ha",
            5e-3 <= qse <= 0.5,
            f"max |composite - isolated| = {qse:.3e} Ha "
            "(order-of-magnitude window [5e-3, 0.5])")

    # with an exact (converged) composite ground state QSE is intensive too
    cfg_exact = SizeIntensivityConfig(
        fragment_fixture=str(fixture_path("h2", "r0.75")),
        environment_fixture=str(fixture_path("h4", "sep2.00")),
        max_operators=None)
    rows_exact = run_size_intensivity(cfg_exact)
    qse_exact = max(abs(r["difference_hartree"]) for r in rows_exact
                    if r["method"] == "QSE")
    _report("size-intensivity: QSE recovers with exact ground state",
            qse_exact < 1e-8, f"max |difference| = {qse_exact:.3e} Ha")


# ---------------------------------------------------------------------
# Criterion 7: noise study
# ---------------------------------------------------------------------

def test_noise_study_h4():
    fixture = str(fixture_path("h4", "sep2.00"))
    base = NoiseStudyConfig(fixture=fixture, geometry_tag="sep2.00",
                            n_trials=2000, seed=20240803,
                            variant="perturb_all")
    rows_all = run_noise_study(base)
    by_eps = {}
    for r in rows_all:
        by_eps.setdefault(r["epsilon"], {})[r["method"]] = r
    strictly_worse = all(
        pair["QSE"]["mean_error_hartree"] > pair["QSCEOM"]["mean_error_hartree"]
        for pair in by_eps.values())
    ratios = [pair["QSE"]["mean_error_hartree"]
              / pair["QSCEOM"]["mean_error_hartree"]
              for pair in by_eps.values()]
    _report("noise: QSE error exceeds q-sc-EOM at every epsilon",
            strictly_worse,
            f"QSE/q-sc-EOM mean-error ratios {np.round(ratios, 2)}")

    ov = NoiseStudyConfig(fixture=fixture, geometry_tag="sep2.00",
                          n_trials=2000, seed=20240803,
                          variant="exact_overlap")
    rows_ov = run_noise_study(ov)
    by_eps_ov = {}
    for r in rows_ov:
        by_eps_ov.setdefault(r["epsilon"], {})[r["method"]] = r
    ratios_ov = [pair["QSE"]["mean_error_hartree"]
                 / pair["QSCEOM"]["mean_error_hartree"]
                 for pair in by_eps_ov.values()]
    within = all(1.0 / 3.0 <= r <= 3.0 for r in ratios_ov)
    _report("noise: exact-overlap QSE within a factor 3 of q-sc-EOM",
            within, f"ratios {np.round(ratios_ov, 2)}")

    # error curves are non-decreasing in epsilon (2-standard-error slack)
    for method in ("QSCEOM", "QSE"):
        eps_sorted = sorted(by_eps)
        for lo, hi in zip(eps_sorted, eps_sorted[1:]):
            a = by_eps[lo][method]
            b = by_eps[hi][method]
            slack = 2 * (a["stderr_hartree"] + b["stderr_hartree"])
            assert b["mean_error_hartree"] >= a["mean_error_hartree"] - slack
    print("  noise: error curves non-decreasing in epsilon (2 SE slack)")


# ---------------------------------------------------------------------
# Criterion 8: oracle self-consistency
# ---------------------------------------------------------------------

def test_oracle_self_consistency():
    worst_violation = -np.inf
    checked = 0
    for molecule, tags, n_frozen, gtol in [
            ("h2", H2_TAGS, 0, 1e-8), ("lih", LIH_TAGS, 1, 1e-6),
            ("h2o", H2O_TAGS, 1, 1e-6), ("h4", H4_TAGS, 0, 1e-8)]:
        for tag in tags:
            problem = problem_for(molecule, tag, n_frozen)
            gs = ground_state_for(molecule, tag, n_frozen, inner_gtol=gtol)
            fci0 = fci_sector_spectrum(problem.hamiltonian,
                                       problem.n_electrons,
                                       problem.integrals.ms2).eigenvalues[0]
            worst_violation = max(worst_violation, fci0 - gs.energy)
            checked += 1
    _report("variational bound on every fixture",
            worst_violation < 1e-9,
            f"max (FCI - ADAPT) = {worst_violation:.3e} Ha over "
            f"{checked} fixtures")

    worst_union = 0.0
    for molecule, tag in [("h2", "r0.75"), ("h4", "sep2.00")]:
        problem = problem_for(molecule, tag)
        n = problem.n_so
        collected = np.concatenate([
            fci_sector_spectrum(problem.hamiltonian, w).eigenvalues
            for w in range(n + 1)])
        dets = np.arange(1 << n, dtype=np.uint64)
        full = np.linalg.eigvalsh(projected_matrix(problem.hamiltonian, dets))
        worst_union = max(worst_union,
                          float(np.max(np.abs(np.sort(collected) - full))))
    _report("union of sector spectra equals full spectrum (n <= 8)",
            worst_union < 1e-9, f"max deviation {worst_union:.2e} Ha")
