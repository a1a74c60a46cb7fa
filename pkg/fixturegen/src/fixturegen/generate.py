"""Fixture generation driver.

Reads a molecule/grid spec (JSON), runs STO-3G RHF for every geometry,
exports FCIDUMP files under fixtures/<molecule>/<tag>.fcidump, and writes
a manifest recording geometry, SCF and FCI energies, and frozen-core
settings for each fixture.
"""

import argparse
import json
import math
import sys
from pathlib import Path

from .basis import build_basis
from .fci import fci_ground_energy
from .fcidump import write_fcidump
from .integrals import integral_tensors
from .scf import SCFError, mo_integrals, restricted_hartree_fock

GENERATOR_VERSION = "fixturegen 0.1.0 (sto-3g mcmurchie-davidson rhf)"


def geometry_for(molecule, parameter):
    """Cartesian geometry in Angstrom for a named molecule at one grid value."""
    if molecule == "h2":
        return [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, parameter))]
    if molecule == "lih":
        return [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, parameter))]
    if molecule == "h2o":
        # Symmetric O-H stretch at the experimental bond angle.
        angle = math.radians(104.52)
        x = parameter * math.sin(angle / 2.0)
        z = parameter * math.cos(angle / 2.0)
        return [("O", (0.0, 0.0, 0.0)),
                ("H", (x, 0.0, z)),
                ("H", (-x, 0.0, z))]
    if molecule == "h4":
        # Rectangle: two H2 units (bond 1.5 A) separated by `parameter`.
        bond = 1.5
        return [("H", (0.0, 0.0, 0.0)),
                ("H", (0.0, 0.0, bond)),
                ("H", (parameter, 0.0, 0.0)),
                ("H", (parameter, 0.0, bond))]
    raise ValueError(f"unknown molecule {molecule!r}")


def generate_fixture(molecule, parameter, tag, n_frozen, out_dir):
    geometry = geometry_for(molecule, parameter)
    basis, atoms = build_basis(geometry)
    n_electrons = sum(z for z, _ in atoms)

    s, hcore, eri_ao, e_nuc = integral_tensors(basis, atoms)
    e_scf, mo_coeff, _ = restricted_hartree_fock(s, hcore, eri_ao, e_nuc,
                                                 n_electrons)
    h1, eri = mo_integrals(hcore, eri_ao, mo_coeff)
    e_fci = fci_ground_energy(h1, eri, e_nuc, n_electrons)

    mol_dir = Path(out_dir) / molecule
    mol_dir.mkdir(parents=True, exist_ok=True)
    path = mol_dir / f"{tag}.fcidump"
    write_fcidump(path, h1, eri, e_nuc, n_electrons)

    return {
        "molecule": molecule,
        "tag": tag,
        "geometry": [[el, list(xyz)] for el, xyz in geometry],
        "basis": "STO-3G",
        "n_frozen": n_frozen,
        "scf_energy": e_scf,
        "fci_energy": e_fci,
        "path": str(path.relative_to(Path(out_dir).parent)),
        "generator": GENERATOR_VERSION,
    }


def run(spec_path, out_dir):
    with open(spec_path) as f:
        spec = json.load(f)
    entries = []
    for mol in spec["molecules"]:
        name = mol["name"]
        n_frozen = mol.get("n_frozen", 0)
        tag_prefix = mol.get("tag_prefix", "r")
        for parameter in mol["grid"]:
            tag = f"{tag_prefix}{parameter:.2f}"
            try:
                entry = generate_fixture(name, parameter, tag, n_frozen,
                                         out_dir)
            except SCFError as exc:
                print(f"skipping {name}/{tag}: {exc}", file=sys.stderr)
                continue
            entries.append(entry)
            print(f"wrote {entry['path']}  SCF={entry['scf_energy']:.10f}"
                  f"  FCI={entry['fci_energy']:.10f}")
    manifest = {"generator": GENERATOR_VERSION, "fixtures": entries}
    manifest_path = Path(out_dir) / "manifest.json"
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {manifest_path}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Export STO-3G FCIDUMP fixtures and their manifest.")
    parser.add_argument("--spec", required=True,
                        help="JSON molecule/grid spec file")
    parser.add_argument("--out", required=True,
                        help="output fixtures directory")
    args = parser.parse_args(argv)
    run(args.spec, args.out)


if __name__ == "__main__":
    main()
