"""Shared test utilities: fixture paths, cached problem/ground-state
bundles so expensive ADAPT runs happen once per session."""

import json
import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qsceom.experiments import (AdaptSettings, Problem, load_problem,
                                solve_ground_state)

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"

H2_TAGS = ["r0.50", "r0.75", "r1.00", "r1.25", "r1.50",
           "r1.75", "r2.00", "r2.25", "r2.50"]
LIH_TAGS = ["r1.00", "r1.20", "r1.40", "r1.60", "r1.80", "r2.00"]
H2O_TAGS = ["r0.80", "r1.00", "r1.20", "r1.40", "r1.60", "r1.80"]
H4_TAGS = ["sep1.20", "sep1.30", "sep1.60", "sep1.80", "sep2.00",
           "sep2.50", "sep3.00"]


def fixture_path(molecule, tag):
    return FIXTURES / molecule / f"{tag}.fcidump"


@lru_cache(maxsize=None)
def manifest():
    with open(FIXTURES / "manifest.json") as f:
        return json.load(f)


def manifest_entry(molecule, tag):
    for entry in manifest()["fixtures"]:
        if entry["molecule"] == molecule and entry["tag"] == tag:
            return entry
    raise KeyError(f"{molecule}/{tag} not in manifest")


@lru_cache(maxsize=None)
def problem_for(molecule, tag, n_frozen=0) -> Problem:
    return load_problem(fixture_path(molecule, tag), n_frozen, tag)


@lru_cache(maxsize=None)
def ground_state_for(molecule, tag, n_frozen=0, grad_threshold=1e-3,
                     max_operators=None, inner_gtol=1e-6):
    problem = problem_for(molecule, tag, n_frozen)
    settings = AdaptSettings(grad_threshold=grad_threshold,
                             max_operators=max_operators,
                             inner_gtol=inner_gtol)
    return solve_ground_state(problem, settings)


N_FROZEN = {"h2": 0, "lih": 1, "h2o": 1, "h4": 0}


@pytest.fixture(scope="session")
def h2_problem():
    return problem_for("h2", "r0.75")


@pytest.fixture(scope="session")
def h2_gs():
    return ground_state_for("h2", "r0.75", inner_gtol=1e-8)


@pytest.fixture(scope="session")
def h4_problem():
    return problem_for("h4", "sep2.00")


@pytest.fixture(scope="session")
def h4_gs():
    return ground_state_for("h4", "sep2.00", inner_gtol=1e-8)


@pytest.fixture(scope="session")
def lih_problem():
    return problem_for("lih", "r1.60", n_frozen=1)


@pytest.fixture(scope="session")
def lih_gs():
    return ground_state_for("lih", "r1.60", n_frozen=1)
