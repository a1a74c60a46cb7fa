"""Command-line harness: scan, noise, size-intensivity, spectrum, and
ground-state subcommands driven by JSON configs."""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (AdaptSettings, NoiseStudyConfig, ScanConfig,
                          SizeIntensivityConfig, load_problem,
                          run_noise_study, run_scan, run_size_intensivity,
                          solve_ground_state)
from .ground_state import save_ansatz


def _load_config(path):
    if path is None:
        return {}
    with open(path) as f:
        return json.load(f)


def _adapt_settings(cfg: dict) -> AdaptSettings:
    adapt = cfg.get("adapt", {})
    threshold = adapt.get("grad_threshold", 1e-3)
    if isinstance(threshold, str):
        threshold = float(threshold)
    return AdaptSettings(grad_threshold=threshold,
                         max_operators=adapt.get("max_operators"),
                         inner_gtol=adapt.get("inner_gtol", 1e-6))


def _fixture_pairs(cfg: dict):
    out = []
    for item in cfg.get("fixtures", []):
        if isinstance(item, dict):
            out.append((item["path"], item.get("tag", item["path"])))
        else:
            out.append((item, item))
    return out


def cmd_scan(args):
    cfg = _load_config(args.config)
    scan = ScanConfig(
        fixtures=_fixture_pairs(cfg),
        sectors=cfg.get("sectors", ["EE"]),
        methods=cfg.get("methods", ["QSCEOM"]),
        n_frozen=cfg.get("n_frozen", 0),
        adapt=_adapt_settings(cfg),
        n_roots=cfg.get("n_roots"),
        output=args.output or cfg.get("output"),
    )
    rows = run_scan(scan)
    _report(rows, scan.output)


def cmd_spectrum(args):
    cfg = _load_config(args.config)
    fixtures = _fixture_pairs(cfg)
    if args.fixture:
        fixtures = [(args.fixture, args.tag or args.fixture)]
    scan = ScanConfig(
        fixtures=fixtures,
        sectors=[args.sector or cfg.get("sector", "EE")],
        methods=[args.method or cfg.get("method", "QSCEOM")],
        n_frozen=(args.n_frozen if args.n_frozen is not None
                  else cfg.get("n_frozen", 0)),
        adapt=_adapt_settings(cfg),
        n_roots=args.n_roots or cfg.get("n_roots"),
        output=args.output or cfg.get("output"),
    )
    rows = run_scan(scan)
    _report(rows, scan.output)


def cmd_noise(args):
    cfg = _load_config(args.config)
    noise = NoiseStudyConfig(
        fixture=cfg.get("fixture", ""),
        m_dump=cfg.get("m_dump"),
        h_sub_dump=cfg.get("h_sub_dump"),
        s_sub_dump=cfg.get("s_sub_dump"),
        geometry_tag=cfg.get("tag", ""),
        epsilons=tuple(cfg.get("epsilons",
                               (1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3))),
        n_trials=cfg.get("n_trials", 2000),
        seed=args.seed if args.seed is not None else cfg.get("seed", 0),
        variant=cfg.get("variant", "perturb_all"),
        methods=tuple(cfg.get("methods", ("QSCEOM", "QSE"))),
        n_roots=cfg.get("n_roots", 3),
        n_frozen=cfg.get("n_frozen", 0),
        adapt=_adapt_settings(cfg),
        output=args.output or cfg.get("output"),
    )
    rows = run_noise_study(noise)
    _report(rows, noise.output)


def cmd_size_intensivity(args):
    cfg = _load_config(args.config)
    size = SizeIntensivityConfig(
        fragment_fixture=cfg["fragment_fixture"],
        environment_fixture=cfg["environment_fixture"],
        geometry_tag=cfg.get("tag", ""),
        max_operators=cfg.get("max_operators", 3),
        adapt=_adapt_settings(cfg),
        methods=tuple(cfg.get("methods", ("QSCEOM", "QSE"))),
        output=args.output or cfg.get("output"),
    )
    rows = run_size_intensivity(size)
    _report(rows, size.output)


def cmd_ground_state(args):
    cfg = _load_config(args.config)
    path = args.fixture or cfg["fixture"]
    threshold = args.grad_threshold
    if threshold is None:
        threshold = cfg.get("adapt", {}).get("grad_threshold", 1e-3)
    max_ops = (args.max_operators if args.max_operators is not None
               else cfg.get("adapt", {}).get("max_operators"))
    adapt = AdaptSettings(grad_threshold=float(threshold),
                          max_operators=max_ops)
    n_frozen = (args.n_frozen if args.n_frozen is not None
                else cfg.get("n_frozen", 0))
    problem = load_problem(path, n_frozen, args.tag or cfg.get("tag", ""))
    gs = solve_ground_state(problem, adapt)
    if args.checkpoint:
        save_ansatz(gs.ansatz, args.checkpoint)
    summary = {
        "geometry_tag": problem.tag,
        "energy_hartree": gs.energy,
        "n_operators": len(gs.ansatz),
        "stop_reason": gs.stop_reason,
        "converged": gs.converged,
        "gradient_norm_history": gs.gradient_norm_history,
    }
    out = args.output or cfg.get("output")
    if out:
        with open(out, "w") as f:
            json.dump(summary, f, indent=1)
            f.write("\n")
    print(json.dumps(summary))


def _report(rows, output):
    if output:
        print(f"wrote {output} ({len(rows)} rows)")
    else:
        for row in rows:
            print(row)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="qsceom",
        description="Excited-state simulations: q-sc-EOM, qEOM, and QSE "
                    "baselines on a statevector simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="dissociation / method / sector scan")
    p_scan.add_argument("--config", required=True)
    p_scan.add_argument("--output")
    p_scan.add_argument("--seed", type=int)
    p_scan.set_defaults(func=cmd_scan)

    p_spec = sub.add_parser("spectrum", help="one fixture, one method/sector")
    p_spec.add_argument("--config")
    p_spec.add_argument("--fixture")
    p_spec.add_argument("--tag")
    p_spec.add_argument("--sector")
    p_spec.add_argument("--method")
    p_spec.add_argument("--n-frozen", type=int)
    p_spec.add_argument("--n-roots", type=int)
    p_spec.add_argument("--output")
    p_spec.add_argument("--seed", type=int)
    p_spec.set_defaults(func=cmd_spectrum)

    p_noise = sub.add_parser("noise", help="matrix-perturbation noise study")
    p_noise.add_argument("--config", required=True)
    p_noise.add_argument("--output")
    p_noise.add_argument("--seed", type=int)
    p_noise.set_defaults(func=cmd_noise)

    p_size = sub.add_parser("size-intensivity",
                            help="isolated fragment vs non-interacting "
                                 "composite")
    p_size.add_argument("--config", required=True)
    p_size.add_argument("--output")
    p_size.add_argument("--seed", type=int)
    p_size.set_defaults(func=cmd_size_intensivity)

    p_gs = sub.add_parser("ground-state", help="ADAPT-VQE ground state")
    p_gs.add_argument("--config")
    p_gs.add_argument("--fixture")
    p_gs.add_argument("--tag")
    p_gs.add_argument("--n-frozen", type=int)
    p_gs.add_argument("--grad-threshold")
    p_gs.add_argument("--max-operators", type=int)
    p_gs.add_argument("--checkpoint")
    p_gs.add_argument("--output")
    p_gs.add_argument("--seed", type=int)
    p_gs.set_defaults(func=cmd_ground_state)

    args = parser.parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
