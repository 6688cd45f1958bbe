"""Command-line entry point for experiments and the simulation cross-check."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .harness import ExperimentConfig, PilotSpec, load_config, run_experiment
from .montecarlo import run_oracle
from .pilots import assign_pilots
from .topology import generate_topology


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfmaxmin",
        description="Uplink cell-free massive MIMO max-min rate experiments")
    parser.add_argument("--config", type=Path, default=None,
                        help="flat key = value config file")
    parser.add_argument("--M", type=int, default=None, help="number of APs")
    parser.add_argument("--K", type=int, default=None, help="number of users")
    parser.add_argument("--tau", type=int, default=None, help="pilot length")
    parser.add_argument("--D", type=float, default=None, dest="D_km",
                        help="square side length in km")
    parser.add_argument("--realizations", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--pilot-mode", choices=("orthogonal", "random"), default=None)
    parser.add_argument("--scheme", choices=("proposed", "baseline", "both"), default=None)
    parser.add_argument("--out", type=str, default=None, dest="out_dir")
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--oracle", action="store_true",
                        help="run the Monte Carlo verification instead of experiments")
    parser.add_argument("--draws", type=int, default=None,
                        help="channel draws for --oracle")
    parser.add_argument("--trace", action="store_true",
                        help="write per-iteration min-rate CSVs")
    return parser


def config_from_args(args) -> ExperimentConfig:
    overrides = {key: getattr(args, key) for key in
                 ("M", "K", "D_km", "realizations", "seed", "scheme", "out_dir", "jobs")}
    if args.trace:
        overrides["save_traces"] = True
    if args.draws is not None:
        overrides["oracle_draws"] = args.draws
    if args.pilot_mode is not None or args.tau is not None:
        mode = args.pilot_mode or "random"
        tau = args.tau  # None means "K" for orthogonal mode
        if mode == "random" and tau is None:
            raise SystemExit("--pilot-mode random requires --tau")
        overrides["pilot_specs"] = (PilotSpec(mode=mode, tau=tau),)
    return load_config(args.config, overrides)


def _run_oracle_suite(config: ExperimentConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    specs = config.resolved_specs()
    # Distinct stream key so oracle draws never collide with experiment seeds.
    ss = np.random.SeedSequence(entropy=(config.seed, 0x0AC1E))
    children = ss.spawn(1 + len(specs))
    params = config.sim_params(tau=max(s.tau for s in specs))
    topology = generate_topology(params, np.random.default_rng(children[0]))
    for j, spec in enumerate(specs):
        rng = np.random.default_rng(children[1 + j])
        pilots = assign_pilots(config.K, spec.tau, spec.mode, rng=rng)
        report = run_oracle(topology, pilots,
                            dataclasses.replace(params, tau=spec.tau),
                            rng, n_draws=config.oracle_draws)
        path = out / f"oracle_{spec.label}.json"
        path.write_text(report.to_json())
        errs = report.max_relative_errors()
        print(f"[oracle {spec.label}] draws={report.draws} "
              + " ".join(f"{k}={v:.3%}" for k, v in errs.items()))
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)

    if args.oracle:
        out = _run_oracle_suite(config)
        print(f"oracle reports written to {out}")
        return 0

    result = run_experiment(config)
    out = result.save()
    print(json.dumps(result.summary(), indent=2))
    print(f"results written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
