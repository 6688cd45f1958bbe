"""Batch experiment driver: Monte Carlo over network realizations.

Each realization drops a fresh topology, assigns pilots per configured
scheme, and solves the max-min problem with the proposed alternation and/or
the power-only baseline.  Per-realization RNG streams are derived from the
master seed, so results are bit-identical regardless of worker count.
Outputs are plain CSV/JSON: per-user rates, empirical CDFs and a summary.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chanstats import ChannelStats
from .pilots import assign_pilots
from .solver import SolverOptions, solve_baseline, solve_p1
from .topology import (DEFAULT_DATA_SNR, DEFAULT_PILOT_SNR, SimParams,
                       generate_topology, noise_power)

SCHEMES = ("proposed", "baseline", "both")


@dataclass(frozen=True)
class PilotSpec:
    mode: str                 # "orthogonal" or "random"
    tau: int | None = None    # None: orthogonal defaults to K

    @property
    def label(self) -> str:
        if self.mode == "orthogonal":
            return "orthogonal"
        return f"random_tau{self.tau}"

    @classmethod
    def parse(cls, text: str) -> "PilotSpec":
        text = text.strip()
        if text == "orthogonal":
            return cls(mode="orthogonal")
        if text.startswith("random:"):
            return cls(mode="random", tau=int(text.split(":", 1)[1]))
        raise ValueError(f"cannot parse pilot spec {text!r} "
                         "(expected 'orthogonal' or 'random:<tau>')")


@dataclass(frozen=True)
class ExperimentConfig:
    M: int = 60
    K: int = 20
    D_km: float = 1.0
    sigma_sh_db: float = 8.0
    p_max: float = 1.0
    carrier_mhz: float = 1900.0
    ap_height_m: float = 15.0
    user_height_m: float = 1.65
    d0_m: float = 10.0
    d1_m: float = 50.0
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 9.0
    noise_temp_k: float = 290.0
    pilot_power_w: float = 0.1
    data_power_w: float = 0.1
    rho: float | None = None      # direct override of the normalized SNRs
    p_p: float | None = None
    realizations: int = 300
    scheme: str = "both"
    pilot_specs: tuple = (PilotSpec("orthogonal"),)
    out_dir: str = "results"
    seed: int = 1
    jobs: int = 1
    save_traces: bool = False
    save_snapshots: bool = False
    max_iters: int = 50
    eps_converge: float = 1e-4
    power_tol: float = 1e-4
    oracle_draws: int = 100_000

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("realizations must be at least 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if not self.pilot_specs:
            raise ValueError("at least one pilot spec is required")

    def normalized_snrs(self) -> tuple[float, float]:
        """(rho, p_p) either given directly or derived from the link budget."""
        p_n = noise_power(self.bandwidth_hz, self.noise_figure_db, self.noise_temp_k)
        rho = self.rho if self.rho is not None else self.data_power_w / p_n
        p_p = self.p_p if self.p_p is not None else self.pilot_power_w / p_n
        return rho, p_p

    def sim_params(self, tau: int) -> SimParams:
        rho, p_p = self.normalized_snrs()
        return SimParams(
            M=self.M, K=self.K, D_km=self.D_km, tau=tau,
            sigma_sh_db=self.sigma_sh_db, rho=rho, p_p=p_p, p_max=self.p_max,
            carrier_mhz=self.carrier_mhz, ap_height_m=self.ap_height_m,
            user_height_m=self.user_height_m, d0_m=self.d0_m, d1_m=self.d1_m,
            seed=self.seed)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(max_iters=self.max_iters,
                             eps_converge=self.eps_converge,
                             power_tol=self.power_tol)

    def resolved_specs(self) -> list[PilotSpec]:
        out = []
        for spec in self.pilot_specs:
            tau = spec.tau if spec.tau is not None else self.K
            out.append(PilotSpec(mode=spec.mode, tau=tau))
        return out


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines ('#' starts a comment)."""
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in fields:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        if key == "pilot_specs":
            values[key] = tuple(PilotSpec.parse(p) for p in val.replace(",", " ").split())
            continue
        ftype = str(fields[key].type)
        if "bool" in ftype:
            values[key] = val.lower() in ("1", "true", "yes", "on")
        elif "int" in ftype:
            values[key] = int(val)
        elif "float" in ftype:
            values[key] = float(val)
        else:
            values[key] = val
    return values


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    values = parse_config_text(Path(path).read_text()) if path else {}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ExperimentConfig(**values)


def cdf(rates) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CDF: probability i/N at the i-th sorted value."""
    rates = np.asarray(rates, dtype=float).ravel()
    if rates.size == 0:
        raise ValueError("cdf of an empty sample")
    values = np.sort(rates)
    probs = np.arange(1, values.size + 1) / values.size
    return values, probs


def outage_rate(rates, level: float = 0.05) -> float:
    """Smallest rate whose empirical CDF reaches ``level``."""
    values, probs = cdf(rates)
    idx = int(np.searchsorted(probs, level, side="left"))
    return float(values[min(idx, values.size - 1)])


def _run_realization(config: ExperimentConfig, index: int) -> dict:
    specs = config.resolved_specs()
    ss = np.random.SeedSequence(entropy=(config.seed, index))
    children = ss.spawn(1 + len(specs))
    topo_rng = np.random.default_rng(children[0])

    # All curves of one realization share the same topology draw.
    base_params = config.sim_params(tau=max(s.tau for s in specs))
    topology = generate_topology(base_params, topo_rng)

    record = {"realization": index, "curves": []}
    if config.save_snapshots:
        record["topology_json"] = topology.to_json()

    for j, spec in enumerate(specs):
        params = dataclasses.replace(base_params, tau=spec.tau)
        pilots = assign_pilots(config.K, spec.tau, spec.mode,
                               rng=np.random.default_rng(children[1 + j]))
        stats = ChannelStats.build(topology.beta, pilots.gram2, pilots.tau, params.p_p)

        curve = {"label": spec.label}
        if config.save_snapshots:
            curve["pilot_assignment"] = pilots.assignment.tolist()
        if config.scheme in ("proposed", "both"):
            solution, trace = solve_p1(stats, params, config.solver_options())
            curve["proposed"] = {
                "rates": solution.rate.tolist(),
                "converged": trace.converged,
                "iterations": trace.iterations,
                "min_rate_trace": trace.min_rate,
            }
        if config.scheme in ("baseline", "both"):
            solution = solve_baseline(stats, params, power_tol=config.power_tol)
            curve["baseline"] = {"rates": solution.rate.tolist()}
        record["curves"].append(curve)
    return record


@dataclass
class CurveResult:
    scheme: str
    label: str
    rates: np.ndarray            # (R, K)
    flagged: np.ndarray          # (R,) True where the solver did not converge
    iterations: np.ndarray | None = None
    traces: list | None = None

    def kept_rates(self) -> np.ndarray:
        return self.rates[~self.flagged]

    def summary(self) -> dict:
        kept = self.kept_rates().ravel()
        out = {
            "scheme": self.scheme,
            "pilots": self.label,
            "realizations": int(self.rates.shape[0]),
            "flagged": int(self.flagged.sum()),
            "median_rate": float(np.median(kept)),
            "outage5_rate": outage_rate(kept),
            "mean_min_rate": float(self.kept_rates().min(axis=1).mean()),
        }
        if self.iterations is not None:
            out["mean_iterations"] = float(self.iterations.mean())
            out["max_iterations"] = int(self.iterations.max())
        return out


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    curves: list
    records: list = field(default_factory=list)

    def summary(self) -> dict:
        return {"curves": [c.summary() for c in self.curves]}

    def save(self, out_dir=None) -> Path:
        out = Path(out_dir if out_dir is not None else self.config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for curve in self.curves:
            stem = f"{curve.scheme}_{curve.label}"
            with open(out / f"rates_{stem}.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["realization", "user", "rate"])
                for r in range(curve.rates.shape[0]):
                    if curve.flagged[r]:
                        continue
                    for k in range(curve.rates.shape[1]):
                        writer.writerow([r, k, f"{curve.rates[r, k]:.12g}"])
            values, probs = cdf(curve.kept_rates())
            with open(out / f"cdf_{stem}.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["rate_bits_per_s_per_Hz", "cdf"])
                for v, p in zip(values, probs):
                    writer.writerow([f"{v:.12g}", f"{p:.12g}"])
            if curve.traces:
                for r, trace in enumerate(curve.traces):
                    with open(out / f"trace_{stem}_r{r}.csv", "w", newline="") as fh:
                        writer = csv.writer(fh)
                        writer.writerow(["iteration", "min_rate"])
                        for i, rr in enumerate(trace, start=1):
                            writer.writerow([i, f"{rr:.12g}"])
        if self.config.save_snapshots:
            for record in self.records:
                snap = {
                    "realization": record["realization"],
                    "topology": json.loads(record["topology_json"]),
                    "pilot_assignments": {
                        c["label"]: c.get("pilot_assignment") for c in record["curves"]
                    },
                }
                with open(out / f"snapshot_r{record['realization']}.json", "w") as fh:
                    json.dump(snap, fh)
        with open(out / "summary.json", "w") as fh:
            json.dump(self.summary(), fh, indent=2)
        return out


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run all realizations and aggregate per-curve results.

    Raises if more than 1% of realizations fail to converge; those flagged
    realizations are excluded from the aggregated rates.
    """
    indices = range(config.realizations)
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_run_realization, [config] * config.realizations,
                                    indices, chunksize=4))
    else:
        records = [_run_realization(config, i) for i in indices]
    records.sort(key=lambda r: r["realization"])

    curves = []
    for j, spec in enumerate(config.resolved_specs()):
        for scheme in ("proposed", "baseline"):
            if config.scheme not in (scheme, "both"):
                continue
            entries = [rec["curves"][j][scheme] for rec in records]
            rates = np.array([e["rates"] for e in entries])
            if scheme == "proposed":
                flagged = np.array([not e["converged"] for e in entries])
                iters = np.array([e["iterations"] for e in entries])
                traces = [e["min_rate_trace"] for e in entries] if config.save_traces else None
            else:
                flagged = np.zeros(len(entries), dtype=bool)
                iters, traces = None, None
            curves.append(CurveResult(scheme=scheme, label=spec.label, rates=rates,
                                      flagged=flagged, iterations=iters, traces=traces))

    worst = max((int(c.flagged.sum()) for c in curves), default=0)
    if worst > 0.01 * config.realizations:
        raise RuntimeError(
            f"{worst} of {config.realizations} realizations failed to converge "
            "(limit is 1%); inspect solver options")
    return ExperimentResult(config=config, curves=curves, records=records)
