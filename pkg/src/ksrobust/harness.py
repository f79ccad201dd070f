"""Seeded experiment runner with deterministic per-trial seeds.

Trial t of an experiment with base seed s runs with derive_seed(s, t), a
splitmix64 hash of the pair, so trials are independent of execution order
and the whole report is reproducible bitwise (timing fields excluded from
the deterministic digest).  Trials can run in worker processes; serial and
parallel execution produce identical records.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .adversary import corrupt_nodes, corrupt_z2, erasure_adversary
from .dense import DenseProgramParams, recover_dense
from .model import SbmParams, balanced_labels, center_adjacency, sample_sbm, sample_z2
from .rounding import gaussian_sign_rounding, overlap_sq_frac, select_estimate
from .sdp import LowRankUpdate, SolverOptions, solve_basic_sdp, with_seed
from .sparse import SparseParams, recover_sparse
from .z2 import Z2ProgramParams, recover_z2

WORKERS_ENV = "KSROBUST_WORKERS"

_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def derive_seed(base, index) -> int:
    """splitmix64 finalizer of (base + (index+1) * golden-ratio increment).

    A pure function of the pair, so trial `index` sees the same stream no
    matter how many workers run or in which order trials complete.
    """
    z = (int(base) + (int(index) + 1) * _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return (z ^ (z >> 31)) & _MASK


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "sbm"              # "sbm" or "z2"
    algorithm: str = "dense"        # "dense", "sparse", "baseline", "z2"
    n: int = 500
    d: float = 40.0
    eps: float = 0.2236
    sigma: float = 1.5
    adversary: str = "none"         # node/z2 strategy, "erasure", or "none"
    mu: float = 0.0
    trials: int = 10
    base_seed: int = 0
    rounding_trials: int = 50
    timeout_s: float | None = None
    Delta: float | None = None
    rho: float | None = None

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class TrialRecord:
    index: int
    seed: int
    overlap_sq_frac: float | None
    objective: float | None
    feasible: bool | None
    low_confidence: bool | None
    diagnostics: dict
    runtime_s: float
    timeout: bool
    error: str | None


@dataclass
class Report:
    config: dict
    records: list
    aggregates: dict

    def to_dict(self, include_timing=True):
        recs = [dataclasses.asdict(r) for r in self.records]
        agg = dict(self.aggregates)
        if not include_timing:
            for r in recs:
                r.pop("runtime_s")
                r.pop("timeout")
            agg.pop("mean_runtime_s", None)
        return {"config": self.config, "records": recs, "aggregates": agg}

    def to_json(self, include_timing=True):
        return json.dumps(self.to_dict(include_timing), sort_keys=True, default=_json_default)

    def deterministic_digest(self) -> str:
        payload = self.to_json(include_timing=False)
        return hashlib.sha256(payload.encode()).hexdigest()


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def evaluate_overlap(estimate_labels, true_labels) -> float:
    return overlap_sq_frac(estimate_labels, true_labels)


def _run_trial(config_dict, index):
    config = ExperimentConfig(**config_dict)
    seed = derive_seed(config.base_seed, index)
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    record = TrialRecord(
        index=index, seed=seed, overlap_sq_frac=None, objective=None,
        feasible=None, low_confidence=None, diagnostics={}, runtime_s=0.0,
        timeout=False, error=None,
    )
    try:
        if config.model == "z2":
            _z2_trial(config, rng, record)
        elif config.model == "sbm":
            _sbm_trial(config, rng, record)
        else:
            raise ValueError(f"unknown model {config.model!r}")
    except Exception as exc:  # recorded, not raised: sweeps keep going
        record.error = f"{type(exc).__name__}: {exc}"
    record.runtime_s = time.perf_counter() - start
    if config.timeout_s is not None and record.runtime_s > config.timeout_s:
        record.timeout = True
    return record


def _sbm_trial(config, rng, record):
    params = SbmParams(n=config.n, d=config.d, eps=config.eps)
    labels = balanced_labels(config.n, rng)
    graph = sample_sbm(params, labels, rng)
    eval_labels = labels
    if config.adversary == "none" or config.mu == 0.0:
        pass
    elif config.adversary == "erasure":
        graph, index_map = erasure_adversary(graph, config.mu, rng)
        eval_labels = labels[index_map]
    else:
        graph, corr = corrupt_nodes(graph, labels, config.adversary, config.mu, rng)
        record.diagnostics["corrupted_count"] = int(corr.corrupted.size)

    solver = with_seed(SolverOptions(), rng.integers(2**63))
    if config.algorithm == "dense":
        est = recover_dense(
            graph,
            DenseProgramParams(mu=config.mu if config.adversary != "erasure" else 0.0,
                               Delta=config.Delta, rho=config.rho, solver=solver),
            config.d, config.eps, rng, labels=eval_labels,
            trials=config.rounding_trials,
        )
    elif config.algorithm == "sparse":
        est = recover_sparse(
            graph,
            SparseParams(mu=config.mu if config.adversary != "erasure" else 0.0,
                         solver=solver),
            config.d, config.eps, rng, labels=eval_labels,
            trials=config.rounding_trials,
        )
    elif config.algorithm == "baseline":
        centered = center_adjacency(graph, config.d)
        sol = solve_basic_sdp(centered, solver)
        candidates = gaussian_sign_rounding(sol.factor, config.rounding_trials, rng)
        est = select_estimate(candidates, centered)
        est.overlap_sq_frac = overlap_sq_frac(est.labels, eval_labels)
    elif config.algorithm == "sdp-pair":
        # paired values: SDP on the centered matrix and on the same matrix
        # with the planted rank-one signal subtracted
        centered = center_adjacency(graph, config.d)
        sol = solve_basic_sdp(centered, solver)
        pushed = LowRankUpdate(centered, eval_labels.astype(np.float64),
                               -config.eps * config.d / graph.n)
        sol_in = solve_basic_sdp(pushed, with_seed(solver, rng.integers(2**63)))
        scale = graph.n * float(np.sqrt(config.d))
        record.objective = sol.value
        record.diagnostics.update({
            "value_scaled": sol.value / scale,
            "push_in_scaled": sol_in.value / scale,
            "separation_scaled": (sol.value - sol_in.value) / scale,
            "dual_gap": sol.dual_gap,
            "push_in_dual_gap": sol_in.dual_gap,
        })
        return
    else:
        raise ValueError(f"unknown algorithm {config.algorithm!r} for sbm model")

    record.overlap_sq_frac = est.overlap_sq_frac
    record.objective = est.objective
    if est.feasibility is not None:
        record.feasible = bool(est.feasibility.feasible)
    record.low_confidence = bool(est.low_confidence)
    record.diagnostics.update({k: v for k, v in est.diagnostics.items()
                               if isinstance(v, (int, float, bool, str))})


def _z2_trial(config, rng, record):
    labels = balanced_labels(config.n, rng)
    inst = sample_z2(config.n, config.sigma, labels, rng)
    if config.adversary not in ("none",) and config.mu > 0.0:
        inst, corr = corrupt_z2(inst, config.adversary, config.mu, rng)
        record.diagnostics["corrupted_count"] = int(corr.corrupted.size)
    params = Z2ProgramParams(sigma=config.sigma, mu=config.mu, Delta=config.Delta,
                             solver=with_seed(SolverOptions(), rng.integers(2**63)))
    est = recover_z2(inst, params, rng, labels=labels, trials=config.rounding_trials)
    record.overlap_sq_frac = est.overlap_sq_frac
    record.objective = est.objective
    record.feasible = bool(est.feasibility.feasible)
    record.low_confidence = bool(est.low_confidence)
    record.diagnostics.update({k: v for k, v in est.diagnostics.items()
                               if isinstance(v, (int, float, bool, str))})


def resolve_workers(workers=None) -> int:
    if workers is None:
        workers = os.environ.get(WORKERS_ENV, "1")
    workers = int(workers)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    return workers


def run_experiment(config: ExperimentConfig, workers=None) -> Report:
    """Run config.trials independent trials and aggregate."""
    workers = resolve_workers(workers)
    cfg = config.to_dict()
    indices = list(range(config.trials))
    if workers == 1 or config.trials <= 1:
        records = [_run_trial(cfg, i) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, config.trials)) as pool:
            records = list(pool.map(_run_trial, [cfg] * len(indices), indices))
    records.sort(key=lambda r: r.index)
    return Report(config=cfg, records=records, aggregates=_aggregate(records))


def _aggregate(records) -> dict:
    overlaps = [r.overlap_sq_frac for r in records
                if r.overlap_sq_frac is not None and r.error is None]
    feas = [r.feasible for r in records if r.feasible is not None and r.error is None]
    agg = {
        "trials": len(records),
        "errors": sum(1 for r in records if r.error is not None),
        "mean_overlap_sq_frac": float(np.mean(overlaps)) if overlaps else None,
        "std_overlap_sq_frac": float(np.std(overlaps)) if overlaps else None,
        "q10_overlap_sq_frac": float(np.quantile(overlaps, 0.1)) if overlaps else None,
        "median_overlap_sq_frac": float(np.median(overlaps)) if overlaps else None,
        "q90_overlap_sq_frac": float(np.quantile(overlaps, 0.9)) if overlaps else None,
        "feasible_rate": float(np.mean(feas)) if feas else None,
        "mean_runtime_s": float(np.mean([r.runtime_s for r in records])) if records else None,
    }
    return agg


SWEEP_COLUMNS = [
    "model", "algorithm", "n", "d", "eps", "sigma", "adversary", "mu",
    "trials", "base_seed", "mean_overlap_sq_frac", "std_overlap_sq_frac",
    "feasible_rate", "errors", "mean_runtime_s",
]


def phase_sweep(configs, workers=None) -> str:
    """Run a list of configs and render one CSV row per config.

    Failed cells print as nan; configs whose every trial errored are also
    listed in a trailing comment so a quick glance catches them.
    """
    lines = [",".join(SWEEP_COLUMNS)]
    failures = []
    for config in configs:
        report = run_experiment(config, workers=workers)
        row = []
        merged = {**report.config, **report.aggregates}
        for col in SWEEP_COLUMNS:
            val = merged.get(col)
            if val is None:
                row.append("nan")
            elif isinstance(val, float):
                row.append(f"{val:.10g}")
            else:
                row.append(str(val))
        lines.append(",".join(row))
        if report.aggregates["errors"] == len(report.records) and report.records:
            failures.append(
                f"# failed config: {json.dumps(report.config, sort_keys=True)}"
            )
    return "\n".join(lines + failures) + "\n"
