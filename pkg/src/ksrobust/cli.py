"""Command-line front end.

Subcommands: gen, corrupt, sdp, spectral, recover, z2, sweep.  Results
print as JSON on stdout (or go to --out); graphs travel as edge-list files,
labels as +-1 files, Z2 matrices as raw binary.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import fileio
from .adversary import NODE_STRATEGIES, Z2_STRATEGIES, corrupt_nodes, corrupt_z2
from .dense import DenseProgramParams, recover_dense
from .harness import ExperimentConfig, phase_sweep, run_experiment
from .model import (SbmParams, Z2Instance, balanced_labels, center_adjacency,
                    sample_sbm, sample_z2)
from .sdp import SolverOptions, solve_basic_sdp
from .sparse import SparseParams, recover_sparse
from .spectral import prune_high_degree
from .z2 import Z2ProgramParams, recover_z2


def _seed(args) -> int:
    return 0 if args.seed is None else args.seed


def _emit(payload, out):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_gen(args):
    rng = np.random.default_rng(_seed(args))
    if args.model == "sbm":
        params = SbmParams(n=args.n, d=args.d, eps=args.eps)
        labels = balanced_labels(args.n, rng)
        graph = sample_sbm(params, labels, rng)
        fileio.write_edgelist(graph, args.prefix + ".edges")
        fileio.write_labels(labels, args.prefix + ".labels")
        _emit({"n": graph.n, "m": graph.m,
               "files": [args.prefix + ".edges", args.prefix + ".labels"]}, args.out)
    else:
        labels = balanced_labels(args.n, rng)
        inst = sample_z2(args.n, args.sigma, labels, rng)
        fileio.write_z2_matrix(inst.matrix, args.prefix + ".z2")
        fileio.write_labels(labels, args.prefix + ".labels")
        _emit({"n": inst.n, "sigma": inst.sigma,
               "files": [args.prefix + ".z2", args.prefix + ".labels"]}, args.out)
    return 0


def _cmd_corrupt(args):
    rng = np.random.default_rng(_seed(args))
    if args.strategy in NODE_STRATEGIES:
        graph = fileio.read_edgelist(args.input)
        labels = fileio.read_labels(args.labels)
        corrupted, record = corrupt_nodes(graph, labels, args.strategy, args.mu, rng)
        fileio.write_edgelist(corrupted, args.output)
    elif args.strategy in Z2_STRATEGIES:
        matrix = fileio.read_z2_matrix(args.input)
        labels = fileio.read_labels(args.labels)
        inst = Z2Instance(n=matrix.shape[0], sigma=args.sigma, matrix=matrix,
                          labels=labels)
        out_inst, record = corrupt_z2(inst, args.strategy, args.mu, rng)
        fileio.write_z2_matrix(out_inst.matrix, args.output)
    else:
        raise SystemExit(f"unknown strategy {args.strategy!r}")
    with open(args.record, "w") as fh:
        fh.write(record.to_json() + "\n")
    _emit({"strategy": args.strategy, "mu": args.mu,
           "corrupted_count": int(record.corrupted.size),
           "files": [args.output, args.record]}, args.out)
    return 0


def _cmd_sdp(args):
    if args.input.endswith(".z2"):
        matrix = fileio.read_z2_matrix(args.input)
        target = matrix
    else:
        graph = fileio.read_edgelist(args.input)
        d = args.d if args.d is not None else graph.mean_degree
        target = center_adjacency(graph, d) if args.centered else graph.adjacency
    opts = SolverOptions(rank=args.rank, restarts=args.restarts, seed=_seed(args))
    sol = solve_basic_sdp(target, opts)
    _emit({"value": sol.value, "dual_gap": sol.dual_gap,
           "iterations": sol.iterations, "converged": sol.converged}, args.out)
    return 0


def _cmd_spectral(args):
    graph = fileio.read_edgelist(args.input)
    result = prune_high_degree(graph, args.alpha)
    _emit({"kept_count": int(result.kept.size),
           "removed_count": int(result.removed.size),
           "norm_after": result.norm_after,
           "degree_cutoff": result.threshold}, args.out)
    return 0


def _cmd_recover(args):
    rng = np.random.default_rng(_seed(args))
    graph = fileio.read_edgelist(args.input)
    labels = fileio.read_labels(args.labels) if args.labels else None
    d = args.d if args.d is not None else graph.mean_degree
    if args.mode == "dense":
        est = recover_dense(graph, DenseProgramParams(mu=args.mu), d, args.eps,
                            rng, labels=labels, trials=args.trials)
    else:
        est = recover_sparse(graph, SparseParams(mu=args.mu, c_deg=args.cdeg),
                             d, args.eps, rng, labels=labels, trials=args.trials)
    payload = {
        "mode": args.mode,
        "labels": [int(x) for x in est.labels],
        "objective": est.objective,
        "feasible": None,
        "spectral": None,
        "low_confidence": bool(est.low_confidence),
        "overlap_sq_frac": est.overlap_sq_frac,
        "diagnostics": {k: v for k, v in est.diagnostics.items()
                        if isinstance(v, (int, float, bool, str))},
    }
    if est.feasibility is not None:
        payload["feasible"] = bool(est.feasibility.feasible)
        payload["spectral"] = est.feasibility.spectral
        payload["feasibility"] = est.feasibility.as_dict()
    _emit(payload, args.out)
    return 0


def _cmd_z2(args):
    rng = np.random.default_rng(_seed(args))
    if args.input:
        matrix = fileio.read_z2_matrix(args.input)
        labels = fileio.read_labels(args.labels) if args.labels else None
        params = Z2ProgramParams(sigma=args.sigma, mu=args.mu)
        est = recover_z2(matrix, params, rng, labels=labels, trials=args.trials)
        payload = {
            "labels": [int(x) for x in est.labels],
            "objective": est.objective,
            "low_confidence": bool(est.low_confidence),
            "overlap_sq_frac": est.overlap_sq_frac,
            "feasibility": est.feasibility.as_dict(),
        }
        _emit(payload, args.out)
    else:
        config = ExperimentConfig(model="z2", algorithm="z2", n=args.n,
                                  sigma=args.sigma, adversary=args.adversary,
                                  mu=args.mu, trials=args.exp_trials,
                                  base_seed=_seed(args),
                                  rounding_trials=args.trials)
        report = run_experiment(config, workers=args.workers)
        _emit(report.to_dict(), args.out)
    return 0


def _cmd_sweep(args):
    with open(args.config) as fh:
        spec = json.load(fh)
    base = spec.get("base", {})
    grid = spec.get("grid", {})
    configs = [ExperimentConfig(**base)]
    for key, values in grid.items():
        configs = [
            ExperimentConfig(**{**c.to_dict(), key: v})
            for c in configs
            for v in values
        ]
    if args.seed is not None:
        configs = [ExperimentConfig(**{**c.to_dict(), "base_seed": args.seed})
                   for c in configs]
    csv_text = phase_sweep(configs, workers=args.workers)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ksrobust",
                                description="robust block-model recovery toolkit")
    p.add_argument("--seed", type=int, default=None, help="base RNG seed (default 0)")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: KSROBUST_WORKERS or 1)")
    p.add_argument("--out", default=None, help="write JSON/CSV here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample an instance to disk")
    g.add_argument("--model", choices=["sbm", "z2"], default="sbm")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=float, default=40.0)
    g.add_argument("--eps", type=float, default=0.0)
    g.add_argument("--sigma", type=float, default=1.5)
    g.add_argument("--prefix", required=True, help="output path prefix")
    g.set_defaults(func=_cmd_gen)

    c = sub.add_parser("corrupt", help="apply an adversary to an instance")
    c.add_argument("--input", required=True)
    c.add_argument("--labels", required=True)
    c.add_argument("--strategy", required=True,
                   choices=list(NODE_STRATEGIES) + list(Z2_STRATEGIES))
    c.add_argument("--mu", type=float, required=True)
    c.add_argument("--sigma", type=float, default=1.5,
                   help="signal strength recorded for z2 strategies")
    c.add_argument("--output", required=True)
    c.add_argument("--record", required=True, help="corruption record JSON path")
    c.set_defaults(func=_cmd_corrupt)

    s = sub.add_parser("sdp", help="basic SDP value of a stored instance")
    s.add_argument("--input", required=True, help=".edges file or .z2 matrix")
    s.add_argument("--centered", action="store_true",
                   help="subtract d/n from every adjacency entry")
    s.add_argument("--d", type=float, default=None)
    s.add_argument("--rank", type=int, default=None)
    s.add_argument("--restarts", type=int, default=5)
    s.set_defaults(func=_cmd_sdp)

    sp = sub.add_parser("spectral", help="degree pruning report")
    sp.add_argument("--input", required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.set_defaults(func=_cmd_spectral)

    r = sub.add_parser("recover", help="run a recovery pipeline on a graph")
    r.add_argument("--mode", choices=["dense", "sparse"], default="dense")
    r.add_argument("--input", required=True)
    r.add_argument("--labels", default=None)
    r.add_argument("--d", type=float, default=None)
    r.add_argument("--eps", type=float, required=True)
    r.add_argument("--mu", type=float, default=0.0)
    r.add_argument("--trials", type=int, default=50)
    r.add_argument("--cdeg", type=float, default=None,
                   help="sparse mode: degree-cap factor override")
    r.set_defaults(func=_cmd_recover)

    z = sub.add_parser("z2", help="Z2 recovery from a file or a fresh experiment")
    z.add_argument("--input", default=None, help=".z2 matrix (omit to self-generate)")
    z.add_argument("--labels", default=None)
    z.add_argument("--n", type=int, default=500)
    z.add_argument("--sigma", type=float, required=True)
    z.add_argument("--mu", type=float, default=0.0)
    z.add_argument("--adversary", default="none")
    z.add_argument("--trials", type=int, default=50, help="rounding trials")
    z.add_argument("--exp-trials", type=int, default=10,
                   help="experiment repetitions when self-generating")
    z.set_defaults(func=_cmd_z2)

    w = sub.add_parser("sweep", help="grid of experiments to CSV")
    w.add_argument("--config", required=True, help="JSON with 'base' and 'grid'")
    w.set_defaults(func=_cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
