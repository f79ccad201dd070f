"""Robust weak recovery for corrupted block models and Z2 synchronization.

The package is organized around a diagonal-constrained SDP solved by
low-rank factorization (:mod:`ksrobust.sdp`), a submatrix-search program
that keeps recovery working under node corruption (:mod:`ksrobust.dense`,
:mod:`ksrobust.sparse`, :mod:`ksrobust.z2`), corruption models
(:mod:`ksrobust.adversary`), and a seeded experiment harness
(:mod:`ksrobust.harness`).
"""

from .adversary import (CorruptionRecord, corrupt_nodes, corrupt_z2,
                        erasure_adversary)
from .dense import (DenseProgramParams, FeasibilityReport, ProgramPoint,
                    certified_correlation_bound, check_feasibility,
                    recover_dense, solve_program)
from .estimators import RobustCommunityCluster, Z2Synchronizer
from .harness import (ExperimentConfig, Report, derive_seed, evaluate_overlap,
                      phase_sweep, run_experiment)
from .model import (CenteredMatrix, Graph, SbmParams, Z2Instance,
                    balanced_labels, center_adjacency, sample_sbm, sample_z2)
from .rounding import (Estimate, gaussian_sign_rounding, overlap_sq_frac,
                       select_estimate)
from .sdp import (SdpSolution, SolverOptions, certify_optimality,
                  grothendieck_norm, inf_to_one_norm_bruteforce,
                  sdp_submatrix, solve_basic_sdp)
from .sparse import RemovalLog, SparseParams, prune_iterative, recover_sparse
from .spectral import PruneResult, operator_norm, prune_high_degree
from .z2 import Z2ProgramParams, recover_z2, solve_z2_program

__version__ = "0.1.0"

__all__ = [
    "CorruptionRecord", "corrupt_nodes", "corrupt_z2", "erasure_adversary",
    "DenseProgramParams", "FeasibilityReport", "ProgramPoint",
    "certified_correlation_bound", "check_feasibility", "recover_dense",
    "solve_program", "RobustCommunityCluster", "Z2Synchronizer",
    "ExperimentConfig", "Report", "derive_seed", "evaluate_overlap",
    "phase_sweep", "run_experiment", "CenteredMatrix", "Graph", "SbmParams",
    "Z2Instance", "balanced_labels", "center_adjacency", "sample_sbm",
    "sample_z2", "Estimate", "gaussian_sign_rounding", "overlap_sq_frac",
    "select_estimate",
    "SdpSolution", "SolverOptions", "certify_optimality", "grothendieck_norm",
    "inf_to_one_norm_bruteforce", "sdp_submatrix", "solve_basic_sdp",
    "RemovalLog", "SparseParams", "prune_iterative", "recover_sparse",
    "PruneResult", "operator_norm", "prune_high_degree", "Z2ProgramParams",
    "recover_z2", "solve_z2_program",
]
