"""Community detection in weighted d-uniform hypergraphs via SDP relaxation.

Pipeline: sample or load a weighted hypergraph, truncate it to the pairwise
similarity matrix, solve a semidefinite relaxation of the truncated
likelihood, and round the solution to an explicit partition by k-medoids.
"""

from .baseline import spectral_baseline
from .concentration import ConcentrationReport, spectral_deviation, verify_bound
from .extract import (
    KMedoidsResult,
    PipelineResult,
    cluster_hypergraph,
    kmedoids_rows,
    misclustering_error,
    round_outlier_solution,
    round_solution,
)
from .model import (
    ModelParams,
    ObservedHypergraph,
    Partition,
    WeightedHypergraph,
    complement,
    make_partition,
    partial_observe,
    read_hypergraph,
    read_partition,
    sample_planted_clique,
    sample_whpcm,
    sample_whsbm,
    write_hypergraph,
    write_partition,
    zero_impute,
)
from .oracle import MleConfig, brute_force_mle, brute_force_truncated, mle_polynomial_terms
from .sdp import (
    SdpProblem,
    SdpSolution,
    SolverConfig,
    balanced_totals,
    objective,
    project_affine_box,
    project_psd,
    solve,
)
from .similarity import (
    RecoveryCheck,
    SimilarityProfile,
    build_similarity,
    expected_similarity,
    lambda_midpoint,
    lambda_window,
    recovery_condition,
)
from .subspace import PointCloud, SubspaceConfig, generate_lines, subspace_cluster, triple_weights
from .tune import TuneEstimate, estimate, expected_spectrum

__all__ = [name for name in dir() if not name.startswith("_")]
