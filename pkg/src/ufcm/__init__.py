"""Unsupervised feature selection by class-margin trace optimization.

A coefficient matrix with orthonormal columns is learned so that its row
norms score features: total data scatter is maximized while the spread
around K-means pseudo-labels and a row-sparsity penalty are minimized, all
in one alternating solver. Selection and clustering-based evaluation
utilities round out the pipeline; the `ufcm` command runs batch experiments.
"""

from ._kernels import BACKEND
from .dataset import (
    CenterReport,
    CsvFormatError,
    DataMatrix,
    center,
    load_csv,
    make_blobs,
    write_csv,
)
from .kmeans import (
    IndicatorMatrix,
    KMeansResult,
    assign,
    centroids,
    run_kmeans,
    update_u_with_candidates,
)
from .linalg import (
    EigenPairs,
    ScatterSet,
    labeled_scatters,
    pca_init,
    sym_eig_top,
    total_scatter,
)
from .metrics import (
    ContingencyTable,
    EvalStats,
    FeatureRanking,
    accuracy,
    evaluate_clustering,
    l2p_norm,
    max_variance_ranking,
    nmi,
    rank_features,
    select,
)
from .solver import (
    SolverConfig,
    SolverResult,
    SolverTrace,
    build_m,
    compute_d,
    objective,
    solve,
    update_g,
    update_w,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CenterReport",
    "ContingencyTable",
    "CsvFormatError",
    "DataMatrix",
    "EigenPairs",
    "EvalStats",
    "FeatureRanking",
    "IndicatorMatrix",
    "KMeansResult",
    "ScatterSet",
    "SolverConfig",
    "SolverResult",
    "SolverTrace",
    "accuracy",
    "assign",
    "build_m",
    "center",
    "centroids",
    "compute_d",
    "evaluate_clustering",
    "l2p_norm",
    "labeled_scatters",
    "load_csv",
    "make_blobs",
    "max_variance_ranking",
    "nmi",
    "objective",
    "pca_init",
    "rank_features",
    "run_kmeans",
    "select",
    "solve",
    "sym_eig_top",
    "total_scatter",
    "update_g",
    "update_u_with_candidates",
    "update_w",
    "write_csv",
]
