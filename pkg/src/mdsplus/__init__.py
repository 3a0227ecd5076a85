"""mdsplus: classical MDS, optimal hard thresholding and optimal shrinkage.

The main entry points are :func:`mds_plus`, :func:`classical_mds`,
:func:`svht_embed`, :func:`estimate_sigma`, :func:`optimal_hard_threshold`
and :func:`run_experiment`.
"""
from .matrix import (MatrixError, SpectralDecomposition, check_distance_matrix,
                     pairwise_sq_distances, read_csv_matrix, sym_eig, write_csv_matrix)
from .mds import (Embedding, classical_mds, mds_plus, shrinkage_embed, similarity_from_distances,
                  similarity_spectrum, svht_embed)
from .noise import estimate_sigma, mp_cdf, mp_density, mp_median, quarter_circle_density
from .procrustes import embedding_loss, similarity_distance
from .simulate import (ExperimentReport, SpikedConfig, generate_helix, generate_spiked_dataset,
                       run_experiment)
from .spike import (DomainError, SpikeParams, breakdown_point, bulk_edge, c_of_x,
                    mds_asymptotic_loss, mdsplus_asymptotic_loss, optimal_embedding_dim,
                    optimal_hard_threshold, optimal_shrinker, regret, x_of_y, y_of_x)

__version__ = "0.1.0"

__all__ = [
    "MatrixError", "SpectralDecomposition", "check_distance_matrix", "pairwise_sq_distances",
    "read_csv_matrix", "sym_eig", "write_csv_matrix",
    "Embedding", "classical_mds", "mds_plus", "shrinkage_embed", "similarity_from_distances",
    "similarity_spectrum", "svht_embed",
    "estimate_sigma", "mp_cdf", "mp_density", "mp_median", "quarter_circle_density",
    "embedding_loss", "similarity_distance",
    "ExperimentReport", "SpikedConfig", "generate_helix", "generate_spiked_dataset",
    "run_experiment",
    "DomainError", "SpikeParams", "breakdown_point", "bulk_edge", "c_of_x",
    "mds_asymptotic_loss", "mdsplus_asymptotic_loss", "optimal_embedding_dim",
    "optimal_hard_threshold", "optimal_shrinker", "regret", "x_of_y", "y_of_x",
]
