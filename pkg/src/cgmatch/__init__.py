"""cgmatch: recover vertex labels of a shuffled graph and classify it by
matching against a vertex-aligned in-sample collection at coarse, clustered
and fine granularity."""

from .assignment import brute_force_lap, solve_lap
from .clustering import (adjusted_rand_index, cmds_embed, elbow_dimension,
                         kmeans, pairwise_distances)
from .gapstats import (GapMoments, MisalignmentCheck, PatternCounts,
                       exact_gap_variance, expected_gap, expected_trace_sbm,
                       pattern_counts, scores_misalignment_check, sigma_of,
                       simulate_gap_samples, standardized_gap_samples,
                       trace_overlap_gap)
from .graphio import GraphFormatError, load_graph, save_graph
from .graphs import (Graph, Permutation, WeightedMean, as_matrix,
                     certify_asymmetric, complement_graph, frobenius_distance,
                     mean_graph, permute_graph, trace_objective)
from .matching import (MatchResult, SeedSet, SgmOptions, brute_force_qap,
                       project_to_permutation, sgm_match)
from .models import (CosieSpec, SbmSpec, bitflip, er_pair_correlation,
                     expected_bitflip, mase_embed, sample_cosie, sample_edges,
                     sample_er, sample_sbm)
from .pipelines import (ClassifiedMatch, GranularityReport, clustered_match,
                        coarse_match, fine_match, match_accuracy)
from .rng import RngSeed

__version__ = "0.1.0"

__all__ = [
    "Graph", "Permutation", "WeightedMean", "RngSeed",
    "permute_graph", "frobenius_distance", "trace_objective",
    "complement_graph", "mean_graph", "as_matrix", "certify_asymmetric",
    "load_graph", "save_graph", "GraphFormatError",
    "solve_lap", "brute_force_lap",
    "SeedSet", "SgmOptions", "MatchResult", "sgm_match", "brute_force_qap",
    "project_to_permutation",
    "SbmSpec", "CosieSpec", "sample_er", "sample_sbm", "sample_cosie",
    "sample_edges", "bitflip", "expected_bitflip", "er_pair_correlation",
    "mase_embed",
    "GranularityReport", "ClassifiedMatch", "coarse_match", "clustered_match",
    "fine_match", "match_accuracy",
    "pairwise_distances", "cmds_embed", "kmeans", "adjusted_rand_index",
    "elbow_dimension",
    "PatternCounts", "GapMoments", "MisalignmentCheck", "sigma_of",
    "trace_overlap_gap", "expected_gap", "pattern_counts",
    "exact_gap_variance", "simulate_gap_samples", "standardized_gap_samples",
    "expected_trace_sbm", "scores_misalignment_check",
]
