"""Identify finite mixtures of nonparametric product distributions.

Estimate the number of components from the rank of a kernel embedding,
recover the components with CLIC, and judge whether a finite hidden
confounder explains the observed dependences.
"""

__version__ = "0.1.0"

from .causal import CausalVerdict, dependence_rank_profile, infer_structure
from .clic import ClusterAssignment, ObjectiveTrace, clic, compute_objective
from .embedding_rank import (Bipartition, RankEstimate, bipartitions, estimate_components,
                             estimate_components_auto, estimate_rank, grouped_matrix)
from .evaluate import MmdReport, match_and_score, mmd_squared
from .independence import (HsicResult, MutualTestReport, hsic_pvalue, hsic_statistic,
                           mutual_independence_test)
from .kernel import bandwidth_median, bandwidth_neighborhood, rbf_gram, select_bandwidths
from .simulate import SimulatedDataset, simulate_confounded, simulate_direct_link

__all__ = [
    "Bipartition", "CausalVerdict", "ClusterAssignment", "HsicResult", "MmdReport",
    "MutualTestReport", "ObjectiveTrace", "RankEstimate", "SimulatedDataset",
    "bandwidth_median", "bandwidth_neighborhood", "bipartitions", "clic",
    "compute_objective", "dependence_rank_profile", "estimate_components",
    "estimate_components_auto", "estimate_rank", "grouped_matrix", "hsic_pvalue",
    "hsic_statistic", "infer_structure", "match_and_score", "mmd_squared",
    "mutual_independence_test", "rbf_gram", "select_bandwidths", "simulate_confounded",
    "simulate_direct_link",
]
