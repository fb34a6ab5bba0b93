"""Structural verdict: is a hidden confounder with few states behind the dependences?

Pairwise dependence is screened first. If every pair is dependent, a low
embedding rank points to a single finite confounder rendering the observed
variables conditionally independent; a high rank is left undecided, since
direct links between observed variables or a continuous confounder also
produce it.
"""

from dataclasses import dataclass, field

import numpy as np

from .embedding_rank import estimate_components, estimate_components_auto
from .errors import ShapeError
from .independence import hsic_pvalue, pairwise_pvalues
from .kernel import as_column, bandwidth_median, rbf_gram, select_bandwidths

FINITE_CONFOUNDER = "finite_confounder"
HIGH_RANK = "high_rank_inconclusive"
NOT_DEPENDENT = "not_pairwise_dependent"

ASSUMPTION_CAVEATS = (
    "Assumes at most one hidden common cause of the observed variables.",
    "Assumes latent variables are not caused by observed variables.",
)
TWO_VARIABLE_CAVEAT = (
    "Only two observed variables: the confounder reading is weaker than for "
    "three or more, and two-variable two-component mixtures are generally "
    "not identifiable."
)
HIGH_RANK_NOTE = (
    "High estimated rank is consistent with direct causal links between the "
    "observed variables or with a confounder taking many or continuous values."
)


@dataclass
class CausalVerdict:
    verdict: str
    states: int | None
    rank: object
    pairwise_p: np.ndarray
    threshold_used: int
    alpha: float
    reduced_confidence: bool
    caveats: list = field(default_factory=list)
    recommendation: str = ""

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "states": self.states,
            "threshold_used": self.threshold_used,
            "alpha": self.alpha,
            "reduced_confidence": self.reduced_confidence,
            "pairwise_p": self.pairwise_p.tolist(),
            "rank": None if self.rank is None else self.rank.to_dict(),
            "recommendation": self.recommendation,
            "caveats": list(self.caveats),
        }


def infer_structure(data, threshold=5, alpha=0.05, seed=None, num_permutations=200,
                    bandwidth_rule="neighborhood", bandwidths=None):
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ShapeError("structure inference needs at least two variables")
    d = data.shape[1]
    caveats = list(ASSUMPTION_CAVEATS)
    reduced = d == 2
    if reduced:
        caveats.append(TWO_VARIABLE_CAVEAT)

    pvals = pairwise_pvalues(data, "permutation", num_permutations, seed)
    off = pvals[~np.eye(d, dtype=bool)]
    if np.any(off >= alpha):
        return CausalVerdict(NOT_DEPENDENT, None, None, pvals, threshold, alpha, reduced,
                             caveats, "Some pair of variables looks independent; "
                             "no single confounder explains all dependences.")

    if bandwidths is None:
        bandwidths = select_bandwidths(data, bandwidth_rule)
    rank = estimate_components(data, bandwidths)
    k = rank.majority
    if k < threshold:
        return CausalVerdict(FINITE_CONFOUNDER, k, rank, pvals, threshold, alpha, reduced,
                             caveats, f"Recover the components with CLIC using m={k}.")
    caveats.append(HIGH_RANK_NOTE)
    return CausalVerdict(HIGH_RANK, None, rank, pvals, threshold, alpha, reduced, caveats,
                         "The causal structure cannot be decided from the rank alone.")


def dependence_rank_profile(x, y, seed=None, bandwidth_rule="neighborhood"):
    """HSIC p-value (gamma approximation) and two-variable rank estimate of a pair.

    Weaker dependence generally goes with a lower estimated rank.
    """
    x = as_column(x)
    y = as_column(y)
    if x.shape != y.shape:
        raise ShapeError("the two columns must have equal length")
    if x.shape[0] < 10:
        raise ShapeError("profiling a pair needs at least 10 observations")
    result = hsic_pvalue(rbf_gram(x, bandwidth_median(x)), rbf_gram(y, bandwidth_median(y)),
                         "gamma", seed=seed)
    rank = estimate_components_auto(np.column_stack([x, y]), bandwidth_rule)
    return result.p_value, rank.majority
