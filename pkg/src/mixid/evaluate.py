"""Squared MMD between recovered clusters and ground-truth components."""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import ConfigurationError, EmptyClusterError, ShapeError
from .kernel import as_dataset, select_bandwidths

MAX_MATCH_CLUSTERS = 8
EMPTY_CLUSTER_MMD = 1e9


def _cross_kernel(a, b, bandwidths):
    sq = np.zeros((a.shape[0], b.shape[0]))
    for j, s in enumerate(bandwidths):
        diff = np.subtract.outer(a[:, j], b[:, j])
        sq += diff * diff / (2.0 * s * s)
    return np.exp(-sq)


def mmd_squared(sample_a, sample_b, bandwidths):
    """Biased squared MMD under the product RBF kernel, clipped at zero."""
    a = np.atleast_2d(np.asarray(sample_a, dtype=float))
    b = np.atleast_2d(np.asarray(sample_b, dtype=float))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise EmptyClusterError("MMD needs two nonempty samples")
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"sample dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    bandwidths = np.asarray(bandwidths, dtype=float)
    if bandwidths.shape != (a.shape[1],):
        raise ShapeError(f"need {a.shape[1]} bandwidths, got {bandwidths.shape}")
    value = (_cross_kernel(a, a, bandwidths).mean()
             + _cross_kernel(b, b, bandwidths).mean()
             - 2.0 * _cross_kernel(a, b, bandwidths).mean())
    return max(float(value), 0.0)


@dataclass
class MmdReport:
    permutation: dict
    per_cluster_mmd2: list
    total: float
    matrix: np.ndarray

    def to_dict(self):
        return {
            "permutation": {str(k): v for k, v in self.permutation.items()},
            "per_cluster_mmd2": self.per_cluster_mmd2,
            "total": self.total,
            "matrix": self.matrix.tolist(),
        }


def mmd_matrix(data, labels, truth, m, bandwidths):
    """``M[i, t]`` = squared MMD between output cluster ``i+1`` and truth component ``t+1``."""
    out = np.empty((m, m))
    for i in range(m):
        cluster = data[labels == i + 1]
        for t in range(m):
            if cluster.shape[0] == 0:
                out[i, t] = EMPTY_CLUSTER_MMD
            else:
                out[i, t] = mmd_squared(cluster, data[truth == t + 1], bandwidths)
    return out


def match_and_score(labels, truth, data, bandwidths=None, m=None):
    """Match output clusters to truth components by exhaustive search over bijections.

    ``labels`` and ``truth`` take values ``1..m``. The returned permutation
    maps each output label to the truth label it was matched with and
    minimises the summed squared MMD. Without ``bandwidths`` the
    whole-dataset neighbourhood widths are used.
    """
    data = as_dataset(data)
    if hasattr(labels, "labels"):
        m = labels.m if m is None else m
        labels = labels.labels
    labels = np.asarray(labels).astype(int)
    truth = np.asarray(truth).astype(int)
    if labels.shape[0] != data.shape[0] or truth.shape[0] != data.shape[0]:
        raise ShapeError("labels, truth and data must have the same number of rows")
    m_truth = len(np.unique(truth))
    m = int(labels.max()) if m is None else m
    if m != m_truth:
        raise ConfigurationError(
            f"output has {m} clusters but the truth has {m_truth} components"
        )
    if m > MAX_MATCH_CLUSTERS:
        raise ConfigurationError(f"exhaustive matching supports m <= {MAX_MATCH_CLUSTERS}")
    if set(np.unique(truth)) != set(range(1, m + 1)):
        raise ConfigurationError("truth labels must be 1..m")
    if bandwidths is None:
        bandwidths = select_bandwidths(data, "neighborhood")

    matrix = mmd_matrix(data, labels, truth, m, bandwidths)
    best, best_total = None, np.inf
    for perm in permutations(range(m)):
        total = sum(matrix[i, perm[i]] for i in range(m))
        if total < best_total:
            best, best_total = perm, total
    per_cluster = [float(matrix[i, best[i]]) for i in range(m)]
    return MmdReport({i + 1: best[i] + 1 for i in range(m)}, per_cluster,
                     float(sum(per_cluster)), matrix)
