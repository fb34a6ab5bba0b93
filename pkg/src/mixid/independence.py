"""HSIC statistic, its p-values, and the Bonferroni mutual-independence battery."""

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import (ConfigurationError, DegenerateColumnError, SampleTooSmallError,
                     ShapeError)
from .kernel import as_dataset, bandwidth_median, gram_matrices

MIN_SAMPLES = 4
MIN_PERMUTATIONS = 20
P_FLOOR = 1e-300
METHODS = ("gamma", "permutation")


@dataclass
class HsicResult:
    statistic: float
    p_value: float
    method: str

    def to_dict(self):
        return {"statistic": self.statistic, "p_value": self.p_value, "method": self.method}


@dataclass
class MutualTestReport:
    sub_tests: list
    min_adjusted_p: float
    independent: bool
    alpha: float = field(default=0.05)

    def to_dict(self):
        return {
            "sub_tests": [t.to_dict() for t in self.sub_tests],
            "min_adjusted_p": self.min_adjusted_p,
            "independent": self.independent,
            "alpha": self.alpha,
        }


def _check_pair(K, L):
    K = np.asarray(K, dtype=float)
    L = np.asarray(L, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape != L.shape:
        raise ShapeError(f"need two square Gram matrices of equal size, got {K.shape}, {L.shape}")
    if K.shape[0] < MIN_SAMPLES:
        raise SampleTooSmallError(f"HSIC needs at least {MIN_SAMPLES} samples, got {K.shape[0]}")
    return K, L


def center(K):
    """``H K H`` with ``H = I - 1/n``, computed without forming ``H``."""
    row = K.mean(axis=1, keepdims=True)
    col = K.mean(axis=0, keepdims=True)
    return K - row - col + K.mean()


def hsic_statistic(K, L):
    """Biased empirical HSIC, ``trace(K H L H) / n**2``."""
    K, L = _check_pair(K, L)
    n = K.shape[0]
    # trace(KHLH) = sum(HKH * L) for symmetric L; centring both sides keeps
    # the value symmetric in (K, L) to the last bit
    value = float(np.sum(center(K) * center(L))) / (n * n)
    return max(value, 0.0)


def _gamma_pvalue(K, L, Kc, Lc):
    n = K.shape[0]
    test_stat = float(np.sum(Kc * Lc)) / n
    if n < 6:
        return 1.0

    var_terms = (Kc * Lc / 6.0) ** 2
    var_hsic = (var_terms.sum() - np.trace(var_terms)) / n / (n - 1)
    var_hsic *= 72.0 * (n - 4) * (n - 5) / n / (n - 1) / (n - 2) / (n - 3)

    mu_x = (K.sum() - np.trace(K)) / n / (n - 1)
    mu_y = (L.sum() - np.trace(L)) / n / (n - 1)
    mean_hsic = (1.0 + mu_x * mu_y - mu_x - mu_y) / n
    if not (var_hsic > 0 and mean_hsic > 0):
        # a null with no spread: any positive statistic is out of range
        return 1.0 if test_stat <= 0 else P_FLOOR

    shape = mean_hsic ** 2 / var_hsic
    scale = var_hsic * n / mean_hsic
    return float(stats.gamma.sf(test_stat, shape, scale=scale))


def _permutation_pvalue(Kc, Lc, num_permutations, rng):
    observed = float(np.sum(Kc * Lc))
    n = Kc.shape[0]
    exceed = 0
    for _ in range(num_permutations):
        p = rng.permutation(n)
        if float(np.sum(Kc * Lc[np.ix_(p, p)])) >= observed:
            exceed += 1
    return (1.0 + exceed) / (1.0 + num_permutations)


def check_method(method, num_permutations):
    if method not in METHODS:
        raise ConfigurationError(f"unknown p-value method {method!r}; use one of {METHODS}")
    if method == "permutation" and num_permutations < MIN_PERMUTATIONS:
        raise ConfigurationError(
            f"num_permutations must be >= {MIN_PERMUTATIONS}, got {num_permutations}"
        )


def hsic_pvalue(K, L, method="gamma", num_permutations=200, seed=None):
    """HSIC statistic with a gamma-approximation or permutation p-value.

    ``seed`` may be an int or a ``numpy.random.Generator``; the permutation
    p-value is reproducible for a fixed seed.
    """
    check_method(method, num_permutations)
    K, L = _check_pair(K, L)
    n = K.shape[0]
    Kc, Lc = center(K), center(L)
    statistic = max(float(np.sum(Kc * Lc)) / (n * n), 0.0)
    if method == "gamma":
        p = _gamma_pvalue(K, L, Kc, Lc)
    else:
        p = _permutation_pvalue(Kc, Lc, num_permutations, np.random.default_rng(seed))
    return HsicResult(statistic, float(min(max(p, P_FLOOR), 1.0)), method)


def mutual_test_from_grams(grams, alpha=0.05, method="gamma", num_permutations=200,
                           seed=None):
    """Run ``x_t`` vs ``(x_{t+1}, ..., x_d)`` for every t, Bonferroni-adjusted.

    The joint side of each sub-test uses the product kernel of its variables.
    """
    check_method(method, num_permutations)
    d = len(grams)
    if d < 2:
        raise ShapeError("mutual independence needs at least two variables")
    n = grams[0].shape[0]
    if n < MIN_SAMPLES:
        raise SampleTooSmallError(f"cluster has {n} points; need at least {MIN_SAMPLES}")
    rng = np.random.default_rng(seed)

    # tails[t] = product of grams[t:]
    tails = [None] * d
    tails[d - 1] = np.asarray(grams[d - 1], dtype=float)
    for t in range(d - 2, 0, -1):
        tails[t] = grams[t] * tails[t + 1]

    sub_tests = [
        hsic_pvalue(grams[t], tails[t + 1], method, num_permutations, rng)
        for t in range(d - 1)
    ]
    factor = d - 1
    min_adj = min(min(1.0, factor * r.p_value) for r in sub_tests)
    return MutualTestReport(sub_tests, min_adj, min_adj > alpha, alpha)


def cluster_bandwidths(data):
    """Per-column median-rule bandwidths, with 1.0 for constant columns.

    A constant column yields an all-ones Gram matrix under any width, so the
    fallback does not change any statistic.
    """
    out = []
    for col in data.T:
        try:
            out.append(bandwidth_median(col))
        except DegenerateColumnError:
            out.append(1.0)
    return np.array(out)


def mutual_independence_test(data, bandwidths=None, alpha=0.05, method="gamma",
                             num_permutations=200, seed=None):
    """Mutual independence of the columns of ``data``.

    Without ``bandwidths`` each column uses its own median-rule width.
    """
    data = as_dataset(data)
    n, d = data.shape
    if d < 2:
        raise ShapeError("mutual independence needs at least two variables")
    if n < MIN_SAMPLES:
        raise SampleTooSmallError(f"cluster has {n} points; need at least {MIN_SAMPLES}")
    if bandwidths is None:
        bandwidths = cluster_bandwidths(data)
    grams = gram_matrices(data, bandwidths)
    return mutual_test_from_grams(grams, alpha, method, num_permutations, seed)


def pairwise_pvalues(data, method="permutation", num_permutations=200, seed=None):
    """Symmetric d x d matrix of pairwise HSIC p-values (diagonal set to 0)."""
    data = as_dataset(data)
    d = data.shape[1]
    grams = gram_matrices(data, cluster_bandwidths(data))
    rng = np.random.default_rng(seed)
    out = np.zeros((d, d))
    for a in range(d):
        for b in range(a + 1, d):
            r = hsic_pvalue(grams[a], grams[b], method, num_permutations, rng)
            out[a, b] = out[b, a] = r.p_value
    return out
