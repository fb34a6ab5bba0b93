"""Clustering with an independence criterion.

Points are greedily relabelled, ``c`` at a time, so as to minimise the
negative sum of per-cluster log p-values of the mutual-independence test.
The search stops once every cluster looks mutually independent, when a
full pass changes nothing, or after ``max_iterations`` passes.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import ConfigurationError
from .independence import (MIN_SAMPLES, P_FLOOR, check_method, cluster_bandwidths,
                           mutual_independence_test)
from ._fast import NUMBA_AVAILABLE, cluster_gamma_pvalues
from .kernel import as_dataset

log = logging.getLogger(__name__)

FAILURE_MESSAGE = "Unable to find appropriate clusters."
# keeps the label stream apart from generators seeded with the same integer
RNG_TAG = 0xC11C
MAX_WORDS = 4096
SMALL_CLUSTER_PENALTY = -math.log(P_FLOOR)

# statuses; the stop reasons reuse the first three names
CONVERGED_INDEPENDENT = "converged_independent"
CONVERGED_STABLE = "converged_stable"
MAX_ITERATIONS = "max_iterations"
FAILED = "failed"


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    m: int
    status: str
    message: str = ""
    iterations: int = 0
    verdicts: list = field(default_factory=list)
    stop_reason: str = ""

    @property
    def sizes(self):
        return [int(np.sum(self.labels == k)) for k in range(1, self.m + 1)]


@dataclass
class ObjectiveTrace:
    per_iteration: list
    accepted: list
    log: list

    @property
    def final(self):
        return self.per_iteration[-1]


@dataclass
class _Term:
    value: float
    p_value: float


class _Objective:
    """Per-cluster objective terms; bandwidths follow each cluster's own points."""

    def __init__(self, data, alpha, method, num_permutations, seed):
        self.data = data
        self.alpha = alpha
        self.method = method
        self.num_permutations = num_permutations
        self.seed = seed
        self.fast = NUMBA_AVAILABLE

    def term(self, rows, k=0):
        if rows.size == 0:
            return _Term(math.inf, 0.0)
        if rows.size < MIN_SAMPLES:
            return _Term(SMALL_CLUSTER_PENALTY, P_FLOOR)
        sub = self.data[rows]
        if self.method == "gamma" and self.fast:
            raw = cluster_gamma_pvalues(sub)
            factor = sub.shape[1] - 1
            p = min(min(1.0, factor * min(max(q, P_FLOOR), 1.0)) for q in raw)
            return _Term(-math.log(p), p)
        seed = None if self.seed is None else np.random.SeedSequence([self.seed, k])
        report = mutual_independence_test(sub, cluster_bandwidths(sub), self.alpha,
                                          self.method, self.num_permutations, seed)
        return _Term(-math.log(report.min_adjusted_p), report.min_adjusted_p)


def _total(terms):
    return sum(t.value for t in terms)


def _validate(n, m, c, max_iterations):
    if m < 1:
        raise ConfigurationError(f"need m >= 1, got {m}")
    if c < 1:
        raise ConfigurationError(f"need c >= 1, got {c}")
    if m ** c > MAX_WORDS:
        raise ConfigurationError(f"m**c = {m ** c} exceeds the limit of {MAX_WORDS}")
    if n < MIN_SAMPLES * m:
        raise ConfigurationError(
            f"n={n} is too small for m={m} clusters (need n >= {MIN_SAMPLES * m})"
        )
    if max_iterations < 1:
        raise ConfigurationError(f"need max_iterations >= 1, got {max_iterations}")


def compute_objective(data, labels, m=None, alpha=0.05, method="gamma",
                      num_permutations=200, seed=None):
    """``-sum_k log p_k`` over clusters, with ``p_k`` the cluster's min adjusted p-value.

    ``labels`` run over ``1..m``. A cluster with no points makes the
    assignment infeasible and the objective ``inf``.
    """
    data = as_dataset(data)
    labels = np.asarray(labels)
    m = int(labels.max()) if m is None else m
    check_method(method, num_permutations)
    obj = _Objective(data, alpha, method, num_permutations, seed)
    return _total([obj.term(np.flatnonzero(labels == k + 1), k) for k in range(m)])


def verify_clusters(data, labels, m, alpha=0.05, method="permutation",
                    num_permutations=200, seed=None):
    """Mutual-independence report per cluster (``None`` for clusters too small to test)."""
    data = as_dataset(data)
    out = []
    for k in range(m):
        sub = data[labels == k + 1]
        if sub.shape[0] < MIN_SAMPLES:
            out.append(None)
            continue
        s = None if seed is None else np.random.SeedSequence([seed, 1000 + k])
        out.append(mutual_independence_test(sub, cluster_bandwidths(sub), alpha, method,
                                            num_permutations, s))
    return out


def clic(data, m, c=1, max_iterations=7, alpha=0.05, seed=None, method="gamma",
         num_permutations=200, verdict_method="permutation"):
    """Cluster ``data`` into ``m`` groups that are each mutually independent.

    Returns ``(ClusterAssignment, ObjectiveTrace)``; labels are ``1..m``.
    The objective uses ``method`` p-values; the final status is re-checked
    with ``verdict_method``.
    """
    data = as_dataset(data)
    n, d = data.shape
    if d < 2:
        raise ConfigurationError("clustering needs at least two variables")
    _validate(n, m, c, max_iterations)
    check_method(method, num_permutations)
    check_method(verdict_method, num_permutations)

    rng = np.random.default_rng(None if seed is None else [RNG_TAG, seed])
    labels = rng.integers(0, m, size=n)
    objective = _Objective(data, alpha, method, num_permutations, seed)
    terms = [objective.term(np.flatnonzero(labels == k), k) for k in range(m)]
    current = _total(terms)

    per_iteration = [current]
    accepted = [current]
    iteration_log = []
    words = list(product(range(m), repeat=c))
    short_words = {}
    stop = MAX_ITERATIONS
    iterations = 0

    while True:
        if all(t.p_value > alpha for t in terms):
            stop = CONVERGED_INDEPENDENT
            break
        if iterations >= max_iterations:
            stop = MAX_ITERATIONS
            break
        iterations += 1
        order = rng.permutation(n)
        changed = 0
        n_sets = n_candidates = 0
        for start in range(0, n, c):
            block = order[start:start + c]
            incumbent = tuple(int(v) for v in labels[block])
            if len(block) == c:
                candidates = words
            else:
                candidates = short_words.setdefault(
                    len(block), list(product(range(m), repeat=len(block))))

            best_word, best_value, best_terms = incumbent, current, None
            n_sets += 1
            n_candidates += len(candidates)
            for word in candidates:
                if word == incumbent:
                    continue
                trial = labels.copy()
                trial[block] = word
                new_terms = list(terms)
                for k in set(incumbent) | set(word):
                    new_terms[k] = objective.term(np.flatnonzero(trial == k), k)
                value = _total(new_terms)
                # strict: ties keep the incumbent, then the earliest word
                if value < best_value:
                    best_word, best_value, best_terms = word, value, new_terms

            if best_terms is not None:
                changed += sum(a != b for a, b in zip(best_word, incumbent))
                labels[block] = best_word
                terms = best_terms
                current = best_value
                accepted.append(current)

        per_iteration.append(current)
        iteration_log.append({"iteration": iterations, "objective": current,
                              "changed": changed, "sets": n_sets,
                              "candidates": n_candidates})
        log.info("iteration %d: objective %.6g, %d labels changed",
                 iterations, current, changed)
        if changed == 0:
            stop = CONVERGED_STABLE
            break

    out_labels = labels + 1
    verdicts = verify_clusters(data, out_labels, m, alpha, verdict_method,
                               num_permutations, seed)
    independent = all(v is not None and v.independent for v in verdicts)
    if independent:
        status, message = CONVERGED_INDEPENDENT, ""
    else:
        status, message = FAILED, FAILURE_MESSAGE
    assignment = ClusterAssignment(out_labels, m, status, message, iterations, verdicts,
                                   stop)
    return assignment, ObjectiveTrace(per_iteration, accepted, iteration_log)
