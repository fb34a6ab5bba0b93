"""Number of mixture components from the rank of the empirical joint embedding.

The order-d embedding tensor is flattened into an n x n matrix for every
split of the variables into two blocks; each matrix gets a truncated-SVD
rank estimate and the most common estimate wins.
"""

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DegenerateSpectrumError, ShapeError
from .kernel import as_dataset, gram_matrices, product_gram, select_bandwidths

MAX_SVD_SIZE = 2000


@dataclass(frozen=True)
class Bipartition:
    left: tuple
    right: tuple

    def __post_init__(self):
        if not self.left or not self.right:
            raise ShapeError("both blocks of a bipartition must be nonempty")
        if set(self.left) & set(self.right):
            raise ShapeError("bipartition blocks overlap")

    @property
    def code(self):
        return sum(1 << j for j in self.left)

    def mirror(self):
        return Bipartition(self.right, self.left)

    def label(self):
        fmt = lambda block: ",".join(f"x{j + 1}" for j in block)
        return f"{fmt(self.left)} | {fmt(self.right)}"


def bipartitions(d):
    """All 2**(d-1) - 1 splits of ``range(d)`` with variable 0 on the left."""
    if d < 2:
        raise ShapeError("need at least two variables to split")
    rest = range(1, d)
    parts = []
    for size in range(0, d - 1):
        for extra in combinations(rest, size):
            left = (0,) + extra
            right = tuple(j for j in range(d) if j not in left)
            parts.append(Bipartition(left, right))
    return sorted(parts, key=lambda p: p.code)


def grouped_matrix(grams, part):
    """``V[p, q] = 1/n sum_i prod_{j in left} K_j[i, p] * prod_{j in right} K_j[i, q]``."""
    grams = [np.asarray(g, dtype=float) for g in grams]
    n = grams[0].shape[0]
    for g in grams:
        if g.shape != (n, n):
            raise ShapeError(f"Gram matrices must all be {n}x{n}, got {g.shape}")
    if max(part.left + part.right) >= len(grams):
        raise ShapeError("bipartition references a variable without a Gram matrix")
    k_left = product_gram(grams[j] for j in part.left)
    k_right = product_gram(grams[j] for j in part.right)
    return k_left.T @ k_right / n


def estimate_rank(singular_values, window_low=0.90, window_high=0.99999, mode="sum"):
    """Index of the sharpest drop ``SV[i+1] / SV[i]`` inside the mass window.

    The window keeps the indices whose cumulative share of the spectrum lies
    in ``[window_low, window_high]``. ``mode="sum"`` measures that share on
    the singular values themselves, ``mode="squared"`` on their squares.
    Returns a 1-based rank.
    """
    sv = np.asarray(singular_values, dtype=float)
    if sv.ndim != 1 or sv.size == 0:
        raise ShapeError("need a nonempty 1-d list of singular values")
    if np.any(sv < 0) or np.any(np.diff(sv) > 0):
        raise ShapeError("singular values must be nonnegative and descending")
    if mode == "sum":
        mass = sv
    elif mode == "squared":
        mass = sv * sv
    else:
        raise ValueError(f"unknown mode {mode!r}")
    total = mass.sum()
    if not total > 0:
        raise DegenerateSpectrumError("all singular values are zero")

    cum = np.cumsum(mass) / total
    in_window = (cum >= window_low) & (cum <= window_high) & (sv > 0)
    candidates = np.flatnonzero(in_window)
    if candidates.size == 0:
        candidates = np.flatnonzero(cum >= window_low)[:1]

    nxt = np.append(sv[1:], 0.0)
    ratios = nxt[candidates] / sv[candidates]
    # argmin returns the first minimum, i.e. the smaller index on ties
    return int(candidates[np.argmin(ratios)]) + 1


@dataclass
class RankEstimate:
    per_partition: list
    majority: int
    singular_value_profiles: list = field(repr=False)

    def to_dict(self):
        return {
            "majority": self.majority,
            "per_partition": [
                {"left": [j + 1 for j in p.left], "right": [j + 1 for j in p.right],
                 "label": p.label(), "rank": r}
                for p, r in self.per_partition
            ],
            "singular_value_profiles": [
                [float(s) for s in prof] for prof in self.singular_value_profiles
            ],
        }


def majority_vote(ranks):
    counts = Counter(ranks)
    best = max(counts.values())
    return min(r for r, c in counts.items() if c == best)


def estimate_components(data, bandwidths, window_low=0.90, window_high=0.99999,
                        mode="sum"):
    data = as_dataset(data)
    n, d = data.shape
    if d < 2:
        raise ShapeError("rank estimation needs at least two variables")
    if n < 3:
        raise ShapeError("rank estimation needs at least three observations")
    if n > MAX_SVD_SIZE:
        raise ShapeError(
            f"n={n} exceeds the full-SVD limit of {MAX_SVD_SIZE}; subsample the data"
        )
    grams = gram_matrices(data, bandwidths)

    per_partition = []
    profiles = []
    for part in bipartitions(d):
        v = grouped_matrix(grams, part)
        sv = np.linalg.svd(v, compute_uv=False)
        try:
            rank = estimate_rank(sv, window_low, window_high, mode)
        except DegenerateSpectrumError as exc:
            raise DegenerateSpectrumError(f"split {part.label()}: {exc}") from exc
        per_partition.append((part, rank))
        profiles.append(sv)
    return RankEstimate(per_partition, majority_vote([r for _, r in per_partition]),
                        profiles)


def estimate_components_auto(data, rule="neighborhood", **kwargs):
    """Select bandwidths with ``rule`` and run :func:`estimate_components`."""
    data = as_dataset(data)
    return estimate_components(data, select_bandwidths(data, rule), **kwargs)
