"""Gaussian RBF Gram matrices and the two bandwidth rules."""

import math

import numpy as np

from .errors import DegenerateColumnError, InvalidBandwidthError, ShapeError


def as_column(values):
    col = np.asarray(values, dtype=float)
    if col.ndim != 1:
        raise ShapeError(f"expected a 1-d column, got shape {col.shape}")
    if col.shape[0] < 2:
        raise ShapeError("a column needs at least two observations")
    if not np.all(np.isfinite(col)):
        raise ShapeError("column contains non-finite values")
    return col


def as_dataset(data):
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2:
        raise ShapeError(f"expected an n x d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError("dataset contains non-finite values")
    return arr


def check_bandwidth(sigma):
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma <= 0.0:
        raise InvalidBandwidthError(f"bandwidth must be positive and finite, got {sigma!r}")
    return sigma


def sq_diffs(col):
    """Matrix of squared pairwise differences ``(x_i - x_q)**2``."""
    diff = np.subtract.outer(col, col)
    return diff * diff


def gram_from_sq_diffs(sq, sigma):
    return np.exp(-sq / (2.0 * sigma * sigma))


def rbf_gram(col, sigma):
    """Gram matrix ``exp(-(x_i - x_q)**2 / (2 sigma**2))`` of one variable.

    The result is exactly symmetric with a unit diagonal.
    """
    sigma = check_bandwidth(sigma)
    col = as_column(col)
    return gram_from_sq_diffs(sq_diffs(col), sigma)


def product_gram(grams):
    """Entrywise product of Gram matrices (the product kernel on a block)."""
    grams = list(grams)
    if not grams:
        raise ShapeError("need at least one Gram matrix")
    out = np.array(grams[0], dtype=float, copy=True)
    for g in grams[1:]:
        if g.shape != out.shape:
            raise ShapeError(f"Gram shapes differ: {g.shape} vs {out.shape}")
        out *= g
    return out


def bandwidth_median(col):
    """Median of the n(n-1)/2 pairwise absolute distances of a column."""
    col = as_column(col)
    n = col.shape[0]
    iu = np.triu_indices(n, k=1)
    dists = np.abs(np.subtract.outer(col, col)[iu])
    sigma = float(np.median(dists))
    if sigma <= 0.0:
        raise DegenerateColumnError("column has zero median pairwise distance")
    return sigma


def bandwidth_neighborhood(data, j, k_neighbors=10, pairs="point"):
    """Median distance in dimension ``j`` between each point and its neighbours.

    Neighbours are the ``k_neighbors`` nearest points under the Euclidean
    distance over every variable except ``j``; the point itself is excluded
    and ties go to the lower index. ``pairs="point"`` collects the
    point-to-neighbour distances, ``pairs="all"`` every pairwise distance
    inside each neighbourhood (point included). Falls back to
    :func:`bandwidth_median` when the median is zero.
    """
    data = as_dataset(data)
    n, d = data.shape
    if d < 2:
        raise ShapeError("neighbourhood bandwidth needs at least two variables")
    if not 0 <= j < d:
        raise ShapeError(f"variable index {j} out of range for d={d}")
    if not n > k_neighbors >= 1:
        raise ShapeError(f"need n > k_neighbors >= 1, got n={n}, k={k_neighbors}")
    if pairs not in ("point", "all"):
        raise ValueError(f"unknown pairs mode {pairs!r}")

    others = np.delete(data, j, axis=1)
    sq = np.zeros((n, n))
    for col in others.T:
        sq += sq_diffs(col)
    np.fill_diagonal(sq, np.inf)
    nbrs = np.argsort(sq, axis=1, kind="stable")[:, :k_neighbors]

    x = data[:, j]
    if pairs == "point":
        collected = np.abs(x[nbrs] - x[:, None]).ravel()
    else:
        hood = x[np.hstack([np.arange(n)[:, None], nbrs])]
        iu = np.triu_indices(k_neighbors + 1, k=1)
        collected = np.abs(hood[:, iu[0]] - hood[:, iu[1]]).ravel()

    sigma = float(np.median(collected))
    if sigma > 0.0:
        return sigma
    try:
        return bandwidth_median(x)
    except DegenerateColumnError as exc:
        raise DegenerateColumnError(
            f"variable {j} is constant; no bandwidth can be derived", variable=j
        ) from exc


def select_bandwidths(data, rule="neighborhood", k_neighbors=10):
    """One bandwidth per column of ``data`` under ``rule`` ("median" or "neighborhood")."""
    data = as_dataset(data)
    out = []
    for j in range(data.shape[1]):
        try:
            if rule == "median":
                out.append(bandwidth_median(data[:, j]))
            elif rule == "neighborhood":
                out.append(bandwidth_neighborhood(data, j, k_neighbors))
            else:
                raise ValueError(f"unknown bandwidth rule {rule!r}")
        except DegenerateColumnError as exc:
            raise DegenerateColumnError(
                f"variable {j} is degenerate: {exc}", variable=j
            ) from exc
    return np.array(out)


def gram_matrices(data, bandwidths):
    data = as_dataset(data)
    bandwidths = np.asarray(bandwidths, dtype=float)
    if bandwidths.shape != (data.shape[1],):
        raise ShapeError(
            f"need {data.shape[1]} bandwidths, got shape {bandwidths.shape}"
        )
    return [rbf_gram(data[:, j], s) for j, s in enumerate(bandwidths)]
