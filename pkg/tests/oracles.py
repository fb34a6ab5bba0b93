"""Brute-force reference computations, written with plain loops and ``math``."""

import math
import statistics


def gram_loop(col, sigma):
    n = len(col)
    return [[math.exp(-((col[i] - col[q]) ** 2) / (2 * sigma ** 2)) for q in range(n)]
            for i in range(n)]


def median_pairwise(col):
    col = list(col)
    dists = sorted(abs(col[i] - col[q]) for i in range(len(col)) for q in range(i + 1, len(col)))
    return statistics.median(dists)


def knn_bandwidth(data, j, k=10):
    n, d = len(data), len(data[0])
    collected = []
    for i in range(n):
        cand = []
        for q in range(n):
            if q == i:
                continue
            dist = math.sqrt(sum((data[i][l] - data[q][l]) ** 2 for l in range(d) if l != j))
            cand.append((dist, q))
        cand.sort()
        collected.extend(abs(data[i][j] - data[q][j]) for _, q in cand[:k])
    return statistics.median(collected)


def knn_bandwidth_all_pairs(data, j, k=10):
    n, d = len(data), len(data[0])
    collected = []
    for i in range(n):
        cand = sorted(
            (math.sqrt(sum((data[i][l] - data[q][l]) ** 2 for l in range(d) if l != j)), q)
            for q in range(n) if q != i
        )
        hood = [i] + [q for _, q in cand[:k]]
        for a in range(len(hood)):
            for b in range(a + 1, len(hood)):
                collected.append(abs(data[hood[a]][j] - data[hood[b]][j]))
    return statistics.median(collected)


def grouped_loop(data, sigmas, left, right):
    """Direct evaluation of ``1/n sum_i prod_j k_j(x_ij, x_{q_j} j)`` with q tied per block."""
    n = len(data)
    k = lambda a, b, s: math.exp(-((a - b) ** 2) / (2 * s ** 2))
    out = [[0.0] * n for _ in range(n)]
    for p in range(n):
        for q in range(n):
            acc = 0.0
            for i in range(n):
                term = 1.0
                for j in left:
                    term *= k(data[i][j], data[p][j], sigmas[j])
                for j in right:
                    term *= k(data[i][j], data[q][j], sigmas[j])
                acc += term
            out[p][q] = acc / n
    return out


def hsic_expanded(K, L):
    n = len(K)
    cross = sum(K[i][j] * L[i][j] for i in range(n) for j in range(n))
    mean_k = sum(map(sum, K)) / n ** 2
    mean_l = sum(map(sum, L)) / n ** 2
    rows = sum((sum(K[i]) / n) * (sum(L[i]) / n) for i in range(n))
    return (cross + mean_k * mean_l * n ** 2 - 2 * n * rows) / n ** 2


def mmd_loop(a, b, sigmas):
    def k(x, y):
        return math.exp(-sum((x[j] - y[j]) ** 2 / (2 * sigmas[j] ** 2) for j in range(len(x))))

    kaa = sum(k(x, y) for x in a for y in a) / len(a) ** 2
    kbb = sum(k(x, y) for x in b for y in b) / len(b) ** 2
    kab = sum(k(x, y) for x in a for y in b) / (len(a) * len(b))
    return kaa + kbb - 2 * kab
