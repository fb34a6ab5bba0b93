"""Compiled inner loop for the CLIC objective (gamma p-values, median widths).

Mirrors ``mutual_independence_test(sub, cluster_bandwidths(sub), method="gamma")``
without materialising centred matrices. Falls back to ``None`` when numba is
unavailable; callers then use the numpy path.
"""

import numpy as np
from scipy import stats

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

if NUMBA_AVAILABLE:

    @njit(cache=True)
    def _count_within(xs, t):
        # pairs i < j with xs[j] - xs[i] <= t; xs sorted ascending
        s = xs.shape[0]
        count = 0
        j = 0
        for i in range(s):
            if j < i + 1:
                j = i + 1
            while j < s and xs[j] - xs[i] <= t:
                j += 1
            count += j - i - 1
        return count

    @njit(cache=True)
    def _kth_distance(xs, k):
        # exact k-th smallest (1-based) pairwise distance, by bisection on the
        # bit patterns of nonnegative doubles (which order like integers)
        lo = np.int64(0)
        hi = np.array([xs[-1] - xs[0]]).view(np.int64)[0]
        probe = np.empty(1, dtype=np.int64)
        while lo < hi:
            mid = lo + (hi - lo) // 2
            probe[0] = mid
            if _count_within(xs, probe.view(np.float64)[0]) >= k:
                hi = mid
            else:
                lo = mid + 1
        probe[0] = lo
        return probe.view(np.float64)[0]

    @njit(cache=True)
    def _median_width(x):
        xs = np.sort(x)
        s = xs.shape[0]
        npairs = s * (s - 1) // 2
        if npairs % 2 == 1:
            w = _kth_distance(xs, npairs // 2 + 1)
        else:
            w = (_kth_distance(xs, npairs // 2) + _kth_distance(xs, npairs // 2 + 1)) / 2.0
        return w if w > 0.0 else 1.0

    @njit(cache=True)
    def _gram(x, sigma):
        s = x.shape[0]
        out = np.empty((s, s))
        c = -1.0 / (2.0 * sigma * sigma)
        for a in range(s):
            out[a, a] = 1.0
            for b in range(a + 1, s):
                diff = x[a] - x[b]
                v = np.exp(diff * diff * c)
                out[a, b] = v
                out[b, a] = v
        return out

    @njit(cache=True)
    def _gamma_moments(K, L):
        s = K.shape[0]
        rk = np.empty(s)
        rl = np.empty(s)
        for a in range(s):
            rk[a] = K[a].mean()
            rl[a] = L[a].mean()
        mk = rk.mean()
        ml = rl.mean()
        cross_diag = 0.0
        cross_off = 0.0
        sq_off = 0.0
        sum_k = 0.0
        sum_l = 0.0
        for a in range(s):
            kc = K[a, a] - 2.0 * rk[a] + mk
            lc = L[a, a] - 2.0 * rl[a] + ml
            cross_diag += kc * lc
            for b in range(a + 1, s):
                kc = K[a, b] - rk[a] - rk[b] + mk
                lc = L[a, b] - rl[a] - rl[b] + ml
                p = kc * lc
                cross_off += p
                sq_off += (p / 6.0) ** 2
                sum_k += K[a, b]
                sum_l += L[a, b]
        return cross_diag + 2.0 * cross_off, 2.0 * sq_off, 2.0 * sum_k, 2.0 * sum_l

    @njit(cache=True)
    def _cluster_moments(X):
        s, d = X.shape
        grams = np.empty((d, s, s))
        for j in range(d):
            col = X[:, j].copy()
            grams[j] = _gram(col, _median_width(col))
        out = np.empty((d - 1, 4))
        tail = grams[d - 1].copy()
        for t in range(d - 2, -1, -1):
            out[t] = _gamma_moments(grams[t], tail)
            if t > 0:
                tail *= grams[t]
        return out


def _gamma_sf(cross, var_sum, sum_k, sum_l, n):
    test_stat = cross / n
    if n < 6:
        return 1.0
    var_hsic = var_sum / n / (n - 1)
    var_hsic *= 72.0 * (n - 4) * (n - 5) / n / (n - 1) / (n - 2) / (n - 3)
    mu_x = sum_k / n / (n - 1)
    mu_y = sum_l / n / (n - 1)
    mean_hsic = (1.0 + mu_x * mu_y - mu_x - mu_y) / n
    if not (var_hsic > 0 and mean_hsic > 0):
        return 1.0 if test_stat <= 0 else 0.0
    return float(stats.gamma.sf(test_stat, mean_hsic ** 2 / var_hsic,
                                scale=var_hsic * n / mean_hsic))


def cluster_gamma_pvalues(X):
    """Raw (unadjusted) gamma p-values of the d-1 sub-tests, or ``None`` without numba."""
    if not NUMBA_AVAILABLE:
        return None
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    moments = _cluster_moments(X)
    return [_gamma_sf(*row, n) for row in moments]
