"""Hot numeric kernels.

Every kernel exists twice: a ``*_numba`` version compiled with ``njit`` and a
``*_numpy`` version built from vectorised numpy calls. The public names pick
one according to :data:`resilient_submod._accel.NUMBA_ENABLED`. Both variants
follow the same reduction and tie-breaking order, so they agree on every
discrete output (selected sets, ranks) and on values up to rounding in the
Cholesky factorisation.
"""
from itertools import combinations, islice
from math import comb

import numpy as np

from ._accel import NUMBA_ENABLED, njit

_CHUNK = 1 << 16


# ---------------------------------------------------------------------------
# log det(I + sum_i D_i) over many index sets
# ---------------------------------------------------------------------------

@njit(cache=True)
def _chol_logdet_inplace(a):
    # Lower Cholesky factor overwrites ``a``; returns NaN on a non-positive pivot.
    d = a.shape[0]
    total = 0.0
    for j in range(d):
        s = a[j, j]
        for p in range(j):
            s -= a[j, p] * a[j, p]
        if not s > 0.0:
            return np.nan
        ljj = np.sqrt(s)
        a[j, j] = ljj
        total += np.log(ljj)
        for i in range(j + 1, d):
            t = a[i, j]
            for p in range(j):
                t -= a[i, p] * a[j, p]
            a[i, j] = t / ljj
    return 2.0 * total


@njit(cache=True)
def logdet_sums_numba(mats, idx):
    n, k = idx.shape
    d = mats.shape[1]
    out = np.empty(n)
    work = np.empty((d, d))
    for r in range(n):
        work[:, :] = 0.0
        for j in range(k):
            e = idx[r, j]
            if e >= 0:
                for a in range(d):
                    for b in range(a + 1):
                        work[a, b] += mats[e, a, b]
        for a in range(d):
            work[a, a] += 1.0
        out[r] = _chol_logdet_inplace(work)
    return out


def logdet_sums_numpy(mats, idx):
    n, k = idx.shape
    m, d, _ = mats.shape
    padded = np.concatenate([mats, np.zeros((1, d, d))])
    safe = np.where(idx >= 0, idx, m)
    out = np.empty(n)
    for start in range(0, n, _CHUNK):
        rows = safe[start:start + _CHUNK]
        acc = np.zeros((rows.shape[0], d, d))
        for j in range(k):
            acc += padded[rows[:, j]]
        acc += np.eye(d)
        try:
            chol = np.linalg.cholesky(acc)
            out[start:start + rows.shape[0]] = 2.0 * np.log(
                np.diagonal(chol, axis1=1, axis2=2)).sum(axis=1)
        except np.linalg.LinAlgError:
            for r in range(rows.shape[0]):
                try:
                    c = np.linalg.cholesky(acc[r])
                    out[start + r] = 2.0 * np.log(np.diag(c)).sum()
                except np.linalg.LinAlgError:
                    out[start + r] = np.nan
    return out


def chol_logdet_numba(matrix):
    return _chol_logdet_inplace(np.array(matrix, dtype=np.float64, order="C"))


def chol_logdet_numpy(matrix):
    try:
        c = np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        return np.nan
    return 2.0 * float(np.log(np.diag(c)).sum())


# ---------------------------------------------------------------------------
# max over |A| = alpha of min over size-k subsets S of A of table[S]
# ---------------------------------------------------------------------------

def binomial_table(m, kmax):
    """``out[n, r] = C(n, r)`` for ``0 <= n <= m`` and ``0 <= r <= kmax``."""
    out = np.zeros((m + 1, kmax + 1), dtype=np.int64)
    for n in range(m + 1):
        for r in range(min(n, kmax) + 1):
            out[n, r] = comb(n, r)
    return out


def colex_ranks(combos, binom):
    """Colexicographic rank of each sorted row of ``combos``."""
    combos = np.asarray(combos, dtype=np.int64)
    k = combos.shape[1]
    if k == 0:
        return np.zeros(combos.shape[0], dtype=np.int64)
    return binom[combos, np.arange(1, k + 1)].sum(axis=1)


def position_patterns(alpha, k):
    """All size-``k`` position subsets of ``range(alpha)``, shape ``(C(alpha,k), k)``."""
    pats = list(combinations(range(alpha), k))
    return np.array(pats, dtype=np.int64).reshape(len(pats), k)


@njit(cache=True)
def maxmin_table_numba(m, alpha, table, binom, patterns):
    npat, k = patterns.shape
    a = np.arange(alpha)
    best = -np.inf
    best_a = a.copy()
    while True:
        resid = np.inf
        for p in range(npat):
            rank = 0
            for i in range(k):
                rank += binom[a[patterns[p, i]], i + 1]
            v = table[rank]
            if v < resid:
                resid = v
        if resid > best:
            best = resid
            best_a[:] = a
        # advance to the next combination in lexicographic order
        i = alpha - 1
        while i >= 0 and a[i] == m - alpha + i:
            i -= 1
        if i < 0:
            break
        a[i] += 1
        for j in range(i + 1, alpha):
            a[j] = a[j - 1] + 1
    return best_a, best


def maxmin_table_numpy(m, alpha, table, binom, patterns):
    npat, k = patterns.shape
    cols = np.arange(1, k + 1)
    best = -np.inf
    best_a = np.arange(alpha, dtype=np.int64)
    it = combinations(range(m), alpha)
    while True:
        chunk = list(islice(it, _CHUNK))
        if not chunk:
            break
        a = np.array(chunk, dtype=np.int64).reshape(len(chunk), alpha)
        if k:
            ranks = binom[a[:, patterns], cols].sum(axis=2)
        else:
            ranks = np.zeros((a.shape[0], npat), dtype=np.int64)
        resid = table[ranks].min(axis=1)
        j = int(np.argmax(resid))
        if resid[j] > best:
            best = float(resid[j])
            best_a = a[j].copy()
    return best_a, best


if NUMBA_ENABLED:
    logdet_sums = logdet_sums_numba
    chol_logdet = chol_logdet_numba
    maxmin_table = maxmin_table_numba
else:
    logdet_sums = logdet_sums_numpy
    chol_logdet = chol_logdet_numpy
    maxmin_table = maxmin_table_numpy
