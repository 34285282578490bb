"""Hot numeric kernels, JIT-compiled with numba when available.

Every kernel exists in two variants: a loop implementation compiled with
``numba.njit`` and a vectorized numpy fallback. The active variant is chosen
at import time: setting the environment variable ``SPHEREDEPTH_NO_NUMBA`` to
``1``/``true``/``yes`` forces the numpy path, as does a missing numba
install. ``USING_NUMBA`` reports which path is live; both variants stay
importable (``*_numpy`` / ``*_numba``) so ``benchmarks/bench_kernels.py`` can
time them against each other.

Results of the two paths agree to floating-point accumulation order; they are
not guaranteed bit-identical.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("SPHEREDEPTH_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in {"1", "true", "yes", "on"}

if NUMBA_DISABLED:
    njit = None
else:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        njit = None

USING_NUMBA = njit is not None

# DepthKind codes shared with spheredepth.depth
ARC_CODE = 0
COSINE_CODE = 1
CHORD_CODE = 2


# ---------------------------------------------------------------------------
# dot products -> depth similarities
# ---------------------------------------------------------------------------

def gram_to_sim_numpy(G: np.ndarray, kind_code: int) -> np.ndarray:
    t = np.clip(G, -1.0, 1.0)
    if kind_code == ARC_CODE:
        return np.pi - np.arccos(t)
    if kind_code == COSINE_CODE:
        return 1.0 + t
    return 2.0 - np.sqrt(2.0 * (1.0 - t))


def _gram_to_sim_loops(G, kind_code):
    n, m = G.shape
    S = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            t = G[i, j]
            if t > 1.0:
                t = 1.0
            elif t < -1.0:
                t = -1.0
            if kind_code == 0:
                S[i, j] = np.pi - np.arccos(t)
            elif kind_code == 1:
                S[i, j] = 1.0 + t
            else:
                S[i, j] = 2.0 - np.sqrt(2.0 * (1.0 - t))
    return S


# ---------------------------------------------------------------------------
# silhouette from a precomputed similarity matrix
# ---------------------------------------------------------------------------

def silhouette_samples_numpy(S: np.ndarray, labels: np.ndarray, n_clusters: int) -> np.ndarray:
    n = S.shape[0]
    counts = np.bincount(labels, minlength=n_clusters)
    onehot = np.zeros((n, n_clusters))
    onehot[np.arange(n), labels] = 1.0
    sums = S @ onehot  # sums[i, k] = total similarity of i to cluster k
    own = sums[np.arange(n), labels] - np.diagonal(S)
    with np.errstate(invalid="ignore", divide="ignore"):
        a = own / (counts[labels] - 1)
    other = sums / counts
    other[np.arange(n), labels] = -np.inf
    b = other.max(axis=1)
    s = np.zeros(n)
    gt = a > b
    lt = a < b
    s[gt] = 1.0 - b[gt] / a[gt]
    s[lt] = a[lt] / b[lt] - 1.0
    s[counts[labels] == 1] = 0.0  # singleton clusters take the zero convention
    return s


def _silhouette_samples_loops(S, labels, n_clusters):
    n = S.shape[0]
    counts = np.zeros(n_clusters, dtype=np.int64)
    for i in range(n):
        counts[labels[i]] += 1
    sums = np.zeros((n, n_clusters))
    for i in range(n):
        for j in range(n):
            sums[i, labels[j]] += S[i, j]
    out = np.empty(n)
    for i in range(n):
        own = labels[i]
        if counts[own] == 1:
            out[i] = 0.0
            continue
        a = (sums[i, own] - S[i, i]) / (counts[own] - 1)
        b = -np.inf
        for k in range(n_clusters):
            if k != own:
                d = sums[i, k] / counts[k]
                if d > b:
                    b = d
        if a > b:
            out[i] = 1.0 - b / a
        elif a == b:
            out[i] = 0.0
        else:
            out[i] = a / b - 1.0
    return out


# ---------------------------------------------------------------------------
# medoid refinement: per-cluster argmax of mean within-cluster similarity
# ---------------------------------------------------------------------------

def refine_medoids_numpy(S: np.ndarray, labels: np.ndarray, n_clusters: int) -> np.ndarray:
    medoids = np.empty(n_clusters, dtype=np.int64)
    for k in range(n_clusters):
        members = np.where(labels == k)[0]
        scores = S[np.ix_(members, members)].sum(axis=1)
        medoids[k] = members[int(np.argmax(scores))]
    return medoids


def _refine_medoids_loops(S, labels, n_clusters):
    n = S.shape[0]
    best_idx = np.full(n_clusters, -1, dtype=np.int64)
    best_val = np.full(n_clusters, -np.inf)
    for i in range(n):
        k = labels[i]
        tot = 0.0
        for j in range(n):
            if labels[j] == k:
                tot += S[i, j]
        if tot > best_val[k]:  # strict: ties keep the lowest index
            best_val[k] = tot
            best_idx[k] = i
    return best_idx


# ---------------------------------------------------------------------------
# pair counts over all unordered pairs (O(n^2) reference route)
# ---------------------------------------------------------------------------

def pair_counts_brute_numpy(P: np.ndarray, Q: np.ndarray):
    iu = np.triu_indices(P.shape[0], 1)
    same_p = (P[:, None] == P[None, :])[iu]
    same_q = (Q[:, None] == Q[None, :])[iu]
    a = int(np.count_nonzero(same_p & same_q))
    b = int(np.count_nonzero(same_p & ~same_q))
    c = int(np.count_nonzero(~same_p & same_q))
    d = int(np.count_nonzero(~same_p & ~same_q))
    return a, b, c, d


def _pair_counts_brute_loops(P, Q):
    n = P.shape[0]
    a = 0
    b = 0
    c = 0
    d = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_p = P[i] == P[j]
            same_q = Q[i] == Q[j]
            if same_p and same_q:
                a += 1
            elif same_p:
                b += 1
            elif same_q:
                c += 1
            else:
                d += 1
    return a, b, c, d


# ---------------------------------------------------------------------------
# fuzzy-partition equivalence matrix and permutation nulls
# ---------------------------------------------------------------------------

def equivalence_matrix_numpy(W: np.ndarray) -> np.ndarray:
    from scipy.spatial.distance import pdist, squareform

    E = 1.0 - 0.5 * squareform(pdist(W, metric="cityblock"))
    np.fill_diagonal(E, 1.0)
    return E


def _equivalence_matrix_loops(W):
    n, K = W.shape
    E = np.empty((n, n))
    for i in range(n):
        E[i, i] = 1.0
        for j in range(i + 1, n):
            tot = 0.0
            for k in range(K):
                tot += abs(W[i, k] - W[j, k])
            e = 1.0 - 0.5 * tot
            E[i, j] = e
            E[j, i] = e
    return E


def permuted_absdiff_means_numpy(EG: np.ndarray, EH: np.ndarray, perms: np.ndarray) -> np.ndarray:
    n = EG.shape[0]
    iu = np.triu_indices(n, 1)
    eg = EG[iu]
    out = np.empty(perms.shape[0])
    for p in range(perms.shape[0]):
        perm = perms[p]
        out[p] = np.abs(eg - EH[np.ix_(perm, perm)][iu]).mean()
    return out


def _permuted_absdiff_means_loops(EG, EH, perms):
    n = EG.shape[0]
    n_pairs = n * (n - 1) / 2.0
    out = np.empty(perms.shape[0])
    for p in range(perms.shape[0]):
        perm = perms[p]
        tot = 0.0
        for i in range(n):
            pi = perm[i]
            for j in range(i + 1, n):
                tot += abs(EG[i, j] - EH[pi, perm[j]])
        out[p] = tot / n_pairs
    return out


# ---------------------------------------------------------------------------
# sparse dot product over sorted index arrays
# ---------------------------------------------------------------------------

def sparse_dot_numpy(ia: np.ndarray, va: np.ndarray, ib: np.ndarray, vb: np.ndarray) -> float:
    _, sel_a, sel_b = np.intersect1d(ia, ib, assume_unique=True, return_indices=True)
    return float(va[sel_a] @ vb[sel_b])


def _sparse_dot_loops(ia, va, ib, vb):
    i = 0
    j = 0
    tot = 0.0
    while i < ia.shape[0] and j < ib.shape[0]:
        da = ia[i]
        db = ib[j]
        if da == db:
            tot += va[i] * vb[j]
            i += 1
            j += 1
        elif da < db:
            i += 1
        else:
            j += 1
    return tot


# ---------------------------------------------------------------------------
# path selection
# ---------------------------------------------------------------------------

if USING_NUMBA:
    gram_to_sim_numba = njit(cache=True)(_gram_to_sim_loops)
    silhouette_samples_numba = njit(cache=True)(_silhouette_samples_loops)
    refine_medoids_numba = njit(cache=True)(_refine_medoids_loops)
    pair_counts_brute_numba = njit(cache=True)(_pair_counts_brute_loops)
    equivalence_matrix_numba = njit(cache=True)(_equivalence_matrix_loops)
    permuted_absdiff_means_numba = njit(cache=True)(_permuted_absdiff_means_loops)
    sparse_dot_numba = njit(cache=True)(_sparse_dot_loops)

    gram_to_sim = gram_to_sim_numba
    silhouette_samples = silhouette_samples_numba
    refine_medoids = refine_medoids_numba
    pair_counts_brute = pair_counts_brute_numba
    equivalence_matrix = equivalence_matrix_numba
    permuted_absdiff_means = permuted_absdiff_means_numba
    sparse_dot = sparse_dot_numba
else:
    gram_to_sim_numba = None
    silhouette_samples_numba = None
    refine_medoids_numba = None
    pair_counts_brute_numba = None
    equivalence_matrix_numba = None
    permuted_absdiff_means_numba = None
    sparse_dot_numba = None

    gram_to_sim = gram_to_sim_numpy
    silhouette_samples = silhouette_samples_numpy
    refine_medoids = refine_medoids_numpy
    pair_counts_brute = pair_counts_brute_numpy
    equivalence_matrix = equivalence_matrix_numpy
    permuted_absdiff_means = permuted_absdiff_means_numpy
    sparse_dot = sparse_dot_numpy
