"""Partition agreement indices.

Crisp: Rand index and adjusted Rand index from pair counts (a, b, c, d),
with both an O(n^2) reference route and a contingency-table fast path that
agree exactly. Fuzzy: the normalized degree of concordance (NDC) built on a
membership-based equivalence relation, and its permutation-adjusted version
(ACI). NDC restricted to crisp (one-hot) inputs reduces to the Rand index.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels


class PairCounts(NamedTuple):
    """Unordered-pair agreement counts between two crisp partitions.

    a: paired in both; b: paired only in the first; c: paired only in the
    second; d: paired in neither. a + b + c + d = n (n - 1) / 2.
    """

    a: int
    b: int
    c: int
    d: int

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d


def _as_labels(p) -> np.ndarray:
    labels = getattr(p, "labels", p)
    arr = np.asarray(labels)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("labels must be a non-empty 1-D array")
    return arr


def _check_same_length(p: np.ndarray, q: np.ndarray) -> None:
    if p.shape[0] != q.shape[0]:
        raise ValueError(f"length mismatch: {p.shape[0]} vs {q.shape[0]}")


def _comb2(m: np.ndarray) -> np.ndarray:
    m = m.astype(np.int64)
    return m * (m - 1) // 2


def pair_counts(P, Q) -> PairCounts:
    """Pair counts via the contingency table (fast path)."""
    p = _as_labels(P)
    q = _as_labels(Q)
    _check_same_length(p, q)
    _, pi = np.unique(p, return_inverse=True)
    _, qi = np.unique(q, return_inverse=True)
    n_p = int(pi.max()) + 1
    n_q = int(qi.max()) + 1
    table = np.bincount(pi * n_q + qi, minlength=n_p * n_q).reshape(n_p, n_q)
    a = int(_comb2(table).sum())
    paired_p = int(_comb2(table.sum(axis=1)).sum())
    paired_q = int(_comb2(table.sum(axis=0)).sum())
    n = int(p.shape[0])
    total = n * (n - 1) // 2
    b = paired_p - a
    c = paired_q - a
    return PairCounts(a, b, c, total - a - b - c)


def pair_counts_brute(P, Q) -> PairCounts:
    """Pair counts by direct O(n^2) enumeration (reference route)."""
    p = _as_labels(P)
    q = _as_labels(Q)
    _check_same_length(p, q)
    # map to integer codes so the kernel sees plain int64 arrays
    _, pi = np.unique(p, return_inverse=True)
    _, qi = np.unique(q, return_inverse=True)
    a, b, c, d = _kernels.pair_counts_brute(
        np.ascontiguousarray(pi, dtype=np.int64),
        np.ascontiguousarray(qi, dtype=np.int64),
    )
    return PairCounts(int(a), int(b), int(c), int(d))


def rand_index(P, Q) -> float:
    """RI = (a + d) / C(n, 2), in [0, 1]; RI(P, P) = 1."""
    p = _as_labels(P)
    q = _as_labels(Q)
    _check_same_length(p, q)
    if p.shape[0] < 2:
        raise ValueError("the Rand index needs at least 2 points")
    counts = pair_counts(p, q)
    return (counts.a + counts.d) / counts.total


def adjusted_rand_index(P, Q) -> float:
    """Chance-corrected Rand index, 2(ad - bc) / (b^2 + c^2 + 2ad + (a+d)(b+c)).

    Equals the standard contingency-table ARI; 1 on identical partitions,
    expectation ~0 under independent labelings.
    """
    p = _as_labels(P)
    q = _as_labels(Q)
    _check_same_length(p, q)
    if p.shape[0] < 2:
        raise ValueError("the adjusted Rand index needs at least 2 points")
    a, b, c, d = pair_counts(p, q)
    den = b * b + c * c + 2 * a * d + (a + d) * (b + c)
    if den == 0:
        if b == 0 and c == 0:  # identical pair structure
            return 1.0
        raise ValueError("adjusted Rand index undefined: degenerate denominator")
    return 2 * (a * d - b * c) / den


# ---------------------------------------------------------------------------
# fuzzy partitions
# ---------------------------------------------------------------------------

def membership_matrix(M) -> np.ndarray:
    """Validate an (n, K) membership matrix: rows in [0, 1] summing to 1."""
    W = np.asarray(M, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] == 0 or W.shape[1] == 0:
        raise ValueError("membership matrix must be 2-D and non-empty")
    if np.any(W < -1e-12) or np.any(W > 1.0 + 1e-12):
        raise ValueError("memberships must lie in [0, 1]")
    rowsums = W.sum(axis=1)
    if np.any(np.abs(rowsums - 1.0) > 1e-9):
        i = int(np.argmax(np.abs(rowsums - 1.0)))
        raise ValueError(f"membership row {i} sums to {rowsums[i]!r}, not 1")
    return W


def one_hot(labels, n_clusters: int | None = None) -> np.ndarray:
    """Embed crisp labels as a one-hot membership matrix."""
    lab = _as_labels(labels).astype(np.int64)
    if lab.min() < 0:
        raise ValueError("labels must be non-negative for one-hot embedding")
    k = int(lab.max()) + 1 if n_clusters is None else int(n_clusters)
    if lab.max() >= k:
        raise ValueError("label exceeds the requested number of clusters")
    W = np.zeros((lab.size, k))
    W[np.arange(lab.size), lab] = 1.0
    return W


def fuzzy_equivalence(w_i, w_j) -> float:
    """1 - ||w_i - w_j||_1 / 2: how equivalently two points are clustered.

    The divisor 2 is the maximal L1 distance between probability vectors, so
    the value lies in [0, 1].
    """
    a = np.asarray(w_i, dtype=np.float64)
    b = np.asarray(w_j, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("membership rows must be 1-D and of equal length")
    return float(1.0 - 0.5 * np.abs(a - b).sum())


def equivalence_matrix(G) -> np.ndarray:
    """Pairwise fuzzy equivalence of all rows of a membership matrix."""
    W = membership_matrix(G)
    return np.asarray(_kernels.equivalence_matrix(np.ascontiguousarray(W)))


def ndc(G, H) -> float:
    """Normalized degree of concordance between two fuzzy partitions.

    1 - mean over pairs i < j of |E_G(i,j) - E_H(i,j)|; equals the Rand
    index exactly when both inputs are crisp one-hot matrices.
    """
    EG = equivalence_matrix(G)
    EH = equivalence_matrix(H)
    n = EG.shape[0]
    if EH.shape[0] != n:
        raise ValueError(f"length mismatch: {n} vs {EH.shape[0]}")
    if n < 2:
        raise ValueError("NDC needs at least 2 points")
    iu = np.triu_indices(n, 1)
    return float(1.0 - np.abs(EG[iu] - EH[iu]).mean())


def aci(G, H, n_perm: int = 1000, seed=0) -> float:
    """Adjusted concordance index: (NDC - mean_perm NDC) / (1 - mean_perm NDC).

    The null mean is taken over ``n_perm`` random row permutations of H with
    G held fixed; deterministic per seed.
    """
    if n_perm < 1:
        raise ValueError("n_perm must be >= 1")
    EG = equivalence_matrix(G)
    EH = equivalence_matrix(H)
    n = EG.shape[0]
    if EH.shape[0] != n:
        raise ValueError(f"length mismatch: {n} vs {EH.shape[0]}")
    if n < 2:
        raise ValueError("ACI needs at least 2 points")
    iu = np.triu_indices(n, 1)
    observed = float(1.0 - np.abs(EG[iu] - EH[iu]).mean())
    rng = np.random.default_rng(seed)
    perms = np.stack([rng.permutation(n) for _ in range(n_perm)]).astype(np.int64)
    d_null = np.asarray(_kernels.permuted_absdiff_means(EG, EH, perms))
    ndc_bar = float(np.mean(1.0 - d_null))
    denom = 1.0 - ndc_bar
    if denom < 1e-12:
        raise ValueError("ACI undefined: permutation null is degenerate (mean NDC ~ 1)")
    return (observed - ndc_bar) / denom
