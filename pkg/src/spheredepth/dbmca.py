"""Depth-based medoids clustering (PAM-style alternation on depth similarities).

The algorithm alternates two steps from a depth-weighted random seeding:

* assignment: each point joins the medoid of maximal depth similarity;
* refinement: each cluster's medoid becomes its deepest member, i.e. the
  member maximizing mean within-cluster similarity.

Both steps monotonically improve the global objective
J = sum_i sim(x_i, medoid(label_i)), so the alternation terminates in a
finite number of iterations. Model selection over k uses the mean of a
silhouette computed from depth similarities. A spherical k-means baseline is
included for comparisons.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .depth import DepthKind, as_sample, depth_matrix


@dataclass
class Partition:
    """Crisp partition: integer labels in [0, K) with every cluster non-empty."""

    labels: np.ndarray
    n_clusters: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a non-empty 1-D integer array")
        k = int(self.n_clusters)
        counts = np.bincount(labels, minlength=k) if labels.min() >= 0 else None
        if counts is None or labels.max() >= k or np.any(counts == 0):
            raise ValueError(f"labels must cover exactly 0..{k - 1} with no empty cluster")
        self.labels = labels
        self.n_clusters = k

    @property
    def n(self) -> int:
        return int(self.labels.size)


@dataclass
class ClusterModel:
    """A fitted depth-based medoids model."""

    partition: Partition
    medoid_indices: np.ndarray
    kind: DepthKind
    objective_trace: list[float] = field(repr=False)
    iterations: int
    silhouette: float
    converged: bool


class SilhouetteReport(NamedTuple):
    per_point: np.ndarray
    mean: float


def _sim_matrix(sample, kind: DepthKind, sim: np.ndarray | None) -> np.ndarray:
    if sim is not None:
        S = np.asarray(sim, dtype=np.float64)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise ValueError("similarity matrix must be square")
        return S
    return depth_matrix(sample, kind)


def _objective(S: np.ndarray, labels: np.ndarray, medoids: np.ndarray) -> float:
    return float(S[np.arange(S.shape[0]), medoids[labels]].sum())


def _init_from_sim(
    S: np.ndarray,
    k: int,
    rng: np.random.Generator,
    seeding: str,
    max_value: float,
) -> np.ndarray:
    n = S.shape[0]
    chosen = np.empty(k, dtype=np.int64)
    available = np.ones(n, dtype=bool)
    chosen[0] = int(rng.integers(n))
    available[chosen[0]] = False
    for j in range(1, k):
        cand = np.where(available)[0]
        sub = S[np.ix_(cand, chosen[:j])]  # (n_cand, j)
        if seeding == "spread":
            # deviation from the written scheme: k-means++-style spreading
            w = max_value - sub.max(axis=1)
        elif j == 1:
            w = sub[:, 0].copy()
        else:
            # each candidate belongs to the neighborhood of its most similar
            # medoid; its weight is its share of that neighborhood's total
            nearest = np.argmax(sub, axis=1)
            near_sim = sub[np.arange(cand.size), nearest]
            w = np.zeros(cand.size)
            for p in range(j):
                grp = nearest == p
                if not np.any(grp):
                    continue
                tot = near_sim[grp].sum()
                w[grp] = near_sim[grp] / tot if tot > 0.0 else 1.0 / grp.sum()
        total = w.sum()
        if total > 0.0:
            pick = cand[int(rng.choice(cand.size, p=w / total))]
        else:
            pick = cand[int(rng.integers(cand.size))]
        chosen[j] = pick
        available[pick] = False
    return chosen


def init_medoids(sample, kind: DepthKind, k: int, seed, *, sim=None, seeding: str = "similarity") -> np.ndarray:
    """Depth-weighted seeding of k medoid indices (modified k-means++).

    The first medoid is uniform; each later one is drawn with probability
    proportional to its similarity share within the neighborhood of its
    closest already-chosen medoid. ``seeding="spread"`` instead weights by
    (max - similarity), spreading medoids apart.
    """
    if seeding not in ("similarity", "spread"):
        raise ValueError(f"unknown seeding mode {seeding!r}")
    S = _sim_matrix(sample, kind, sim)
    n = S.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= {n}, got {k}")
    rng = np.random.default_rng(seed)
    return _init_from_sim(S, int(k), rng, seeding, kind.max_value)


def _assign(S: np.ndarray, medoids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Labels by maximal similarity; repairs any empty cluster by re-seeding
    its medoid with the globally worst-fit non-medoid point."""
    n = S.shape[0]
    medoids = np.array(medoids, dtype=np.int64)
    k = medoids.size
    for _ in range(k + 1):
        labels = np.argmax(S[:, medoids], axis=1).astype(np.int64)
        labels[medoids] = np.arange(k)  # self-similarity is the maximum
        counts = np.bincount(labels, minlength=k)
        empty = np.where(counts == 0)[0]
        if empty.size == 0:
            return labels, medoids
        fit_sim = S[np.arange(n), medoids[labels]].copy()
        fit_sim[medoids] = np.inf
        medoids[empty[0]] = int(np.argmin(fit_sim))
    raise RuntimeError("empty-cluster repair failed to converge")


def assign(sample, medoid_indices, kind: DepthKind, *, sim=None) -> Partition:
    """Assign each point to its maximal-similarity medoid (ties: lowest k)."""
    S = _sim_matrix(sample, kind, sim)
    medoids = np.asarray(medoid_indices, dtype=np.int64)
    if medoids.ndim != 1 or medoids.size == 0:
        raise ValueError("medoid_indices must be a non-empty 1-D index array")
    if np.unique(medoids).size != medoids.size:
        raise ValueError("medoid indices must be distinct")
    if medoids.min() < 0 or medoids.max() >= S.shape[0]:
        raise ValueError("medoid index out of range")
    labels, _ = _assign(S, medoids)
    return Partition(labels, medoids.size)


def refine(sample, partition: Partition, kind: DepthKind, *, sim=None) -> np.ndarray:
    """New medoid of each cluster: its deepest member (ties: lowest index)."""
    S = _sim_matrix(sample, kind, sim)
    labels = np.ascontiguousarray(partition.labels, dtype=np.int64)
    return np.asarray(_kernels.refine_medoids(S, labels, partition.n_clusters))


def silhouette(sample, partition: Partition, kind: DepthKind, *, sim=None) -> SilhouetteReport:
    """Depth-similarity silhouette; undefined (raises) for K < 2.

    a'(i) is the mean similarity to the rest of i's cluster, b'(i) the best
    mean similarity to another cluster; s(i) = 1 - b'/a' when a' > b', 0 at
    a' = b', a'/b' - 1 when a' < b'. Singleton clusters score 0.
    """
    if partition.n_clusters < 2:
        raise ValueError("silhouette is undefined for fewer than 2 clusters")
    if partition.n < 2:
        raise ValueError("silhouette needs at least 2 points")
    S = _sim_matrix(sample, kind, sim)
    labels = np.ascontiguousarray(partition.labels, dtype=np.int64)
    per_point = np.asarray(_kernels.silhouette_samples(S, labels, partition.n_clusters))
    return SilhouetteReport(per_point, float(per_point.mean()))


def fit(
    sample,
    kind: DepthKind,
    k: int,
    seed,
    max_iter: int = 100,
    *,
    sim=None,
    seeding: str = "similarity",
    initial_medoids=None,
    compute_silhouette: bool = True,
) -> ClusterModel:
    """Run the depth-based medoids alternation from a seeded initialization.

    The objective trace is non-decreasing; the run converges when a full
    refinement leaves the medoid set unchanged, and is flagged otherwise.
    """
    S = _sim_matrix(sample, kind, sim)
    n = S.shape[0]
    k = int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= {n}, got {k}")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if initial_medoids is not None:
        medoids = np.asarray(initial_medoids, dtype=np.int64)
        if medoids.size != k or np.unique(medoids).size != k:
            raise ValueError("initial_medoids must hold k distinct indices")
    else:
        rng = np.random.default_rng(seed)
        medoids = _init_from_sim(S, k, rng, seeding, kind.max_value)

    trace: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    converged = False
    while True:
        labels, medoids = _assign(S, medoids)
        trace.append(_objective(S, labels, medoids))
        new_medoids = np.asarray(_kernels.refine_medoids(S, labels, k))
        if np.array_equal(new_medoids, medoids):
            converged = True
            break
        if len(trace) >= max_iter:
            break
        medoids = new_medoids

    partition = Partition(labels, k)
    if compute_silhouette and k >= 2 and n >= 2:
        sil = silhouette(sample, partition, kind, sim=S).mean
    else:
        sil = float("nan")
    return ClusterModel(
        partition=partition,
        medoid_indices=medoids,
        kind=kind,
        objective_trace=trace,
        iterations=len(trace),
        silhouette=sil,
        converged=converged,
    )


def _seed_tuple(seed) -> tuple[int, ...]:
    if seed is None:
        return (0,)
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(s) for s in seed)


def select_k(
    sample,
    kind: DepthKind,
    k_range,
    seeds_per_k: int = 10,
    seed=0,
    *,
    max_iter: int = 100,
    seeding: str = "similarity",
    sim=None,
) -> tuple[int, list[ClusterModel]]:
    """Fit every k with restarts, keep best-J models, pick k by mean silhouette.

    Returns (best_k, models) with one model per candidate k in ascending
    order. Silhouette ties go to the smaller k. k = 1 is not a valid
    candidate (its silhouette is undefined); fit it directly if needed.
    """
    ks = sorted({int(k) for k in k_range})
    if not ks:
        raise ValueError("k_range must be non-empty")
    if seeds_per_k < 1:
        raise ValueError("seeds_per_k must be >= 1")
    S = _sim_matrix(sample, kind, sim)
    n = S.shape[0]
    if ks[0] < 2 or ks[-1] > n:
        raise ValueError(f"k_range must lie within [2, {n}], got {ks[0]}..{ks[-1]}")
    base = _seed_tuple(seed)
    models: list[ClusterModel] = []
    for k in ks:
        best: ClusterModel | None = None
        for r in range(seeds_per_k):
            m = fit(
                sample,
                kind,
                k,
                base + (k, r),
                max_iter=max_iter,
                sim=S,
                seeding=seeding,
                compute_silhouette=False,
            )
            if best is None or m.objective_trace[-1] > best.objective_trace[-1]:
                best = m
        sil = silhouette(sample, best.partition, kind, sim=S).mean
        models.append(dataclasses.replace(best, silhouette=sil))
    sils = [m.silhouette for m in models]
    best_k = ks[int(np.argmax(sils))]  # argmax takes the first max: smaller k wins ties
    return best_k, models


# ---------------------------------------------------------------------------
# spherical k-means baseline
# ---------------------------------------------------------------------------

def _skm_seed_centroids(X, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++-style seeding with weights proportional to cosine distance."""
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = _row_dense(X, first)
    dist = np.maximum(0.0, 1.0 - _all_dots(X, centroids[0]))
    for j in range(1, k):
        total = dist.sum()
        if total > 0.0:
            pick = int(rng.choice(n, p=dist / total))
        else:
            pick = int(rng.integers(n))
        centroids[j] = _row_dense(X, pick)
        dist = np.minimum(dist, np.maximum(0.0, 1.0 - _all_dots(X, centroids[j])))
    return centroids


def _row_dense(X, i: int) -> np.ndarray:
    if sp.issparse(X):
        return np.asarray(X[i].todense()).ravel()
    return np.asarray(X[i], dtype=np.float64)


def _all_dots(X, c: np.ndarray) -> np.ndarray:
    dots = X @ c
    return np.asarray(dots).ravel()


def _spherical_kmeans_full(sample, k: int, seed, max_iter: int = 100):
    X = as_sample(sample)
    n = X.shape[0]
    k = int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= {n}, got {k}")
    rng = np.random.default_rng(seed)
    centroids = _skm_seed_centroids(X, k, rng)
    labels = None
    trace: list[float] = []
    for _ in range(max_iter):
        dots = X @ centroids.T
        dots = np.asarray(dots)
        new_labels = np.argmax(dots, axis=1).astype(np.int64)
        # empty clusters: re-seed with the worst-fit point
        for _ in range(k):
            counts = np.bincount(new_labels, minlength=k)
            empty = np.where(counts == 0)[0]
            if empty.size == 0:
                break
            worst = int(np.argmin(dots[np.arange(n), new_labels]))
            centroids[empty[0]] = _row_dense(X, worst)
            dots[:, empty[0]] = _all_dots(X, centroids[empty[0]])
            new_labels = np.argmax(dots, axis=1).astype(np.int64)
        trace.append(float(dots[np.arange(n), new_labels].sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = labels == j
            s = np.asarray(X[members].sum(axis=0)).ravel()
            nrm = np.linalg.norm(s)
            if nrm > 1e-12:
                centroids[j] = s / nrm
            # a cancelling cluster keeps its previous centroid
    return Partition(labels, k), centroids, trace


def spherical_kmeans(sample, k: int, seed, max_iter: int = 100) -> Partition:
    """Spherical k-means: maximize total cosine similarity to k unit centroids."""
    partition, _, _ = _spherical_kmeans_full(sample, k, seed, max_iter)
    return partition
