"""Distance-based angular depth functions and the similarities they induce.

Three depths are supported, each a constant minus the expected angular
distance to the sample:

* arc:    pi - mean geodesic distance,  values in [0, pi]
* cosine: 2 - mean (1 - x'w),           values in [0, 2]
* chord:  2 - mean sqrt(2 (1 - x'w)),   values in [0, 2]

Because each depth is an affine function of the mean distance, the empirical
depth of a point equals the mean of its pairwise similarities to the sample,
and the deepest point is the argmin of mean distance. Samples may be dense
(n, d) arrays, scipy CSR matrices, or sequences of SparseUnitVector; the
point itself counts when it belongs to the sample.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .sphere_core import (
    RENORM_TOL,
    SparseUnitVector,
    unit_dot,
    unit_vectors,
)

#: above this sample size, per-point depths are computed in row blocks
#: instead of materializing the n x n similarity matrix.
MATERIALIZE_LIMIT = 20000


class DepthKind(str, enum.Enum):
    """Which angular depth is in force."""

    ARC = "arc"
    COSINE = "cosine"
    CHORD = "chord"

    @property
    def max_value(self) -> float:
        """Depth/similarity at a coincident pair (the diagonal value)."""
        return math.pi if self is DepthKind.ARC else 2.0

    @property
    def code(self) -> int:
        return {"arc": _kernels.ARC_CODE, "cosine": _kernels.COSINE_CODE, "chord": _kernels.CHORD_CODE}[self.value]


class DepthValue(NamedTuple):
    value: float
    kind: DepthKind


@dataclass(frozen=True)
class AlphaRegion:
    """Sample indices whose depth is at least alpha; nested as alpha grows."""

    alpha: float
    member_indices: np.ndarray


def as_sample(sample):
    """Coerce a sample to a dense (n, d) array or unit-row CSR matrix.

    Accepts a 2-D array-like, a scipy sparse matrix, or a sequence of
    vectors (dense rows or SparseUnitVector). Rows are validated as unit
    vectors with the usual silent renormalization within 1e-6.
    """
    if sp.issparse(sample):
        X = sample.tocsr().astype(np.float64)
        norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
        bad = ~np.isfinite(norms) | (np.abs(norms - 1.0) > RENORM_TOL)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValueError(f"row {i} is not a unit vector: ||x|| = {norms[i]!r}")
        return sp.diags(1.0 / norms) @ X
    if isinstance(sample, (list, tuple)) and sample and isinstance(sample[0], SparseUnitVector):
        dim = sample[0].dim
        for i, v in enumerate(sample):
            if not isinstance(v, SparseUnitVector) or v.dim != dim:
                raise ValueError(f"row {i} does not match the sample dimension {dim}")
        indptr = np.cumsum([0] + [v.nnz for v in sample])
        indices = np.concatenate([v.indices for v in sample])
        data = np.concatenate([v.values for v in sample])
        return sp.csr_matrix((data, indices, indptr), shape=(len(sample), dim))
    X = np.asarray(sample, dtype=np.float64)
    if X.ndim == 1:
        raise ValueError("a sample must be two-dimensional (n points x d coordinates)")
    return unit_vectors(X)


def similarity_from_dots(dots, kind: DepthKind):
    """Map inner products to pairwise depth similarities (scalar or array)."""
    t = np.clip(dots, -1.0, 1.0)
    if kind is DepthKind.ARC:
        out = np.pi - np.arccos(t)
    elif kind is DepthKind.COSINE:
        out = 1.0 + t
    else:
        out = 2.0 - np.sqrt(2.0 * (1.0 - t))
    return float(out) if np.ndim(out) == 0 else out


def pairwise_similarity(x, y, kind: DepthKind) -> float:
    """Depth of x with respect to the point mass at y; symmetric in (x, y)."""
    return similarity_from_dots(unit_dot(x, y), kind)


def _gram(X) -> np.ndarray:
    G = X @ X.T
    if sp.issparse(G):
        G = G.toarray()
    return np.asarray(G, dtype=np.float64)


def _dots_to_rows(X, x) -> np.ndarray:
    """Inner products of every sample row with a single vector x."""
    if isinstance(x, SparseUnitVector):
        if X.shape[1] != x.dim:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {x.dim}")
        xd = x.densify()
    else:
        xd = np.asarray(x, dtype=np.float64)
        if X.shape[1] != xd.shape[0]:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {xd.shape[0]}")
    dots = X @ xd
    if sp.issparse(dots):  # pragma: no cover - csr @ vector is dense
        dots = dots.toarray().ravel()
    return np.asarray(dots, dtype=np.float64).ravel()


def depth_matrix(sample, kind: DepthKind) -> np.ndarray:
    """n x n matrix of pairwise similarities; symmetric, diagonal at the max.

    Materializes O(n^2) memory; for very large samples prefer
    :func:`sample_depths`, which streams row blocks.
    """
    X = as_sample(sample)
    if X.shape[0] < 1:
        raise ValueError("sample must be non-empty")
    S = _kernels.gram_to_sim(_gram(X), kind.code)
    return np.asarray(S)


def sample_depth(x, sample, kind: DepthKind) -> DepthValue:
    """Empirical depth of x: mean pairwise similarity to the sample."""
    X = as_sample(sample)
    if X.shape[0] < 1:
        raise ValueError("sample must be non-empty")
    sims = similarity_from_dots(_dots_to_rows(X, x), kind)
    return DepthValue(float(np.mean(sims)), kind)


def sample_depths(sample, kind: DepthKind, *, block_rows: int = 2048) -> np.ndarray:
    """Depth of every sample point with respect to the whole sample.

    Streams blocks of rows above ``MATERIALIZE_LIMIT`` points so the full
    similarity matrix never has to exist.
    """
    X = as_sample(sample)
    n = X.shape[0]
    if n < 1:
        raise ValueError("sample must be non-empty")
    if n <= MATERIALIZE_LIMIT:
        return depth_matrix(X, kind).mean(axis=1)
    out = np.empty(n)
    for start in range(0, n, block_rows):
        stop = min(start + block_rows, n)
        G = X[start:stop] @ X.T
        if sp.issparse(G):
            G = G.toarray()
        S = _kernels.gram_to_sim(np.asarray(G, dtype=np.float64), kind.code)
        out[start:stop] = np.asarray(S).mean(axis=1)
    return out


def deepest_point_index(sample, kind: DepthKind) -> int:
    """Index of the sample point of maximal depth; ties go to the lowest index."""
    return int(np.argmax(sample_depths(sample, kind)))


def alpha_region(sample, kind: DepthKind, alpha: float) -> AlphaRegion:
    """Indices of sample points with depth >= alpha (possibly empty)."""
    alpha = float(alpha)
    if not alpha > 0.0:
        raise ValueError("alpha must be > 0")
    depths = sample_depths(sample, kind)
    return AlphaRegion(alpha, np.where(depths >= alpha)[0])
