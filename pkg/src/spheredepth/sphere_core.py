"""Geometry of the unit hypersphere S^{d-1}.

Unit vectors (dense and sparse), the three angular distances the depth
functions are built on, L2 normalization and random rotations. All functions
are pure: inputs are never mutated, so values can be shared freely across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

#: ``||x|| - 1`` tolerance guaranteed after construction.
NORM_TOL = 1e-10
#: constructors silently renormalize inputs within this of unit norm and
#: reject anything further out (text ingestion loses digits; garbage should
#: not pass silently).
RENORM_TOL = 1e-6
# normalize() returns its input unchanged this close to unit norm, which
# makes it exactly idempotent.
_SKIP_TOL = 1e-12


def _clamp_dot(t: float) -> float:
    # float dot products of unit vectors can stray ~1e-16 outside [-1, 1],
    # which would NaN arccos/sqrt at coincident or antipodal pairs.
    return min(1.0, max(-1.0, t))


def normalize(v) -> np.ndarray:
    """Project a nonzero vector onto the unit sphere (v / ||v||)."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    nrm = float(np.linalg.norm(v))
    if not np.isfinite(nrm):
        raise ValueError("cannot normalize a vector with non-finite entries")
    if nrm == 0.0:
        raise ValueError("cannot normalize a zero vector (degenerate point/document)")
    if abs(nrm - 1.0) <= _SKIP_TOL:
        return v.copy()
    return v / nrm


def unit_vector(coords) -> np.ndarray:
    """Validate coordinates as a point on S^{d-1}, d >= 2.

    Inputs within ``RENORM_TOL`` of unit norm are silently renormalized;
    anything further out raises.
    """
    v = np.asarray(coords, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if v.shape[0] < 2:
        raise ValueError("unit vectors require dimension d >= 2")
    nrm = float(np.linalg.norm(v))
    if not np.isfinite(nrm) or abs(nrm - 1.0) > RENORM_TOL:
        raise ValueError(f"not a unit vector: ||x|| = {nrm!r}")
    return normalize(v)


def unit_vectors(X) -> np.ndarray:
    """Validate a 2-D array as n points on S^{d-1}, renormalizing rows."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D (n, d) array, got shape {X.shape}")
    if X.shape[1] < 2:
        raise ValueError("unit vectors require dimension d >= 2")
    norms = np.linalg.norm(X, axis=1)
    bad = ~np.isfinite(norms) | (np.abs(norms - 1.0) > RENORM_TOL)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValueError(f"row {i} is not a unit vector: ||x|| = {norms[i]!r}")
    if np.all(np.abs(norms - 1.0) <= _SKIP_TOL):
        return X.copy()
    return X / norms[:, None]


@dataclass(frozen=True, eq=False)
class SparseUnitVector:
    """Unit vector on S^{dim-1} stored as sorted (index, value) pairs."""

    dim: int
    indices: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if self.dim < 2:
            raise ValueError("sparse unit vectors require dimension d >= 2")
        if idx.ndim != 1 or val.ndim != 1 or idx.shape != val.shape:
            raise ValueError("indices and values must be 1-D arrays of equal length")
        if idx.size == 0:
            raise ValueError("sparse unit vector has no entries (zero vector)")
        if idx[0] < 0 or idx[-1] >= self.dim or np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing within [0, dim)")
        if not np.all(np.isfinite(val)) or np.any(val == 0.0):
            raise ValueError("values must be finite and nonzero")
        nrm = float(np.linalg.norm(val))
        if abs(nrm - 1.0) > RENORM_TOL:
            raise ValueError(f"not a unit vector: ||x|| = {nrm!r}")
        if abs(nrm - 1.0) > _SKIP_TOL:
            val = val / nrm
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def densify(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


def _dim_of(x) -> int:
    return x.dim if isinstance(x, SparseUnitVector) else int(np.asarray(x).shape[-1])


def unit_dot(x, y) -> float:
    """Inner product of two unit vectors (dense or sparse), clamped to [-1, 1].

    Dense/sparse dispatch keeps a single distance interface over both
    representations.
    """
    dx, dy = _dim_of(x), _dim_of(y)
    if dx != dy:
        raise ValueError(f"dimension mismatch: {dx} vs {dy}")
    xs = isinstance(x, SparseUnitVector)
    ys = isinstance(y, SparseUnitVector)
    if xs and ys:
        t = _kernels.sparse_dot(x.indices, x.values, y.indices, y.values)
    elif xs:
        t = float(x.values @ np.asarray(y, dtype=np.float64)[x.indices])
    elif ys:
        t = float(y.values @ np.asarray(x, dtype=np.float64)[y.indices])
    else:
        t = float(np.asarray(x, dtype=np.float64) @ np.asarray(y, dtype=np.float64))
    return _clamp_dot(t)


def sparse_dot(a: SparseUnitVector, b: SparseUnitVector) -> float:
    """Dot product of two sparse unit vectors in O(nnz(a) + nnz(b))."""
    if not isinstance(a, SparseUnitVector) or not isinstance(b, SparseUnitVector):
        raise TypeError("sparse_dot expects SparseUnitVector operands")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(_kernels.sparse_dot(a.indices, a.values, b.indices, b.values))


def cosine_distance(x, y) -> float:
    """1 - x'y, in [0, 2]."""
    return 1.0 - unit_dot(x, y)


def geodesic_distance(x, y) -> float:
    """Length of the shortest arc joining x and y, in [0, pi]."""
    return float(np.arccos(unit_dot(x, y)))


def chord_distance(x, y) -> float:
    """sqrt(2 (1 - x'y)), the straight-line chord length, in [0, 2]."""
    return float(np.sqrt(2.0 * max(0.0, 1.0 - unit_dot(x, y))))


def rotation_matrix(M) -> np.ndarray:
    """Validate M as a d x d orthogonal matrix (det = +-1)."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    d = M.shape[0]
    if not np.allclose(M.T @ M, np.eye(d), atol=NORM_TOL, rtol=0.0):
        raise ValueError("matrix is not orthogonal within tolerance")
    if abs(abs(float(np.linalg.det(M))) - 1.0) > NORM_TOL:
        raise ValueError("matrix determinant is not +-1 within tolerance")
    return M


def random_rotation(d: int, seed) -> np.ndarray:
    """Haar-uniform random d x d orthogonal matrix, deterministic per seed.

    QR of a standard-normal matrix with the diagonal sign correction.
    """
    if d < 2:
        raise ValueError("rotations require dimension d >= 2")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d, d))
    Q, R = np.linalg.qr(A)
    signs = np.sign(np.diagonal(R))
    signs[signs == 0.0] = 1.0
    return Q * signs


def apply_rotation(R: np.ndarray, x) -> np.ndarray:
    """Rotate a unit vector (dense or sparse) or an (n, d) sample of rows."""
    R = np.asarray(R, dtype=np.float64)
    if isinstance(x, SparseUnitVector):
        return R[:, x.indices] @ x.values
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return R @ x
    return x @ R.T
