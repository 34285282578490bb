"""von Mises-Fisher density evaluation and sampling on S^{d-1}.

The density is f(x) = c_d(kappa) exp(kappa mu'x) with normalizing constant
c_d(kappa) = kappa^{d/2-1} / ((2 pi)^{d/2} I_{d/2-1}(kappa)), evaluated in log
space so concentrations up to ~1e4 neither overflow nor underflow. Sampling
uses the tangent-normal decomposition with the standard rejection scheme for
the cosine component and a uniform tangent direction; kappa = 0 falls back to
normalized Gaussian draws (the uniform law on the sphere).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .sphere_core import unit_vector, unit_vectors


@dataclass(frozen=True, eq=False)
class VmfParams:
    """Mean direction mu (unit vector) and concentration kappa >= 0."""

    mu: np.ndarray
    kappa: float

    def __post_init__(self):
        object.__setattr__(self, "mu", unit_vector(self.mu))
        kappa = float(self.kappa)
        if not np.isfinite(kappa) or kappa < 0.0:
            raise ValueError(f"concentration must be finite and >= 0, got {self.kappa!r}")
        object.__setattr__(self, "kappa", kappa)

    @property
    def d(self) -> int:
        return int(self.mu.shape[0])


def _log_bessel_i(nu: float, x: float) -> float:
    """log I_nu(x) for x >= 0, stable from tiny to very large arguments."""
    if x == 0.0:
        return 0.0 if nu == 0.0 else -math.inf
    v = special.ive(nu, x)  # exponentially scaled: I_nu(x) * exp(-x)
    if v > 0.0 and np.isfinite(v):
        return math.log(v) + x
    # ive underflows for tiny x with large nu; first two series terms suffice
    return (
        nu * math.log(x / 2.0)
        - special.gammaln(nu + 1.0)
        + math.log1p(x * x / (4.0 * (nu + 1.0)))
    )


def log_normalizing_constant(kappa: float, d: int) -> float:
    """log c_d(kappa); at kappa = 0 the log reciprocal surface area of S^{d-1}."""
    kappa = float(kappa)
    if not np.isfinite(kappa) or kappa < 0.0:
        raise ValueError(f"concentration must be finite and >= 0, got {kappa!r}")
    d = int(d)
    if d < 2:
        raise ValueError("dimension must be >= 2")
    if kappa == 0.0:
        return float(special.gammaln(d / 2.0) - math.log(2.0) - (d / 2.0) * math.log(math.pi))
    nu = d / 2.0 - 1.0
    return nu * math.log(kappa) - (d / 2.0) * math.log(2.0 * math.pi) - _log_bessel_i(nu, kappa)


def log_density(x, params: VmfParams) -> float | np.ndarray:
    """log f(x | mu, kappa) for a single point (d,) or a sample (n, d)."""
    X = np.asarray(x, dtype=np.float64)
    if X.shape[-1] != params.d:
        raise ValueError(f"dimension mismatch: {X.shape[-1]} vs {params.d}")
    dots = X @ params.mu
    out = log_normalizing_constant(params.kappa, params.d) + params.kappa * dots
    return float(out) if np.ndim(out) == 0 else out


def uniform_sphere(n: int, d: int, seed) -> np.ndarray:
    """n i.i.d. uniform draws on S^{d-1} (normalized Gaussian rows)."""
    if n < 1:
        raise ValueError("need n >= 1 draws")
    if d < 2:
        raise ValueError("dimension must be >= 2")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    norms = np.linalg.norm(X, axis=1)
    while np.any(norms < 1e-12):  # essentially never; keeps normalize safe
        bad = norms < 1e-12
        X[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(X, axis=1)
    return X / norms[:, None]


def _sample_cosines(rng: np.random.Generator, kappa: float, d: int, n: int) -> np.ndarray:
    """Rejection-sample n cosines w = mu'x under vMF(kappa) on S^{d-1}."""
    dim = d - 1
    b = (-2.0 * kappa + math.sqrt(4.0 * kappa * kappa + dim * dim)) / dim
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + dim * math.log(1.0 - x0 * x0)
    out = np.empty(n)
    have = 0
    while have < n:
        m = max(n - have, 16)
        z = rng.beta(dim / 2.0, dim / 2.0, size=m)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.random(m)
        keep = w[kappa * w + dim * np.log(1.0 - x0 * w) - c >= np.log(u)]
        take = min(keep.size, n - have)
        out[have : have + take] = keep[:take]
        have += take
    return out


def sample(params: VmfParams, n: int, seed) -> np.ndarray:
    """n i.i.d. draws from vMF(mu, kappa) as an (n, d) array, seeded."""
    if n < 1:
        raise ValueError("need n >= 1 draws")
    rng = np.random.default_rng(seed)
    d = params.d
    if params.kappa == 0.0:
        return uniform_sphere(n, d, rng)
    w = _sample_cosines(rng, params.kappa, d, n)
    g = rng.standard_normal((n, d))
    g -= np.outer(g @ params.mu, params.mu)
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        gb = rng.standard_normal((int(bad.sum()), d))
        gb -= np.outer(gb @ params.mu, params.mu)
        g[bad] = gb
        norms = np.linalg.norm(g, axis=1)
    v = g / norms[:, None]
    X = w[:, None] * params.mu + np.sqrt(np.maximum(0.0, 1.0 - w * w))[:, None] * v
    return unit_vectors(X)


def mean_resultant_length(X) -> float:
    """Norm of the sample mean direction; 0 = dispersed, 1 = point mass."""
    X = np.asarray(X, dtype=np.float64)
    return float(np.linalg.norm(X.mean(axis=0)))


def expected_resultant_length(kappa: float, d: int) -> float:
    """A_d(kappa) = I_{d/2}(kappa) / I_{d/2-1}(kappa), the population value."""
    if kappa < 0.0:
        raise ValueError("concentration must be >= 0")
    if d < 2:
        raise ValueError("dimension must be >= 2")
    if kappa == 0.0:
        return 0.0
    return math.exp(_log_bessel_i(d / 2.0, kappa) - _log_bessel_i(d / 2.0 - 1.0, kappa))
