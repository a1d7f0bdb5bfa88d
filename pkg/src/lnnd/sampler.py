"""Point-cloud sampling from the exponential-power density.

A draw X with density proportional to exp(-lambda * ||x||^alpha) factors into
an isotropic direction and a radius R whose alpha-th power is Gamma
distributed:

    R^alpha ~ Gamma(shape=d/alpha, rate=lambda),  direction ~ uniform(S^{d-1}),

so the radial distribution function is the regularized lower incomplete gamma
function P(d/alpha, lambda * r^alpha).  Sampling is exact (no rejection at
the level of this module) and works for shapes below one, which occur
whenever d < alpha.

Reproducibility contract: a cloud is a pure function of
(params, n, mode, seed).  Each random ingredient draws from its own
counter-based Philox stream keyed by (seed, lane), and streams are consumed
strictly in point order, so the first min(n, m) points of two clouds that
share a seed coincide regardless of the requested sizes or modes.  This
realizes the coupling between fixed-size clouds and their Poissonized
counterparts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox
from scipy import special as sc

from .errors import DomainError
from .model import ModelParams

__all__ = [
    "PointCloud",
    "BINOMIAL",
    "POISSON",
    "radial_cdf",
    "sample_radius",
    "sample_direction",
    "sample_cloud",
]

BINOMIAL = "binomial"
POISSON = "poisson"

# Lane indices for the per-ingredient Philox streams.
_LANE_RADIUS = 1
_LANE_DIRECTION = 2
_LANE_COUNT = 3

_SEED_MAX = 2**64


@dataclass(eq=False)
class PointCloud:
    """A finite point set with its sampling provenance.

    The coordinate array has shape (realized_n, dim), dtype float64, and is
    frozen (read-only) after construction.
    """

    dim: int
    points: np.ndarray
    mode: str
    requested_n: int
    realized_n: int
    seed: int

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[1] != self.dim:
            raise DomainError(
                f"points must have shape (n, {self.dim}), got {self.points.shape}"
            )
        if self.points.shape[0] != self.realized_n:
            raise DomainError("realized_n does not match the coordinate array")
        if self.realized_n and not np.isfinite(self.points).all():
            raise DomainError("point coordinates must all be finite")
        self.points.setflags(write=False)


def _lane(seed: int, lane: int) -> Generator:
    seed = int(seed)
    if not 0 <= seed < _SEED_MAX:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return Generator(Philox(key=(seed << 64) | lane))


def radial_cdf(params: ModelParams, r):
    """P(||X|| <= r) = regularized lower incomplete gamma P(d/alpha, lambda r^alpha).

    Accepts scalars or arrays; r < 0 is clipped to 0.
    """
    r = np.asarray(r, dtype=np.float64)
    out = sc.gammainc(params.d / params.alpha, params.lam * np.maximum(r, 0.0) ** params.alpha)
    return float(out) if out.ndim == 0 else out


def sample_radius(params: ModelParams, rng: Generator, size=None):
    """Draw radii with density proportional to r^(d-1) exp(-lambda r^alpha).

    Uses the exact Gamma transform: Y ~ Gamma(d/alpha, rate=lambda), return
    Y^(1/alpha).  With size=None a single float is returned.
    """
    shape = params.d / params.alpha
    y = rng.gamma(shape, scale=1.0 / params.lam, size=size)
    r = y ** (1.0 / params.alpha)
    return float(r) if size is None else r


def sample_direction(dim: int, rng: Generator, size=None):
    """Draw unit vectors uniformly on the sphere S^(dim-1).

    A standard Gaussian vector is normalized, which is exactly isotropic in
    every dimension.  Zero-norm draws (probability zero, but possible after
    underflow) are redrawn.
    """
    if dim < 2:
        raise DomainError(f"direction dimension must be >= 2, got {dim}")
    n = 1 if size is None else int(size)
    g = rng.standard_normal((n, dim))
    norms = np.linalg.norm(g, axis=1)
    while (bad := norms == 0.0).any():
        g[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1)
    g /= norms[:, None]
    return g[0] if size is None else g


def sample_cloud(params: ModelParams, n: int, mode: str, seed: int) -> PointCloud:
    """Sample a cloud of points i.i.d. from the density.

    mode="binomial" draws exactly n points; mode="poisson" first draws
    N ~ Poisson(n) from a dedicated count stream and then N points.  Point i
    is radius_i * direction_i where the radius and direction streams are
    consumed in point order, so clouds sharing a seed agree on their common
    prefix (in particular the binomial and poisson clouds of the same seed
    coincide on the first min(n, N) points).
    """
    if n < 1:
        raise DomainError(f"requested size must be >= 1, got {n}")
    if mode == BINOMIAL:
        realized = int(n)
    elif mode == POISSON:
        realized = int(_lane(seed, _LANE_COUNT).poisson(n))
    else:
        raise DomainError(f"mode must be '{BINOMIAL}' or '{POISSON}', got {mode!r}")

    if realized == 0:
        points = np.empty((0, params.d))
    else:
        radii = sample_radius(params, _lane(seed, _LANE_RADIUS), size=realized)
        dirs = sample_direction(params.d, _lane(seed, _LANE_DIRECTION), size=realized)
        points = radii[:, None] * dirs
    return PointCloud(
        dim=params.d,
        points=points,
        mode=mode,
        requested_n=int(n),
        realized_n=realized,
        seed=int(seed),
    )


def mean_radius(params: ModelParams) -> float:
    """E[||X||] = Gamma((d+1)/alpha) / (lambda^(1/alpha) Gamma(d/alpha))."""
    d, lam, alpha = params.d, params.lam, params.alpha
    return math.exp(
        math.lgamma((d + 1.0) / alpha)
        - math.lgamma(d / alpha)
        - math.log(lam) / alpha
    )
