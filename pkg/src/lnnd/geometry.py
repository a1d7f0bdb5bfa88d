"""Nearest-neighbor distances, the largest link, and isolated-vertex counts.

The geometric graph G(X, r) joins every pair of points at Euclidean distance
strictly less than r.  A vertex is therefore isolated exactly when its
nearest-neighbor distance is >= r, and the largest nearest-neighbor link d_n
(the maximum over points of the distance to the closest other point) is the
infimum of r for which no isolated vertex remains.  The strict-inequality
convention matters at the boundary: count_isolated(summary, d_n) >= 1 while
count_isolated(summary, r) = 0 for every r > d_n.

Two query paths are provided: a brute-force O(n^2) scan, kept as the oracle,
and a kd-tree path for large clouds.  Both reduce to the same floating-point
kernel (sum of squared coordinate differences, one square root per point),
so their outputs are identical bit for bit, which the test suite checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import GeometryError
from .sampler import PointCloud

__all__ = [
    "NearestNeighborSummary",
    "nn_distances",
    "largest_nn_link",
    "count_isolated",
]

_KDTREE_LEAFSIZE = 16
_BRUTE_BLOCK = 2048  # rows per block in the brute-force scan
_AUTO_BRUTE_MAX = 512  # below this size brute force wins


@dataclass(eq=False)
class NearestNeighborSummary:
    """Per-point nearest-neighbor distances and their maximum."""

    nn_dist: np.ndarray
    dn: float
    n: int


def _as_points(cloud) -> np.ndarray:
    if isinstance(cloud, PointCloud):
        pts = cloud.points
    else:
        pts = np.ascontiguousarray(cloud, dtype=np.float64)
    if pts.ndim != 2:
        raise GeometryError(f"expected a (n, d) coordinate array, got shape {pts.shape}")
    return pts


def _nn_sq_brute(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Squared NN distance and neighbor index for every point, by full scan."""
    n = pts.shape[0]
    best = np.full(n, np.inf)
    argbest = np.zeros(n, dtype=np.intp)
    for start in range(0, n, _BRUTE_BLOCK):
        stop = min(start + _BRUTE_BLOCK, n)
        diff = pts[start:stop, None, :] - pts[None, :, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        rows = np.arange(start, stop)
        sq[rows - start, rows] = np.inf
        argbest[start:stop] = sq.argmin(axis=1)
        best[start:stop] = sq[rows - start, argbest[start:stop]]
    return best, argbest

def _neighbor_sq(pts: np.ndarray, nb: np.ndarray) -> np.ndarray:
    diff = pts - pts[nb]
    return np.einsum("ij,ij->i", diff, diff)


def _nn_sq_kdtree(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Squared NN distance via a kd-tree, recomputed with the brute-force kernel.

    The tree is only trusted for the identity of the nearest neighbor; the
    query point is excluded by index, and the reported distance is then
    recomputed with the same elementary operations as the brute-force path so
    that the two paths agree exactly.
    """
    n = pts.shape[0]
    tree = cKDTree(pts, leafsize=_KDTREE_LEAFSIZE)
    _, idx = tree.query(pts, k=2, workers=-1)
    rows = np.arange(n)
    nb = np.where(idx[:, 0] != rows, idx[:, 0], idx[:, 1])
    return _neighbor_sq(pts, nb), nb


def nn_distances(cloud, method: str = "auto") -> NearestNeighborSummary:
    """Nearest-neighbor distance of every point to any other point.

    Args:
        cloud: a PointCloud or a (n, d) float array with n >= 2 distinct rows.
        method: "kdtree", "brute", or "auto" (size-based choice).

    Raises:
        GeometryError: fewer than two points, or duplicate points.
    """
    pts = _as_points(cloud)
    n = pts.shape[0]
    if n < 2:
        raise GeometryError(f"need at least 2 points to form a graph, got {n}")
    if method == "auto":
        method = "brute" if n <= _AUTO_BRUTE_MAX else "kdtree"
    if method == "brute":
        sq, _ = _nn_sq_brute(pts)
    elif method == "kdtree":
        sq, _ = _nn_sq_kdtree(pts)
    else:
        raise GeometryError(f"unknown method {method!r}")
    if (sq == 0.0).any():
        raise GeometryError("duplicate points are not allowed")
    dist = np.sqrt(sq)
    return NearestNeighborSummary(nn_dist=dist, dn=float(dist.max()), n=n)


def largest_nn_link(summary: NearestNeighborSummary) -> float:
    """The largest nearest-neighbor link d_n = max of the per-point distances."""
    return float(np.max(summary.nn_dist))


def count_isolated(summary: NearestNeighborSummary, r: float) -> int:
    """Number of vertices of degree zero in G(X, r).

    Edges connect pairs strictly closer than r, so a vertex is isolated iff
    its nearest-neighbor distance is >= r.
    """
    return int(np.count_nonzero(summary.nn_dist >= r))
