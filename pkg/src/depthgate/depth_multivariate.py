"""Depths on R^d: Tukey, simplicial, spherical, lens and band depth.

Exact algorithms are used for d <= 2 (angular sweeps around the query);
higher dimensions fall back to U-statistic enumeration behind a size cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np
from scipy.spatial.distance import cdist

from .depth_univariate import below_above, comb2, simplicial_numerators, tukey_numerators
from .model import ComputationError, DataError

#: maximum number of kernel evaluations per query for enumerated U-statistics
MAX_KERNEL_EVALS = 2_000_000


@dataclass(frozen=True, eq=False)
class DirectionSet:
    directions: np.ndarray
    seed: int

    def __post_init__(self):
        d = np.array(self.directions, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "directions", d)

    def __len__(self) -> int:
        return self.directions.shape[0]


def make_directions(d: int, k: int, seed: int) -> DirectionSet:
    """``k`` iid directions uniform on the unit sphere of R^d."""
    if d < 1 or k < 1:
        raise ValueError("need d >= 1 and k >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((k, d))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms == 0):  # probability zero, but keep the contract
        bad = norms == 0
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(g, axis=1)
    return DirectionSet(g / norms[:, None], seed)


def _points(s) -> np.ndarray:
    pts = np.asarray(getattr(s, "points", s), dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts


def _query(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size != d:
        raise DataError(f"query has dimension {x.size}, sample has {d}")
    if not np.all(np.isfinite(x)):
        raise DataError("query must be finite")
    return x


def _angles(x: np.ndarray, pts: np.ndarray):
    """Sorted angles of the sample around ``x`` and the number of coincident points."""
    v = pts - x
    same = np.all(v == 0, axis=1)
    v = v[~same]
    return np.sort(np.arctan2(v[:, 1], v[:, 0])), int(same.sum())


# -- Tukey --------------------------------------------------------------------

def tukey_count_2d(x: np.ndarray, pts: np.ndarray) -> int:
    """Minimum number of sample points in a closed halfplane through ``x``.

    The complement of a closed halfplane through ``x`` is an open one, so the
    answer is m minus the largest number of points inside an open half-circle
    of directions, found by sweeping half-open windows [theta, theta + pi).
    """
    ang, same = _angles(x, pts)
    r = ang.size
    if r == 0:
        return same
    ext = np.concatenate([ang, ang + 2 * np.pi])
    start = np.searchsorted(ext, ang, side="left")
    stop = np.searchsorted(ext, ang + np.pi, side="left")
    return int(pts.shape[0] - np.max(stop - start))


def tukey_md(x, s) -> float:
    """Halfspace depth; exact for d = 1, 2."""
    pts = _points(s)
    m, d = pts.shape
    x = _query(x, d)
    if d == 1:
        b, a = below_above(np.sort(pts[:, 0]), x[0])
        return int(tukey_numerators(b, a, m)) / m
    if d == 2:
        return tukey_count_2d(x, pts) / m
    raise ComputationError("exact Tukey depth is only available for d <= 2; "
                           "use random-tukey for higher dimensions")


def tukey_md_many(queries, s) -> np.ndarray:
    pts = _points(s)
    q = _points(queries)
    m, d = pts.shape
    if q.shape[1] != d:
        raise DataError("query and sample dimensions differ")
    if d == 1:
        b, a = below_above(np.sort(pts[:, 0]), q[:, 0])
        return tukey_numerators(b, a, m) / m
    if d == 2:
        return np.array([tukey_count_2d(x, pts) for x in q], dtype=np.int64) / m
    raise ComputationError("exact Tukey depth is only available for d <= 2")


# -- simplicial ---------------------------------------------------------------

def simplicial_count_2d(x: np.ndarray, pts: np.ndarray) -> int:
    """Number of closed triangles with vertices in the sample containing ``x``.

    A triangle misses ``x`` iff its vertices lie in an open half-plane through
    ``x``, i.e. their directions fit in an open half-circle.  Each such triple is
    counted once from its first vertex in counter-clockwise order.  Triangles
    with a vertex at ``x`` always contain it.
    """
    m = pts.shape[0]
    ang, same = _angles(x, pts)
    r = ang.size
    total = comb(m, 3)
    if r < 3:
        return total
    ext = np.concatenate([ang, ang + 2 * np.pi])
    idx = np.arange(r)
    ahead = np.searchsorted(ext, ang + np.pi, side="left") - idx - 1
    # equal angles at earlier positions are already counted by the first of them
    missing = int(np.sum(comb2(ahead)))
    return total - missing


def _simplex_contains(x: np.ndarray, verts: np.ndarray, tol: float = 1e-12) -> bool:
    """Closed convex hull test via barycentric coordinates."""
    d = x.size
    a = np.vstack([verts.T, np.ones(d + 1)])
    b = np.append(x, 1.0)
    lam, *_ = np.linalg.lstsq(a, b, rcond=None)
    if np.linalg.norm(a @ lam - b) > tol * max(1.0, np.abs(verts).max()):
        return False
    return bool(np.all(lam >= -tol))


def simplicial_md(x, s, max_evals: int = MAX_KERNEL_EVALS) -> float:
    """Fraction of the C(m, d+1) closed sample simplices that contain ``x``."""
    pts = _points(s)
    m, d = pts.shape
    x = _query(x, d)
    if m < d + 1:
        raise DataError(f"simplicial depth in R^{d} needs at least {d + 1} points")
    if d == 1:
        b, a = below_above(np.sort(pts[:, 0]), x[0])
        return int(simplicial_numerators(b, a, m)) / int(comb2(m))
    if d == 2:
        return simplicial_count_2d(x, pts) / comb(m, 3)
    total = comb(m, d + 1)
    if total > max_evals:
        raise ComputationError(f"C({m},{d + 1}) = {total} simplices exceed the cap {max_evals}")
    hits = sum(_simplex_contains(x, pts[list(c)]) for c in combinations(range(m), d + 1))
    return hits / total


def simplicial_md_many(queries, s, max_evals: int = MAX_KERNEL_EVALS) -> np.ndarray:
    pts = _points(s)
    q = _points(queries)
    m, d = pts.shape
    if d == 1:
        if m < 2:
            raise DataError("simplicial depth needs at least 2 points")
        b, a = below_above(np.sort(pts[:, 0]), q[:, 0])
        return simplicial_numerators(b, a, m) / int(comb2(m))
    if d == 2:
        if m < 3:
            raise DataError("simplicial depth in R^2 needs at least 3 points")
        return np.array([simplicial_count_2d(x, pts) for x in q], dtype=np.int64) / comb(m, 3)
    return np.array([simplicial_md(x, pts, max_evals) for x in q])


# -- pair U-statistics ----------------------------------------------------------

def _pair_fraction(kernel_matrix: np.ndarray) -> float:
    m = kernel_matrix.shape[0]
    iu = np.triu_indices(m, 1)
    return int(np.count_nonzero(kernel_matrix[iu])) / (m * (m - 1) // 2)


def spherical_md(x, s) -> float:
    """Fraction of pairs whose closed diameter ball contains ``x``."""
    pts = _points(s)
    m, d = pts.shape
    if m < 2:
        raise DataError("spherical depth needs at least 2 points")
    v = pts - _query(x, d)
    return _pair_fraction(v @ v.T <= 0)


def lens_md(x, s, metric: str = "euclidean") -> float:
    """Fraction of pairs (i, j) with ``dist(X_i, X_j) >= max(dist(x, X_i), dist(x, X_j))``.

    ``metric`` is any metric name understood by :func:`scipy.spatial.distance.cdist`.
    """
    pts = _points(s)
    m, d = pts.shape
    if m < 2:
        raise DataError("lens depth needs at least 2 points")
    dq = cdist(_query(x, d)[None, :], pts, metric=metric)[0]
    dd = cdist(pts, pts, metric=metric)
    return _pair_fraction(dd >= np.maximum(dq[:, None], dq[None, :]))


def band_md(x, s, k: int = 2, max_evals: int = MAX_KERNEL_EVALS) -> float:
    """Probability-style band depth of order ``k``.

    ``x`` must lie in the coordinate-wise range of the ``k`` chosen points in
    every coordinate.
    """
    pts = _points(s)
    m, d = pts.shape
    if k < 2:
        raise ValueError("band order must be >= 2")
    if m < k:
        raise DataError(f"band depth of order {k} needs at least {k} points")
    x = _query(x, d)
    le = pts <= x  # (m, d)
    ge = pts >= x
    if k == 2:
        inside = np.ones((m, m), dtype=bool)
        for j in range(d):
            inside &= (le[:, j][:, None] & ge[:, j][None, :]) | (ge[:, j][:, None] & le[:, j][None, :])
        return _pair_fraction(inside)
    total = comb(m, k)
    if total > max_evals:
        raise ComputationError(f"C({m},{k}) = {total} bands exceed the cap {max_evals}")
    hits = 0
    for c in combinations(range(m), k):
        c = list(c)
        if np.all(le[c].any(axis=0) & ge[c].any(axis=0)):
            hits += 1
    return hits / total


def band_sum_md(x, s, K: int = 3, max_evals: int = MAX_KERNEL_EVALS) -> float:
    """Sum of the band depths of orders 2..K."""
    pts = _points(s)
    if K < 2:
        raise ValueError("K must be >= 2")
    if pts.shape[0] < K:
        raise DataError(f"band-sum depth with K={K} needs at least {K} points")
    return sum(band_md(x, pts, k, max_evals) for k in range(2, K + 1))


def random_tukey_md(queries, s, directions: DirectionSet, reduce: str = "min") -> np.ndarray:
    """Tukey depth of the projections, reduced by ``min`` (random Tukey) or ``mean``."""
    pts = _points(s)
    q = _points(queries)
    u = directions.directions
    if u.shape[1] != pts.shape[1]:
        raise DataError("direction dimension does not match the sample")
    pp = row_dots(pts, u)
    qp = row_dots(q, u)
    return projected_tukey(qp, pp, reduce)


def row_dots(a: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``a @ u.T`` computed row by row, so equal rows give bit-identical projections.

    BLAS products may round a row differently depending on the other rows in
    the call, which would split ties between a query and its own copy in the
    reference.
    """
    return np.stack([(a * v).sum(axis=1) for v in u], axis=1)


def projected_tukey(query_proj: np.ndarray, ref_proj: np.ndarray, reduce: str) -> np.ndarray:
    """Reduce univariate Tukey depths over projection columns."""
    m = ref_proj.shape[0]
    nums = np.empty(query_proj.shape, dtype=np.int64)
    for j in range(ref_proj.shape[1]):
        b, a = below_above(np.sort(ref_proj[:, j]), query_proj[:, j])
        nums[:, j] = tukey_numerators(b, a, m)
    if reduce == "min":
        return nums.min(axis=1) / m
    return nums.sum(axis=1) / (m * nums.shape[1])
