"""Functional depths for curves sampled on a common grid.

Distances and inner products use the discretised L2[0, 1] geometry: the mean
over (jointly observed) grid points, which is the Riemann sum on an
equidistant grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .depth_multivariate import projected_tukey, row_dots
from .depth_univariate import (column_counts, comb2, pooled_counts, simplicial_numerators,
                               tukey_numerators)
from .model import ComputationError, DataError, FunctionalSample, Grid

SQRT_2PI = np.sqrt(2.0 * np.pi)


def gaussian_kernel(u):
    u = np.asarray(u, dtype=float)
    return np.exp(-0.5 * u * u) / SQRT_2PI


KERNELS = {"gaussian": gaussian_kernel}


@dataclass(frozen=True)
class BandwidthMode:
    """Either a fixed bandwidth ``h`` or the ``q``-quantile of pairwise distances."""

    h: Optional[float] = None
    q: Optional[float] = None
    floor: float = 1e-12

    def __post_init__(self):
        if (self.h is None) == (self.q is None):
            raise ValueError("give exactly one of h or q")
        if self.h is not None and not self.h > 0:
            raise ValueError("h must be > 0")
        if self.q is not None and not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")
        if not self.floor > 0:
            raise ValueError("floor must be > 0")

    @classmethod
    def fixed(cls, h: float) -> "BandwidthMode":
        return cls(h=h)

    @classmethod
    def adaptive(cls, q: float = 0.15, floor: float = 1e-12) -> "BandwidthMode":
        return cls(q=q, floor=floor)


def _curves(x, grid: Optional[Grid] = None):
    """Return (values, observed-mask or None) for a curve, curve array or sample."""
    if isinstance(x, FunctionalSample):
        if grid is not None and x.grid != grid:
            raise DataError("grid mismatch")
        return x.curves, x.masks
    v = np.asarray(x, dtype=float)
    if v.ndim == 1:
        v = v[None, :]
    if grid is not None and v.shape[1] != len(grid):
        raise DataError("curve length does not match the grid")
    if not np.all(np.isfinite(v)):
        raise DataError("curve values must be finite")
    return v, None


def _single(x) -> bool:
    return not isinstance(x, FunctionalSample) and np.ndim(x) == 1


def _out(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


def _reject_masks(*masks, name: str):
    if any(m is not None for m in masks):
        raise DataError(f"{name} does not support partially observed curves")


# -- L2 geometry ----------------------------------------------------------------

def l2_distance(f, g, grid: Optional[Grid] = None, mask_f=None, mask_g=None) -> float:
    """Discretised L2[0,1] distance over the jointly observed grid points."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape or f.ndim != 1:
        raise DataError("curves must be 1-D arrays on the same grid")
    if grid is not None and f.size != len(grid):
        raise DataError("curve length does not match the grid")
    obs = np.ones(f.size, dtype=bool)
    if mask_f is not None:
        obs &= np.asarray(mask_f, dtype=bool)
    if mask_g is not None:
        obs &= np.asarray(mask_g, dtype=bool)
    if not obs.any():
        raise DataError("curves share no observed grid point")
    diff = f[obs] - g[obs]
    return float(np.sqrt(np.mean(diff * diff)))


def l2_distances(queries: np.ndarray, reference: np.ndarray,
                 qmask: Optional[np.ndarray] = None,
                 rmask: Optional[np.ndarray] = None) -> np.ndarray:
    """(k, m) matrix of discretised L2 distances."""
    T = reference.shape[1]
    if qmask is None and rmask is None:
        return np.sqrt(cdist(queries, reference, "sqeuclidean") / T)
    qm = np.ones(queries.shape, bool) if qmask is None else qmask
    rm = np.ones(reference.shape, bool) if rmask is None else rmask
    out = np.empty((queries.shape[0], reference.shape[0]))
    for i, (q, o) in enumerate(zip(queries, qm)):
        joint = rm & o
        cnt = joint.sum(axis=1)
        if np.any(cnt == 0):
            raise DataError("a pair of curves shares no observed grid point")
        diff = np.where(joint, reference - q, 0.0)
        out[i] = np.sqrt(np.einsum("ij,ij->i", diff, diff) / cnt)
    return out


def pairwise_l2(reference: np.ndarray, rmask: Optional[np.ndarray] = None) -> np.ndarray:
    """Condensed vector of the C(m,2) pairwise distances (i < j)."""
    if rmask is None:
        return np.sqrt(pdist(reference, "sqeuclidean") / reference.shape[1])
    full = l2_distances(reference, reference, rmask, rmask)
    return full[np.triu_indices(reference.shape[0], 1)]


def _square(cond: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros((m, m))
    iu = np.triu_indices(m, 1)
    out[iu] = cond
    return out + out.T


# -- depths from distances (shared with the Euclidean multivariate versions) ----

def resolve_bandwidth(pair_distances: np.ndarray, mode: BandwidthMode) -> float:
    if mode.h is not None:
        return mode.h
    if pair_distances.size == 0:
        raise ComputationError("adaptive bandwidth needs at least 2 reference curves")
    if not np.any(pair_distances > 0):
        raise ComputationError("adaptive bandwidth undefined: all pairwise distances are 0")
    return max(float(np.quantile(pair_distances, mode.q)), mode.floor)


def h_depth_from_distances(dq: np.ndarray, h: float, kernel: str = "gaussian") -> np.ndarray:
    m = dq.shape[1]
    return KERNELS[kernel](dq / h).sum(axis=1) / (m * h)


def lens_from_distances(dq: np.ndarray, dref: np.ndarray) -> np.ndarray:
    """Lens U-statistic given query-to-reference and reference-to-reference distances."""
    m = dref.shape[0]
    if m < 2:
        raise DataError("lens depth needs at least 2 reference elements")
    iu, ju = np.triu_indices(m, 1)
    pair = dref[iu, ju]
    hits = np.count_nonzero(pair[None, :] >= np.maximum(dq[:, iu], dq[:, ju]), axis=1)
    return hits / iu.size


def spatial_from_distances(dq: np.ndarray, dref: np.ndarray) -> np.ndarray:
    """``1 - |mean of unit vectors (x - X_i)/|x - X_i||``, from distances only.

    Uses <x - X_i, x - X_j> = (d_i^2 + d_j^2 - D_ij^2) / 2, so the squared norm
    of the summed unit vectors is (sum d_i)(sum 1/d_j) - w' D^2 w / 2 with
    w_i = 1/d_i (and w_i = 0 where x coincides with X_i).
    """
    m = dref.shape[0]
    nz = dq > 0
    w = np.where(nz, 1.0 / np.where(nz, dq, 1.0), 0.0)
    d2 = dref * dref
    quad = np.einsum("ki,ij,kj->k", w, d2, w)
    s = dq.sum(axis=1) * w.sum(axis=1) - 0.5 * quad
    norm = np.sqrt(np.clip(s, 0.0, None)) / m
    return np.clip(1.0 - norm, 0.0, 1.0)


# -- public functional depths ---------------------------------------------------

def h_depth(x, s: FunctionalSample, kernel: str = "gaussian",
            bw: BandwidthMode = BandwidthMode(h=1.0)):
    """Kernel h-depth ``(1/(m h)) sum_i K(|x - X_i| / h)``.

    In adaptive mode ``h`` is the ``q``-quantile of the C(m,2) pairwise
    reference distances (linear interpolation), floored at ``bw.floor``.
    """
    single = _single(x)
    q, qmask = _curves(x, s.grid)
    dq = l2_distances(q, s.curves, qmask, s.masks)
    h = resolve_bandwidth(pairwise_l2(s.curves, s.masks) if bw.h is None else np.empty(0), bw)
    return _out(h_depth_from_distances(dq, h, kernel), single)


def spatial_depth(x, s: FunctionalSample):
    single = _single(x)
    q, qmask = _curves(x, s.grid)
    _reject_masks(qmask, s.masks, name="spatial depth")
    dq = l2_distances(q, s.curves)
    dref = l2_distances(s.curves, s.curves)
    return _out(spatial_from_distances(dq, dref), single)


def lens_metric_depth(x, s: FunctionalSample):
    """Lens depth with the L2[0,1] metric."""
    single = _single(x)
    q, qmask = _curves(x, s.grid)
    if s.size < 2:
        raise DataError("lens metric depth needs at least 2 reference curves")
    dq = l2_distances(q, s.curves, qmask, s.masks)
    dref = _square(pairwise_l2(s.curves, s.masks), s.size)
    return _out(lens_from_distances(dq, dref), single)


def _jitter_rng(s: FunctionalSample, seed: int) -> np.random.Generator:
    fp = np.frombuffer(s.fingerprint(), dtype=np.uint32)
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *fp.tolist()]))


def _inner_kind(inner: str) -> str:
    if inner == "simplicial-modified":
        return "simplicial"
    if inner in ("tukey", "simplicial"):
        return inner
    raise ValueError(f"unknown inner depth {inner!r}")


def _reference_values(s: FunctionalSample, inner: str, jitter_sd: float, seed: int) -> np.ndarray:
    """Reference values entering the pointwise depth (jittered for the modified depth)."""
    if inner == "simplicial-modified" and jitter_sd > 0:
        return s.curves + jitter_sd * _jitter_rng(s, seed).standard_normal(s.curves.shape)
    return s.curves


def _integrate(below, above, m_t: np.ndarray, qmask, kind: str) -> np.ndarray:
    """Average pointwise depths over the usable grid points of each query."""
    if kind == "tukey":
        nums = tukey_numerators(below, above, m_t[None, :])
        dens = m_t
        min_size = 1
    else:
        nums = simplicial_numerators(below, above, m_t[None, :])
        dens = comb2(m_t)
        min_size = 2
    usable = np.broadcast_to(m_t >= min_size, nums.shape)
    if qmask is not None:
        usable = usable & qmask
    count = usable.sum(axis=1)
    if np.any(count == 0):
        raise DataError("no usable grid points for the integrated depth")
    used_dens = dens[np.any(usable, axis=0)]
    if np.all(used_dens == used_dens[0]):
        # integer sums keep equal depths bit-identical
        return np.where(usable, nums, 0).sum(axis=1) / (float(used_dens[0]) * count)
    safe = np.where(dens > 0, dens, 1)
    return np.where(usable, nums / safe, 0.0).sum(axis=1) / count


def _observed_counts(s: FunctionalSample) -> np.ndarray:
    if s.masks is None:
        return np.full(len(s.grid), s.size, dtype=np.int64)
    return s.masks.sum(axis=0)


def integrated_depth(x, s: FunctionalSample, inner: str = "tukey",
                     jitter_sd: float = 1e-8, seed: int = 0):
    """Grid average of a univariate depth of x(t) within {X_i(t)}.

    Only grid points observed in the query and with enough observed reference
    values (1 for Tukey, 2 for simplicial) enter the average.  The
    ``simplicial-modified`` inner depth perturbs every reference value by
    N(0, jitter_sd^2) noise seeded by (reference sample, ``seed``); queries are
    left untouched.
    """
    single = _single(x)
    q, qmask = _curves(x, s.grid)
    kind = _inner_kind(inner)
    ref = _reference_values(s, inner, jitter_sd, seed)
    below, above = column_counts(ref, q, s.masks)
    return _out(_integrate(below, above, _observed_counts(s), qmask, kind), single)


def integrated_pair_depths(p: FunctionalSample, q: FunctionalSample, inner: str = "tukey",
                           jitter_sd: float = 1e-8, seed: int = 0):
    """All four depth vectors needed by an LS tuple, from one pooled sort per grid point.

    Returns ``(D(P|P), D(Q|P), D(Q|Q), D(P|Q))`` where ``D(A|B)`` are the
    depths of the curves of ``A`` with respect to ``B``.  Values equal those of
    :func:`integrated_depth` exactly.
    """
    if p.grid != q.grid:
        raise DataError("grid mismatch")
    kind = _inner_kind(inner)
    m, n = p.size, q.size
    rows = [_reference_values(p, inner, jitter_sd, seed), _reference_values(q, inner, jitter_sd, seed)]
    groups = [np.zeros(m, np.int64), np.ones(n, np.int64)]
    members = [p.observed, q.observed]
    jittered = rows[0] is not p.curves
    if jittered:
        # unjittered queries join as non-members
        rows += [p.curves, q.curves]
        groups += [np.full(m, 2, np.int64), np.full(n, 2, np.int64)]
        members += [np.ones(p.curves.shape, bool), np.ones(q.curves.shape, bool)]
    masked = p.masks is not None or q.masks is not None
    below, above = pooled_counts(np.vstack(rows), np.concatenate(groups), 2,
                                 np.vstack(members) if masked else None)
    qp = slice(2 * m + n, 2 * (m + n)) if jittered else slice(m, m + n)
    pp = slice(m + n, 2 * m + n) if jittered else slice(0, m)
    mp, mq = _observed_counts(p), _observed_counts(q)
    return (_integrate(below[0, pp], above[0, pp], mp, p.masks, kind),
            _integrate(below[0, qp], above[0, qp], mp, q.masks, kind),
            _integrate(below[1, qp], above[1, qp], mq, q.masks, kind),
            _integrate(below[1, pp], above[1, pp], mq, p.masks, kind))


def brownian_directions(grid: Grid, k: int, seed: int) -> np.ndarray:
    """``k`` Brownian paths on ``grid`` scaled to unit discretised L2 norm."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, len(grid)]))
    steps = np.sqrt(np.diff(grid.points))
    paths = np.zeros((k, len(grid)))
    paths[:, 1:] = np.cumsum(rng.standard_normal((k, len(grid) - 1)) * steps, axis=1)
    if grid.points[0] > 0:
        paths += np.sqrt(grid.points[0]) * rng.standard_normal((k, 1))
    norms = np.sqrt(np.mean(paths * paths, axis=1))
    return paths / norms[:, None]


def project(curves: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Discretised L2 inner products <curve, direction>."""
    return row_dots(curves, directions) / curves.shape[1]


def random_tukey_functional(x, s: FunctionalSample, k: int = 2, seed: int = 0):
    """Minimum over ``k`` random Brownian directions of the projected Tukey depth."""
    return _random_projected(x, s, k, seed, "min")


def random_projection_depth(x, s: FunctionalSample, k: int = 10, seed: int = 0):
    """Mean over ``k`` random Brownian directions of the projected Tukey depth."""
    return _random_projected(x, s, k, seed, "mean")


def _random_projected(x, s, k, seed, reduce):
    single = _single(x)
    q, qmask = _curves(x, s.grid)
    _reject_masks(qmask, s.masks, name="random projection depths")
    v = brownian_directions(s.grid, k, seed)
    return _out(projected_tukey(project(q, v), project(s.curves, v), reduce), single)
