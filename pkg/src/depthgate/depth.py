"""Evaluate any :class:`~depthgate.model.DepthSpec` on a reference sample."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from . import depth_functional as F
from . import depth_multivariate as M
from .model import (FUNCTIONAL_FAMILIES, MULTIVARIATE_FAMILIES, DataError, DepthSpec,
                    DepthVector, FunctionalSample, MultivariateSample, Sample, as_sample)


def _bandwidth(spec: DepthSpec) -> F.BandwidthMode:
    if spec.quantile is not None:
        return F.BandwidthMode.adaptive(spec.quantile, spec.floor)
    return F.BandwidthMode.fixed(spec.bandwidth)


def _functional(queries: FunctionalSample, ref: FunctionalSample, spec: DepthSpec) -> np.ndarray:
    fam = spec.family
    if fam not in FUNCTIONAL_FAMILIES:
        raise DataError(f"depth {fam!r} is not defined for functional samples")
    if not spec.supports_masks and (queries.masks is not None or ref.masks is not None):
        raise DataError(f"depth {spec.label()!r} does not support partially observed curves")
    if fam == "integrated":
        return F.integrated_depth(queries, ref, spec.inner,
                                  jitter_sd=spec.jitter_sd or 0.0, seed=spec.seed or 0)
    if fam == "h-depth":
        return F.h_depth(queries, ref, spec.kernel, _bandwidth(spec))
    if fam == "spatial":
        return F.spatial_depth(queries, ref)
    if fam == "lens-metric":
        return F.lens_metric_depth(queries, ref)
    if fam == "random-tukey":
        return F.random_tukey_functional(queries, ref, spec.k, spec.seed)
    return F.random_projection_depth(queries, ref, spec.k, spec.seed)


def _multivariate(queries: MultivariateSample, ref: MultivariateSample, spec: DepthSpec) -> np.ndarray:
    fam = spec.family
    q, s = queries.points, ref.points
    if fam not in MULTIVARIATE_FAMILIES:
        raise DataError(f"depth {fam!r} is not defined for multivariate samples")
    if fam == "tukey":
        return M.tukey_md_many(q, s)
    if fam == "simplicial":
        return M.simplicial_md_many(q, s)
    if fam == "spherical":
        return np.array([M.spherical_md(x, s) for x in q])
    if fam == "lens":
        if ref.size < 2:
            raise DataError("lens depth needs at least 2 points")
        return F.lens_from_distances(cdist(q, s), squareform(pdist(s)))
    if fam == "band":
        return np.array([M.band_md(x, s, spec.k) for x in q])
    if fam == "band-sum":
        return np.array([M.band_sum_md(x, s, spec.k) for x in q])
    if fam in ("random-tukey", "random-projection"):
        dirs = M.make_directions(ref.dim, spec.k, spec.seed)
        return M.random_tukey_md(q, s, dirs, "min" if fam == "random-tukey" else "mean")
    if fam == "h-depth":
        bw = _bandwidth(spec)
        h = F.resolve_bandwidth(pdist(s) if bw.h is None else np.empty(0), bw)
        return F.h_depth_from_distances(cdist(q, s), h, spec.kernel)
    # spatial
    return F.spatial_from_distances(cdist(q, s), squareform(pdist(s)))


def evaluate_depth(queries, reference, spec: DepthSpec) -> np.ndarray:
    """Depths of every query element with respect to the empirical ``reference`` law.

    Parameters
    ----------
    queries, reference : FunctionalSample or MultivariateSample
        Samples of the same kind on the same grid (or of the same dimension).
    spec : DepthSpec
        Which depth to compute.

    Returns
    -------
    numpy.ndarray
        One depth per query element.
    """
    queries, reference = as_sample(queries), as_sample(reference)
    if type(queries) is not type(reference):
        raise DataError("queries and reference must be samples of the same kind")
    if isinstance(reference, FunctionalSample):
        if queries.grid != reference.grid:
            raise DataError("grid mismatch: samples must share identical grids")
        out = _functional(queries, reference, spec)
    else:
        if queries.dim != reference.dim:
            raise DataError(f"dimension mismatch: {queries.dim} vs {reference.dim}")
        out = _multivariate(queries, reference, spec)
    return np.atleast_1d(np.asarray(out, dtype=float))


def depth_vector(queries: Sample, reference: Sample, spec: DepthSpec,
                 reference_id: str = "") -> DepthVector:
    return DepthVector(evaluate_depth(queries, reference, spec), spec, reference_id)


def pair_depths(p: Sample, q: Sample, spec: DepthSpec):
    """``(D(P|P), D(Q|P), D(Q|Q), D(P|Q))`` for two validated samples.

    ``D(A|B)`` holds the depths of the elements of ``A`` with respect to ``B``.
    Integrated depths on fully observed or masked curves share one pooled sort;
    every other family evaluates the four vectors separately.
    """
    if isinstance(p, FunctionalSample) and spec.family == "integrated":
        if p.grid != q.grid:
            raise DataError("grid mismatch: samples must share identical grids")
        return F.integrated_pair_depths(p, q, spec.inner, jitter_sd=spec.jitter_sd or 0.0,
                                        seed=spec.seed or 0)
    return (evaluate_depth(p, p, spec), evaluate_depth(q, p, spec),
            evaluate_depth(q, q, spec), evaluate_depth(p, q, spec))
