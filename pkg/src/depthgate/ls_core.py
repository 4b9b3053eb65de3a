"""Depth ranks, LS statistics and the LS tuple."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .depth import evaluate_depth, pair_depths
from .model import DepthSpec, LSTuple, Sample, validate_pair


class RankMode(str, enum.Enum):
    """How reference elements with equal depth count towards a rank."""

    TIE_SPLIT = "tie-split"  # strictly smaller plus half of the ties
    TIE_INCLUSIVE = "tie-inclusive"  # smaller or equal


def _mode(mode) -> RankMode:
    return RankMode(mode)


def rank_numerators(query_depths, reference_depths, mode=RankMode.TIE_SPLIT) -> np.ndarray:
    """Integer numerators of the ranks: ``2 m R`` (tie-split) or ``m R`` (tie-inclusive)."""
    ref = np.sort(np.asarray(reference_depths, dtype=float))
    q = np.asarray(query_depths, dtype=float)
    right = np.searchsorted(ref, q, side="right")
    if _mode(mode) is RankMode.TIE_INCLUSIVE:
        return right
    return np.searchsorted(ref, q, side="left") + right


def ranks_from_depths(query_depths, reference_depths, mode=RankMode.TIE_SPLIT) -> np.ndarray:
    """Generalised ranks of query depths within a vector of reference depths.

    >>> ranks_from_depths([0.25, 0.2], [0.1, 0.2, 0.3]).tolist()
    [0.6666666666666666, 0.5]
    """
    m = np.size(reference_depths)
    scale = 2 * m if _mode(mode) is RankMode.TIE_SPLIT else m
    return rank_numerators(query_depths, reference_depths, mode) / scale


def depth_ranks(queries: Sample, reference: Sample, spec: DepthSpec,
                mode=RankMode.TIE_SPLIT) -> np.ndarray:
    """Rank of every query within the depth ordering of ``reference``.

    The reference depths D(X_i, P_m) are computed with X_i itself part of the
    empirical law.
    """
    reference, queries = validate_pair(reference, queries)
    ref_depths = evaluate_depth(reference, reference, spec)
    return ranks_from_depths(evaluate_depth(queries, reference, spec), ref_depths, mode)


def _ls_from_depths(ref_depths, q_depths, mode: RankMode) -> float:
    num = int(rank_numerators(q_depths, ref_depths, mode).sum())
    m, n = ref_depths.size, q_depths.size
    return num / ((2 if mode is RankMode.TIE_SPLIT else 1) * m * n)


def _ls(p: Sample, q: Sample, spec: DepthSpec, mode: RankMode) -> float:
    return _ls_from_depths(evaluate_depth(p, p, spec), evaluate_depth(q, p, spec), mode)


def ls_statistic(p: Sample, q: Sample, spec: DepthSpec, mode=RankMode.TIE_SPLIT) -> float:
    """Mean rank of the elements of ``q`` within the depth ordering of ``p``."""
    p, q = validate_pair(p, q)
    return _ls(p, q, spec, _mode(mode))


def ls_tuple(p: Sample, q: Sample, spec: DepthSpec, mode=RankMode.TIE_SPLIT) -> LSTuple:
    """The pair (LS(P_m, Q_n), LS(Q_n, P_m)).

    Both entries use the same spec (and seed).  Each depth vector depends on
    its query and reference samples only, so swapping ``p`` and ``q`` swaps
    the entries exactly.
    """
    p, q = validate_pair(p, q)
    mode = _mode(mode)
    d_pp, d_qp, d_qq, d_pq = pair_depths(p, q, spec)
    return LSTuple(_ls_from_depths(d_pp, d_qp, mode), _ls_from_depths(d_qq, d_pq, mode),
                   len(p), len(q))


@dataclass(frozen=True)
class ScaledStatistics:
    diff_std: float
    sum_centered: float
    scale: float


def scaled_stats(t: LSTuple) -> ScaledStatistics:
    """Standardised difference, centred sum and the scale sqrt(12 m n / (m + n)).

    >>> round(scaled_stats(LSTuple(0.4, 0.6, 100, 100)).diff_std, 4)
    -2.4495
    """
    r = t.m * t.n / (t.m + t.n)
    return ScaledStatistics(diff_std=sqrt(3 * r) * (t.ls_pq - t.ls_qp),
                            sum_centered=t.ls_pq + t.ls_qp - 1.0,
                            scale=sqrt(12 * r))
