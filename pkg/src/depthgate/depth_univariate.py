"""Exact univariate Tukey and simplicial depths.

Both depths reduce to two counts per query: ``b`` sample values strictly
below and ``a`` strictly above.  Tukey depth is ``min(m - a, m - b) / m`` and the
closed-interval simplicial depth is ``(C(m,2) - C(b,2) - C(a,2)) / C(m,2)``.
Counts are integers, so depths produced here compare exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable

import numpy as np

from .model import DataError


@dataclass(frozen=True, eq=False)
class SortedSample1D:
    """Nondecreasing finite sample values."""

    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if v.size == 0:
            raise DataError("empty sample")
        if not np.all(np.isfinite(v)):
            raise DataError("sample values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.size


def _sorted(s) -> SortedSample1D:
    return s if isinstance(s, SortedSample1D) else SortedSample1D(s)


def _check_x(x) -> float:
    x = float(x)
    if not np.isfinite(x):
        raise DataError("query must be finite")
    return x


def below_above(sorted_values: np.ndarray, x) -> tuple[np.ndarray, np.ndarray]:
    """Counts of sample values strictly below and strictly above each query."""
    m = sorted_values.size
    below = np.searchsorted(sorted_values, x, side="left")
    above = m - np.searchsorted(sorted_values, x, side="right")
    return below, above


def comb2(k):
    k = np.asarray(k, dtype=np.int64)
    return k * (k - 1) // 2


def tukey_numerators(below, above, m: int) -> np.ndarray:
    """``m * tukey depth`` from the strict counts."""
    return np.minimum(m - np.asarray(below), m - np.asarray(above))


def simplicial_numerators(below, above, m: int) -> np.ndarray:
    """``C(m,2) * simplicial depth`` from the strict counts."""
    return comb2(m) - comb2(below) - comb2(above)


def tukey1d_fraction(x, s) -> Fraction:
    s = _sorted(s)
    b, a = below_above(s.values, _check_x(x))
    return Fraction(int(tukey_numerators(b, a, s.m)), s.m)


def tukey1d(x, s) -> float:
    """Univariate Tukey depth ``min(#{X <= x}, #{X >= x}) / m``.

    >>> tukey1d(2.5, [1, 2, 3, 4])
    0.5
    """
    return float(tukey1d_fraction(x, s))


def simplicial1d_fraction(x, s) -> Fraction:
    s = _sorted(s)
    if s.m < 2:
        raise DataError("simplicial depth needs at least 2 sample values")
    b, a = below_above(s.values, _check_x(x))
    return Fraction(int(simplicial_numerators(b, a, s.m)), int(comb2(s.m)))


def simplicial1d(x, s) -> float:
    """Fraction of the closed intervals [X_i, X_j], i < j, that contain ``x``.

    Ties in the sample and queries at sample points are handled by the strict
    below/above counts.
    """
    return float(simplicial1d_fraction(x, s))


def interval_kernel(x: float, xi: float, xj: float) -> bool:
    return min(xi, xj) <= x <= max(xi, xj)


def brute_ustat_1d(x, s, kernel: Callable[[float, float, float], bool] = interval_kernel,
                   exact: bool = False):
    """Order-2 U-statistic of a pair kernel by full enumeration of all pairs.

    Meant as an oracle: O(m^2) and independent of the counting formulas.
    """
    vals = [float(v) for v in _sorted(s).values]
    if len(vals) < 2:
        raise DataError("a pair U-statistic needs at least 2 sample values")
    x = _check_x(x)
    hits = sum(1 for xi, xj in combinations(vals, 2) if kernel(x, xi, xj))
    value = Fraction(hits, len(vals) * (len(vals) - 1) // 2)
    return value if exact else float(value)


def tukey1d_many(queries, s) -> np.ndarray:
    """Vectorised :func:`tukey1d` over an array of queries."""
    s = _sorted(s)
    b, a = below_above(s.values, np.asarray(queries, dtype=float))
    return tukey_numerators(b, a, s.m) / s.m


def simplicial1d_many(queries, s) -> np.ndarray:
    s = _sorted(s)
    if s.m < 2:
        raise DataError("simplicial depth needs at least 2 sample values")
    b, a = below_above(s.values, np.asarray(queries, dtype=float))
    return simplicial_numerators(b, a, s.m) / comb2(s.m)


def pooled_counts(values: np.ndarray, groups: np.ndarray, n_groups: int,
                  member: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Column-wise strict counts of every row against every group, from one sort.

    Parameters
    ----------
    values : (N, T) array
        Pooled rows of all groups.
    groups : (N,) int array
        Group id of each row, in ``range(n_groups)``.
    member : (N, T) bool array, optional
        Entries flagged False are not counted as members of their group
        (unobserved values).

    Returns
    -------
    below, above : (n_groups, N, T) int arrays
        ``below[g, i, t]`` is the number of members of group ``g`` whose value at
        ``t`` is strictly below ``values[i, t]``; ``above`` likewise.
    """
    v = np.ascontiguousarray(np.asarray(values, dtype=float).T)  # (T, N)
    T, N = v.shape
    order = np.argsort(v, axis=1)
    sv = np.take_along_axis(v, order, axis=1)
    idx = np.arange(N)
    new = np.ones((T, N), dtype=bool)
    new[:, 1:] = sv[:, 1:] != sv[:, :-1]
    start = np.maximum.accumulate(np.where(new, idx, 0), axis=1)
    last = np.ones((T, N), dtype=bool)
    last[:, :-1] = new[:, 1:]
    stop = np.minimum.accumulate(np.where(last, idx, N)[:, ::-1], axis=1)[:, ::-1] + 1
    gsorted = np.asarray(groups)[order]
    if member is not None:
        msorted = np.take_along_axis(np.asarray(member, dtype=bool).T, order, axis=1)
    below = np.empty((n_groups, N, T), dtype=np.int64)
    above = np.empty((n_groups, N, T), dtype=np.int64)
    cum = np.zeros((T, N + 1), dtype=np.int64)
    scratch = np.empty((T, N), dtype=np.int64)
    for g in range(n_groups):
        flag = gsorted == g
        if member is not None:
            flag &= msorted
        np.cumsum(flag, axis=1, out=cum[:, 1:])
        total = cum[:, -1:]
        np.put_along_axis(scratch, order, np.take_along_axis(cum, start, axis=1), axis=1)
        below[g] = scratch.T
        np.put_along_axis(scratch, order, total - np.take_along_axis(cum, stop, axis=1), axis=1)
        above[g] = scratch.T
    return below, above


def column_counts(reference: np.ndarray, queries: np.ndarray,
                  ref_mask: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Column-wise strict counts for (m, T) reference and (k, T) query arrays.

    Returns ``(below, above)``, both (k, T) integer arrays, counting only
    reference entries flagged in ``ref_mask`` (all when None).
    """
    ref = np.asarray(reference, dtype=float)
    q = np.asarray(queries, dtype=float)
    m = ref.shape[0]
    groups = np.r_[np.zeros(m, np.int64), np.ones(q.shape[0], np.int64)]
    member = None
    if ref_mask is not None:
        member = np.vstack([np.asarray(ref_mask, dtype=bool), np.ones(q.shape, dtype=bool)])
    below, above = pooled_counts(np.vstack([ref, q]), groups, 1, member)
    return below[0, m:], above[0, m:]
