from itertools import combinations

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from depthgate.depth_multivariate import (band_md, band_sum_md, lens_md, make_directions,
                                          random_tukey_md, simplicial_md, simplicial_md_many,
                                          spherical_md, tukey_md, tukey_md_many)
from depthgate.depth_univariate import simplicial1d
from depthgate.model import ComputationError


def brute_tukey_2d(x, pts, n_dir=3600):
    # closed halfplanes with boundary through x; the minimum is attained at
    # normals perpendicular to some x -> X_i, so check those plus a fine sweep
    v = pts - x
    cand = [np.array([-w[1], w[0]]) for w in v if np.any(w)]
    cand += [np.array([np.cos(a), np.sin(a)]) for a in np.linspace(0, 2 * np.pi, n_dir, endpoint=False)]
    best = len(pts)
    for u in cand:
        d = v @ u
        best = min(best, int((d >= -1e-12).sum()), int((d <= 1e-12).sum()))
    return best / len(pts)


def brute_simplicial_2d(x, pts):
    hits = 0
    for a, b, c in combinations(range(len(pts)), 3):
        A, B, C = pts[a], pts[b], pts[c]
        M = np.column_stack([B - A, C - A])
        if abs(np.linalg.det(M)) < 1e-14:
            lo, hi = pts[[a, b, c]].min(0), pts[[a, b, c]].max(0)
            on = abs(np.cross(B - A, x - A)) < 1e-12 and abs(np.cross(C - A, x - A)) < 1e-12
            hits += bool(on and np.all(x >= lo) and np.all(x <= hi))
            continue
        lam = np.linalg.solve(M, x - A)
        hits += bool(lam.min() >= -1e-12 and lam.sum() <= 1 + 1e-12)
    return hits / len(list(combinations(range(len(pts)), 3)))


def test_tukey_2d_examples():
    diamond = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
    assert tukey_md([0, 0], diamond) == 0.5
    assert tukey_md([5, 5], diamond) == 0.0
    assert tukey_md([2.0, 3.0], np.array([[2.0, 3.0]])) == 1.0


@pytest.mark.parametrize("seed", range(6))
def test_tukey_2d_against_sweep(seed):
    rng = np.random.default_rng(seed)
    pts = rng.integers(-3, 4, size=(rng.integers(3, 20), 2)).astype(float)
    for x in list(pts[:4]) + list(rng.uniform(-3, 3, size=(4, 2))):
        assert tukey_md(x, pts) == pytest.approx(brute_tukey_2d(x, pts))


@pytest.mark.parametrize("seed", range(6))
def test_simplicial_2d_against_enumeration(seed):
    rng = np.random.default_rng(100 + seed)
    pts = rng.normal(size=(int(rng.integers(3, 16)), 2))
    queries = np.vstack([pts[:3], rng.normal(size=(5, 2))])
    assert_allclose(simplicial_md_many(queries, pts), [brute_simplicial_2d(x, pts) for x in queries])


def test_simplicial_2d_examples():
    tri = np.array([[0, 0], [1, 0], [0, 1]], dtype=float)
    assert simplicial_md([0.2, 0.2], tri) == 1.0
    assert simplicial_md([2.0, 2.0], tri) == 0.0
    assert simplicial_md([3.0], np.arange(1.0, 11.0)[:, None]) == pytest.approx(23 / 45)


def test_pair_depths_coincide_in_one_dimension():
    rng = np.random.default_rng(5)
    for _ in range(20):
        s = rng.integers(0, 8, size=int(rng.integers(2, 15))).astype(float)
        x = float(rng.integers(-1, 9))
        ref = simplicial1d(x, s)
        assert spherical_md([x], s) == ref
        assert lens_md([x], s) == ref
        assert band_md([x], s, 2) == ref


def test_pair_depth_examples():
    two = np.array([[0.0, 0.0], [2.0, 2.0]])
    assert spherical_md([1.0, 1.0], two) == 1.0
    assert band_md([1.0, 1.0], two) == 1.0
    assert spherical_md([100.0, 100.0], two) == 0.0
    assert lens_md([100.0, 100.0], two) == 0.0
    assert band_md([3.0, 1.0], two) == 0.0


def test_band_sum_is_additive():
    rng = np.random.default_rng(2)
    s = rng.normal(size=(9, 2))
    x = s.mean(axis=0)
    assert band_sum_md(x, s, 2) == band_md(x, s, 2)
    assert band_sum_md(x, s, 3) == pytest.approx(band_md(x, s, 2) + band_md(x, s, 3))


def test_rigid_motion_invariance():
    rng = np.random.default_rng(9)
    s = rng.normal(size=(15, 2))
    q = rng.normal(size=(6, 2))
    a = 0.7
    rot = np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
    shift = np.array([3.0, -1.0])
    assert_allclose(tukey_md_many(q @ rot.T + shift, s @ rot.T + shift), tukey_md_many(q, s))
    assert_allclose(simplicial_md_many(q @ rot.T + shift, s @ rot.T + shift), simplicial_md_many(q, s))


def test_directions():
    a, b = make_directions(3, 5, 42), make_directions(3, 5, 42)
    assert_array_equal(a.directions, b.directions)
    assert_allclose(np.linalg.norm(a.directions, axis=1), 1.0, atol=1e-12)
    assert abs(make_directions(1, 1, 0).directions[0, 0]) == 1.0


def test_random_tukey_bounded_by_each_projection():
    rng = np.random.default_rng(4)
    s = rng.normal(size=(20, 3))
    q = rng.normal(size=(4, 3))
    dirs = make_directions(3, 4, 1)
    mins = random_tukey_md(q, s, dirs, "min")
    means = random_tukey_md(q, s, dirs, "mean")
    for u in dirs.directions:
        single = tukey_md_many((q @ u)[:, None], (s @ u)[:, None])
        assert np.all(mins <= single + 1e-15)
    assert np.all(means >= mins)


def test_exact_tukey_refuses_high_dimension():
    with pytest.raises(ComputationError):
        tukey_md(np.zeros(3), np.eye(3))
