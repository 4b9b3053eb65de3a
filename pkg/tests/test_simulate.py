from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from depthgate.model import DepthSpec, Grid, TestConfig
from depthgate.simulate import (J_SLOW, SCENARIOS, Alternative, Outliers, ScenarioSpec,
                                apply_alternative, fourier_basis, fourier_variances, gen_brownian,
                                gen_fourier, gen_shape, generate_pair, get_scenario,
                                parse_alternative, rng_for_trial, run_experiment,
                                run_tuple_scatter, trial_depth)

GRID = Grid.uniform(101)


def test_rng_streams():
    a = rng_for_trial(5, 3, "x").random(64)
    assert_array_equal(a, rng_for_trial(5, 3, "x").random(64))
    assert not np.any(a == rng_for_trial(5, 4, "x").random(64))
    assert not np.any(a == rng_for_trial(5, 3, "y").random(64))


def test_brownian_moments():
    paths = gen_brownian(GRID, np.random.default_rng(0), 5000)
    assert np.all(paths[:, 0] == 0)
    assert paths[:, -1].var() == pytest.approx(1.0, abs=0.06)
    sd = np.sqrt(GRID.points[1:])
    assert np.all(np.abs(paths[:, 1:].mean(axis=0)) < 3 * sd / np.sqrt(5000) + 0.02)


def test_fourier_models():
    assert float(J_SLOW) == pytest.approx(3.597740, abs=1e-6)
    assert J_SLOW == sum(Fraction(1, j) for j in range(1, 21))
    curves = gen_fourier(GRID, np.random.default_rng(1), "fast", 8000)
    assert abs(curves.mean()) < 0.02
    half = GRID.points.size // 2
    expected = float(np.sum(fourier_variances("fast") * fourier_basis(GRID)[:, half] ** 2))
    assert curves[:, half].var() == pytest.approx(expected, rel=0.05)


def test_shape_models():
    rng = np.random.default_rng(2)
    flat = gen_shape(GRID, rng, "flat", 10)
    assert np.all(flat == flat[:, :1])
    zig = gen_shape(GRID, rng, "zigzag", 5000)
    assert zig.min() >= 0 and zig.max() < 1
    grid = np.linspace(0, 1, 2001)
    for j in (0, 25, 50, 75, 100):
        ecdf = np.searchsorted(np.sort(zig[:, j]), grid, side="right") / 5000
        assert np.max(np.abs(ecdf - grid)) < 0.03


def test_alternatives():
    x = np.random.default_rng(3).normal(size=(4, 101))
    assert_array_equal(apply_alternative(x, Alternative("shift", 0.0)), x)
    assert_allclose(apply_alternative(x, parse_alternative("affine:a=0.15,b=0.8")), 0.8 * x + 0.15)
    copy = np.random.default_rng(4).normal(size=x.shape)
    tiny = apply_alternative(x, Alternative("loc-scale", 1e-12), GRID, copy)
    assert_allclose(tiny, (x + copy) / np.sqrt(2), atol=1e-5)
    with pytest.raises(ValueError):
        parse_alternative("shift:c=1")


def test_outliers_shift_first_element():
    spec = ScenarioSpec("brownian", m=5, n=5, grid_size=11, outliers=Outliers(1, 50.0, "p"))
    plain = ScenarioSpec("brownian", m=5, n=5, grid_size=11)
    p, q = generate_pair(spec, 0)
    p0, q0 = generate_pair(plain, 0)
    assert_allclose(p.curves[0], p0.curves[0] + 50)
    assert_array_equal(p.curves[1:], p0.curves[1:])
    assert_array_equal(q.curves, q0.curves)


def test_trial_depth_seeds_only_randomized():
    spec = ScenarioSpec("gauss", dim=2)
    assert trial_depth(DepthSpec("tukey"), spec, 3) == DepthSpec("tukey")
    rt = DepthSpec("random-tukey", k=2, seed=0)
    assert trial_depth(rt, spec, 3).seed != trial_depth(rt, spec, 4).seed


def test_single_trial_rate_is_binary():
    spec = ScenarioSpec("uniform", trials=1, seed=9)
    res = run_experiment(spec, DepthSpec("tukey"), [TestConfig("joint-tp")], workers=1)
    assert res.rates["joint-tp"] in (0.0, 1.0)


def test_scatter_deterministic_and_bounded():
    spec = ScenarioSpec("uniform", trials=3, seed=2)
    a = run_tuple_scatter(spec, DepthSpec("tukey"), workers=1)
    b = run_tuple_scatter(spec, DepthSpec("tukey"), workers=2)
    assert len(a) == 3 and a == b
    assert all(t.ls_pq + t.ls_qp <= 1 for t in a)


def test_thm21_cloud_centre():
    spec = SCENARIOS["thm2.1"].spec
    tuples = run_tuple_scatter(ScenarioSpec(spec.model, alternative=spec.alternative, trials=60),
                               DepthSpec("tukey"), workers=1)
    # Q = U(0, 1/2) sits inside P's ordering; P's points sit half outside Q's
    assert np.mean([t.ls_pq for t in tuples]) == pytest.approx(0.5, abs=0.03)
    assert np.mean([t.ls_qp for t in tuples]) == pytest.approx(0.25, abs=0.03)


def test_registry():
    assert get_scenario("tableC6-outliers") is SCENARIOS["tableC6-b"]
    for name, sc in SCENARIOS.items():
        assert sc.method_configs()
        sc.depth_spec(0)
    with pytest.raises(ValueError):
        get_scenario("nope")


@pytest.mark.slow
def test_scale_alternative_variance_approaches_limit():
    # the limit 5 - 4 tau = 3 is approached slowly; at m = n = 1600 the gap is about 0.1
    spec = ScenarioSpec("uniform", m=1600, n=1600, alternative=Alternative("scale", 0.5),
                        trials=1500, seed=5)
    tuples = run_tuple_scatter(spec, DepthSpec("tukey"))
    scale = np.sqrt(12 * 800)
    v1 = np.var([scale * (t.ls_pq - 0.5) for t in tuples], ddof=1)
    v2 = np.var([scale * (t.ls_qp - 0.25) for t in tuples], ddof=1)
    assert v1 == pytest.approx(3.0, abs=0.3)
    assert v2 == pytest.approx(0.75, abs=0.08)
