"""Random data models, alternatives and the Monte Carlo experiment runner.

Every trial draws from its own generator, derived from ``(master seed, trial
index, stream tag)``, so results do not depend on how trials are scheduled.
"""

from __future__ import annotations

import dataclasses
import logging
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .decision import decide
from .ls_core import RankMode, ls_tuple
from .model import (DataError, DepthSpec, FunctionalSample, Grid, LSTuple, MultivariateSample,
                    TestConfig, parse_depth, parse_method)

log = logging.getLogger(__name__)

#: sum of 1/j for j = 1..20, the variance constant of the slowly decaying model
J_SLOW = Fraction(55835135, 15519504)
N_FOURIER = 20

FUNCTIONAL_MODELS = ("brownian", "fourier-fast", "fourier-slow", "shape-flat", "shape-zigzag")
POINT_MODELS = ("uniform", "gauss")
ALTERNATIVES = ("none", "shift", "sine-shift", "scale", "loc-scale", "affine")


def rng_for_trial(master_seed: int, trial_index: int, stream_tag: str) -> np.random.Generator:
    """Generator for one (seed, trial, tag) triple, independent of execution order."""
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=(int(trial_index), zlib.crc32(stream_tag.encode())))
    return np.random.Generator(np.random.PCG64(ss))


# -- generators -------------------------------------------------------------------

def _require_equidistant_from_zero(grid: Grid):
    if grid.points[0] != 0.0 or not grid.is_equidistant():
        raise DataError("Brownian paths need an equidistant grid starting at 0")


def gen_brownian(grid: Grid, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """Standard Brownian motion on ``grid`` (one path, or ``size`` paths as rows)."""
    _require_equidistant_from_zero(grid)
    k = 1 if size is None else size
    dt = grid.points[1] - grid.points[0]
    paths = np.zeros((k, len(grid)))
    paths[:, 1:] = np.cumsum(rng.normal(0.0, sqrt(dt), size=(k, len(grid) - 1)), axis=1)
    return paths[0] if size is None else paths


def fourier_basis(grid: Grid, count: int = N_FOURIER) -> np.ndarray:
    """Rows e_1..e_count with e_j = sin(j pi t) for odd j and cos(j pi t) for even j."""
    j = np.arange(1, count + 1)[:, None]
    arg = j * np.pi * grid.points[None, :]
    return np.where(j % 2 == 1, np.sin(arg), np.cos(arg))


def fourier_variances(mode: str, count: int = N_FOURIER) -> np.ndarray:
    l = np.arange(1, count + 1, dtype=float)
    if mode == "fast":
        return 3.0 ** -l
    if mode == "slow":
        return float(J_SLOW) / l
    raise ValueError("mode must be 'fast' or 'slow'")


def gen_fourier(grid: Grid, rng: np.random.Generator, mode: str = "fast",
                size: Optional[int] = None) -> np.ndarray:
    """Random Fourier series with 20 terms and variances 3^-l (fast) or J/l (slow)."""
    k = 1 if size is None else size
    coef = rng.standard_normal((k, N_FOURIER)) * np.sqrt(fourier_variances(mode))
    curves = coef @ fourier_basis(grid)
    return curves[0] if size is None else curves


def gen_shape(grid: Grid, rng: np.random.Generator, which: str = "flat",
              size: Optional[int] = None) -> np.ndarray:
    """Flat curves ``U`` or sawtooth curves ``frac(5 (t + V))`` with U, V ~ U(0, 1)."""
    k = 1 if size is None else size
    u = rng.random((k, 1))
    if which == "flat":
        curves = np.repeat(u, len(grid), axis=1)
    elif which == "zigzag":
        z = 5.0 * (grid.points[None, :] + u)
        curves = z - np.floor(z)
    else:
        raise ValueError("which must be 'flat' or 'zigzag'")
    return curves[0] if size is None else curves


def draw_model(model: str, rng: np.random.Generator, size: int, grid: Optional[Grid] = None,
               dim: int = 1) -> np.ndarray:
    """``size`` draws from a named model: curves as rows or points as rows."""
    if model in FUNCTIONAL_MODELS and grid is None:
        raise ValueError(f"model {model!r} needs a grid")
    if model == "brownian":
        return gen_brownian(grid, rng, size)
    if model == "fourier-fast":
        return gen_fourier(grid, rng, "fast", size)
    if model == "fourier-slow":
        return gen_fourier(grid, rng, "slow", size)
    if model == "shape-flat":
        return gen_shape(grid, rng, "flat", size)
    if model == "shape-zigzag":
        return gen_shape(grid, rng, "zigzag", size)
    if model == "uniform":
        return rng.random((size, dim))
    if model == "gauss":
        return rng.standard_normal((size, dim))
    raise ValueError(f"unknown model {model!r}")


# -- alternatives and outliers ------------------------------------------------------

@dataclass(frozen=True)
class Alternative:
    """Transformation applied to the second sample.

    ``shift``: x + a; ``sine-shift``: x + a sin(2 pi t); ``scale``: a x;
    ``loc-scale``: (x + sqrt(1 - 2a) x') / sqrt(2) + 4 sqrt(a) t (t - 1) with x'
    an independent copy; ``affine``: b x + a.
    """

    kind: str = "none"
    a: Optional[float] = None
    b: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ALTERNATIVES:
            raise ValueError(f"unknown alternative {self.kind!r}")
        if (self.a is None) != (self.kind == "none"):
            raise ValueError(f"alternative {self.kind!r} needs exactly the parameter a")
        if (self.b is None) != (self.kind != "affine"):
            raise ValueError("only the affine alternative takes b")
        if self.kind == "scale" and not self.a > 0:
            raise ValueError("scale alternative needs a > 0")
        if self.kind == "loc-scale" and not 0 < self.a <= 0.5:
            raise ValueError("loc-scale alternative needs a in (0, 1/2]")
        if self.kind == "affine" and not self.b > 0:
            raise ValueError("affine alternative needs b > 0")

    @property
    def needs_copy(self) -> bool:
        return self.kind == "loc-scale"

    def to_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}

    def label(self) -> str:
        """Text form accepted by :func:`parse_alternative`."""
        params = [f"{k}={v!r}" for k, v in (("a", self.a), ("b", self.b)) if v is not None]
        return self.kind + (":" + ",".join(params) if params else "")


def parse_alternative(text: str) -> Alternative:
    """Parse ``shift:a=0.2``, ``affine:a=0.15,b=0.8`` or ``none``."""
    kind, _, params = text.strip().partition(":")
    kw = {}
    for item in filter(None, (p.strip() for p in params.split(","))):
        key, eq, value = item.partition("=")
        if not eq or key not in ("a", "b"):
            raise ValueError(f"malformed alternative parameter {item!r}")
        kw[key] = float(value)
    return Alternative(kind, **kw)


def apply_alternative(data: np.ndarray, alt: Alternative, grid: Optional[Grid] = None,
                      independent_copy: Optional[np.ndarray] = None) -> np.ndarray:
    """Transform draws (rows) according to ``alt``."""
    data = np.asarray(data, dtype=float)
    k = alt.kind
    if k == "none":
        return data.copy()
    if k == "shift":
        return data + alt.a
    if k == "scale":
        return data * alt.a
    if k == "affine":
        return alt.b * data + alt.a
    if grid is None:
        raise DataError(f"alternative {k!r} is only defined for curves")
    t = grid.points
    if k == "sine-shift":
        return data + alt.a * np.sin(2.0 * np.pi * t)
    if independent_copy is None or np.shape(independent_copy) != data.shape:
        raise ValueError("loc-scale needs an independent copy of the same shape")
    return ((data + sqrt(1.0 - 2.0 * alt.a) * independent_copy) / sqrt(2.0)
            + 4.0 * sqrt(alt.a) * t * (t - 1.0))


@dataclass(frozen=True)
class Outliers:
    """Add ``offset`` to the first ``count`` draws of sample ``target`` (p, q or both)."""

    count: int = 1
    offset: float = 50.0
    target: str = "both"

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("outlier count must be >= 0")
        if self.target not in ("p", "q", "both"):
            raise ValueError("outlier target must be p, q or both")

    def apply(self, data: np.ndarray, which: str) -> np.ndarray:
        if self.target not in (which, "both"):
            return data
        out = np.array(data, dtype=float)
        out[: self.count] += self.offset
        return out

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


# -- scenarios ---------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to draw the two samples of every trial."""

    model: str
    m: int = 100
    n: int = 100
    alternative: Alternative = Alternative()
    model_q: Optional[str] = None
    outliers: Optional[Outliers] = None
    grid_size: int = 1001
    dim: int = 1
    trials: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.model_q == self.model:
            object.__setattr__(self, "model_q", None)
        for name in (self.model, self.model_q or self.model):
            if name not in FUNCTIONAL_MODELS + POINT_MODELS:
                raise ValueError(f"unknown model {name!r}")
        if (self.model in FUNCTIONAL_MODELS) != ((self.model_q or self.model) in FUNCTIONAL_MODELS):
            raise ValueError("both samples must be functional or both multivariate")
        if self.m < 1 or self.n < 1:
            raise ValueError("sample sizes must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.grid_size < 2 or self.dim < 1:
            raise ValueError("grid_size must be >= 2 and dim >= 1")
        if self.outliers is not None:
            for target, size in (("p", self.m), ("q", self.n)):
                if self.outliers.target in (target, "both") and self.outliers.count > size:
                    raise ValueError("more outliers than sample elements")

    @property
    def functional(self) -> bool:
        return self.model in FUNCTIONAL_MODELS

    @property
    def grid(self) -> Optional[Grid]:
        return Grid.uniform(self.grid_size) if self.functional else None

    def to_dict(self) -> dict:
        out = {"model": self.model, "model_q": self.model_q or self.model,
               "alternative": self.alternative.to_dict(), "m": self.m, "n": self.n}
        if self.outliers is not None:
            out["outliers"] = self.outliers.to_dict()
        if self.functional:
            out["grid_size"] = self.grid_size
        else:
            out["dim"] = self.dim
        out.update(trials=self.trials, seed=self.seed)
        return out


def generate_pair(spec: ScenarioSpec, trial: int, grid: Optional[Grid] = None):
    """The two samples of one trial."""
    grid = grid if grid is not None else spec.grid
    x = draw_model(spec.model, rng_for_trial(spec.seed, trial, "x"), spec.m, grid, spec.dim)
    model_q = spec.model_q or spec.model
    y = draw_model(model_q, rng_for_trial(spec.seed, trial, "y"), spec.n, grid, spec.dim)
    copy = None
    if spec.alternative.needs_copy:
        copy = draw_model(model_q, rng_for_trial(spec.seed, trial, "alt"), spec.n, grid, spec.dim)
    y = apply_alternative(y, spec.alternative, grid, copy)
    if spec.outliers is not None:
        x = spec.outliers.apply(x, "p")
        y = spec.outliers.apply(y, "q")
    if spec.functional:
        return FunctionalSample(grid, x), FunctionalSample(grid, y)
    return MultivariateSample(x), MultivariateSample(y)


def trial_depth(depth: DepthSpec, spec: ScenarioSpec, trial: int) -> DepthSpec:
    """Give randomized depths a fresh seed per trial (shared by both tuple entries)."""
    if not depth.randomized:
        return depth
    seed = int(rng_for_trial(spec.seed, trial, "depth").integers(0, 2 ** 63 - 1))
    return depth.with_seed(seed)


def _tuples_chunk(args) -> List[Tuple[float, float]]:
    spec, depth, mode, trials = args
    grid = spec.grid
    out = []
    for t in trials:
        p, q = generate_pair(spec, t, grid)
        tup = ls_tuple(p, q, trial_depth(depth, spec, t), mode)
        out.append((tup.ls_pq, tup.ls_qp))
    return out


def worker_count() -> int:
    """Workers for Monte Carlo runs: ``DEPTHGATE_THREADS`` if set, else the CPU count."""
    env = os.environ.get("DEPTHGATE_THREADS", "").strip()
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError("DEPTHGATE_THREADS must be a positive integer") from None
        if value < 1:
            raise ValueError("DEPTHGATE_THREADS must be a positive integer")
        return value
    return os.cpu_count() or 1


def run_tuple_scatter(spec: ScenarioSpec, depth: DepthSpec, trials: Optional[int] = None,
                      mode=RankMode.TIE_SPLIT, workers: Optional[int] = None) -> List[LSTuple]:
    """One LS tuple per trial, in trial order."""
    trials = spec.trials if trials is None else trials
    workers = worker_count() if workers is None else workers
    mode = RankMode(mode)
    indices = list(range(trials))
    if workers <= 1 or trials < 2:
        pairs = _tuples_chunk((spec, depth, mode, indices))
    else:
        chunks = [indices[i::workers] for i in range(workers)]
        chunks = [c for c in chunks if c]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(_tuples_chunk, [(spec, depth, mode, c) for c in chunks]))
        pairs = [None] * trials
        for c, part in zip(chunks, parts):
            for idx, pair in zip(c, part):
                pairs[idx] = pair
    return [LSTuple(a, b, spec.m, spec.n) for a, b in pairs]


@dataclass
class ExperimentResult:
    """Rejection counts per method, with the scenario echo.

    ``runtime_seconds`` is kept out of :meth:`to_dict` so serialised results are
    reproducible byte for byte.
    """

    scenario: ScenarioSpec
    depth: DepthSpec
    methods: List[TestConfig]
    rank_mode: str
    counts: Dict[str, int]
    tuples: Optional[List[LSTuple]] = None
    name: Optional[str] = None
    runtime_seconds: float = field(default=0.0, compare=False)

    @property
    def trials(self) -> int:
        return self.scenario.trials

    @property
    def rates(self) -> Dict[str, float]:
        return {k: c / self.trials for k, c in self.counts.items()}

    @property
    def half_widths(self) -> Dict[str, float]:
        return {k: 1.96 * sqrt(r * (1.0 - r) / self.trials) for k, r in self.rates.items()}

    def rate(self, method: str) -> float:
        return self.rates[method]

    def to_dict(self) -> dict:
        out = {
            "scenario": self.scenario.to_dict(),
            "depth": {"label": self.depth.label(), **self.depth.to_dict()},
            "rank_mode": self.rank_mode,
            "alpha": sorted({c.alpha for c in self.methods}),
            "methods": [c.name for c in self.methods],
            "trials": self.trials,
            "counts": dict(self.counts),
            "rates": self.rates,
            "half_widths": self.half_widths,
        }
        if self.name is not None:
            out = {"name": self.name, **out}
        if self.tuples is not None:
            out["tuples"] = [[t.ls_pq, t.ls_qp] for t in self.tuples]
        return out


def run_experiment(spec: ScenarioSpec, depth: DepthSpec, methods: Sequence[TestConfig],
                   mode=RankMode.TIE_SPLIT, keep_tuples: bool = False,
                   workers: Optional[int] = None, name: Optional[str] = None) -> ExperimentResult:
    """Run all trials and count rejections of every method on each trial's tuple."""
    if not methods:
        raise ValueError("give at least one method")
    start = time.perf_counter()
    tuples = run_tuple_scatter(spec, depth, spec.trials, mode, workers)
    counts = {c.name: 0 for c in methods}
    for t in tuples:
        for c in methods:
            counts[c.name] += decide(t, c).reject
    elapsed = time.perf_counter() - start
    log.info("%s: %d trials in %.2fs", name or spec.model, spec.trials, elapsed)
    return ExperimentResult(spec, depth, list(methods), RankMode(mode).value, counts,
                            tuples if keep_tuples else None, name, elapsed)


# -- registry ----------------------------------------------------------------------

TABLE_METHODS = ("proj-pq", "proj-qp", "difference", "maximum", "joint-cc", "joint-tp")


@dataclass(frozen=True)
class Scenario:
    spec: ScenarioSpec
    depth: str
    methods: Tuple[str, ...]
    description: str

    def depth_spec(self, seed: int = 0) -> DepthSpec:
        return parse_depth(self.depth, seed)

    def method_configs(self, alpha: float = 0.05) -> List[TestConfig]:
        return [parse_method(m, alpha) for m in self.methods]


def _c6(alt: Alternative, outliers: Optional[Outliers], text: str) -> Scenario:
    return Scenario(ScenarioSpec("brownian", alternative=alt, outliers=outliers),
                    "integrated-tukey", ("joint-tp",), text)


_SHIFT = Alternative("shift", 0.25)
SCENARIOS: Dict[str, Scenario] = {
    "thm2.1": Scenario(ScenarioSpec("uniform", alternative=Alternative("scale", 0.5)),
                       "tukey", TABLE_METHODS, "U(0,1) against U(0,1/2), univariate Tukey depth"),
    "fig2-null": Scenario(ScenarioSpec("uniform"), "tukey",
                          TABLE_METHODS + ("ellipsoid:w=0.5",),
                          "U(0,1) against U(0,1), univariate Tukey depth"),
    "table3-null": Scenario(ScenarioSpec("brownian"), "integrated-tukey", TABLE_METHODS,
                            "Brownian motion against Brownian motion"),
    "table3": Scenario(ScenarioSpec("brownian", alternative=Alternative("affine", 0.15, 0.8)),
                       "integrated-tukey", TABLE_METHODS, "B against 0.8 B + 0.15"),
    "table4": Scenario(ScenarioSpec("brownian", alternative=Alternative("shift", 0.2)),
                       "integrated-tukey", TABLE_METHODS, "B against B + a"),
    "table5": Scenario(ScenarioSpec("brownian", alternative=Alternative("affine", 0.15, 0.9)),
                       "integrated-tukey", TABLE_METHODS, "B against b B + 0.15"),
    "table6": Scenario(ScenarioSpec("gauss", dim=2, alternative=Alternative("shift", 0.4)),
                       "tukey", TABLE_METHODS, "N(0, I2) against N((c, c), I2), bivariate Tukey"),
    "table7": Scenario(ScenarioSpec("gauss", dim=2,
                                    alternative=Alternative("affine", 0.2, sqrt(1.2))),
                       "tukey", TABLE_METHODS, "N(0, I2) against N((0.2, 0.2), c I2); b = sqrt(c)"),
    "table8-model1": Scenario(ScenarioSpec("brownian"), "integrated-tukey", ("joint-tp",),
                              "Model 1 under the null"),
    "table8-model2": Scenario(ScenarioSpec("fourier-fast"), "integrated-tukey", ("joint-tp",),
                              "Model 2 under the null"),
    "table8-model3": Scenario(ScenarioSpec("fourier-slow"), "integrated-tukey", ("joint-tp",),
                              "Model 3 under the null"),
    "table8-anomaly": Scenario(ScenarioSpec("fourier-slow", m=50, n=50), "integrated-simplicial",
                               ("joint-tp",), "Model 3 null, integrated simplicial, m = n = 50"),
    "table9-shape": Scenario(ScenarioSpec("shape-flat", model_q="shape-zigzag"), "h-adaptive",
                             ("joint-tp",), "flat against zigzag curves"),
    "tableC6-a": _c6(Alternative(), None, "null, no outliers"),
    "tableC6-b": _c6(Alternative(), Outliers(1, 50.0, "both"), "null, one +50 outlier per sample"),
    "tableC6-c": _c6(Alternative(), Outliers(1, 50.0, "p"), "null, one +50 outlier in P"),
    "tableC6-d": _c6(_SHIFT, None, "B against B + 0.25"),
    "tableC6-e": _c6(_SHIFT, Outliers(1, 50.0, "both"), "shift, outlier in both samples"),
    "tableC6-f": _c6(_SHIFT, Outliers(1, 50.0, "p"), "shift, outlier in the lower sample"),
    "tableC6-g": _c6(_SHIFT, Outliers(1, 50.0, "q"), "shift, outlier in the higher sample"),
}
SCENARIOS["tableC6-outliers"] = SCENARIOS["tableC6-b"]


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; known: {', '.join(sorted(SCENARIOS))}") from None
