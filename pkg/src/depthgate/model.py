"""Shared data types: grids, samples, depth specifications and test results."""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Union

import numpy as np


class DepthGateError(Exception):
    """Base class for all errors raised by this package."""


class DataError(DepthGateError):
    """Invalid or incompatible input data."""


class ComputationError(DepthGateError):
    """A computation could not be carried out (size caps, unsupported settings)."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing time coordinates in [0, 1]."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise DataError("a grid needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise DataError("grid points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise DataError("grid points must be strictly increasing")
        if pts[0] < 0 or pts[-1] > 1:
            raise DataError("grid points must lie in [0, 1]")
        object.__setattr__(self, "points", _frozen(pts))

    @classmethod
    def uniform(cls, size: int = 1001) -> "Grid":
        return cls(np.linspace(0.0, 1.0, size))

    def __len__(self) -> int:
        return self.points.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(
            np.array_equal(self.points, other.points))

    def __hash__(self) -> int:
        return hash(self.points.tobytes())

    def is_equidistant(self, rtol: float = 1e-9) -> bool:
        steps = np.diff(self.points)
        return bool(np.allclose(steps, steps[0], rtol=rtol, atol=0.0))


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """Curves observed on a shared grid; ``masks`` marks observed entries."""

    grid: Grid
    curves: np.ndarray
    masks: Optional[np.ndarray] = None

    def __post_init__(self):
        curves = np.asarray(self.curves, dtype=float)
        if curves.ndim == 1:
            curves = curves[None, :]
        if curves.ndim != 2 or curves.shape[0] < 1:
            raise DataError("a functional sample needs at least one curve")
        if curves.shape[1] != len(self.grid):
            raise DataError(
                f"curve length {curves.shape[1]} does not match grid size {len(self.grid)}")
        masks = self.masks
        if masks is not None:
            masks = np.asarray(masks, dtype=bool)
            if masks.shape != curves.shape:
                raise DataError("mask shape must match curve shape")
            if not np.all(masks.any(axis=1)):
                raise DataError("every curve needs at least one observed point")
            if not np.all(np.isfinite(curves[masks])):
                raise DataError("observed curve values must be finite")
            if masks.all():
                masks = None
            else:
                # unobserved slots carry no information; store zeros for hashing stability
                curves = np.where(masks, curves, 0.0)
        elif not np.all(np.isfinite(curves)):
            raise DataError("curve values must be finite")
        object.__setattr__(self, "curves", _frozen(curves))
        object.__setattr__(self, "masks", None if masks is None else _frozen(masks))

    @property
    def size(self) -> int:
        return self.curves.shape[0]

    def __len__(self) -> int:
        return self.size

    @property
    def observed(self) -> np.ndarray:
        """Boolean observation matrix (all True when no masks are stored)."""
        if self.masks is None:
            return np.ones(self.curves.shape, dtype=bool)
        return self.masks

    def fingerprint(self) -> bytes:
        h = hashlib.blake2b(digest_size=16)
        h.update(self.grid.points.tobytes())
        h.update(self.curves.tobytes())
        if self.masks is not None:
            h.update(self.masks.tobytes())
        return h.digest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, FunctionalSample):
            return NotImplemented
        if self.grid != other.grid or self.curves.shape != other.curves.shape:
            return False
        if not np.array_equal(self.observed, other.observed):
            return False
        return bool(np.array_equal(self.curves[self.observed], other.curves[other.observed]))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MultivariateSample:
    """Points in R^d, stored as an (m, d) array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DataError("a multivariate sample needs at least one point of dimension >= 1")
        if not np.all(np.isfinite(pts)):
            raise DataError("sample points must be finite")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.size

    def fingerprint(self) -> bytes:
        h = hashlib.blake2b(digest_size=16)
        h.update(np.asarray(self.points.shape, dtype=np.int64).tobytes())
        h.update(self.points.tobytes())
        return h.digest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultivariateSample):
            return NotImplemented
        return bool(np.array_equal(self.points, other.points))

    __hash__ = None


Sample = Union[FunctionalSample, MultivariateSample]


def as_sample(data: Any) -> Sample:
    """Coerce arrays to a :class:`MultivariateSample`; samples pass through."""
    if isinstance(data, (FunctionalSample, MultivariateSample)):
        return data
    return MultivariateSample(np.asarray(data, dtype=float))


def validate_pair(a: Sample, b: Sample):
    """Check that two samples can be compared and return them unchanged.

    Raises
    ------
    DataError
        On mixed sample kinds, grid mismatch or dimension mismatch.
    """
    a, b = as_sample(a), as_sample(b)
    if type(a) is not type(b):
        raise DataError("cannot compare a functional sample with a multivariate sample")
    if isinstance(a, FunctionalSample):
        if a.grid != b.grid:
            raise DataError("grid mismatch: samples must share identical grids")
    elif a.dim != b.dim:
        raise DataError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return a, b


# -- depth specification -----------------------------------------------------

FUNCTIONAL_FAMILIES = frozenset({
    "integrated", "h-depth", "spatial", "lens-metric",
    "random-tukey", "random-projection",
})
MULTIVARIATE_FAMILIES = frozenset({
    "tukey", "simplicial", "spherical", "lens", "band", "band-sum",
    "random-tukey", "random-projection", "h-depth", "spatial",
})
INTEGRATED_INNER = ("tukey", "simplicial", "simplicial-modified")
RANDOMIZED = frozenset({"random-tukey", "random-projection"})
KERNELS = ("gaussian",)
DEFAULT_JITTER_SD = 1e-8  # variance 1e-16


@dataclass(frozen=True)
class DepthSpec:
    """Closed description of a depth function and its parameters.

    ``family`` selects the depth; ``inner`` the pointwise depth of an integrated
    depth; ``bandwidth`` a fixed h-depth bandwidth, ``quantile`` an adaptive
    one; ``k`` the number of projections or bands.
    """

    family: str
    inner: Optional[str] = None
    kernel: Optional[str] = None
    bandwidth: Optional[float] = None
    quantile: Optional[float] = None
    floor: Optional[float] = None
    k: Optional[int] = None
    jitter_sd: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        fam = self.family
        if fam not in FUNCTIONAL_FAMILIES | MULTIVARIATE_FAMILIES:
            raise ValueError(f"unknown depth family {fam!r}")

        def need(name, cond):
            if (getattr(self, name) is not None) != cond:
                state = "requires" if cond else "does not take"
                raise ValueError(f"depth family {fam!r} {state} parameter {name!r}")

        need("inner", fam == "integrated")
        if fam == "integrated" and self.inner not in INTEGRATED_INNER:
            raise ValueError(f"integrated depth inner must be one of {INTEGRATED_INNER}")
        need("jitter_sd", fam == "integrated" and self.inner == "simplicial-modified")
        if self.jitter_sd is not None and not self.jitter_sd >= 0:
            raise ValueError("jitter_sd must be >= 0")

        need("kernel", fam == "h-depth")
        if fam == "h-depth":
            if self.kernel not in KERNELS:
                raise ValueError(f"kernel must be one of {KERNELS}")
            if (self.bandwidth is None) == (self.quantile is None):
                raise ValueError("h-depth needs exactly one of bandwidth or quantile")
            if self.bandwidth is not None and not self.bandwidth > 0:
                raise ValueError("bandwidth must be > 0")
            if self.quantile is not None:
                if not 0 < self.quantile < 1:
                    raise ValueError("quantile must lie in (0, 1)")
                if self.floor is None or not self.floor > 0:
                    raise ValueError("adaptive bandwidth needs a floor > 0")
            else:
                need("floor", False)
        else:
            need("bandwidth", False)
            need("quantile", False)
            need("floor", False)

        need("k", fam in RANDOMIZED or fam in ("band", "band-sum"))
        if fam in RANDOMIZED and self.k < 1:
            raise ValueError("projection count must be >= 1")
        if fam in ("band", "band-sum") and self.k < 2:
            raise ValueError("band order must be >= 2")
        need("seed", fam in RANDOMIZED or self.inner == "simplicial-modified")

    # convenience constructors
    @classmethod
    def integrated(cls, inner: str = "tukey", seed: int = 0,
                   jitter_sd: float = DEFAULT_JITTER_SD) -> "DepthSpec":
        if inner == "simplicial-modified":
            return cls("integrated", inner=inner, jitter_sd=jitter_sd, seed=seed)
        return cls("integrated", inner=inner)

    @classmethod
    def h_depth(cls, bandwidth: Optional[float] = None, quantile: Optional[float] = None,
                floor: float = 1e-12) -> "DepthSpec":
        if quantile is not None:
            return cls("h-depth", kernel="gaussian", quantile=quantile, floor=floor)
        return cls("h-depth", kernel="gaussian", bandwidth=bandwidth)

    @property
    def randomized(self) -> bool:
        return self.seed is not None

    @property
    def supports_masks(self) -> bool:
        return self.family in ("integrated", "h-depth", "lens-metric")

    def with_seed(self, seed: int) -> "DepthSpec":
        if self.seed is None:
            return self
        return dataclasses.replace(self, seed=int(seed))

    def label(self) -> str:
        """Compact text form accepted by :func:`parse_depth`."""
        fam = self.family
        if fam == "integrated":
            out = f"integrated-{self.inner}"
            if self.inner == "simplicial-modified" and self.jitter_sd != DEFAULT_JITTER_SD:
                out += f":sd={self.jitter_sd!r}"
            return out
        if fam == "h-depth":
            if self.quantile is not None:
                out = f"h-adaptive:q={self.quantile!r}"
                if self.floor != 1e-12:
                    out += f",floor={self.floor!r}"
                return out
            return f"h-depth:h={self.bandwidth!r}"
        if fam in RANDOMIZED or fam == "band":
            return f"{fam}:k={self.k}"
        if fam == "band-sum":
            return f"band-sum:K={self.k}"
        return fam

    def to_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


_ALIASES = {
    "integrated-tukey": dict(family="integrated", inner="tukey"),
    "integrated-simplicial": dict(family="integrated", inner="simplicial"),
    "integrated-simplicial-modified": dict(family="integrated", inner="simplicial-modified",
                                           jitter_sd=DEFAULT_JITTER_SD),
    "h-depth": dict(family="h-depth", kernel="gaussian", bandwidth=1.0),
    "h-const": dict(family="h-depth", kernel="gaussian", bandwidth=1.0),
    "h-adaptive": dict(family="h-depth", kernel="gaussian", quantile=0.15, floor=1e-12),
    "random-tukey": dict(family="random-tukey", k=2),
    "random-projection": dict(family="random-projection", k=10),
    "band": dict(family="band", k=2),
    "band-sum": dict(family="band-sum", k=3),
}


def parse_depth(text: str, seed: int = 0) -> DepthSpec:
    """Parse ``name[:key=value,...]`` into a :class:`DepthSpec`.

    >>> parse_depth("h-adaptive:q=0.2").quantile
    0.2
    >>> parse_depth("random-tukey:k=5", seed=3).k
    5
    """
    name, _, params = text.strip().partition(":")
    fields: dict[str, Any] = dict(_ALIASES.get(name, {"family": name}))
    for item in filter(None, (p.strip() for p in params.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ValueError(f"malformed depth parameter {item!r}")
        key = {"h": "bandwidth", "q": "quantile", "K": "k", "sd": "jitter_sd"}.get(key, key)
        if key == "bandwidth":
            fields.pop("quantile", None)
            fields.pop("floor", None)
        if key == "quantile":
            fields.pop("bandwidth", None)
            fields.setdefault("floor", 1e-12)
        fields[key] = int(value) if key in ("k", "seed") else float(value)
    if fields.get("family") in RANDOMIZED or fields.get("inner") == "simplicial-modified":
        fields.setdefault("seed", seed)
    return DepthSpec(**fields)


@dataclass(frozen=True)
class DepthVector:
    values: np.ndarray
    spec: DepthSpec
    reference_id: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)) or np.any(v < 0):
            raise DataError("depth values must be a finite nonnegative vector")
        object.__setattr__(self, "values", _frozen(v))

    def __len__(self) -> int:
        return self.values.size


# -- LS tuple and tests ------------------------------------------------------

@dataclass(frozen=True)
class LSTuple:
    """The pair (LS(P_m, Q_n), LS(Q_n, P_m)) with the sample sizes."""

    ls_pq: float
    ls_qp: float
    m: int
    n: int

    def __post_init__(self):
        for v in (self.ls_pq, self.ls_qp):
            if not 0.0 <= v <= 1.0:
                raise ValueError("LS values must lie in [0, 1]")
        if self.m < 1 or self.n < 1:
            raise ValueError("sample sizes must be positive")

    def swapped(self) -> "LSTuple":
        return LSTuple(self.ls_qp, self.ls_pq, self.n, self.m)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


METHODS = ("proj-pq", "proj-qp", "difference", "maximum", "ellipsoid", "joint-tp", "joint-cc")


@dataclass(frozen=True)
class TestConfig:
    """Decision rule and level.

    ``weight`` is the ellipsoid weight w; ``xi_rule``/``delta_rule`` name the
    strategies building the Joint-CC contraction (see :mod:`depthgate.decision`).
    """

    __test__ = False  # not a pytest class

    method: str
    alpha: float = 0.05
    weight: Optional[float] = None
    symmetric_cutoff: bool = False
    xi_rule: Optional[str] = None
    delta_rule: Optional[str] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.method == "ellipsoid":
            if self.weight is None or not 0 < self.weight < 1:
                raise ValueError("ellipsoid weight must lie strictly inside (0, 1)")
        elif self.weight is not None:
            raise ValueError("only the ellipsoid method takes a weight")
        if self.method == "joint-cc":
            object.__setattr__(self, "xi_rule", self.xi_rule or "exp100")
            object.__setattr__(self, "delta_rule", self.delta_rule or "lipschitz")
        elif self.xi_rule is not None or self.delta_rule is not None:
            raise ValueError("xi/delta rules only apply to joint-cc")
        if self.symmetric_cutoff and self.method not in ("joint-tp", "joint-cc"):
            raise ValueError("symmetric cutoff only applies to the joint tests")

    @property
    def name(self) -> str:
        """Text form accepted by :func:`parse_method`."""
        params = []
        if self.method == "ellipsoid":
            params.append(f"w={self.weight!r}")
        if self.method == "joint-cc" and (self.xi_rule, self.delta_rule) != ("exp100", "lipschitz"):
            params += [f"xi={self.xi_rule}", f"delta={self.delta_rule}"]
        out = self.method + (":" + ",".join(params) if params else "")
        return out + ("+sym" if self.symmetric_cutoff else "")

    def to_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v not in (None, False)}


def parse_method(text: str, alpha: float = 0.05) -> TestConfig:
    """Parse ``joint-tp``, ``ellipsoid:w=0.5``, ``joint-cc+sym`` and the like."""
    text = text.strip()
    sym = text.endswith("+sym")
    if sym:
        text = text[:-4]
    name, _, params = text.partition(":")
    kw: dict[str, Any] = {}
    for item in filter(None, (p.strip() for p in params.split(","))):
        key, _, value = item.partition("=")
        if key == "w":
            kw["weight"] = float(value)
        elif key in ("xi", "delta"):
            kw[key + "_rule"] = value
        else:
            raise ValueError(f"unknown method parameter {key!r}")
    return TestConfig(name, alpha=alpha, symmetric_cutoff=sym, **kw)


@dataclass(frozen=True)
class TestOutcome:
    """Result of one decision rule applied to one LS tuple.

    ``p_value`` is 0 with ``below_resolution`` set when a joint test rejects
    through the sum condition, which does not vary with the level.
    """

    __test__ = False

    method: str
    alpha: float
    reject: bool
    p_value: float
    below_resolution: bool = False
    statistics: Mapping[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["statistics"] = dict(self.statistics)
        return out
