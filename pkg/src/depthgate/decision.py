"""Decision rules and p-values for LS tuples.

Every rule works on the tuple (a, b) = (LS(P_m, Q_n), LS(Q_n, P_m)) and the
scale ``s = sqrt(12 m n / (m + n))``:

* ``proj-pq`` / ``proj-qp``: reject iff ``s |a - 1/2|`` (resp. ``b``) exceeds z;
* ``difference``: reject iff ``|diff_std| > z``;
* ``maximum``: reject iff ``s^2 max(|a - 1/2|, |b - 1/2|)^2`` exceeds the chi2_1 quantile;
* ``ellipsoid``: weighted version of the maximum rule with weight ``w``;
* ``joint-tp`` / ``joint-cc``: reject on a large difference, or when the sum
  ``a + b`` falls below ``1 - 2 gamma`` (optionally also above ``1 + 2 gamma``).

Here z is the two-sided standard normal quantile at level alpha.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, isfinite, log, sqrt
from typing import Callable, Dict, Optional

from scipy.special import chdtrc, ndtr, ndtri

from .ls_core import scaled_stats
from .model import LSTuple, TestConfig, TestOutcome


def inv_norm(p: float) -> float:
    """Standard normal quantile.

    >>> round(inv_norm(0.975), 6)
    1.959964
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly inside (0, 1)")
    return float(ndtri(p))


def norm_sf2(x: float) -> float:
    """Two-sided normal tail ``2 (1 - Phi(|x|))``."""
    return min(1.0, 2.0 * float(ndtr(-abs(x))))


def inv_chi2_1(p: float) -> float:
    """Quantile of the chi-square law with one degree of freedom."""
    return inv_norm((1.0 + float(p)) / 2.0) ** 2


CHI2_95 = inv_chi2_1(0.95)


def _rate(m: int, n: int) -> float:
    if m < 1 or n < 1:
        raise ValueError("sample sizes must be positive")
    return (m + n) / (m * n)


def gamma1(m: int, n: int) -> float:
    """Conservative contraction ``sqrt(chi2_{1,0.95} (m + n) / (12 m n))``."""
    return sqrt(CHI2_95 * _rate(m, n) / 12.0)


# strategy registries for the convex-combination contraction
XI_RULES: Dict[str, Callable[[int, int], float]] = {
    "exp100": lambda m, n: exp(-100.0 * _rate(m, n)),
    "zero": lambda m, n: 0.0,
    # tends to 0 as the samples grow; weights delta_plus more at large samples
    "one-minus-exp100": lambda m, n: 1.0 - exp(-100.0 * _rate(m, n)),
}
DELTA_RULES: Dict[str, Callable[[int, int], float]] = {
    "lipschitz": lambda m, n: _rate(m, n) ** 0.75,
    "log-enlarged": lambda m, n: min(_rate(m, n) ** 0.75 * log(m * n / (m + n)), gamma1(m, n)),
}


def gamma2(m: int, n: int, xi_rule: str = "exp100", delta_rule: str = "lipschitz") -> float:
    """Convex combination ``(1 - xi) delta_plus + xi gamma1``.

    >>> round(gamma2(100, 100), 7)
    0.0568143
    """
    try:
        xi = XI_RULES[xi_rule](m, n)
        delta = DELTA_RULES[delta_rule](m, n)
    except KeyError as exc:
        raise ValueError(f"unknown contraction rule {exc.args[0]!r}") from None
    return (1.0 - xi) * delta + xi * gamma1(m, n)


@dataclass(frozen=True)
class Thresholds:
    """Critical values for one (m, n, config).

    ``bound_I`` bounds ``|a - b| / sqrt(2)``; rejecting beyond it is the same
    event as ``|diff_std| > z``.
    """

    z: float
    chi2: float
    chi2_95: float
    gamma: float
    bound_I: float


def thresholds(m: int, n: int, cfg: TestConfig) -> Thresholds:
    z = inv_norm(1.0 - cfg.alpha / 2.0)
    if cfg.method == "joint-cc":
        gamma = gamma2(m, n, cfg.xi_rule, cfg.delta_rule)
    else:
        gamma = gamma1(m, n)
    return Thresholds(z=z, chi2=z * z, chi2_95=CHI2_95, gamma=gamma,
                      bound_I=sqrt(_rate(m, n) / 6.0) * z)


def _evaluate(t: LSTuple, cfg: TestConfig):
    """Return (p_value, below_resolution, statistics)."""
    sc = scaled_stats(t)
    th = thresholds(t.m, t.n, cfg)
    a, b = t.ls_pq - 0.5, t.ls_qp - 0.5
    stats = {
        "ls_pq": t.ls_pq, "ls_qp": t.ls_qp,
        "diff_std": sc.diff_std, "sum_centered": sc.sum_centered, "scale": sc.scale,
        "z": th.z, "chi2": th.chi2, "chi2_95": th.chi2_95,
    }
    method = cfg.method
    below = False
    if method in ("proj-pq", "proj-qp"):
        stat = sc.scale * (a if method == "proj-pq" else b)
        p = norm_sf2(stat)
    elif method == "difference":
        stat = sc.diff_std
        p = norm_sf2(stat)
    elif method in ("maximum", "ellipsoid"):
        if method == "maximum":
            stat = sc.scale ** 2 * max(abs(a), abs(b)) ** 2
        else:
            w = cfg.weight
            stat = sc.scale ** 2 * (w * a * a + (1.0 - w) * b * b)
            stats["weight"] = w
        p = min(1.0, float(chdtrc(1, stat)))
    else:
        stat = sc.diff_std
        stats["gamma"] = th.gamma
        stats["bound_I"] = th.bound_I
        stats["sum_bound"] = sqrt(2.0) * (0.5 - th.gamma)
        low = sc.sum_centered < -2.0 * th.gamma
        high = cfg.symmetric_cutoff and sc.sum_centered > 2.0 * th.gamma
        if cfg.symmetric_cutoff:
            stats["sum_upper_bound"] = sqrt(2.0) * (0.5 + th.gamma)
        if low or high:
            p, below = 0.0, True
        else:
            p = norm_sf2(stat)
    stats["statistic"] = stat
    return p, below, stats


def p_value(t: LSTuple, cfg: TestConfig) -> Optional[float]:
    """Smallest level at which :func:`decide` rejects; ``None`` if below resolution."""
    p, below, _ = _evaluate(t, cfg)
    return None if below else p


def decide(t: LSTuple, cfg: TestConfig) -> TestOutcome:
    """Apply the decision rule ``cfg`` to the tuple ``t``.

    >>> from depthgate.model import TestConfig
    >>> decide(LSTuple(0.3, 0.3, 100, 100), TestConfig("joint-tp")).below_resolution
    True
    """
    p, below, stats = _evaluate(t, cfg)
    if not all(isfinite(v) for v in stats.values()):
        raise ValueError("non-finite test statistic")
    return TestOutcome(method=cfg.name, alpha=cfg.alpha, reject=below or p <= cfg.alpha,
                       p_value=p, below_resolution=below, statistics=stats)
