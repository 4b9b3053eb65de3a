"""Depth-based two-sample LS-tuple tests."""

__version__ = "0.1.0"

from .decision import decide, gamma1, gamma2
from .depth import depth_vector, evaluate_depth, pair_depths
from .ls_core import RankMode, ls_statistic, ls_tuple, scaled_stats
from .model import (ComputationError, DataError, DepthGateError, DepthSpec, FunctionalSample, Grid,
                    LSTuple, MultivariateSample, TestConfig, TestOutcome, parse_depth, parse_method)

__all__ = [
    "ComputationError", "DataError", "DepthGateError", "DepthSpec", "FunctionalSample", "Grid",
    "LSTuple", "MultivariateSample", "RankMode", "TestConfig", "TestOutcome", "decide",
    "depth_vector", "evaluate_depth", "gamma1", "gamma2", "ls_statistic", "ls_tuple",
    "pair_depths", "parse_depth", "parse_method", "scaled_stats",
]
