"""Run configuration for Monte Carlo experiments, validated against a JSON schema."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional

import jsonschema

from .ls_core import RankMode
from .model import DataError, DepthSpec, TestConfig, parse_depth, parse_method
from .simulate import (FUNCTIONAL_MODELS, POINT_MODELS, Outliers, ScenarioSpec, get_scenario,
                       parse_alternative)

RUN_CONFIG_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "RunConfig",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "scenario": {"type": "string"},
        "model": {"enum": list(FUNCTIONAL_MODELS + POINT_MODELS)},
        "model_q": {"enum": list(FUNCTIONAL_MODELS + POINT_MODELS)},
        "alternative": {"type": "string"},
        "outliers": {
            "type": ["object", "null"],
            "additionalProperties": False,
            "required": ["count", "offset", "target"],
            "properties": {
                "count": {"type": "integer", "minimum": 0},
                "offset": {"type": "number"},
                "target": {"enum": ["p", "q", "both"]},
            },
        },
        "m": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "grid_size": {"type": "integer", "minimum": 2},
        "dim": {"type": "integer", "minimum": 1},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "depth": {"type": "string"},
        "methods": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "rank_mode": {"enum": [m.value for m in RankMode]},
        "keep_tuples": {"type": "boolean"},
    },
    "anyOf": [{"required": ["scenario"]}, {"required": ["model"]}],
}


def validate_config(doc: Mapping[str, Any]) -> None:
    try:
        jsonschema.validate(dict(doc), RUN_CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "config"
        raise ValueError(f"invalid run configuration at {where}: {exc.message}") from None


def load_config(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    validate_config(doc)
    return doc


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved experiment: scenario, depth, methods and rank mode."""

    spec: ScenarioSpec
    depth: DepthSpec
    methods: List[TestConfig]
    rank_mode: RankMode = RankMode.TIE_SPLIT
    keep_tuples: bool = False
    name: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """A document that validates against the schema and reproduces the run."""
        s = self.spec
        out: Dict[str, Any] = {}
        if self.name is not None:
            out["scenario"] = self.name
        out.update(model=s.model, model_q=s.model_q or s.model,
                   alternative=s.alternative.label(),
                   outliers=s.outliers.to_dict() if s.outliers else None,
                   m=s.m, n=s.n)
        if s.functional:
            out["grid_size"] = s.grid_size
        else:
            out["dim"] = s.dim
        out.update(trials=s.trials, seed=s.seed, depth=self.depth.label(),
                   methods=[c.name for c in self.methods],
                   alpha=self.methods[0].alpha, rank_mode=self.rank_mode.value,
                   keep_tuples=self.keep_tuples)
        return out


def resolve(doc: Mapping[str, Any]) -> RunConfig:
    """Build a :class:`RunConfig` from a (schema-valid) document.

    Fields present in ``doc`` override the defaults of the named scenario.
    """
    validate_config(doc)
    name = doc.get("scenario")
    if name is not None:
        base = get_scenario(name)
        spec, depth_text, methods = base.spec, base.depth, list(base.methods)
    else:
        spec, depth_text, methods = ScenarioSpec(doc["model"]), "integrated-tukey", ["joint-tp"]
        if doc["model"] in POINT_MODELS:
            depth_text = "tukey"
    changes: Dict[str, Any] = {}
    for key in ("model", "model_q", "m", "n", "grid_size", "dim", "trials", "seed"):
        if key in doc:
            changes[key] = doc[key]
    if "alternative" in doc:
        changes["alternative"] = parse_alternative(doc["alternative"])
    if "outliers" in doc:
        o = doc["outliers"]
        changes["outliers"] = None if o is None else Outliers(o["count"], float(o["offset"]), o["target"])
    spec = dataclasses.replace(spec, **changes)
    depth = parse_depth(doc.get("depth", depth_text), seed=spec.seed)
    alpha = float(doc.get("alpha", 0.05))
    configs = [parse_method(m, alpha) for m in doc.get("methods", methods)]
    return RunConfig(spec, depth, configs, RankMode(doc.get("rank_mode", RankMode.TIE_SPLIT.value)),
                     bool(doc.get("keep_tuples", False)), name)
