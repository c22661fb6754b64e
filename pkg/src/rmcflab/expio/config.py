"""Experiment configuration: one JSON document per run, validated against a schema."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import jsonschema

KINDS = ("energy", "flow", "orbit", "edge", "expander", "simplex", "sweep", "check")

_POS = {"type": "number", "exclusiveMinimum": 0}

SHAPE_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["ball", "ellipsoid", "cylinder", "halfspace", "translated",
                          "template", "snapshot"]},
        "radius": _POS,
        "dim": {"type": "integer", "minimum": 2},
        "center": {"type": "array", "items": {"type": "number"}},
        "alpha": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 2},
        "flat": {"type": "integer", "minimum": 0},
        "cross": {"$ref": "#/$defs/shape"},
        "shape": {"$ref": "#/$defs/shape"},
        "normal": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "offset": {"oneOf": [{"type": "number"},
                             {"type": "array", "items": {"type": "number"}}]},
        "k": {"type": ["integer", "null"], "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "path": {"type": "string"},
    },
    "additionalProperties": False,
}

SOLVER_SCHEMA = {
    "type": "object",
    "properties": {
        "resolution": _POS,
        "remesh": {"enum": ["relative", "fixed"]},
        "cfl": _POS,
        "dt": _POS,
        "horizon": _POS,
        "tau_end": _POS,
        "mode": {"enum": ["MCF", "RMCF"]},
        "normalize": {"type": "boolean"},
        "observer_stride": {"type": "integer", "minimum": 1},
        "max_steps": {"type": "integer", "minimum": 1},
        "sample_dtau": _POS,
        "tol": _POS,
        "energy_tol": _POS,
        "mass_slack": _POS,
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": {"shape": SHAPE_SCHEMA},
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "shape": {"$ref": "#/$defs/shape"},
        "solver": SOLVER_SCHEMA,
        "params": {"type": "object"},
        "output": {
            "type": "object",
            "properties": {"dir": {"type": "string"}, "csv": {"type": "string"},
                           "svg": {"type": "string"}},
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "runs": {"type": "array", "items": {"type": "object"}},
        "workers": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

# required params per kind
_PARAMS = {
    "edge": {"required": ["edge", "alpha"],
             "properties": {"edge": {"type": "array", "items": {"type": "integer"},
                                     "minItems": 2, "maxItems": 2},
                            "alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                            "n": {"enum": [2, 3]}, "tau_max": _POS}},
    "expander": {"required": ["a", "n"],
                 "properties": {"a": _POS, "n": {"type": "integer", "minimum": 1},
                                "eta_max": _POS, "rtol": _POS, "atol": _POS}},
    "simplex": {"required": ["a", "taus"],
                "properties": {"a": {"type": "array", "items": {"type": "number", "minimum": 0},
                                     "minItems": 1},
                               "taus": {"type": "array", "items": {"type": "number", "minimum": 0}}}},
    "check": {"required": ["trace"], "properties": {"trace": {"type": "string"}}},
    "energy": {"properties": {"probe_n": {"type": "integer", "minimum": 1},
                              "samples": {"type": "integer", "minimum": 1}}},
}
_NEEDS_SHAPE = ("flow", "orbit")


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class ExperimentConfig:
    kind: str
    shape: dict | None = None
    solver: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int = 0
    runs: list = field(default_factory=list)
    workers: int | None = None

    def to_dict(self):
        d = asdict(self)
        return {k: v for k, v in d.items() if v not in (None, {}, [])}


def _path(err):
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def _sub(err):
    p = _path(err)
    return "" if p == "<root>" else "/" + p


def validate(doc) -> list:
    """All schema violations of a config document, as ``"key/path: message"`` strings."""
    errors = [f"{_path(e)}: {e.message}"
              for e in sorted(jsonschema.Draft202012Validator(CONFIG_SCHEMA).iter_errors(doc),
                              key=lambda e: list(map(str, e.absolute_path)))]
    if errors or not isinstance(doc, dict):
        return errors
    kind = doc["kind"]
    if kind in _NEEDS_SHAPE and "shape" not in doc:
        errors.append(f"shape: required for kind {kind!r}")
    if kind in _PARAMS:
        sub = dict(_PARAMS[kind], type="object")
        errors += [f"params{_sub(e)}: {e.message}" for e in jsonschema.Draft202012Validator(sub).iter_errors(doc.get("params", {}))]
    if kind == "sweep":
        if not doc.get("runs"):
            errors.append("runs: a sweep needs at least one run")
        for i, run in enumerate(doc.get("runs", [])):
            if run.get("kind") == "sweep":
                errors.append(f"runs/{i}/kind: sweeps cannot be nested")
            errors += [f"runs/{i}/{e}" for e in validate(run)]
    return errors


def parse_config(text: str, source="<string>") -> ExperimentConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError([f"{source}:{err.lineno}:{err.colno}: {err.msg}"]) from None
    errors = validate(doc)
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(**doc)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


def save_config(config: ExperimentConfig, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
