"""Versioned JSON scenario configuration.

A config is a plain JSON document. Loading validates it against a JSON schema
and then fills every omitted field from the defaults below, so the resolved
document written next to the results lists every parameter that was used.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

SCHEMA_VERSION = 1

ANALYSES = (
    "spectra",
    "trajectory",
    "error_growth",
    "floquet",
    "perturbation",
    "near_vacuum",
    "near_vacuum_sweep",
    "euler_density_wave",
    "burgers_demo",
)

_num = {"type": "number"}
_opt_num = {"type": ["number", "null"]}
_int = {"type": "integer"}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "name", "analysis"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "analysis": {"enum": list(ANALYSES)},
        "seed": {"type": "integer", "minimum": 0},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "family": {"enum": ["csbp", "circulant", "lgl"]},
                "p": {"type": "integer", "minimum": 1},
                "nodes": {"type": ["integer", "null"], "minimum": 2},
                "blocks": {"type": "integer", "minimum": 1},
                "domain": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
            },
        },
        "scheme": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "equation": {"enum": ["advection", "burgers"]},
                "flux": {"enum": [None, "central", "product", "geometric", "logarithmic"]},
                "alpha": _opt_num,
                "sat": {"enum": ["none", "conservative", "upwind"]},
                "sigma": _num,
                "dissipation": {
                    "type": ["object", "null"],
                    "additionalProperties": False,
                    "required": ["s", "eps"],
                    "properties": {
                        "s": {"type": "integer", "minimum": 1},
                        "eps": {"type": "number", "minimum": 0},
                        "variable": {"enum": ["conservative", "entropy"]},
                    },
                },
            },
        },
        "problem": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "coefficient": {"enum": ["constant", "sinusoid", "skewed_sinusoid"]},
                "coefficient_value": _num,
                "initial": {"enum": ["gaussian", "density_wave"]},
                "initial_params": {"type": "object", "additionalProperties": _num},
            },
        },
        "time": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "integrator": {"enum": ["rk4", "rk8"]},
                "t_end": {"type": "number", "exclusiveMinimum": 0},
                "dt": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "cfl": {"type": "number", "exclusiveMinimum": 0},
                "rtol": {"type": "number", "exclusiveMinimum": 0},
                "atol": {"type": "number", "exclusiveMinimum": 0},
                "sample_every": {"type": "integer", "minimum": 1},
                "n_samples": {"type": "integer", "minimum": 2},
            },
        },
        "perturbation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "source": {"enum": ["none", "random", "mode"]},
                "amplitude": {"type": "number", "minimum": 0},
            },
        },
        "options": {"type": "object"},
    },
}

DEFAULTS = {
    "description": "",
    "seed": 0,
    "grid": {"family": "circulant", "p": 2, "nodes": 39, "blocks": 1, "domain": [0.0, 1.0]},
    "scheme": {
        "equation": "advection",
        "flux": None,
        "alpha": 0.0,
        "sat": "none",
        "sigma": 0.0,
        "dissipation": None,
    },
    "problem": {
        "coefficient": "constant",
        "coefficient_value": 1.0,
        "initial": "gaussian",
        "initial_params": {},
    },
    "time": {
        "integrator": "rk4",
        "t_end": 1.0,
        "dt": None,
        "cfl": 0.1,
        "rtol": 1e-10,
        "atol": 1e-12,
        "sample_every": 1,
        "n_samples": 201,
    },
    "perturbation": {"source": "none", "amplitude": 0.0},
    "options": {},
}


class ScenarioConfigError(ValueError):
    """Invalid scenario config; ``keys`` names the offending entries."""

    def __init__(self, message: str, keys: list[str] | None = None):
        super().__init__(message)
        self.keys = keys or []


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "initial_params":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def validate(doc) -> None:
    if not isinstance(doc, dict):
        raise ScenarioConfigError("config must be a JSON object", ["<root>"])
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        keys = []
        lines = []
        for err in errors:
            path = "/".join(str(p) for p in err.absolute_path) or "<root>"
            if err.validator == "additionalProperties":
                extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
                path = ", ".join(f"{path}/{k}" if path != "<root>" else k for k in extra)
            elif err.validator == "required":
                missing = [k for k in err.validator_value if k not in err.instance]
                path = ", ".join(missing)
            keys.append(path)
            lines.append(f"{path}: {err.message}")
        raise ScenarioConfigError("invalid scenario config:\n  " + "\n  ".join(lines), keys)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    analysis: str
    grid: dict
    scheme: dict
    problem: dict
    time: dict
    perturbation: dict
    options: dict = field(default_factory=dict)
    seed: int = 0
    description: str = ""

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioConfig":
        validate(doc)
        full = _merge(DEFAULTS, doc)
        return cls(
            name=full["name"],
            analysis=full["analysis"],
            grid=full["grid"],
            scheme=full["scheme"],
            problem=full["problem"],
            time=full["time"],
            perturbation=full["perturbation"],
            options=full["options"],
            seed=full["seed"],
            description=full["description"],
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "description": self.description,
            "analysis": self.analysis,
            "seed": self.seed,
            "grid": copy.deepcopy(self.grid),
            "scheme": copy.deepcopy(self.scheme),
            "problem": copy.deepcopy(self.problem),
            "time": copy.deepcopy(self.time),
            "perturbation": copy.deepcopy(self.perturbation),
            "options": copy.deepcopy(self.options),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioConfigError(f"not valid JSON: {exc}", ["<root>"]) from exc
        return cls.from_dict(doc)

    def with_overrides(self, **changes) -> "ScenarioConfig":
        doc = _merge(self.to_dict(), changes)
        return ScenarioConfig.from_dict(doc)


def load_config(path: str | Path) -> ScenarioConfig:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise ScenarioConfigError(f"{path} is empty", ["<root>"])
    return ScenarioConfig.from_json(text)
