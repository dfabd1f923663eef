"""Built-in scenario presets."""

from __future__ import annotations

import copy
import math

from .config import SCHEMA_VERSION, ScenarioConfig

SKEWED = {"coefficient": "skewed_sinusoid", "initial": "gaussian"}
UNIT_GAUSSIAN = {"coefficient": "constant", "coefficient_value": 1.0, "initial": "gaussian"}
DENSITY_WAVE = {"coefficient": "constant", "coefficient_value": 1.0, "initial": "density_wave", "initial_params": {"amplitude": 0.98}}
VACUUM_GRID = {"family": "circulant", "p": 8, "nodes": 39, "blocks": 1, "domain": [-1.0, 1.0]}
CSBP1_40 = {"family": "csbp", "p": 1, "nodes": 40, "blocks": 1, "domain": [0.0, 1.0]}
CSBP1_100 = {"family": "csbp", "p": 1, "nodes": 100, "blocks": 1, "domain": [0.0, 1.0]}


def _preset(name, analysis, description, **sections) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "name": name, "analysis": analysis, "description": description}
    doc.update(sections)
    return doc


def _circulant(order, n):
    return {"family": "circulant", "p": order, "nodes": n, "blocks": 1, "domain": [0.0, 1.0]}


PRODUCT = {"alpha": 0.0, "flux": None}

_PRESETS = [
    _preset(
        "spectra-fig2a", "spectra", "product form, skewed sinusoid, one CSBP block, conservative SAT",
        grid=CSBP1_40, scheme={**PRODUCT, "sat": "conservative"}, problem=SKEWED,
    ),
    _preset(
        "spectra-fig2b", "spectra", "product form, skewed sinusoid, one CSBP block, upwind SAT",
        grid=CSBP1_40, scheme={**PRODUCT, "sat": "upwind", "sigma": 1.0}, problem=SKEWED,
    ),
    _preset(
        "spectra-fig2c", "spectra", "product form, skewed sinusoid, 2nd-order circulant",
        grid=_circulant(2, 39), scheme={**PRODUCT, "sat": "none"}, problem=SKEWED,
    ),
    _preset(
        "spectra-fig2d", "spectra", "2nd-order circulant with s=2 volume dissipation, eps=1/40",
        grid=_circulant(2, 39),
        scheme={**PRODUCT, "sat": "none", "dissipation": {"s": 2, "eps": 0.025, "variable": "conservative"}},
        problem=SKEWED,
    ),
    *[
        _preset(
            f"refine-n{n}", "spectra", f"8th-order circulant product form, N={n}",
            grid=_circulant(8, n), scheme={**PRODUCT, "sat": "none"}, problem=SKEWED,
        )
        for n in (39, 99, 399)
    ],
    _preset(
        "vce-exact", "trajectory", "central flux, sinusoid coefficient, Gaussian; three transit periods",
        grid={"family": "csbp", "p": 2, "nodes": 20, "blocks": 4, "domain": [0.0, 1.0]},
        scheme={"flux": "central", "sat": "conservative"},
        problem={"coefficient": "sinusoid", "initial": "gaussian"},
        time={"integrator": "rk8", "t_end": 3 * 2 / math.sqrt(5), "rtol": 1e-12, "atol": 1e-14, "n_samples": 121},
    ),
    _preset(
        "error-growth", "error_growth", "product form on the 8th-order circulant; error against the exact solution",
        grid=_circulant(8, 39), scheme={**PRODUCT, "sat": "none"}, problem=SKEWED,
        time={"integrator": "rk8", "t_end": 40.0, "rtol": 1e-10, "atol": 1e-12, "n_samples": 81},
    ),
    _preset(
        "floquet-lce", "floquet", "geometric flux, unit speed, Gaussian baseflow, one CSBP block",
        grid=CSBP1_100, scheme={"flux": "geometric", "sat": "conservative"}, problem=UNIT_GAUSSIAN,
    ),
    _preset(
        "perturbation-geometric", "perturbation", "100 periods of a random perturbation, geometric flux",
        grid=CSBP1_100, scheme={"flux": "geometric", "sat": "conservative"}, problem=UNIT_GAUSSIAN,
        perturbation={"source": "random", "amplitude": 1e-3}, time={"sample_every": 100}, seed=20240611,
    ),
    _preset(
        "perturbation-central", "perturbation", "100 periods of a random perturbation, central flux",
        grid=CSBP1_100, scheme={"flux": "central", "sat": "conservative"}, problem=UNIT_GAUSSIAN,
        perturbation={"source": "random", "amplitude": 1e-3}, time={"dt": 1 / 16000, "sample_every": 1600}, seed=20240611,
    ),
    _preset(
        "near-vacuum-lce", "near_vacuum", "logarithmic flux on a density wave with min u = 0.02, four variants",
        grid=VACUUM_GRID, scheme={"flux": "logarithmic", "sat": "none"}, problem=DENSITY_WAVE,
        time={"t_end": 20.0, "dt": 1e-4}, perturbation={"source": "random", "amplitude": 1e-4}, seed=7,
    ),
    _preset(
        "near-vacuum-sweep", "near_vacuum_sweep", "J_sym and spectral radius as the profile approaches vacuum",
        grid=VACUUM_GRID, scheme={"flux": "logarithmic", "sat": "none"}, problem=DENSITY_WAVE,
    ),
    _preset(
        "euler-density-wave", "euler_density_wave", "Euler density wave, EC flux, four robustness variants",
        grid=VACUUM_GRID, problem=DENSITY_WAVE,
        time={"t_end": 10.0, "dt": 1e-4}, perturbation={"source": "random", "amplitude": 1e-4}, seed=11,
    ),
    _preset(
        "burgers-demo", "burgers_demo", "Burgers split form alpha=2/3, four CSBP blocks, no interface dissipation",
        grid={"family": "csbp", "p": 2, "nodes": 20, "blocks": 4, "domain": [0.0, 1.0]},
        scheme={"equation": "burgers", "alpha": 2 / 3, "sat": "conservative"},
        problem={"initial": "density_wave", "initial_params": {"amplitude": 0.5}},
        time={"t_end": 0.25, "sample_every": 10},
    ),
    _preset(
        "burgers-upwind", "burgers_demo", "Burgers split form alpha=2/3 with the upwind interface SAT",
        grid={"family": "csbp", "p": 2, "nodes": 20, "blocks": 4, "domain": [0.0, 1.0]},
        scheme={"equation": "burgers", "alpha": 2 / 3, "sat": "upwind", "sigma": 1.0},
        problem={"initial": "density_wave", "initial_params": {"amplitude": 0.5}},
        time={"t_end": 0.25, "sample_every": 10},
    ),
]

PRESETS: dict[str, dict] = {d["name"]: d for d in _PRESETS}


def catalog() -> list[str]:
    return list(PRESETS)


def preset(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise KeyError(f"unknown scenario {name!r}; known: {', '.join(PRESETS)}")
    return ScenarioConfig.from_dict(copy.deepcopy(PRESETS[name]))
