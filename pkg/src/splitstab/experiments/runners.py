"""Analyses behind the scenario presets.

Each runner takes a resolved :class:`ScenarioConfig` and returns a
:class:`RunResult`: named tables (written as CSV), JSON documents, plot
requests and, if the solver failed, a crash record.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import euler1d, problems
from ..floquet import floquet_diagnostics, monodromy
from ..jacobian import jac_fd, jacobian_for
from ..operators import Grid, assemble_grid, build_operator
from ..semidisc import Dissipation, SchemeConfig, Semidiscretization
from ..spectral import eig, lambda_max_sym, local_growth, project_unstable, spectral_radius
from ..timeint import (
    CrashRecord,
    mode_perturbation,
    perturbation_experiment,
    positivity_filter,
    random_perturbation,
    rk4,
    rk8_adaptive,
)
from .config import ScenarioConfig, ScenarioConfigError
from .svg import PlotSpec

TRAJECTORY_COLUMNS = ["time", "dt", "energy_H", "energy_aH", "entropy", "min_u", "err_H", "err_inf", "pert_H", "pert_inf"]


@dataclass
class RunResult:
    tables: dict[str, dict[str, np.ndarray]] = field(default_factory=dict)
    documents: dict[str, object] = field(default_factory=dict)
    plots: list[tuple[str, PlotSpec]] = field(default_factory=list)
    crash: CrashRecord | None = None
    summary: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# building blocks


def build_grid(cfg: ScenarioConfig) -> Grid:
    g = cfg.grid
    op = build_operator(g["family"], g["p"], g["nodes"])
    return assemble_grid(tuple(g["domain"]), g["blocks"], op)


def build_scheme(cfg: ScenarioConfig) -> SchemeConfig:
    s = cfg.scheme
    diss = s["dissipation"]
    dis = None if diss is None else Dissipation(diss["s"], diss["eps"], diss.get("variable", "conservative"))
    flux = s["flux"]
    alpha = None if flux is not None and s["equation"] == "advection" else s["alpha"]
    return SchemeConfig(s["equation"], flux, alpha, s["sat"], s["sigma"], dis)


def coefficient(cfg: ScenarioConfig) -> Callable[[np.ndarray], np.ndarray]:
    p = cfg.problem
    name = p["coefficient"]
    if name == "constant":
        return problems.constant(p["coefficient_value"])
    if name == "skewed_sinusoid":
        x0, x1 = cfg.grid["domain"]
        return lambda x: problems.skewed_sinusoid(x, 5, x0, x1)
    return problems.COEFFICIENTS[name]


def initial_condition(cfg: ScenarioConfig) -> Callable[[np.ndarray], np.ndarray]:
    p = cfg.problem
    fn = problems.INITIAL_CONDITIONS[p["initial"]]
    params = dict(p["initial_params"])
    return lambda x: fn(x, **params)


def exact_solution(cfg: ScenarioConfig):
    a = coefficient(cfg)
    u0 = initial_condition(cfg)
    x0, x1 = cfg.grid["domain"]
    if cfg.problem["coefficient"] == "constant":
        return problems.shifted_solution(u0, cfg.problem["coefficient_value"], x0, x1)
    cmap = problems.CharacteristicMap(a, x0, x1)
    return lambda x, t: cmap.solution(u0, x, t)


def default_dt(cfg: ScenarioConfig, grid: Grid, a: np.ndarray, u0: np.ndarray) -> float:
    if cfg.time["dt"] is not None:
        return float(cfg.time["dt"])
    speed = np.max(np.abs(u0)) if cfg.scheme["equation"] == "burgers" else np.max(np.abs(a))
    return cfg.time["cfl"] * grid.h_min / speed


def _options(cfg: ScenarioConfig, defaults: dict) -> dict:
    unknown = sorted(set(cfg.options) - set(defaults))
    if unknown:
        raise ScenarioConfigError(f"unknown options for {cfg.analysis}: {unknown}", [f"options/{k}" for k in unknown])
    out = copy.deepcopy(defaults)
    out.update(cfg.options)
    return out


OPTION_DEFAULTS: dict[str, dict] = {
    "spectra": {"weighting": "hnorm"},
    "trajectory": {},
    "error_growth": {"threshold": 0.0},
    "floquet": {"k_start": 256, "tol": 1e-8, "k_max": 65536},
    "perturbation": {"periods": 100},
    "near_vacuum": {
        "variants": ["plain", "conservative_dissipation", "entropy_dissipation", "filter"],
        "diss_s": 4,
        "diss_eps": 1e-3,
        "filter_floor": 5e-4,
        "filter_cut": 5e-2,
        "telemetry_every": 5000,
        "unprotected_horizon": 60.0,
    },
    "near_vacuum_sweep": {"shifts": [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4], "amplitude": 1.0},
    "euler_density_wave": {
        "variants": ["plain", "conservative_dissipation", "entropy_dissipation", "filter"],
        "velocity": 0.1,
        "pressure": 20.0,
        "gamma": 1.4,
        "diss_s": 4,
        "diss_eps": 1e-3,
        "telemetry_every": 5000,
        "unprotected_horizon": 10.0,
    },
    "burgers_demo": {},
}


def resolve(cfg: ScenarioConfig) -> ScenarioConfig:
    """Fill analysis options with their defaults (rejecting unknown ones)."""
    opts = _options(cfg, OPTION_DEFAULTS[cfg.analysis])
    return ScenarioConfig(**{**cfg.__dict__, "options": opts})


def scalar_channels(sd: Semidiscretization, exact=None) -> dict:
    hd = sd.grid.h_diag
    a = sd.a
    x = sd.grid.x
    ch = {
        "energy_H": lambda t, u: float(hd @ (u * u)),
        "energy_aH": lambda t, u: float(hd @ (a * u * u)),
        "entropy": lambda t, u: sd.entropy(u),
        "min_u": lambda t, u: float(np.min(u)),
        "max_u": lambda t, u: float(np.max(u)),
        "mass": lambda t, u: float(hd @ u),
    }
    if exact is not None:

        def err(t, u):
            return u - exact(x, t)

        ch["err_H"] = lambda t, u: float(np.sqrt(hd @ err(t, u) ** 2))
        ch["err_inf"] = lambda t, u: float(np.max(np.abs(err(t, u))))
    return ch


def trajectory_table(traj, pert=None) -> dict[str, np.ndarray]:
    n = traj.times.size
    nan = np.full(n, np.nan)
    tab = {"time": traj.times, "dt": traj.dt}
    for c in TRAJECTORY_COLUMNS[2:8]:
        tab[c] = traj.channels.get(c, nan)
    tab["pert_H"] = nan if pert is None else pert.v_norm_h
    tab["pert_inf"] = nan if pert is None else pert.v_norm_inf
    for k, v in traj.channels.items():
        if k not in tab:
            tab[k] = v
    return tab


def dominant_period(times: np.ndarray, values: np.ndarray) -> float:
    """Period of the strongest oscillation, from successive upward mean crossings."""
    v = values - np.mean(values)
    idx = np.flatnonzero((v[:-1] < 0) & (v[1:] >= 0))
    if idx.size < 2:
        return float("nan")
    tc = times[idx] - v[idx] * (times[idx + 1] - times[idx]) / (v[idx + 1] - v[idx])
    return float(np.mean(np.diff(tc)))


def _perturbation_v0(cfg: ScenarioConfig, n: int, mode=None) -> np.ndarray:
    p = cfg.perturbation
    if p["source"] == "none":
        return np.zeros(n)
    if p["source"] == "random":
        return random_perturbation(n, p["amplitude"], cfg.seed)
    if mode is None:
        raise ScenarioConfigError("mode perturbation needs a mode from the analysis", ["perturbation/source"])
    return mode_perturbation(mode, p["amplitude"])


# ---------------------------------------------------------------------------
# analyses


def run_spectra(cfg: ScenarioConfig) -> RunResult:
    opts = cfg.options
    grid = build_grid(cfg)
    scheme = build_scheme(cfg)
    a = coefficient(cfg)(grid.x) if scheme.equation.value == "advection" else None
    sd = Semidiscretization(grid, scheme, a)
    u = None if sd.is_linear else initial_condition(cfg)(grid.x)
    jm = jacobian_for(sd, u)
    rep = eig(jm.matrix, grid.h_diag, grid.boundary_nodes)
    top = rep.eigenvectors[:, 0]
    g = local_growth(top, jm.matrix, grid.h_diag, sd.a, opts["weighting"])
    lam_sym = lambda_max_sym(jm.matrix, opts["weighting"], grid.h_diag, sd.a)
    doc = {
        "re_lambda_max": rep.re_lambda_max,
        "spectral_radius": rep.spectral_radius,
        "lambda_max_sym": lam_sym,
        "jacobian": jm.provenance.value,
        "max_eigen_residual": rep.max_residual,
        "eigenvalues": rep.to_json(),
    }
    res = RunResult()
    res.documents["spectra.json"] = doc
    res.tables["spectrum"] = {
        "re": rep.eigenvalues.real,
        "im": rep.eigenvalues.imag,
        "rho_bdy": rep.rho_bdy,
    }
    res.tables["dominant_mode"] = {
        "x": grid.x,
        "re_phi": top.real,
        "im_phi": top.imag,
        "abs_phi": np.abs(top),
        "local_growth": g,
    }
    res.plots.append(("dominant_mode", PlotSpec("x", ("abs_phi", "local_growth"), f"{cfg.name}: dominant mode")))
    res.summary = {"re_lambda_max": rep.re_lambda_max, "spectral_radius": rep.spectral_radius}
    return res


def _integrate(cfg, sd, u0, channels, t_end=None):
    t_end = cfg.time["t_end"] if t_end is None else t_end
    tm = cfg.time
    if tm["integrator"] == "rk8":
        times = np.linspace(0.0, t_end, tm["n_samples"])
        return rk8_adaptive(sd.residual, u0, (0.0, t_end), tm["rtol"], tm["atol"], sample_times=times, channels=channels)
    dt = default_dt(cfg, sd.grid, sd.a, u0)
    return rk4(sd.residual, u0, (0.0, t_end), dt, sample_every=tm["sample_every"], channels=channels)


def run_trajectory(cfg: ScenarioConfig) -> RunResult:
    grid = build_grid(cfg)
    scheme = build_scheme(cfg)
    a = coefficient(cfg)(grid.x)
    sd = Semidiscretization(grid, scheme, a)
    u0 = initial_condition(cfg)(grid.x)
    exact = exact_solution(cfg)
    traj = _integrate(cfg, sd, u0, scalar_channels(sd, exact))
    res = RunResult(crash=traj.crash)
    tab = trajectory_table(traj)
    res.tables["trajectory"] = tab
    e_ah = tab["energy_aH"]
    res.summary = {
        "energy_aH_rel_drift": float(np.max(np.abs(e_ah - e_ah[0])) / e_ah[0]),
        "energy_H_period": dominant_period(tab["time"], tab["energy_H"]),
        "final_err_H": float(tab["err_H"][-1]),
    }
    res.plots.append(("trajectory", PlotSpec("time", ("energy_H", "energy_aH"), f"{cfg.name}: energies")))
    res.plots.append(("trajectory", PlotSpec("time", ("err_H",), f"{cfg.name}: error", logy=True)))
    return res


def run_error_growth(cfg: ScenarioConfig) -> RunResult:
    grid = build_grid(cfg)
    scheme = build_scheme(cfg)
    a = coefficient(cfg)(grid.x)
    sd = Semidiscretization(grid, scheme, a)
    u0 = initial_condition(cfg)(grid.x)
    exact = exact_solution(cfg)
    traj = _integrate(cfg, sd, u0, scalar_channels(sd, exact))
    jm = jacobian_for(sd, None if sd.is_linear else u0)
    rep = eig(jm.matrix, grid.h_diag, grid.boundary_nodes)
    pred = project_unstable(u0, rep, grid.h_diag, traj.times, cfg.options["threshold"])
    res = RunResult(crash=traj.crash)
    tab = trajectory_table(traj)
    tab["predicted_unstable_H"] = pred.norm
    res.tables["trajectory"] = tab
    res.documents["spectra.json"] = {
        "re_lambda_max": rep.re_lambda_max,
        "spectral_radius": rep.spectral_radius,
        "unstable_modes": int(pred.eigenvalues.size),
        "eigenbasis_ill_conditioned": pred.ill_conditioned,
        "eigenvalues": rep.to_json(),
    }
    res.summary = {"re_lambda_max": rep.re_lambda_max, "final_err_H": float(tab["err_H"][-1])}
    res.plots.append(("trajectory", PlotSpec("time", ("err_H", "predicted_unstable_H"), f"{cfg.name}: error growth", logy=True)))
    return res


def _moving_baseflow(cfg: ScenarioConfig, grid: Grid):
    if cfg.problem["coefficient"] != "constant":
        raise ScenarioConfigError("the moving baseflow needs a constant coefficient", ["problem/coefficient"])
    speed = cfg.problem["coefficient_value"]
    x0, x1 = cfg.grid["domain"]
    sol = problems.shifted_solution(initial_condition(cfg), speed, x0, x1)
    return (lambda t: sol(grid.x, t)), (x1 - x0) / abs(speed)


def run_floquet(cfg: ScenarioConfig) -> RunResult:
    opts = cfg.options
    grid = build_grid(cfg)
    scheme = build_scheme(cfg)
    a = coefficient(cfg)(grid.x)
    sd = Semidiscretization(grid, scheme, a)
    base, period = _moving_baseflow(cfg, grid)
    # every supported SAT and dissipation keeps sum(H u) fixed, so H^T is a left eigenvector of Psi
    mono = monodromy(lambda t: sd.jacobian(base(t)), period, opts["k_start"], opts["tol"], opts["k_max"], conserved=grid.h_diag)
    floquet_diagnostics(mono, grid.h_diag)
    doc = mono.to_json()
    res = RunResult()
    res.documents["floquet.json"] = doc
    res.tables["multipliers"] = {
        "re": mono.multipliers.real,
        "im": mono.multipliers.imag,
        "abs": np.abs(mono.multipliers),
        "re_exponent": mono.exponents.real,
    }
    mode = np.asarray(mono.dominant_mode)
    res.tables["dominant_floquet_mode"] = {"x": grid.x, "re_phi": mode.real, "abs_phi": np.abs(mode)}
    res.plots.append(("dominant_floquet_mode", PlotSpec("x", ("abs_phi",), f"{cfg.name}: dominant Floquet mode")))
    res.summary = {
        "max_abs_re_exponent": doc["max_abs_re_exponent"],
        "sigma_max": mono.sigma_max,
        "K": mono.snapshots,
    }
    return res


def run_perturbation(cfg: ScenarioConfig) -> RunResult:
    grid = build_grid(cfg)
    scheme = build_scheme(cfg)
    a = coefficient(cfg)(grid.x)
    sd = Semidiscretization(grid, scheme, a)
    base, period = _moving_baseflow(cfg, grid)
    u0 = base(0.0)
    t_end = cfg.options["periods"] * period
    dt = default_dt(cfg, grid, a, u0)
    mode = None
    if cfg.perturbation["source"] == "mode":
        mode = eig(sd.jacobian(u0)).eigenvectors[:, 0]
    v0 = _perturbation_v0(cfg, grid.n, mode)
    exact = problems.shifted_solution(initial_condition(cfg), cfg.problem["coefficient_value"], *cfg.grid["domain"])
    residual = sd.residual
    if sd.is_linear:
        # long runs of linear schemes: one assembled matrix instead of the flux loop
        lin = sd.jacobian()
        residual = lin.__matmul__
    pr = perturbation_experiment(
        residual, u0, v0, (0.0, t_end), dt, grid.h_diag,
        sample_every=cfg.time["sample_every"], channels=scalar_channels(sd, exact),
    )
    res = RunResult(crash=pr.crash)
    tab = trajectory_table(pr.base, pr)
    ratio = pr.v_norm_h**2 / pr.v_norm_h[0] ** 2
    bound = pr.base.channels["max_u"] / np.min(u0)
    tab["v_energy_ratio"] = ratio
    tab["sharp_bound"] = bound
    res.tables["perturbation"] = tab
    res.summary = {
        "dt": dt,
        "steps": pr.base.n_steps,
        "max_v_energy_ratio": float(np.max(ratio)),
        "min_bound_margin": float(np.min(bound - ratio)),
        "v_energy_rel_change": float(np.max(np.abs(ratio - 1.0))),
        "seed": cfg.seed,
    }
    res.plots.append(("perturbation", PlotSpec("time", ("v_energy_ratio", "sharp_bound"), f"{cfg.name}: perturbation energy")))
    return res


def _near_vacuum_semidisc(cfg, variant: str, opts) -> tuple[Semidiscretization, Callable | None]:
    grid = build_grid(cfg)
    a = coefficient(cfg)(grid.x)
    diss = None
    post = None
    if variant == "conservative_dissipation":
        diss = Dissipation(opts["diss_s"], opts["diss_eps"], "conservative")
    elif variant == "entropy_dissipation":
        diss = Dissipation(opts["diss_s"], opts["diss_eps"], "entropy")
    elif variant == "filter":
        floor, cut = opts["filter_floor"], opts["filter_cut"]
        post = lambda u: positivity_filter(u, floor, cut)  # noqa: E731
    elif variant != "plain":
        raise ScenarioConfigError(f"unknown near-vacuum variant {variant!r}", ["options/variants"])
    s = cfg.scheme
    scheme = SchemeConfig(s["equation"], s["flux"], None, s["sat"], s["sigma"], diss)
    return Semidiscretization(grid, scheme, a), post


PROTECTED = ("entropy_dissipation", "filter")


def _telemetry(jac_of):
    cache = {}

    def get(t, u):
        key = (t, u.tobytes())
        if key not in cache:
            cache.clear()
            j = jac_of(u)
            cache[key] = (lambda_max_sym(j), spectral_radius(j))
        return cache[key]

    return (lambda t, u: get(t, u)[0]), (lambda t, u: get(t, u)[1])


def run_near_vacuum(cfg: ScenarioConfig) -> RunResult:
    opts = cfg.options
    res = RunResult()
    summary = {}
    crash = None
    for variant in opts["variants"]:
        sd, post = _near_vacuum_semidisc(cfg, variant, opts)
        grid = sd.grid
        u0 = initial_condition(cfg)(grid.x)
        exact = problems.shifted_solution(initial_condition(cfg), cfg.problem["coefficient_value"], *cfg.grid["domain"])
        ch = scalar_channels(sd, exact)
        lam, rad = _telemetry(lambda u, sd=sd: sd.jacobian(u))
        ch["lambda_max_sym"] = lam
        ch["spectral_radius"] = rad
        dt = default_dt(cfg, grid, sd.a, u0)
        every = opts["telemetry_every"]
        protected = variant in PROTECTED
        t_end = cfg.time["t_end"] if protected else max(cfg.time["t_end"], opts["unprotected_horizon"])
        budgets = {"mass": grid.h_diag} if post is not None else None
        if protected:
            v0 = _perturbation_v0(cfg, grid.n)
            pr = perturbation_experiment(sd.residual, u0, v0, (0.0, t_end), dt, grid.h_diag, sample_every=every, channels=ch, post_step=post, budgets=budgets)
            traj, pert = pr.base, pr
        else:
            traj = rk4(sd.residual, u0, (0.0, t_end), dt, sample_every=every, channels=ch, post_step=post, budgets=budgets)
            pert = None
        tab = trajectory_table(traj, pert)
        res.tables[f"near_vacuum_{variant}"] = tab
        lam_ch = tab["lambda_max_sym"]
        info = {
            "protected": protected,
            "t_end": t_end,
            "completed": traj.crash is None,
            "crash": None if traj.crash is None else traj.crash.to_json(),
            "min_u": float(np.nanmin(tab["min_u"])),
            "lambda_max_sym_initial": float(lam_ch[0]),
            "lambda_max_sym_peak_ratio": float(np.nanmax(lam_ch) / lam_ch[0]),
        }
        if pert is not None:
            info["pert_H_peak_ratio"] = float(np.max(pert.v_norm_h) / pert.v_norm_h[0])
        summary[variant] = info
        if protected and traj.crash is not None:
            crash = traj.crash
        res.plots.append((f"near_vacuum_{variant}", PlotSpec("time", ("min_u",), f"{variant}: min u", logy=True)))
        res.plots.append((f"near_vacuum_{variant}", PlotSpec("time", ("lambda_max_sym", "spectral_radius"), f"{variant}: telemetry", logy=True)))
    res.summary = summary
    res.crash = crash
    return res


def vacuum_profile(x, amplitude: float = 1.0) -> np.ndarray:
    """A (sin(2 pi (x - x0)) + 1) with the phase x0 chosen so that the node
    closest to a minimum of the unshifted wave sits exactly on the zero."""
    x = np.asarray(x, dtype=float)
    lo = np.mod(x + 0.25, 1.0)
    k = int(np.argmin(np.minimum(lo, 1.0 - lo)))
    x0 = x[k] + 0.25 - np.round(x[k] + 0.25)
    return amplitude * (np.sin(2.0 * np.pi * (x - x0)) + 1.0)


def run_near_vacuum_sweep(cfg: ScenarioConfig) -> RunResult:
    opts = cfg.options
    grid = build_grid(cfg)
    a = coefficient(cfg)(grid.x)
    s = cfg.scheme
    sd = Semidiscretization(grid, SchemeConfig(s["equation"], s["flux"], None, s["sat"], s["sigma"]), a)
    shifts = np.asarray(opts["shifts"], dtype=float)
    base = vacuum_profile(grid.x, opts["amplitude"])
    lam = np.empty(shifts.size)
    rad = np.empty(shifts.size)
    mins = np.empty(shifts.size)
    for k, eps in enumerate(shifts):
        u = base + eps
        j = sd.jacobian(u)
        lam[k] = lambda_max_sym(j)
        rad[k] = spectral_radius(j)
        mins[k] = u.min()
    res = RunResult()
    res.tables["sweep"] = {"shift": shifts, "min_u": mins, "lambda_max_sym": lam, "spectral_radius": rad}
    res.summary = {
        "lambda_growth": float(lam[-1] / lam[0]),
        "monotone_lambda": bool(np.all(np.diff(lam) > 0)),
        "monotone_radius": bool(np.all(np.diff(rad) > 0)),
    }
    res.plots.append(("sweep", PlotSpec("shift", ("lambda_max_sym", "spectral_radius"), "near-vacuum sweep", logx=True, logy=True)))
    return res


def run_euler_density_wave(cfg: ScenarioConfig) -> RunResult:
    opts = cfg.options
    res = RunResult()
    summary = {}
    crash = None
    g = cfg.grid
    amp = cfg.problem["initial_params"].get("amplitude", 0.98)
    for variant in opts["variants"]:
        sc = euler1d.density_wave_scenario(
            variant, n=g["nodes"], order=g["p"], amplitude=amp, velocity=opts["velocity"], p0=opts["pressure"],
            gamma=opts["gamma"], diss_s=opts["diss_s"], diss_eps=opts["diss_eps"], dt=cfg.time["dt"] or 1e-4,
        )
        sd = sc.semidisc()
        hd = sc.grid.h_diag
        n = sc.grid.n
        gam = sc.config.gamma

        def comp(u):
            return euler1d.as_components(u)

        lam, rad = _telemetry(lambda u, sd=sd: jac_fd(sd.residual, u))
        ch = {
            "min_rho": lambda t, u: float(comp(u)[0].min()),
            "min_p": lambda t, u: float(euler1d.pressure(u, gam).min()),
            "mass": lambda t, u, sd=sd: float(sd.totals(u)[0]),
            "momentum": lambda t, u, sd=sd: float(sd.totals(u)[1]),
            "energy": lambda t, u, sd=sd: float(sd.totals(u)[2]),
            "entropy": lambda t, u, sd=sd: sd.total_entropy(u),
            "rel_entropy": lambda t, u, sd=sd, sc=sc: sd.relative_entropy(u, sc.exact(t)),
            "err_rho_H": lambda t, u, sc=sc: float(np.sqrt(hd @ (comp(u)[0] - sc.exact(t)[0]) ** 2)),
            "lambda_max_sym": lam,
            "spectral_radius": rad,
        }
        protected = sc.config.filter is not None or variant == "entropy_dissipation"
        t_end = cfg.time["t_end"] if protected else max(cfg.time["t_end"], opts["unprotected_horizon"])
        budgets = None
        if sc.config.filter is not None:
            budgets = {"mass": np.concatenate([hd, np.zeros(2 * n)]), "energy": np.concatenate([np.zeros(2 * n), hd])}
        every = opts["telemetry_every"]
        if protected and cfg.perturbation["source"] != "none":
            v0 = np.concatenate([_perturbation_v0(cfg, n), np.zeros(2 * n)])
            pr = perturbation_experiment(sd.residual, sc.u0.ravel(), v0, (0.0, t_end), sc.dt, hd, sample_every=every, channels=ch, post_step=sd.post_step, budgets=budgets, components=3)
            traj = pr.base
            pert_rho, pert_e = pr.v_component_h[:, 0], pr.v_component_h[:, 2]
        else:
            traj = rk4(sd.residual, sc.u0.ravel(), (0.0, t_end), sc.dt, sample_every=every, channels=ch, post_step=sd.post_step, budgets=budgets)
            pert_rho = pert_e = np.full(traj.times.size, np.nan)
        tab = {"time": traj.times, "dt": traj.dt}
        tab.update(traj.channels)
        tab["pert_rho_H"] = pert_rho
        tab["pert_e_H"] = pert_e
        res.tables[f"euler_{variant}"] = tab
        mass = tab["mass"]
        info = {
            "protected": protected,
            "t_end": t_end,
            "completed": traj.crash is None,
            "crash": None if traj.crash is None else traj.crash.to_json(),
            "min_rho": float(np.nanmin(tab["min_rho"])),
            "mass_drift": float(np.max(np.abs(mass - mass[0]))),
            "energy_drift": float(np.max(np.abs(tab["energy"] - tab["energy"][0]))),
            "lambda_max_sym_peak_ratio": float(np.nanmax(tab["lambda_max_sym"]) / tab["lambda_max_sym"][0]),
        }
        if budgets is not None:
            info["mass_budget_residual"] = float(np.max(np.abs(mass - mass[0] - tab["injected_mass"])))
            info["energy_budget_residual"] = float(np.max(np.abs(tab["energy"] - tab["energy"][0] - tab["injected_energy"])))
        summary[variant] = info
        if protected and traj.crash is not None:
            crash = traj.crash
        res.plots.append((f"euler_{variant}", PlotSpec("time", ("min_rho", "min_p"), f"{variant}: minima", logy=True)))
        res.plots.append((f"euler_{variant}", PlotSpec("time", ("lambda_max_sym", "spectral_radius"), f"{variant}: telemetry", logy=True)))
    res.summary = summary
    res.crash = crash
    return res


def run_burgers_demo(cfg: ScenarioConfig) -> RunResult:
    grid = build_grid(cfg)
    scheme = build_scheme(cfg)
    sd = Semidiscretization(grid, scheme)
    u0 = initial_condition(cfg)(grid.x)
    ch = {
        "energy_H": lambda t, u: float(grid.h_diag @ (u * u)),
        "mass": lambda t, u: float(grid.h_diag @ u),
        "min_u": lambda t, u: float(u.min()),
        "energy_rate": lambda t, u: float(grid.h_diag @ (u * sd.residual(u))),
    }
    traj = _integrate(cfg, sd, u0, ch)
    res = RunResult(crash=traj.crash)
    tab = {"time": traj.times, "dt": traj.dt}
    tab.update(traj.channels)
    res.tables["burgers"] = tab
    final = traj.final_state
    jm = jacobian_for(sd, final)
    rep = eig(jm.matrix, grid.h_diag, grid.boundary_nodes)
    res.documents["spectra.json"] = {
        "re_lambda_max": rep.re_lambda_max,
        "spectral_radius": rep.spectral_radius,
        "jacobian": jm.provenance.value,
        "eigenvalues": rep.to_json(),
    }
    res.tables["final_state"] = {"x": grid.x, "u": final}
    e = tab["energy_H"]
    res.summary = {
        "max_abs_energy_rate": float(np.max(np.abs(tab["energy_rate"]))),
        "energy_rel_change": float((e[-1] - e[0]) / e[0]),
        "re_lambda_max_final": rep.re_lambda_max,
    }
    res.plots.append(("burgers", PlotSpec("time", ("energy_H",), f"{cfg.name}: energy")))
    res.plots.append(("final_state", PlotSpec("x", ("u",), f"{cfg.name}: final state")))
    return res


RUNNERS: dict[str, Callable[[ScenarioConfig], RunResult]] = {
    "spectra": run_spectra,
    "trajectory": run_trajectory,
    "error_growth": run_error_growth,
    "floquet": run_floquet,
    "perturbation": run_perturbation,
    "near_vacuum": run_near_vacuum,
    "near_vacuum_sweep": run_near_vacuum_sweep,
    "euler_density_wave": run_euler_density_wave,
    "burgers_demo": run_burgers_demo,
}


def run_config(cfg: ScenarioConfig) -> RunResult:
    return RUNNERS[cfg.analysis](resolve(cfg))

