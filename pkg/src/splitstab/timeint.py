"""Explicit time integration, trajectories and the paired perturbation driver."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .fluxes import FluxDomainError

Residual = Callable[[np.ndarray], np.ndarray]
Channel = Callable[[float, np.ndarray], float]
PostStep = Callable[[np.ndarray], np.ndarray]


class StiffnessError(RuntimeError):
    pass


class FilterConfigError(ValueError):
    pass


def positivity_filter(u, u_floor: float = 5e-4, u_cut: float = 5e-2):
    """Softplus lift u -> u + eps log(1 + exp((u_floor - u)/eps)), eps = (u_cut - u_floor)/12.

    Monotone, always above ``u_floor`` and the identity (in floating point)
    for values well above ``u_cut``.
    """
    if not u_cut > u_floor:
        raise FilterConfigError(f"u_cut ({u_cut}) must exceed u_floor ({u_floor})")
    eps = (u_cut - u_floor) / 12.0
    u = np.asarray(u, dtype=float)
    above = u + eps * np.logaddexp(0.0, (u_floor - u) / eps)
    # same function written around the floor, so rounding can never dip below it
    below = u_floor + eps * np.logaddexp(0.0, (u - u_floor) / eps)
    return np.where(u >= u_floor, above, below)


@dataclass
class CrashRecord:
    time: float
    step: int
    reason: str
    last_state: np.ndarray
    min_u: float
    channels: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "time": self.time,
            "step": self.step,
            "reason": self.reason,
            "min_u": self.min_u,
            "channels": {k: float(v) for k, v in self.channels.items()},
        }


@dataclass
class Trajectory:
    times: np.ndarray
    channels: dict[str, np.ndarray]
    states: np.ndarray | None = None
    dt: np.ndarray | None = None
    crash: CrashRecord | None = None
    final_state: np.ndarray | None = None
    n_steps: int = 0

    @property
    def completed(self) -> bool:
        return self.crash is None


def _eval_channels(channels: dict[str, Channel], t: float, u: np.ndarray) -> dict[str, float]:
    out = {}
    for name, fn in channels.items():
        try:
            with np.errstate(invalid="ignore", divide="ignore"):
                out[name] = float(fn(t, u))
        except (FluxDomainError, FloatingPointError, ValueError, np.linalg.LinAlgError):
            out[name] = float("nan")
    return out


def _rk4_step(residual: Residual, u: np.ndarray, dt: float) -> np.ndarray:
    k1 = residual(u)
    k2 = residual(u + 0.5 * dt * k1)
    k3 = residual(u + 0.5 * dt * k2)
    k4 = residual(u + dt * k3)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _step_sequence(t0: float, t1: float, dt: float) -> tuple[int, float]:
    """Number of full steps and the length of the shortened last step (0 if none)."""
    span = t1 - t0
    n_full = int(np.floor(span / dt * (1.0 + 1e-12)))
    rest = span - n_full * dt
    if rest <= 1e-12 * max(dt, span):
        rest = 0.0
    return n_full, rest


class _Budget:
    """Running weighted totals of what a post-step hook injected."""

    def __init__(self, weights):
        self.weights = {k: np.asarray(w, dtype=float) for k, w in (weights or {}).items()}
        self.totals = {k: 0.0 for k in self.weights}

    def add(self, delta):
        for k, w in self.weights.items():
            self.totals[k] += float(w @ delta)

    def channels(self):
        return {f"injected_{k}": v for k, v in self.totals.items()} or None


class _Recorder:
    def __init__(self, channels, keep_states):
        self.channels = channels or {}
        self.keep_states = keep_states
        self.times: list[float] = []
        self.values: dict[str, list[float]] = {k: [] for k in self.channels}
        self.states: list[np.ndarray] = []
        self.dts: list[float] = []

    def record(self, t, u, dt, extra=None):
        self.times.append(t)
        vals = _eval_channels(self.channels, t, u)
        if extra:
            vals.update(extra)
            for k in extra:
                self.values.setdefault(k, [float("nan")] * (len(self.times) - 1))
        for k, v in vals.items():
            self.values[k].append(v)
        self.dts.append(dt)
        if self.keep_states:
            self.states.append(np.array(u, copy=True))
        return vals

    def trajectory(self, crash=None, final=None, n_steps=0):
        return Trajectory(
            times=np.array(self.times),
            channels={k: np.array(v) for k, v in self.values.items()},
            states=np.array(self.states) if self.keep_states else None,
            dt=np.array(self.dts),
            crash=crash,
            final_state=final,
            n_steps=n_steps,
        )


def rk4(
    residual: Residual,
    u0,
    t_span: tuple[float, float],
    dt: float,
    *,
    sample_every: int = 1,
    channels: dict[str, Channel] | None = None,
    post_step: PostStep | None = None,
    budgets: dict[str, np.ndarray] | None = None,
    keep_states: bool = False,
    max_time: float | None = None,
) -> Trajectory:
    """Classical RK4 with fixed ``dt``; the last step is shortened to hit t_end.

    ``post_step`` (e.g. a positivity filter) is applied after every full step.
    ``budgets`` maps names to weight vectors; for each one the weighted sum
    of everything the post-step hook has added so far is reported in the
    channel ``injected_<name>``.
    A non-finite state or a flux domain error ends the run with a crash record.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    t0, t1 = map(float, t_span)
    u = np.array(u0, dtype=float, copy=True)
    rec = _Recorder(channels, keep_states)
    budget = _Budget(budgets)
    rec.record(t0, u, dt, budget.channels())
    n_full, rest = _step_sequence(t0, t1, dt)
    steps = [dt] * n_full + ([rest] if rest > 0 else [])
    t = t0
    crash = None
    for k, h in enumerate(steps, start=1):
        try:
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                new = _rk4_step(residual, u, h)
                if post_step is not None:
                    filtered = post_step(new)
                    budget.add(filtered - new)
                    new = filtered
            if not np.all(np.isfinite(new)):
                raise FloatingPointError("non-finite state")
        except (FluxDomainError, FloatingPointError) as exc:
            crash = CrashRecord(t, k, str(exc), u.copy(), float(np.min(u)), _eval_channels(rec.channels, t, u))
            break
        u = new
        t = t0 + (k * dt if k <= n_full else t1 - t0)
        if k % sample_every == 0 or k == len(steps):
            rec.record(t, u, h, budget.channels())
        if max_time is not None and t >= max_time:
            break
    return rec.trajectory(crash, u, len(steps) if crash is None else crash.step - 1)


def rk8_adaptive(
    residual: Residual,
    u0,
    t_span: tuple[float, float],
    rtol: float = 1e-10,
    atol: float = 1e-12,
    *,
    sample_times=None,
    channels: dict[str, Channel] | None = None,
    keep_states: bool = False,
) -> Trajectory:
    """Adaptive 8th-order Dormand-Prince integration (scipy DOP853).

    Channels are evaluated at ``sample_times`` (default: the end points).
    """
    t0, t1 = map(float, t_span)
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    if sample_times is None:
        sample_times = np.array([t0, t1])
    sample_times = np.asarray(sample_times, dtype=float)
    sol = solve_ivp(
        lambda t, y: residual(y),
        (t0, t1),
        np.asarray(u0, dtype=float),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        t_eval=sample_times,
    )
    if sol.status != 0:
        raise StiffnessError(f"DOP853 failed: {sol.message}")
    rec = _Recorder(channels, keep_states)
    steps = np.diff(sol.t) if sol.t.size > 1 else np.zeros(1)
    for k, t in enumerate(sol.t):
        rec.record(float(t), sol.y[:, k], float(steps[min(k, steps.size - 1)]))
    traj = rec.trajectory(None, sol.y[:, -1].copy(), int(sol.nfev))
    return traj


@dataclass
class PerturbationResult:
    base: Trajectory
    perturbed: Trajectory
    times: np.ndarray
    v_norm_h: np.ndarray
    v_norm_inf: np.ndarray
    v0: np.ndarray
    crash: CrashRecord | None = None
    v_component_h: np.ndarray | None = None

    @property
    def growth(self) -> np.ndarray:
        return self.v_norm_h / self.v_norm_h[0]


def random_perturbation(n: int, amplitude: float, seed: int) -> np.ndarray:
    """Uniform noise in [-amplitude, amplitude] from a Philox counter-based generator."""
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.uniform(-amplitude, amplitude, size=n)


def mode_perturbation(mode, amplitude: float) -> np.ndarray:
    v = np.real(np.asarray(mode))
    peak = np.max(np.abs(v))
    if peak == 0:
        raise ValueError("zero mode")
    return amplitude * v / peak


def perturbation_experiment(
    residual: Residual,
    u0,
    v0,
    t_span: tuple[float, float],
    dt: float,
    h_diag,
    *,
    sample_every: int = 1,
    channels: dict[str, Channel] | None = None,
    post_step: PostStep | None = None,
    budgets: dict[str, np.ndarray] | None = None,
    components: int = 1,
) -> PerturbationResult:
    """Run the base and perturbed problems in lockstep with RK4 and record v = u_eps - u.

    ``components`` > 1 treats the state as that many stacked node vectors
    (for systems); the H-norm of v then sums over components.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    t0, t1 = map(float, t_span)
    u = np.array(u0, dtype=float, copy=True)
    ue = u + np.asarray(v0, dtype=float)
    hw = np.tile(np.asarray(h_diag, dtype=float), components)
    base_rec = _Recorder(channels, False)
    pert_rec = _Recorder(channels, False)
    bud = (_Budget(budgets), _Budget(budgets))

    vt, vh, vi, vc = [], [], [], []
    hd = np.asarray(h_diag, dtype=float)

    def sample(t, h):
        base_rec.record(t, u, h, bud[0].channels())
        pert_rec.record(t, ue, h, bud[1].channels())
        v = ue - u
        vt.append(t)
        vh.append(float(np.sqrt(np.sum(hw * v * v))))
        vi.append(float(np.max(np.abs(v))))
        vc.append(np.sqrt((v * v).reshape(components, -1) @ hd))

    sample(t0, dt)
    n_full, rest = _step_sequence(t0, t1, dt)
    steps = [dt] * n_full + ([rest] if rest > 0 else [])
    t = t0
    crash = None
    for k, h in enumerate(steps, start=1):
        try:
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                nu = _rk4_step(residual, u, h)
                ne = _rk4_step(residual, ue, h)
                if post_step is not None:
                    fu = post_step(nu)
                    fe = post_step(ne)
                    bud[0].add(fu - nu)
                    bud[1].add(fe - ne)
                    nu, ne = fu, fe
            if not (np.all(np.isfinite(nu)) and np.all(np.isfinite(ne))):
                raise FloatingPointError("non-finite state")
        except (FluxDomainError, FloatingPointError) as exc:
            crash = CrashRecord(t, k, str(exc), u.copy(), float(np.min(u)), _eval_channels(base_rec.channels, t, u))
            break
        u, ue = nu, ne
        t = t0 + (k * dt if k <= n_full else t1 - t0)
        if k % sample_every == 0 or k == len(steps):
            sample(t, h)
    nsteps = len(steps) if crash is None else crash.step - 1
    base = base_rec.trajectory(crash, u, nsteps)
    pert = pert_rec.trajectory(crash, ue, nsteps)
    return PerturbationResult(
        base, pert, np.array(vt), np.array(vh), np.array(vi), np.asarray(v0, dtype=float), crash, np.array(vc)
    )
