"""One-dimensional compressible Euler equations with flux differencing.

State vectors are stored component-major: ``U[0] = rho``, ``U[1] = m = rho v``,
``U[2] = e`` (total energy per volume), each of length N. Integrators see the
flattened copy ``U.ravel()``.

The two-point flux is a kinetic-energy preserving, entropy conservative
flux built from logarithmic means of rho and rho/p. The entropy is
S = -rho s/(gamma - 1) with s = log(p rho^-gamma).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .fluxes import LOG_SERIES_CUTOFF, FluxDomainError, log_mean
from .operators import Grid, build_circulant, assemble_grid, grid_undivided_difference
from .problems import density_wave, periodic_wrap
from .semidisc import ConfigError
from .timeint import positivity_filter

GAMMA = 1.4


class EulerDissVariable(str, enum.Enum):
    CONSERVATIVE = "conservative"
    ENTROPY = "entropy"


@dataclass(frozen=True)
class EulerDissipation:
    s: int
    eps: float
    variable: EulerDissVariable = EulerDissVariable.CONSERVATIVE

    def __post_init__(self):
        object.__setattr__(self, "variable", EulerDissVariable(self.variable))
        if self.s < 1 or self.eps < 0:
            raise ConfigError("need s >= 1 and eps >= 0")


@dataclass(frozen=True)
class FilterSpec:
    u_floor: float = 5e-4
    u_cut: float = 5e-2

    def __post_init__(self):
        if not self.u_cut > self.u_floor > 0:
            raise ConfigError(f"filter needs u_cut > u_floor > 0, got {self.u_floor}, {self.u_cut}")


@dataclass(frozen=True)
class EulerConfig:
    gamma: float = GAMMA
    dissipation: EulerDissipation | None = None
    filter: FilterSpec | None = None

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ConfigError("gamma must exceed 1")


def as_components(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return u.reshape(3, -1) if u.ndim == 1 else u


def pressure(u, gamma: float = GAMMA) -> np.ndarray:
    rho, m, e = as_components(u)
    return (gamma - 1.0) * (e - 0.5 * m * m / rho)


def conservative(rho, v, p, gamma: float = GAMMA) -> np.ndarray:
    rho, v, p = np.broadcast_arrays(*(np.asarray(q, dtype=float) for q in (rho, v, p)))
    return np.stack([rho, rho * v, p / (gamma - 1.0) + 0.5 * rho * v * v])


def check_admissible(u, gamma: float = GAMMA) -> None:
    """Raise FluxDomainError naming the first node with rho <= 0 or p <= 0."""
    u = as_components(u)
    p = pressure(u, gamma)
    for name, q in (("density", u[0]), ("pressure", p)):
        bad = np.flatnonzero(~(q > 0))
        if bad.size:
            i = int(bad[0])
            raise FluxDomainError(f"{name} {q[i]!r} at node {i}, state {u[:, i].tolist()}", index=i)


def physical_flux(u, gamma: float = GAMMA) -> np.ndarray:
    u = as_components(u)
    rho, m, e = u
    v = m / rho
    p = pressure(u, gamma)
    return np.stack([m, m * v + p, (e + p) * v])


def specific_entropy(u, gamma: float = GAMMA) -> np.ndarray:
    u = as_components(u)
    return np.log(pressure(u, gamma)) - gamma * np.log(u[0])


def entropy_density(u, gamma: float = GAMMA) -> np.ndarray:
    u = as_components(u)
    return -u[0] * specific_entropy(u, gamma) / (gamma - 1.0)


def entropy_flux_potential(u, gamma: float = GAMMA) -> np.ndarray:
    """psi = w . f - F_S, which for this entropy pair equals m."""
    return as_components(u)[1].copy()


def entropy_variables(u, gamma: float = GAMMA) -> np.ndarray:
    u = as_components(u)
    rho, m, _ = u
    p = pressure(u, gamma)
    v = m / rho
    s = specific_entropy(u, gamma)
    beta = rho / p
    return np.stack([(gamma - s) / (gamma - 1.0) - 0.5 * beta * v * v, beta * v, -beta])


def dudw(u, gamma: float = GAMMA) -> np.ndarray:
    """Symmetric positive definite Jacobian dU/dW, shape (..., 3, 3)."""
    u = as_components(u)
    rho, m, e = u
    p = pressure(u, gamma)
    v = m / rho
    h = (e + p) / rho
    c2 = gamma * p / rho
    out = np.empty(rho.shape + (3, 3))
    out[..., 0, 0] = rho
    out[..., 0, 1] = out[..., 1, 0] = m
    out[..., 0, 2] = out[..., 2, 0] = e
    out[..., 1, 1] = m * v + p
    out[..., 1, 2] = out[..., 2, 1] = m * h
    out[..., 2, 2] = rho * h * h - c2 * p / (gamma - 1.0)
    return out


def euler_ec_flux(ul, ur, gamma: float = GAMMA) -> np.ndarray:
    """Entropy conservative, kinetic-energy preserving two-point flux.

    ``ul`` and ``ur`` have shape (3, ...) and the result has the same shape.
    """
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    pl = pressure(ul, gamma)
    pr = pressure(ur, gamma)
    if np.any(~(ul[0] > 0)) or np.any(~(ur[0] > 0)) or np.any(~(pl > 0)) or np.any(~(pr > 0)):
        raise FluxDomainError("Euler flux needs positive density and pressure")
    vl = ul[1] / ul[0]
    vr = ur[1] / ur[0]
    rho_ln = log_mean(ul[0], ur[0])
    beta_ln = log_mean(ul[0] / pl, ur[0] / pr)
    v_avg = 0.5 * (vl + vr)
    f_rho = rho_ln * v_avg
    f_m = f_rho * v_avg + 0.5 * (pl + pr)
    f_e = f_rho * (0.5 * vl * vr + 1.0 / ((gamma - 1.0) * beta_ln)) + 0.5 * (pl * vr + pr * vl)
    return np.stack([f_rho, f_m, f_e])


def _log_mean_pre(x, y, lx, ly):
    """Logarithmic mean from precomputed logarithms (same branch rule as log_mean)."""
    s = x + y
    t = (y - x) / s
    t2 = t * t
    small = t2 < LOG_SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (y - x) / (ly - lx)
    if np.any(small):
        direct[small] = 0.5 * s[small] / (1.0 + t2[small] * (1.0 / 3.0 + t2[small] * (1.0 / 5.0 + t2[small] / 7.0)))
    return direct


def ec_condition_residual(ul, ur, gamma: float = GAMMA) -> np.ndarray:
    """(w_R - w_L) . F(U_L, U_R) - (psi_R - psi_L); zero for an entropy conservative flux."""
    f = euler_ec_flux(ul, ur, gamma)
    dw = entropy_variables(ur, gamma) - entropy_variables(ul, gamma)
    dpsi = entropy_flux_potential(ur, gamma) - entropy_flux_potential(ul, gamma)
    return np.sum(dw * f, axis=0) - dpsi


@dataclass
class EulerSemidisc:
    """Flux-differencing residual for the Euler system on a grid.

    Block interfaces (for non-circulant operators) are coupled with the
    entropy conservative SAT built from the same two-point flux.
    """

    grid: Grid
    config: EulerConfig = field(default_factory=EulerConfig)

    def __post_init__(self):
        rows, cols, vals = self.grid.pattern
        self._rows, self._cols, self._vals = rows, cols, vals
        n = self.grid.n
        self._hinv = 1.0 / self.grid.h_diag
        if not self.grid.op.periodic and not self.grid.periodic:
            raise ConfigError("Euler runs need periodic coupling of the outer boundaries")
        diss = self.config.dissipation
        if diss is not None:
            dt = grid_undivided_difference(self.grid, diss.s)
            self._dt = dt
            mask = (dt != 0).astype(float)
            self._avg = mask / mask.sum(axis=1, keepdims=True)
        self._n = n

    @property
    def gamma(self) -> float:
        return self.config.gamma

    def volume(self, u: np.ndarray) -> np.ndarray:
        rows, cols = self._rows, self._cols
        g = self.gamma
        rho = u[0]
        v = u[1] / rho
        p = (g - 1.0) * (u[2] - 0.5 * u[1] * v)
        beta = rho / p
        lr = np.log(rho)
        lb = np.log(beta)
        rho_ln = _log_mean_pre(rho[rows], rho[cols], lr[rows], lr[cols])
        beta_ln = _log_mean_pre(beta[rows], beta[cols], lb[rows], lb[cols])
        vi, vj = v[rows], v[cols]
        pi, pj = p[rows], p[cols]
        v_avg = 0.5 * (vi + vj)
        f_rho = rho_ln * v_avg
        f_m = f_rho * v_avg + 0.5 * (pi + pj)
        f_e = f_rho * (0.5 * vi * vj + 1.0 / ((g - 1.0) * beta_ln)) + 0.5 * (pi * vj + pj * vi)
        w = -2.0 * self._vals
        n = self._n
        return np.stack([np.bincount(rows, weights=w * f, minlength=n) for f in (f_rho, f_m, f_e)])

    def sat(self, u: np.ndarray) -> np.ndarray:
        out = np.zeros_like(u)
        if not self.grid.interfaces:
            return out
        il = np.array([p[0] for p in self.grid.interfaces])
        ir = np.array([p[1] for p in self.grid.interfaces])
        fs = euler_ec_flux(u[:, il], u[:, ir], self.gamma)
        fl = physical_flux(u[:, il], self.gamma)
        fr = physical_flux(u[:, ir], self.gamma)
        np.add.at(out.T, il, (-(fs - fl) * self._hinv[il]).T)
        np.add.at(out.T, ir, ((fs - fr) * self._hinv[ir]).T)
        return out

    def wave_speed(self, u: np.ndarray) -> np.ndarray:
        p = pressure(u, self.gamma)
        return np.abs(u[1] / u[0]) + np.sqrt(self.gamma * p / u[0])

    def dissipation(self, u: np.ndarray) -> np.ndarray:
        diss = self.config.dissipation
        if diss is None or diss.eps == 0:
            return np.zeros_like(u)
        lam = self._avg @ self.wave_speed(u)
        if diss.variable is EulerDissVariable.CONSERVATIVE:
            flux = lam[None, :] * (u @ self._dt.T)
        else:
            w = entropy_variables(u, self.gamma)
            dw = w @ self._dt.T
            b = dudw(u @ self._avg.T, self.gamma)
            flux = lam[None, :] * np.einsum("kij,jk->ik", b, dw)
        return -diss.eps * (flux @ self._dt) * self._hinv[None, :]

    def residual(self, u) -> np.ndarray:
        flat = np.ndim(u) == 1
        u = as_components(u)
        check_admissible(u, self.gamma)
        r = self.volume(u) + self.sat(u) + self.dissipation(u)
        return r.ravel() if flat else r

    __call__ = residual

    def post_step(self, u) -> np.ndarray:
        """Positivity filter on rho and p, keeping momentum and rebuilding e."""
        spec = self.config.filter
        if spec is None:
            return u
        flat = np.ndim(u) == 1
        uc = as_components(u)
        rho = positivity_filter(uc[0], spec.u_floor, spec.u_cut)
        p = positivity_filter(pressure(uc, self.gamma), spec.u_floor, spec.u_cut)
        out = np.stack([rho, uc[1], p / (self.gamma - 1.0) + 0.5 * uc[1] ** 2 / rho])
        return out.ravel() if flat else out

    def totals(self, u) -> np.ndarray:
        """H-weighted totals of mass, momentum and energy."""
        return as_components(u) @ self.grid.h_diag

    def total_entropy(self, u) -> float:
        return float(entropy_density(u, self.gamma) @ self.grid.h_diag)

    def relative_entropy(self, u, u_ref) -> float:
        """sum_i H_i [S(U) - S(V) - w(V).(U - V)] for a reference state V."""
        u = as_components(u)
        v = as_components(u_ref)
        d = entropy_density(u, self.gamma) - entropy_density(v, self.gamma)
        d -= np.sum(entropy_variables(v, self.gamma) * (u - v), axis=0)
        return float(d @ self.grid.h_diag)


def euler_residual(grid: Grid, config: EulerConfig, states) -> np.ndarray:
    return EulerSemidisc(grid, config).residual(states)


class DensityWaveVariant(str, enum.Enum):
    PLAIN = "plain"
    CONSERVATIVE_DISSIPATION = "conservative_dissipation"
    ENTROPY_DISSIPATION = "entropy_dissipation"
    FILTER = "filter"


@dataclass(frozen=True)
class DensityWaveScenario:
    grid: Grid
    config: EulerConfig
    u0: np.ndarray
    dt: float
    velocity: float
    pressure: float
    amplitude: float

    def exact(self, t: float) -> np.ndarray:
        x = periodic_wrap(self.grid.x - self.velocity * t, *self.grid.domain)
        return conservative(density_wave(x, self.amplitude), self.velocity, self.pressure, self.config.gamma)

    def semidisc(self) -> EulerSemidisc:
        return EulerSemidisc(self.grid, self.config)


def density_wave_scenario(
    variant: DensityWaveVariant | str = DensityWaveVariant.FILTER,
    n: int = 39,
    order: int = 8,
    amplitude: float = 0.98,
    velocity: float = 0.1,
    p0: float = 20.0,
    gamma: float = GAMMA,
    diss_s: int = 4,
    diss_eps: float = 1e-3,
    dt: float = 1e-4,
) -> DensityWaveScenario:
    """rho = A sin(2 pi x) + 1, v = 0.1, p = 20 on [-1, 1] with a circulant operator."""
    variant = DensityWaveVariant(variant)
    grid = assemble_grid((-1.0, 1.0), 1, build_circulant(order, n))
    diss = None
    filt = None
    if variant is DensityWaveVariant.CONSERVATIVE_DISSIPATION:
        diss = EulerDissipation(diss_s, diss_eps, EulerDissVariable.CONSERVATIVE)
    elif variant is DensityWaveVariant.ENTROPY_DISSIPATION:
        diss = EulerDissipation(diss_s, diss_eps, EulerDissVariable.ENTROPY)
    elif variant is DensityWaveVariant.FILTER:
        filt = FilterSpec()
    cfg = EulerConfig(gamma, diss, filt)
    u0 = conservative(density_wave(grid.x, amplitude), velocity, p0, gamma)
    return DensityWaveScenario(grid, cfg, u0, dt, velocity, p0, amplitude)
