"""Semidiscrete residuals for variable-coefficient advection and Burgers.

The volume term of every scheme is a flux-differencing sum

    r_i = -2 sum_j D_ij F(u_i, u_j)

where ``F`` is a symmetric, consistent two-point flux. The central-product
split form with parameter alpha is the flux ``alpha * central + (1 - alpha) *
product``; the Burgers split form is ``alpha (u_i^2 + u_j^2)/4 + (1 - alpha)
u_i u_j / 2``. Blocks are coupled by SATs that replace the physical flux at a
block end by the same two-point flux evaluated between the two duplicated
interface states, optionally with an upwind penalty on the jump.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fluxes
from .fluxes import FluxKind
from .operators import Grid, grid_undivided_difference


class Equation(str, enum.Enum):
    ADVECTION = "advection"
    BURGERS = "burgers"


class SatKind(str, enum.Enum):
    NONE = "none"
    CONSERVATIVE = "conservative"
    UPWIND = "upwind"


class DissVariable(str, enum.Enum):
    CONSERVATIVE = "conservative"
    ENTROPY = "entropy"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Dissipation:
    s: int
    eps: float
    variable: DissVariable = DissVariable.CONSERVATIVE

    def __post_init__(self):
        object.__setattr__(self, "variable", DissVariable(self.variable))
        if self.s < 1:
            raise ConfigError("dissipation order s must be >= 1")
        if self.eps < 0:
            raise ConfigError("dissipation coefficient must be >= 0")


@dataclass(frozen=True)
class SchemeConfig:
    """Everything needed to define a semidiscretization on a grid.

    For advection give either ``flux`` (flux differencing with a named two-point
    flux) or ``alpha`` (central-product split form). Burgers always uses
    ``alpha``.
    """

    equation: Equation = Equation.ADVECTION
    flux: FluxKind | None = None
    alpha: float | None = None
    sat: SatKind = SatKind.CONSERVATIVE
    sigma: float = 0.0
    dissipation: Dissipation | None = None

    def __post_init__(self):
        object.__setattr__(self, "equation", Equation(self.equation))
        object.__setattr__(self, "sat", SatKind(self.sat))
        if self.flux is not None:
            object.__setattr__(self, "flux", FluxKind(self.flux))
        if self.equation is Equation.BURGERS:
            if self.alpha is None or self.flux is not None:
                raise ConfigError("Burgers needs alpha and no named flux")
        elif (self.flux is None) == (self.alpha is None):
            raise ConfigError("advection needs exactly one of flux or alpha")
        if self.alpha is not None and not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.sigma < 0:
            raise ConfigError("sigma must be >= 0")
        if self.sat is SatKind.UPWIND and self.sigma == 0:
            object.__setattr__(self, "sigma", 1.0)
        if self.sat is not SatKind.UPWIND and self.sigma != 0:
            raise ConfigError("sigma > 0 requires the upwind SAT")

    @property
    def entropy_kind(self) -> FluxKind | None:
        """Flux kind that defines the entropy variable (None: plain energy)."""
        if self.flux is not None:
            return self.flux
        if self.alpha == 1.0 and self.equation is Equation.ADVECTION:
            return FluxKind.CENTRAL
        return None


# ---------------------------------------------------------------------------
# elementary pieces


def split_flux(alpha, ai, ui, aj, uj):
    """Two-point flux of the central-product split form."""
    return alpha * 0.5 * (ai * ui + aj * uj) + (1.0 - alpha) * 0.5 * (ai * uj + aj * ui)


def split_flux_partials(alpha, ai, ui, aj, uj):
    d1 = 0.5 * alpha * ai + 0.5 * (1.0 - alpha) * aj + 0.0 * uj
    d2 = 0.5 * alpha * aj + 0.5 * (1.0 - alpha) * ai + 0.0 * ui
    return d1, d2


def burgers_flux(alpha, ui, uj):
    return 0.25 * alpha * (ui * ui + uj * uj) + 0.5 * (1.0 - alpha) * ui * uj


def burgers_flux_partials(alpha, ui, uj):
    return 0.5 * alpha * ui + 0.5 * (1.0 - alpha) * uj, 0.5 * alpha * uj + 0.5 * (1.0 - alpha) * ui


def flux_diff_volume(grid: Grid, pair_flux: Callable, u: np.ndarray) -> np.ndarray:
    """-2 sum_j D_ij F(i, j) using only the nonzeros of D."""
    rows, cols, vals = grid.pattern
    f = pair_flux(rows, cols)
    return -2.0 * np.bincount(rows, weights=vals * f, minlength=grid.n)


def compute_defects(grid: Grid, a: np.ndarray):
    d = grid.d_mat
    da = d @ a
    amat = np.diag(a)
    theta = d @ amat - amat @ d - np.diag(da)
    theta_a = d @ (amat @ amat) - (amat @ amat) @ d - 2.0 * amat @ np.diag(da)
    return theta, theta_a


@dataclass(frozen=True)
class DefectMatrices:
    theta: np.ndarray
    theta_a: np.ndarray
    gamma: float


def h_norm(mat: np.ndarray, h_diag: np.ndarray) -> float:
    """Operator norm induced by the H inner product."""
    s = np.sqrt(h_diag)
    return float(np.linalg.norm(s[:, None] * mat / s[None, :], 2))


def compute_gamma(grid: Grid, alpha: float, a: np.ndarray) -> tuple[float, DefectMatrices]:
    """Growth constant gamma = || diag(Da) + (2 alpha - 1) Theta ||_H."""
    theta, theta_a = compute_defects(grid, a)
    m = np.diag(grid.d_mat @ a) + (2.0 * alpha - 1.0) * theta
    gamma = h_norm(m, grid.h_diag)
    return gamma, DefectMatrices(theta, theta_a, gamma)


# ---------------------------------------------------------------------------
# the semidiscretization object


@dataclass
class Semidiscretization:
    """Residual and Jacobian of a scheme on a grid with nodal coefficient ``a``."""

    grid: Grid
    config: SchemeConfig
    a: np.ndarray | None = None
    _diss: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        n = self.grid.n
        if self.config.equation is Equation.BURGERS:
            self.a = np.ones(n)
        elif self.a is None:
            raise ConfigError("advection needs nodal coefficient values")
        self.a = np.asarray(self.a, dtype=float)
        if self.a.shape != (n,):
            raise ConfigError(f"coefficient has shape {self.a.shape}, grid has {n} nodes")
        diss = self.config.dissipation
        if diss is not None and diss.eps > 0:
            dt = grid_undivided_difference(self.grid, diss.s)
            self._diss = -diss.eps * (dt.T @ dt) / self.grid.h_diag[:, None]
        if self.config.sat is not SatKind.NONE and not self.grid.interfaces and not self.grid.op.periodic:
            raise ConfigError("SATs requested but the grid has no interfaces")
        iface = np.array(self.grid.interfaces, dtype=int).reshape(-1, 2)
        self._il = iface[:, 0]
        self._ir = iface[:, 1]

    # -- fluxes ---------------------------------------------------------------

    @property
    def is_linear(self) -> bool:
        return self.config.equation is Equation.ADVECTION and self.config.flux in (
            None,
            FluxKind.CENTRAL,
            FluxKind.PRODUCT,
        )

    def pair_flux(self, u: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        cfg = self.config
        a = self.a
        if cfg.equation is Equation.BURGERS:
            return burgers_flux(cfg.alpha, u[i], u[j])
        if cfg.flux is None:
            return split_flux(cfg.alpha, a[i], u[i], a[j], u[j])
        return fluxes.two_point_flux(cfg.flux, a[i], u[i], a[j], u[j])

    def pair_partials(self, u: np.ndarray, i: np.ndarray, j: np.ndarray):
        cfg = self.config
        a = self.a
        if cfg.equation is Equation.BURGERS:
            return burgers_flux_partials(cfg.alpha, u[i], u[j])
        if cfg.flux is None:
            return split_flux_partials(cfg.alpha, a[i], u[i], a[j], u[j])
        return fluxes.flux_partials(cfg.flux, a[i], u[i], a[j], u[j])

    def physical_flux(self, u: np.ndarray) -> np.ndarray:
        if self.config.equation is Equation.BURGERS:
            return 0.5 * u * u
        return self.a * u

    def entropy_variable(self, u: np.ndarray) -> np.ndarray:
        kind = self.config.entropy_kind
        if kind is None:
            return np.asarray(u, dtype=float)
        return fluxes.entropy_variable(kind, self.a, u)

    def entropy_variable_du(self, u: np.ndarray) -> np.ndarray:
        kind = self.config.entropy_kind
        if kind is None:
            return np.ones_like(u)
        return fluxes.entropy_variable_du(kind, self.a, u)

    def entropy(self, u: np.ndarray) -> float:
        kind = self.config.entropy_kind
        dens = 0.5 * u * u if kind is None else fluxes.entropy_density(kind, self.a, u)
        return float(np.sum(self.grid.h_diag * dens))

    # -- residual pieces ------------------------------------------------------

    def volume(self, u: np.ndarray) -> np.ndarray:
        cfg = self.config
        d = self.grid.d_mat
        if cfg.equation is Equation.BURGERS:
            al = cfg.alpha
            return -(al * (d @ (0.5 * u * u)) + (1.0 - al) * u * (d @ u))
        if cfg.flux is None:
            al = cfg.alpha
            a = self.a
            return -(al * (d @ (a * u)) + (1.0 - al) * (a * (d @ u) + u * (d @ a)))
        return flux_diff_volume(self.grid, lambda i, j: self.pair_flux(u, i, j), u)

    def sat(self, u: np.ndarray) -> np.ndarray:
        cfg = self.config
        out = np.zeros_like(u, dtype=float)
        if cfg.sat is SatKind.NONE or self._il.size == 0:
            return out
        il, ir = self._il, self._ir
        hd = self.grid.h_diag
        fstar = self.pair_flux(u, il, ir)
        f = self.physical_flux(u)
        np.add.at(out, il, -(fstar - f[il]) / hd[il])
        np.add.at(out, ir, (fstar - f[ir]) / hd[ir])
        if cfg.sigma > 0:
            speed = self.interface_speed(u)
            jump = u[il] - u[ir]
            np.add.at(out, il, -0.5 * cfg.sigma * speed * jump / hd[il])
            np.add.at(out, ir, 0.5 * cfg.sigma * speed * jump / hd[ir])
        return out

    def interface_speed(self, u: np.ndarray) -> np.ndarray:
        il, ir = self._il, self._ir
        if self.config.equation is Equation.BURGERS:
            return np.abs(0.5 * (u[il] + u[ir]))
        return np.abs(0.5 * (self.a[il] + self.a[ir]))

    def dissipation(self, u: np.ndarray) -> np.ndarray:
        if self._diss is None:
            return np.zeros_like(u, dtype=float)
        if self.config.dissipation.variable is DissVariable.ENTROPY:
            return self._diss @ self.entropy_variable(u)
        return self._diss @ u

    def residual(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.volume(u) + self.sat(u) + self.dissipation(u)

    __call__ = residual

    # -- Jacobian -------------------------------------------------------------

    def volume_jacobian(self, u: np.ndarray) -> np.ndarray:
        cfg = self.config
        d = self.grid.d_mat
        if cfg.equation is Equation.BURGERS:
            al = cfg.alpha
            return -al * d * u[None, :] - (1.0 - al) * u[:, None] * d - (1.0 - al) * np.diag(d @ u)
        if cfg.flux is None:
            al = cfg.alpha
            a = self.a
            return -al * d * a[None, :] - (1.0 - al) * a[:, None] * d - (1.0 - al) * np.diag(d @ a)
        rows, cols, vals = self.grid.pattern
        d1, d2 = self.pair_partials(u, rows, cols)
        n = self.grid.n
        jac = np.zeros((n, n))
        jac[rows, cols] = -2.0 * vals * d2
        jac[np.diag_indices(n)] += -2.0 * np.bincount(rows, weights=vals * d1, minlength=n)
        return jac

    def sat_jacobian(self, u: np.ndarray) -> np.ndarray:
        cfg = self.config
        n = self.grid.n
        jac = np.zeros((n, n))
        if cfg.sat is SatKind.NONE or self._il.size == 0:
            return jac
        hd = self.grid.h_diag
        df = u if cfg.equation is Equation.BURGERS else self.a
        for k, (l_, r_) in enumerate(zip(self._il, self._ir)):
            il = np.array([l_])
            ir = np.array([r_])
            dl, dr = (float(v[0]) for v in self.pair_partials(u, il, ir))
            jac[l_, l_] += -(dl - df[l_]) / hd[l_]
            jac[l_, r_] += -dr / hd[l_]
            jac[r_, l_] += dl / hd[r_]
            jac[r_, r_] += (dr - df[r_]) / hd[r_]
            if cfg.sigma > 0:
                if cfg.equation is Equation.BURGERS:
                    raise NotImplementedError("upwind Burgers SAT has no analytic linearization")
                c = 0.5 * cfg.sigma * abs(0.5 * (self.a[l_] + self.a[r_]))
                jac[l_, l_] += -c / hd[l_]
                jac[l_, r_] += c / hd[l_]
                jac[r_, l_] += c / hd[r_]
                jac[r_, r_] += -c / hd[r_]
        return jac

    def dissipation_jacobian(self, u: np.ndarray) -> np.ndarray:
        n = self.grid.n
        if self._diss is None:
            return np.zeros((n, n))
        if self.config.dissipation.variable is DissVariable.ENTROPY:
            return self._diss * self.entropy_variable_du(u)[None, :]
        return self._diss.copy()

    def jacobian(self, u: np.ndarray | None = None) -> np.ndarray:
        """Analytic Jacobian of :meth:`residual` at ``u``.

        Linear schemes ignore ``u``. Burgers with sigma > 0 falls back to
        finite differences (see :func:`splitstab.jacobian.jac_burgers`).
        """
        if u is None:
            if not self.is_linear:
                raise ValueError("nonlinear scheme needs a baseflow")
            u = np.ones(self.grid.n)
        u = np.asarray(u, dtype=float)
        return self.volume_jacobian(u) + self.sat_jacobian(u) + self.dissipation_jacobian(u)


# ---------------------------------------------------------------------------
# functional front-ends


def flux_diff_residual(grid: Grid, kind: FluxKind | str, a, u, sat: SatKind | str = SatKind.CONSERVATIVE, sigma: float = 0.0):
    if grid.op.periodic:
        sat = SatKind.NONE
    cfg = SchemeConfig(flux=FluxKind(kind), sat=sat, sigma=sigma)
    return Semidiscretization(grid, cfg, a).residual(u)


def split_form_residual(grid: Grid, alpha: float, a, u, sat: SatKind | str = SatKind.CONSERVATIVE, sigma: float = 0.0):
    if grid.op.periodic:
        sat = SatKind.NONE
    cfg = SchemeConfig(alpha=alpha, sat=sat, sigma=sigma)
    return Semidiscretization(grid, cfg, a).residual(u)


def burgers_residual(grid: Grid, alpha: float, u, sigma: float = 0.0):
    if grid.op.periodic:
        sat = SatKind.NONE
    else:
        sat = SatKind.UPWIND if sigma > 0 else SatKind.CONSERVATIVE
    cfg = SchemeConfig(equation=Equation.BURGERS, alpha=alpha, sat=sat, sigma=sigma)
    return Semidiscretization(grid, cfg).residual(u)


def sat_terms(grid: Grid, config: SchemeConfig, u, a=None):
    return Semidiscretization(grid, config, a).sat(np.asarray(u, dtype=float))


def volume_dissipation(grid: Grid, s: int, eps: float, variable: DissVariable | str, u, kind: FluxKind | str | None = None, a=None):
    """-eps H^-1 Dt^T Dt v with v = u or the entropy variable of ``kind``."""
    u = np.asarray(u, dtype=float)
    variable = DissVariable(variable)
    if variable is DissVariable.ENTROPY and kind is not None:
        a = np.ones_like(u) if a is None else np.asarray(a, dtype=float)
        v = fluxes.entropy_variable(kind, a, u)
    else:
        v = u
    dt = grid_undivided_difference(grid, s)
    return -eps * (dt.T @ (dt @ v)) / grid.h_diag


def sqrt_variable_residual(grid: Grid, a, w) -> np.ndarray:
    """Linear SBP-SAT scheme dw/dt = -A D w + 1/2 H^-1 A [E w - tr tl^T w_R + tl tr^T w_L].

    Assembled block by block from the boundary projection vectors. With
    w = sqrt(a u) this is the geometric scheme written in the square-root
    variable.
    """
    a = np.asarray(a, dtype=float)
    w = np.asarray(w, dtype=float)
    op = grid.op
    out = -a * (grid.d_mat @ w)
    if op.periodic:
        return out
    if not grid.periodic:
        raise ValueError("square-root SAT form is only assembled for periodic grids")
    nb = len(grid.blocks)
    for b, (s0, s1) in enumerate(grid.blocks):
        r0, r1 = grid.blocks[(b + 1) % nb]
        l0, l1 = grid.blocks[(b - 1) % nb]
        bracket = op.e_mat @ w[s0:s1] - op.tr * (op.tl @ w[r0:r1]) + op.tl * (op.tr @ w[l0:l1])
        out[s0:s1] += 0.5 * a[s0:s1] * bracket / grid.h_diag[s0:s1]
    return out
