"""Linearized operators: analytic Jacobians, symmetric parts and an FD oracle."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fluxes import FluxKind
from .operators import Grid
from .semidisc import Equation, SatKind, SchemeConfig, Semidiscretization


class Provenance(str, enum.Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "finite_difference"


class Weighting(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    HNORM = "hnorm"
    AHNORM = "ahnorm"


@dataclass(frozen=True)
class JacobianMatrix:
    matrix: np.ndarray
    baseflow: np.ndarray | None
    scheme: SchemeConfig | None
    provenance: Provenance


def jac_fd(residual: Callable[[np.ndarray], np.ndarray], u: np.ndarray, step: float = 1e-7) -> np.ndarray:
    """Central finite-difference Jacobian, column step ``step * max(|u_j|, 1)``."""
    u = np.asarray(u, dtype=float)
    n = u.size
    r0 = np.asarray(residual(u))
    jac = np.empty((r0.size, n))
    for j in range(n):
        dh = step * max(abs(u[j]), 1.0)
        up = u.copy()
        um = u.copy()
        up[j] += dh
        um[j] -= dh
        jac[:, j] = (residual(up) - residual(um)) / (2.0 * dh)
    return jac


def _default_sat(grid: Grid) -> SatKind:
    return SatKind.NONE if grid.op.periodic else SatKind.CONSERVATIVE


def jac_split_form(grid: Grid, alpha: float, a, config: SchemeConfig | None = None) -> JacobianMatrix:
    """J(alpha) = -alpha D A - (1 - alpha) A D - (1 - alpha) diag(D a) plus SAT/dissipation."""
    if config is None:
        config = SchemeConfig(alpha=alpha, sat=_default_sat(grid))
    sd = Semidiscretization(grid, config, a)
    return JacobianMatrix(sd.jacobian(), None, config, Provenance.ANALYTIC)


def jac_flux_diff(grid: Grid, kind: FluxKind | str, a, u, config: SchemeConfig | None = None) -> JacobianMatrix:
    """Hadamard form -2 D o dF2 - 2 diag((D o dF1) 1) plus SAT/dissipation terms."""
    if config is None:
        config = SchemeConfig(flux=FluxKind(kind), sat=_default_sat(grid))
    sd = Semidiscretization(grid, config, a)
    u = np.asarray(u, dtype=float)
    return JacobianMatrix(sd.jacobian(u), u.copy(), config, Provenance.ANALYTIC)


def jac_geometric_compact(grid: Grid, a, u) -> np.ndarray:
    """Volume part of the geometric Jacobian, -diag(Dw) A W^-1 - W D A W^-1."""
    a = np.asarray(a, dtype=float)
    u = np.asarray(u, dtype=float)
    w = np.sqrt(a * u)
    d = grid.d_mat
    return -np.diag(d @ w) * (a / w)[None, :] - w[:, None] * d * (a / w)[None, :]


def jac_burgers(grid: Grid, alpha: float, u, sigma: float = 0.0) -> JacobianMatrix:
    """Burgers split-form Jacobian; sigma > 0 uses finite differences."""
    u = np.asarray(u, dtype=float)
    if grid.op.periodic:
        sat = SatKind.NONE
    else:
        sat = SatKind.UPWIND if sigma > 0 else SatKind.CONSERVATIVE
    cfg = SchemeConfig(equation=Equation.BURGERS, alpha=alpha, sat=sat, sigma=sigma)
    sd = Semidiscretization(grid, cfg)
    if sigma > 0 and grid.interfaces:
        return JacobianMatrix(jac_fd(sd.residual, u), u.copy(), cfg, Provenance.FINITE_DIFFERENCE)
    return JacobianMatrix(sd.jacobian(u), u.copy(), cfg, Provenance.ANALYTIC)


def jacobian_for(sd: Semidiscretization, u=None) -> JacobianMatrix:
    """Analytic Jacobian where available, otherwise the FD oracle."""
    cfg = sd.config
    if cfg.equation is Equation.BURGERS and cfg.sigma > 0 and sd.grid.interfaces:
        return JacobianMatrix(jac_fd(sd.residual, u), np.asarray(u, dtype=float).copy(), cfg, Provenance.FINITE_DIFFERENCE)
    base = None if u is None else np.asarray(u, dtype=float).copy()
    return JacobianMatrix(sd.jacobian(u), base, cfg, Provenance.ANALYTIC)


def jac_sym(jac: np.ndarray, weighting: Weighting | str = Weighting.EUCLIDEAN, h_diag=None, a=None) -> np.ndarray:
    """Symmetric part of J in the chosen inner product.

    Euclidean gives (J + J^T)/2; Hnorm gives (J^T H + H J)/2 and AHnorm uses
    the weight A H in place of H.
    """
    weighting = Weighting(weighting)
    jac = np.asarray(jac, dtype=float)
    if weighting is Weighting.EUCLIDEAN:
        return 0.5 * (jac + jac.T)
    if h_diag is None:
        raise ValueError("H weighting needs the norm diagonal")
    wgt = np.asarray(h_diag, dtype=float)
    if weighting is Weighting.AHNORM:
        if a is None:
            raise ValueError("AH weighting needs the coefficient")
        wgt = wgt * np.asarray(a, dtype=float)
    hj = wgt[:, None] * jac
    return 0.5 * (hj + hj.T)


def log_circulant_sym_closed_form(grid: Grid, u) -> np.ndarray:
    """Entries of (J + J^T)/2 for the logarithmic scheme with a = 1 on a circulant grid.

    With D skew-symmetric the Hadamard form gives, for i != j,
    S_ij = -D_ij (dF2_ij - dF2_ji) and S_ii = -2 sum_j D_ij dF1_ij, where the
    partials are those of the logarithmic mean.
    """
    from .fluxes import log_mean_dx

    if not grid.op.periodic:
        raise ValueError("closed form assumes a circulant operator")
    u = np.asarray(u, dtype=float)
    d = grid.d_mat
    ui = u[:, None]
    uj = u[None, :]
    # dF/du_j at (i, j) is the x-derivative of the log mean with arguments swapped
    d2 = log_mean_dx(np.broadcast_to(uj, d.shape), np.broadcast_to(ui, d.shape))
    d1 = log_mean_dx(np.broadcast_to(ui, d.shape), np.broadcast_to(uj, d.shape))
    s = -d * (d2 - d2.T)
    np.fill_diagonal(s, 0.0)
    s[np.diag_indices_from(s)] = -2.0 * np.sum(d * d1, axis=1)
    return s
