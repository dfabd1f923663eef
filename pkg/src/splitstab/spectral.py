"""Eigen-diagnostics of linearized operators.

Besides plain spectra this module measures how much of an eigenmode lives on
block boundaries (``rho_bdy``), splits the growth rate of a mode into nodal
contributions (``local_growth``) and evaluates the frozen-coefficient
predictor for the growth rate of a locally sinusoidal perturbation.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .jacobian import Weighting, jac_sym


class SpectralError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rho_bdy: np.ndarray
    re_lambda_max: float
    spectral_radius: float
    max_residual: float

    def to_json(self) -> list[dict]:
        return [
            {"re": float(lam.real), "im": float(lam.imag), "rho_bdy": float(r)}
            for lam, r in zip(self.eigenvalues, self.rho_bdy)
        ]


def rho_bdy(phi: np.ndarray, h_diag: np.ndarray, boundary: np.ndarray) -> float:
    """Share of the H-norm of ``phi`` carried by the boundary nodes."""
    phi = np.asarray(phi)
    w = np.asarray(h_diag) * np.abs(phi) ** 2
    total = float(np.sum(w))
    if total == 0.0:
        raise ValueError("rho_bdy of the zero vector is undefined")
    if len(boundary) == 0:
        return 0.0
    return float(np.sum(w[np.asarray(boundary, dtype=int)]) / total)


def eig(jac: np.ndarray, h_diag: np.ndarray | None = None, boundary=None) -> SpectrumReport:
    """Full spectrum, sorted by descending real part, with per-mode ``rho_bdy``."""
    jac = np.asarray(jac, dtype=float)
    n = jac.shape[0]
    try:
        lam, vec = sla.eig(jac, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise SpectralError(f"eigensolver failed: {exc}") from exc
    order = np.lexsort((-lam.imag, -lam.real))
    lam = lam[order]
    vec = vec[:, order]
    norms = np.linalg.norm(vec, axis=0)
    res = np.linalg.norm(jac @ vec - vec * lam[None, :], axis=0) / norms
    hd = np.ones(n) if h_diag is None else np.asarray(h_diag)
    bnd = np.zeros(0, dtype=int) if boundary is None else np.asarray(boundary, dtype=int)
    rb = np.array([rho_bdy(vec[:, k], hd, bnd) for k in range(n)])
    return SpectrumReport(
        eigenvalues=lam,
        eigenvectors=vec,
        rho_bdy=rb,
        re_lambda_max=float(lam.real.max()),
        spectral_radius=float(np.abs(lam).max()),
        max_residual=float(res.max()),
    )


def local_growth(phi, jac, h_diag, a=None, weighting: Weighting | str = Weighting.HNORM) -> np.ndarray:
    """g_i = Re(conj(phi_i) (S_W phi)_i) / ||phi||_W^2, summing to Re(lambda) for eigenvectors."""
    weighting = Weighting(weighting)
    phi = np.asarray(phi)
    wgt = np.asarray(h_diag, dtype=float)
    if weighting is Weighting.AHNORM:
        wgt = wgt * np.asarray(a, dtype=float)
    nrm = float(np.real(np.sum(wgt * np.abs(phi) ** 2)))
    if nrm == 0.0:
        raise ValueError("local growth of the zero vector is undefined")
    s = jac_sym(jac, weighting, h_diag, a)
    return np.real(np.conj(phi) * (s @ phi)) / nrm


def lambda_max_sym(jac, weighting: Weighting | str = Weighting.EUCLIDEAN, h_diag=None, a=None) -> float:
    """Largest eigenvalue of the symmetric part of ``jac``.

    For the H-type weightings the generalized symmetric problem S x = lambda W x
    is solved, i.e. the rate at which the weighted norm can grow.
    """
    weighting = Weighting(weighting)
    s = jac_sym(jac, weighting, h_diag, a)
    if weighting is Weighting.EUCLIDEAN:
        return float(np.linalg.eigvalsh(s)[-1])
    wgt = np.asarray(h_diag, dtype=float)
    if weighting is Weighting.AHNORM:
        wgt = wgt * np.asarray(a, dtype=float)
    r = 1.0 / np.sqrt(wgt)
    return float(np.linalg.eigvalsh(r[:, None] * s * r[None, :])[-1])


def spectral_radius(jac) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(jac, dtype=float)))))


@dataclass(frozen=True)
class GrowthPrediction:
    times: np.ndarray
    norm: np.ndarray
    coefficients: np.ndarray
    eigenvalues: np.ndarray
    ill_conditioned: bool


def project_unstable(u0, report: SpectrumReport, h_diag, times, threshold: float = 0.0) -> GrowthPrediction:
    """Project ``u0`` on the eigenbasis and evolve only modes with Re(lambda) > threshold."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    vec = report.eigenvectors
    cond = np.linalg.cond(vec)
    ill = bool(cond > 1e12)
    if ill:
        warnings.warn(f"eigenbasis condition number {cond:.2e} exceeds 1e12", RuntimeWarning, stacklevel=2)
    coef = np.linalg.solve(vec, np.asarray(u0, dtype=complex))
    keep = report.eigenvalues.real > threshold
    lam = report.eigenvalues[keep]
    c = coef[keep]
    phi = vec[:, keep]
    times = np.asarray(times, dtype=float)
    hd = np.asarray(h_diag, dtype=float)
    out = np.zeros(times.size)
    for k, t in enumerate(times):
        v = phi @ (c * np.exp(lam * t))
        out[k] = np.sqrt(np.sum(hd * np.abs(v) ** 2))
    return GrowthPrediction(times, out, c, lam, ill)


class PredictorScheme(str, enum.Enum):
    SPLIT = "split"
    GEOMETRIC = "geometric"


def frozen_coefficients(a0, a1, U0=None, U1=None, scheme: PredictorScheme | str = PredictorScheme.SPLIT, alpha: float = 0.0):
    """(beta0, beta1, nu0, nu1) of the frozen-coefficient growth model."""
    scheme = PredictorScheme(scheme)
    if a0 <= 0:
        raise ValueError("a0 must be positive")
    if scheme is PredictorScheme.SPLIT:
        return 0.0, 0.0, 0.5 * (1.0 - alpha) * a1, 0.0
    if U0 is None or U0 <= 0:
        raise ValueError("geometric predictor needs U0 > 0")
    ru = U1 / U0
    ra = a1 / a0
    beta0 = a0 / 8.0 * (ra**2 - ru**2)
    if a1 != 0:
        beta1 = -a1 / 8.0 * (ra**2 + ru**2 - 2.0 * (a0 / a1) * ru**3)
    else:
        beta1 = a0 / 4.0 * ru**3
    nu0 = 0.25 * (a1 + a0 * ru)
    nu1 = 0.25 * (a1 * ru - a0 * ru**2)
    return beta0, beta1, nu0, nu1


def frozen_rate_predictor(a0, a1, h, kappa, U0=None, U1=None, scheme: PredictorScheme | str = PredictorScheme.SPLIT, alpha: float = 0.0):
    """Real and imaginary part of the predicted eigenvalue of a local Fourier mode."""
    beta0, beta1, nu0, nu1 = frozen_coefficients(a0, a1, U0, U1, scheme, alpha)
    re = -a1 + h**2 * beta1 - h**2 * kappa**2 * nu0
    im = -a0 * kappa + h**2 * kappa * beta0 + h**2 * kappa * nu1
    return re, im
