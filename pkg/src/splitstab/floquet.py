"""Monodromy matrices of time-periodic linear systems dv/dt = J(t) v.

The propagator over one period is approximated with the exponential midpoint
rule, one matrix exponential per sub-interval, multiplied in ascending time
order. Matrix exponentials come from :func:`scipy.linalg.expm` (scaling and
squaring with a Pade approximant).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla


class FloquetError(RuntimeError):
    pass


def expm(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    out = sla.expm(m)
    if not np.all(np.isfinite(out)):
        raise FloquetError("matrix exponential overflowed")
    return out


def _conserved_basis(conserved) -> np.ndarray | None:
    """Orthonormal basis of the complement of the conserved left vectors."""
    if conserved is None:
        return None
    c = np.atleast_2d(np.asarray(conserved, dtype=float))
    n = c.shape[1]
    q, _ = np.linalg.qr(c.T, mode="complete")
    return q[:, c.shape[0] :] if n > c.shape[0] else None


def floquet_multipliers(psi: np.ndarray, conserved=None) -> np.ndarray:
    """Eigenvalues of ``psi``.

    ``conserved`` may hold row vectors l with l^T psi = l^T exactly (linear
    invariants such as total mass). Their multiplier 1 is known, and the rest
    of the spectrum is taken from psi restricted to the invariant subspace
    l^T v = 0. This removes the Jordan coupling between the conserved mode
    and its partner, which would otherwise limit the accuracy of the computed
    moduli to about the square root of machine precision.
    """
    basis = _conserved_basis(conserved)
    if basis is None:
        return np.linalg.eigvals(psi)
    k = psi.shape[0] - basis.shape[1]
    inner = np.linalg.eigvals(basis.T @ psi @ basis)
    return np.concatenate([np.ones(k, dtype=complex), inner])


@dataclass
class Monodromy:
    period: float
    snapshots: int
    psi: np.ndarray
    multipliers: np.ndarray
    exponents: np.ndarray
    sigma_max: float | None = None
    dominant_mode: np.ndarray | None = None
    history: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "T": self.period,
            "K": self.snapshots,
            "multipliers": [{"re": float(z.real), "im": float(z.imag)} for z in self.multipliers],
            "exponents": [{"re": float(z.real), "im": float(z.imag)} for z in self.exponents],
            "sigma_max": self.sigma_max,
            "max_abs_re_exponent": float(np.max(np.abs(self.exponents.real))),
            "convergence": self.history,
            "notes": self.warnings,
        }


def propagate(provider: Callable[[float], np.ndarray], t0: float, t1: float, k: int) -> np.ndarray:
    """Exponential-midpoint propagator from t0 to t1 with k sub-intervals."""
    if k < 1:
        raise ValueError("need at least one snapshot")
    dt = (t1 - t0) / k
    psi = None
    for j in range(k):
        e = expm(provider(t0 + (j + 0.5) * dt) * dt)
        psi = e if psi is None else e @ psi
    return psi


def _exponents(mult: np.ndarray, period: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(mult.astype(complex)) / period


def monodromy(
    provider: Callable[[float], np.ndarray],
    period: float,
    k: int = 256,
    tol: float | None = 1e-8,
    k_max: int = 2**20,
    conserved=None,
) -> Monodromy:
    """Monodromy over one period; with ``tol`` set, double K until max|rho| settles."""
    psi = propagate(provider, 0.0, period, k)
    mult = floquet_multipliers(psi, conserved)
    history = [{"K": k, "max_abs_rho": float(np.max(np.abs(mult)))}]
    if tol is not None:
        while True:
            if 2 * k > k_max:
                raise FloquetError(f"monodromy not converged at K={k}: last two max|rho| {history[-2:]}")
            k *= 2
            psi_new = propagate(provider, 0.0, period, k)
            mult_new = floquet_multipliers(psi_new, conserved)
            history.append({"K": k, "max_abs_rho": float(np.max(np.abs(mult_new)))})
            change = abs(history[-1]["max_abs_rho"] - history[-2]["max_abs_rho"])
            psi, mult = psi_new, mult_new
            if change < tol:
                break
    return Monodromy(period, k, psi, mult, _exponents(mult, period), history=history)


def floquet_diagnostics(mono: Monodromy, h_diag=None) -> Monodromy:
    """Fill in sigma_max (in the H norm) and the dominant Floquet mode."""
    psi = mono.psi
    hd = np.ones(psi.shape[0]) if h_diag is None else np.asarray(h_diag, dtype=float)
    s = np.sqrt(hd)
    mono.sigma_max = float(np.linalg.norm(s[:, None] * psi / s[None, :], 2))
    lam, vec = np.linalg.eig(psi)
    res = np.linalg.norm(psi @ vec - vec * lam[None, :], axis=0) / np.linalg.norm(vec, axis=0)
    # a Jordan block gives tiny residuals but (nearly) parallel eigenvectors
    cond = np.linalg.cond(vec)
    if np.max(res) > 1e-6 or not cond < 1e12:
        msg = f"monodromy looks defective (eigen residual {np.max(res):.2e}, eigenvector condition {cond:.2e})"
        mono.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    mode = vec[:, np.argmax(np.abs(lam))]
    if np.max(np.abs(mode.imag)) < 1e-12 * np.max(np.abs(mode)):
        mode = mode.real
    mono.dominant_mode = mode
    return mono
