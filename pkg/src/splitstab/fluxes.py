"""Scalar two-point fluxes for the variable-coefficient advection model.

All evaluators work elementwise on numpy arrays. A two-point flux
``F(u_i, u_j)`` is symmetric and consistent, ``F(u, u) = a u``.

Nonpositive arguments to the geometric and logarithmic means raise
:class:`FluxDomainError`; nothing is clamped here.
"""

from __future__ import annotations

import enum

import numpy as np

# switch to the series branch of the log mean when xi^2 is below this
LOG_SERIES_CUTOFF = 1e-4


class FluxKind(str, enum.Enum):
    CENTRAL = "central"
    PRODUCT = "product"
    GEOMETRIC = "geometric"
    LOGARITHMIC = "logarithmic"

    @property
    def needs_positive(self) -> bool:
        return self in (FluxKind.GEOMETRIC, FluxKind.LOGARITHMIC)


class FluxDomainError(ValueError):
    """A flux was evaluated outside its domain (nonpositive argument)."""

    def __init__(self, message: str, index=None):
        super().__init__(message)
        self.index = index


def _check_positive(name: str, *arrays: np.ndarray) -> None:
    for arr in arrays:
        arr = np.asarray(arr)
        bad = ~(arr > 0)
        if np.any(bad):
            idx = np.argwhere(bad)
            first = tuple(int(v) for v in idx[0]) if arr.ndim else ()
            raise FluxDomainError(
                f"{name} flux needs strictly positive arguments, got {arr[first] if arr.ndim else arr} at {first}",
                index=first,
            )


def flux_central(fi, fj):
    return 0.5 * (np.asarray(fi) + np.asarray(fj))


def flux_product(ai, ui, aj, uj):
    return 0.5 * (np.asarray(ai) * uj + np.asarray(aj) * ui)


def flux_geometric(fi, fj):
    fi = np.asarray(fi, dtype=float)
    fj = np.asarray(fj, dtype=float)
    _check_positive("geometric", fi, fj)
    return np.sqrt(fi * fj)


def _atanh_series(t2):
    """1 + t^2/3 + t^4/5 + t^6/7, the series of atanh(t)/t."""
    return 1.0 + t2 * (1.0 / 3.0 + t2 * (1.0 / 5.0 + t2 / 7.0))


def log_mean(x, y):
    """Logarithmic mean (y - x) / (log y - log x) of positive numbers.

    Near x = y the ratio is evaluated through t = (y - x)/(y + x) and the
    truncated series of atanh(t)/t, which avoids the 0/0 cancellation.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_positive("logarithmic", x, y)
    s = x + y
    t = (y - x) / s
    t2 = t * t
    small = t2 < LOG_SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (y - x) / (np.log(y) - np.log(x))
    series = 0.5 * s / _atanh_series(t2)
    return np.where(small, series, direct)


def flux_logarithmic(fi, fj):
    return log_mean(fi, fj)


def log_mean_dx(x, y):
    """Partial derivative of ``log_mean(x, y)`` with respect to ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_positive("logarithmic", x, y)
    s = x + y
    t = (y - x) / s
    t2 = t * t
    small = t2 < LOG_SERIES_CUTOFF
    g = _atanh_series(t2)
    dg = t * (2.0 / 3.0 + t2 * (4.0 / 5.0 + t2 * 6.0 / 7.0))
    series = 0.5 / g + dg * y / (g * g * s)
    with np.errstate(divide="ignore", invalid="ignore"):
        lm = (y - x) / (np.log(y) - np.log(x))
        direct = (lm / x - 1.0) / (np.log(y) - np.log(x))
    return np.where(small, series, direct)


def two_point_flux(kind: FluxKind | str, ai, ui, aj, uj):
    """Evaluate the two-point flux of the given kind."""
    kind = FluxKind(kind)
    if kind is FluxKind.CENTRAL:
        return flux_central(np.asarray(ai) * ui, np.asarray(aj) * uj)
    if kind is FluxKind.PRODUCT:
        return flux_product(ai, ui, aj, uj)
    if kind is FluxKind.GEOMETRIC:
        return flux_geometric(np.asarray(ai) * ui, np.asarray(aj) * uj)
    return flux_logarithmic(np.asarray(ai) * ui, np.asarray(aj) * uj)


def flux_partials(kind: FluxKind | str, ai, ui, aj, uj):
    """Partials of ``F(u_i, u_j)`` with respect to ``u_i`` and ``u_j``.

    Where both arguments coincide (same node) the partials are ``a_i / 2``.
    """
    kind = FluxKind(kind)
    ai, ui, aj, uj = (np.asarray(v, dtype=float) for v in (ai, ui, aj, uj))
    if kind is FluxKind.CENTRAL:
        d1 = 0.5 * ai + 0.0 * uj
        d2 = 0.5 * aj + 0.0 * ui
    elif kind is FluxKind.PRODUCT:
        d1 = 0.5 * aj + 0.0 * ui
        d2 = 0.5 * ai + 0.0 * uj
    elif kind is FluxKind.GEOMETRIC:
        fi = ai * ui
        fj = aj * uj
        _check_positive("geometric", fi, fj)
        ratio = np.sqrt(fj / fi)
        d1 = 0.5 * ai * ratio
        d2 = 0.5 * aj / ratio
    else:
        fi = ai * ui
        fj = aj * uj
        d1 = ai * log_mean_dx(fi, fj)
        d2 = aj * log_mean_dx(fj, fi)
    same = (ai == aj) & (ui == uj)
    if np.any(same):
        d1 = np.where(same, 0.5 * ai, d1)
        d2 = np.where(same, 0.5 * ai, d2)
    return d1, d2


def entropy_variable(kind: FluxKind | str, a, u):
    """Entropy variable of the scheme.

    a u for the central flux (a-energy), -1/sqrt(a u) for the geometric flux,
    log(a u) for the logarithmic flux and u (plain energy) otherwise.
    """
    kind = FluxKind(kind)
    a = np.asarray(a, dtype=float)
    u = np.asarray(u, dtype=float)
    if kind is FluxKind.GEOMETRIC:
        _check_positive("geometric", a * u)
        return -1.0 / np.sqrt(a * u)
    if kind is FluxKind.LOGARITHMIC:
        _check_positive("logarithmic", a * u)
        return np.log(a * u)
    if kind is FluxKind.CENTRAL:
        return a * u
    return u


def entropy_variable_du(kind: FluxKind | str, a, u):
    """Derivative of :func:`entropy_variable` with respect to ``u``."""
    kind = FluxKind(kind)
    a = np.asarray(a, dtype=float)
    u = np.asarray(u, dtype=float)
    if kind is FluxKind.GEOMETRIC:
        return 0.5 * a / (a * u) ** 1.5
    if kind is FluxKind.LOGARITHMIC:
        return 1.0 / u
    if kind is FluxKind.CENTRAL:
        return a + 0.0 * u
    return np.ones_like(u)


def entropy_density(kind: FluxKind | str, a, u):
    """Pointwise entropy whose u-derivative is :func:`entropy_variable`."""
    kind = FluxKind(kind)
    a = np.asarray(a, dtype=float)
    u = np.asarray(u, dtype=float)
    if kind is FluxKind.GEOMETRIC:
        return -2.0 * np.sqrt(u / a)
    if kind is FluxKind.LOGARITHMIC:
        return u * np.log(a * u) - u
    if kind is FluxKind.CENTRAL:
        return 0.5 * a * u * u
    return 0.5 * u * u
