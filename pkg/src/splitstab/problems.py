"""Coefficient functions, initial conditions and exact solutions.

The advection problem is u_t + (a(x) u)_x = 0 on a periodic interval. The
product q = a u is constant along characteristics dx/dt = a(x), so the exact
solution follows from the travel-time map tau(x) = int_{x_min}^x ds / a(s).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable

import numpy as np

Array = np.ndarray


def constant(value: float = 1.0) -> Callable[[Array], Array]:
    def a(x):
        return np.full_like(np.asarray(x, dtype=float), value)

    return a


def sinusoid(x: Array) -> Array:
    """sin(2 pi x) + 3/2."""
    return np.sin(2.0 * np.pi * np.asarray(x, dtype=float)) + 1.5


def skewed_sinusoid(x: Array, n: int = 5, x_min: float = 0.0, x_max: float = 1.0) -> Array:
    """Positive periodic coefficient with a steep front, built from n binomially weighted harmonics."""
    x = np.asarray(x, dtype=float)
    theta = 2.0 * np.pi * (x - x_min) / (x_max - x_min) + 4.0
    out = np.full_like(x, 1.5)
    norm = comb(2 * n, n)
    for k in range(1, n + 1):
        out += comb(2 * n, n - k) / (norm * k) * np.sin(k * theta)
    return out


COEFFICIENTS: dict[str, Callable[[Array], Array]] = {
    "constant": constant(1.0),
    "sinusoid": sinusoid,
    "skewed_sinusoid": skewed_sinusoid,
}


def gaussian(x: Array, center: float = 0.5, width: float = 0.08, offset: float = 0.5) -> Array:
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * ((x - center) / width) ** 2) + offset


def density_wave(x: Array, amplitude: float = 0.98, shift: float = 0.0) -> Array:
    """amplitude * sin(2 pi x) + 1 + shift."""
    return amplitude * np.sin(2.0 * np.pi * np.asarray(x, dtype=float)) + 1.0 + shift


INITIAL_CONDITIONS: dict[str, Callable[[Array], Array]] = {
    "gaussian": gaussian,
    "density_wave": density_wave,
}


def periodic_wrap(x: Array, x_min: float, x_max: float) -> Array:
    length = x_max - x_min
    return x_min + np.mod(np.asarray(x, dtype=float) - x_min, length)


@dataclass
class CharacteristicMap:
    """Exact solution operator of u_t + (a u)_x = 0 with periodic a > 0.

    The travel time tau(x) is the antiderivative of the periodic function
    1/a. It is represented by its Fourier series, whose coefficients come
    from the trapezoidal rule on M equispaced points (spectrally accurate for
    smooth periodic integrands); M is doubled until the coefficient tail
    drops below roundoff. The inverse map is found by Newton's method.
    """

    a: Callable[[Array], Array]
    x_min: float = 0.0
    x_max: float = 1.0
    tol: float = 1e-12
    max_modes: int = 2**16

    def __post_init__(self):
        length = self.x_max - self.x_min
        m = 64
        while True:
            s = self.x_min + length * np.arange(m) / m
            av = np.asarray(self.a(s), dtype=float)
            if np.any(~(av > 0)):
                raise ValueError("coefficient must be positive")
            inv = 1.0 / av
            coef = np.fft.rfft(inv) / m
            tail = np.max(np.abs(coef[m // 4 :]))
            if tail < 1e-16 * abs(coef[0]) or m >= self.max_modes:
                break
            m *= 2
        if tail >= 1e-14 * abs(coef[0]):
            raise ValueError(f"1/a is not resolved by {m} Fourier modes (tail {tail:.1e})")
        self.modes = m
        self._mean = float(coef[0].real)
        k = np.arange(1, coef.size)
        if m % 2 == 0:
            coef[-1] *= 0.5  # Nyquist term is shared by +k and -k
        self._omega = 2.0 * np.pi * k / length
        self._c = coef[1:]
        self.period = self._mean * length

    def _periodic_part(self, x: Array) -> Array:
        z = np.asarray(x, dtype=float)[..., None] - self.x_min
        return np.sum(2.0 * np.real(self._c * (np.exp(1j * self._omega * z) - 1.0) / (1j * self._omega)), axis=-1)

    def tau(self, x) -> Array:
        """Travel time from x_min to x."""
        x = np.asarray(x, dtype=float)
        return self._mean * (x - self.x_min) + self._periodic_part(x)

    def tau_inverse(self, t) -> Array:
        """Position reached from x_min after time t (for t in [0, period])."""
        t = np.asarray(t, dtype=float)
        x = self.x_min + (self.x_max - self.x_min) * t / self.period
        for _ in range(60):
            step = (self.tau(x) - t) * np.asarray(self.a(x), dtype=float)
            x = np.clip(x - step, self.x_min, self.x_max)
            if np.max(np.abs(step)) <= self.tol:
                return x
        raise RuntimeError("characteristic inversion did not converge")

    def foot(self, x: Array, t: float) -> Array:
        """Departure point at time 0 of the characteristic through (x, t)."""
        x = periodic_wrap(x, self.x_min, self.x_max)
        s = np.mod(self.tau(x) - t, self.period)
        return self.tau_inverse(s)

    def solution(self, u0: Callable[[Array], Array], x: Array, t: float) -> Array:
        x = np.asarray(x, dtype=float)
        x0 = self.foot(x, t)
        return self.a(x0) * u0(x0) / self.a(periodic_wrap(x, self.x_min, self.x_max))


def shifted_solution(u0: Callable[[Array], Array], speed: float, x_min: float, x_max: float) -> Callable[[Array, float], Array]:
    """Exact solution u0(x - speed t) of constant-speed advection on a periodic interval."""

    def sol(x, t):
        return u0(periodic_wrap(np.asarray(x, dtype=float) - speed * t, x_min, x_max))

    return sol
