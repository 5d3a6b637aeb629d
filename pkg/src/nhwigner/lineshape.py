"""Energy-domain picture of decaying modes: Fourier transforms and Breit-Wigner lines.

A mode with decay constant 1/tau and phase frequency nu has the time factor
T(t) = exp(-t/tau) exp(i nu t). Its half-line transform

    F(E) = int_0^inf exp(i E t) T(t) dt = 1 / (1/tau - i (E + nu))

has |F|^2 proportional to a Lorentzian centred at E = -nu with half width
at half maximum equal to the decay constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as _spi

from .core import ModeIndex, NhParams, ParameterError
from .elliptic import eigenvalue
from .evolution import hyperbolic_eigenvalue

__all__ = [
    "Lorentzian",
    "time_signal",
    "half_line_fourier",
    "half_line_fourier_numeric",
    "energy_distribution",
    "hyperbolic_energy_distribution",
    "measure_hwhm",
    "T_MAX_LIFETIMES",
]

T_MAX_LIFETIMES = 20.0


@dataclass(frozen=True)
class Lorentzian:
    """Normalized Cauchy-Lorentz (Breit-Wigner) density."""

    hwhm: float
    location: float

    def __post_init__(self):
        if not (self.hwhm > 0 and math.isfinite(self.hwhm)):
            raise ParameterError(f"HWHM must be positive and finite, got {self.hwhm!r}")

    def __call__(self, E):
        E = np.asarray(E, dtype=float)
        out = self.hwhm / math.pi / ((E - self.location) ** 2 + self.hwhm**2)
        return float(out) if out.ndim == 0 else out

    pdf = __call__

    @property
    def peak(self) -> float:
        return 1.0 / (math.pi * self.hwhm)

    def cdf(self, E):
        return 0.5 + np.arctan((np.asarray(E, dtype=float) - self.location) / self.hwhm) / math.pi

    def mass(self, lo: float, hi: float) -> float:
        """Probability contained in [lo, hi]."""
        return float(self.cdf(hi) - self.cdf(lo))

    def shifted(self, delta: float) -> "Lorentzian":
        return Lorentzian(self.hwhm, self.location + delta)


def _elliptic_rate(m: ModeIndex, params: NhParams, strict: bool) -> float:
    rate = eigenvalue(m, params).re
    if rate < 0 or (strict and rate == 0):
        raise ParameterError(
            f"decay constant {rate:.6g} of mode ({m.n}, {m.nu}) must be "
            + ("positive" if strict else "non-negative")
            + "; the half-line Fourier integral exists only in a distributional sense otherwise"
        )
    return rate


def time_signal(m: ModeIndex, params: NhParams) -> Callable:
    """t -> exp(-t/tau) exp(i nu t) for an elliptic mode with 1/tau >= 0."""
    rate = _elliptic_rate(m, params, strict=False)
    nu = m.nu

    def T(t):
        t = np.asarray(t, dtype=float)
        out = np.exp(-rate * t) * np.exp(1j * nu * t)
        return complex(out) if out.ndim == 0 else out

    return T


def half_line_fourier(m: ModeIndex, params: NhParams, E):
    """Closed-form int_0^inf exp(iEt) T(t) dt = 1 / (1/tau - i (E + nu))."""
    rate = _elliptic_rate(m, params, strict=True)
    E = np.asarray(E, dtype=float)
    out = np.asarray(1.0 / (rate - 1j * (E + m.nu)))
    return complex(out) if out.ndim == 0 else out


def half_line_fourier_numeric(m: ModeIndex, params: NhParams, E, t_max: float | None = None):
    """Quadrature of exp(iEt) T(t) over [0, t_max], default t_max = 20 tau.

    Real and imaginary parts are integrated separately by adaptive
    Gauss-Kronrod quadrature. The truncation remainder is bounded by
    tau exp(-t_max/tau).
    """
    rate = _elliptic_rate(m, params, strict=True)
    if t_max is None:
        t_max = T_MAX_LIFETIMES / rate
    energies = np.asarray(E, dtype=float).ravel()
    out = np.empty(energies.shape, dtype=complex)
    # QUADPACK's cos/sin-weighted rule (QAWO) returns wrong values with tiny
    # error estimates at some frequencies, so the plain rule is used.
    n_periods = 1 + int(np.max(np.abs(energies + m.nu)) * t_max / (2 * math.pi))
    limit = max(200, 50 * n_periods)
    for k, e in enumerate(energies):
        w = e + m.nu
        opts = dict(epsabs=0.0, epsrel=1e-12, limit=limit)
        re, _ = _spi.quad(lambda t: math.exp(-rate * t) * math.cos(w * t), 0.0, t_max, **opts)
        im, _ = _spi.quad(lambda t: math.exp(-rate * t) * math.sin(w * t), 0.0, t_max, **opts)
        out[k] = complex(re, im)
    return complex(out[0]) if np.ndim(E) == 0 else out.reshape(np.shape(E))


def energy_distribution(m: ModeIndex, params: NhParams) -> Lorentzian:
    """Breit-Wigner line of an elliptic mode: HWHM = 1/tau, location = -nu.

    The location is the signed point where |F(E)| peaks; its magnitude |nu|
    is the level spacing of the transition the mode describes.
    """
    rate = _elliptic_rate(m, params, strict=True)
    return Lorentzian(rate, float(-m.nu))


def hyperbolic_energy_distribution(nu: int, params: NhParams) -> Lorentzian:
    """Breit-Wigner line of the hyperbolic model: HWHM = gamma, location nu sqrt(1 + alpha^2)."""
    lam = hyperbolic_eigenvalue(nu, params)
    if lam.re <= 0:
        raise ParameterError(f"hyperbolic line needs gamma > 0, got {params.gamma!r}")
    return Lorentzian(lam.re, lam.im)


def measure_hwhm(E: np.ndarray, f: np.ndarray) -> float:
    """Half width at half maximum of a sampled single-peaked line.

    The half-maximum crossings on each side of the peak are located by
    linear interpolation; the result is half their separation.
    """
    E = np.asarray(E, dtype=float)
    f = np.asarray(f, dtype=float)
    k = int(np.argmax(f))
    half = 0.5 * f[k]
    left = np.flatnonzero(f[:k] < half)
    right = np.flatnonzero(f[k:] < half)
    if left.size == 0 or right.size == 0:
        raise ValueError("sampled window does not contain both half-maximum crossings")
    i = left[-1]
    e_lo = E[i] + (half - f[i]) * (E[i + 1] - E[i]) / (f[i + 1] - f[i])
    j = k + right[0]
    e_hi = E[j - 1] + (half - f[j - 1]) * (E[j] - E[j - 1]) / (f[j] - f[j - 1])
    return 0.5 * (e_hi - e_lo)
