"""Phase-space primitives: parameters, grids, quadrature and special functions.

All quantities are dimensionless: lengths in units of sqrt(hbar/(m omega)),
momenta in units of sqrt(hbar m omega), energies in units of hbar omega, and
hbar = 1 throughout. The non-Hermitian parameters alpha, beta, gamma enter the
decay-rate operator as

    Gamma = alpha/2 p^2 + beta/2 q^2 + gamma/2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Model",
    "NhParams",
    "ModeIndex",
    "WignerGrid",
    "ParameterError",
    "GridMismatchError",
    "laguerre",
    "laguerre_all",
    "make_grid",
    "integrate",
    "inner_product",
    "l2_norm",
    "expectation",
    "hamiltonian_symbol",
    "decay_symbol",
    "MIN_POINTS",
    "rotational_asymmetry",
]

MIN_POINTS = 16


class ParameterError(ValueError):
    """Invalid physical or numerical parameter."""


class GridMismatchError(ValueError):
    """Two grids with different geometry were combined."""


class Model(enum.Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    GENERAL = "general"


@dataclass(frozen=True)
class NhParams:
    """Dimensionless non-Hermitian oscillator parameters.

    ``alpha`` may be zero (Hermitian limit); it may not be negative. ``beta``
    carries a sign so that the hyperbolic model ``beta = -alpha`` is
    representable. Classification compares the entered values exactly: pass
    ``beta=alpha`` literally to request the elliptic model.
    """

    alpha: float
    beta: float
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
        if self.alpha < 0:
            raise ParameterError(f"alpha must be non-negative, got {self.alpha!r}")

    @classmethod
    def elliptic(cls, alpha: float, gamma: float = 0.0) -> "NhParams":
        return cls(alpha, alpha, gamma)

    @classmethod
    def hyperbolic(cls, alpha: float, gamma: float = 0.0) -> "NhParams":
        return cls(alpha, -alpha, gamma)

    @property
    def is_elliptic(self) -> bool:
        return self.beta == self.alpha

    @property
    def is_hyperbolic(self) -> bool:
        return self.beta == -self.alpha

    def classification(self) -> Model:
        # alpha == beta == 0 satisfies both; the elliptic reading wins.
        if self.is_elliptic:
            return Model.ELLIPTIC
        if self.is_hyperbolic:
            return Model.HYPERBOLIC
        return Model.GENERAL


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Quantum-number pair (n, nu): radial index n >= 0, angular index nu."""

    n: int
    nu: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or int(self.nu) != self.nu:
            raise ParameterError(f"mode indices must be integers, got ({self.n}, {self.nu})")
        if self.n < 0:
            raise ParameterError(f"radial index n must be >= 0, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "nu", int(self.nu))


@dataclass
class WignerGrid:
    """Real Wigner function sampled on the square [-L, L]^2.

    ``values[i, j]`` holds W(q_i, p_j); both axes use the same uniform,
    endpoint-inclusive coordinates ``-L + k * 2L/(N-1)``.
    """

    half_width: float
    n_points: int
    values: np.ndarray = field(repr=False)
    t: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.n_points, self.n_points):
            raise ValueError(
                f"values must have shape {(self.n_points, self.n_points)}, got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Wigner function values must be finite")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n_points - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n_points)

    q = axis
    p = axis

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (Q, P) coordinate arrays matching ``values``."""
        x = self.axis
        return np.meshgrid(x, x, indexing="ij")

    def polar(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (R, Phi) with Phi = atan2(p, q)."""
        Q, P = self.mesh()
        return np.hypot(Q, P), np.arctan2(P, Q)

    def same_geometry(self, other: "WignerGrid") -> bool:
        return self.half_width == other.half_width and self.n_points == other.n_points

    def with_values(self, values: np.ndarray, t: float | None = None) -> "WignerGrid":
        return WignerGrid(self.half_width, self.n_points, values, self.t if t is None else t)

    def copy(self) -> "WignerGrid":
        return self.with_values(self.values.copy())


def laguerre_all(n_max: int, a: int, x) -> np.ndarray:
    """Generalized Laguerre polynomials L_0^a(x) ... L_{n_max}^a(x).

    Uses the upward recurrence
    (k+1) L_{k+1} = (2k + 1 + a - x) L_k - (k + a) L_{k-1},
    which is stable for the non-negative arguments used here. The result has a
    leading axis of length ``n_max + 1``.
    """
    if n_max < 0 or a < 0:
        raise ParameterError(f"need n >= 0 and a >= 0, got n={n_max}, a={a}")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + a - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 + a - x) * out[k] - (k + a) * out[k - 1]) / (k + 1)
    return out


def laguerre(n: int, a: int, x):
    """Generalized Laguerre polynomial L_n^a(x) by three-term recurrence.

    >>> laguerre(2, 0, 2.0)
    -1.0
    """
    result = laguerre_all(n, a, x)[n]
    return float(result) if result.ndim == 0 else result


def make_grid(L: float, N: int) -> WignerGrid:
    """Zero-valued grid on [-L, L]^2 with N points per axis at t = 0."""
    if not (math.isfinite(L) and L > 0):
        raise ParameterError(f"half-width L must be positive, got {L!r}")
    if int(N) != N or N < MIN_POINTS:
        raise ParameterError(f"need an integer N >= {MIN_POINTS}, got {N!r}")
    N = int(N)
    return WignerGrid(float(L), N, np.zeros((N, N)), 0.0)


def _trapezoid_weights(grid: WignerGrid) -> np.ndarray:
    w = np.full(grid.n_points, grid.spacing)
    w[0] = w[-1] = 0.5 * grid.spacing
    return w


def _quadrature(grid: WignerGrid, integrand: np.ndarray) -> float:
    # Row sums first, then a weighted sum across rows: fixed reduction order.
    w = _trapezoid_weights(grid)
    return float(w @ (integrand @ w))


def integrate(W: WignerGrid) -> float:
    """Trapezoidal integral of W over the grid, i.e. the trace of the density operator."""
    return _quadrature(W, W.values)


def inner_product(W1: WignerGrid, W2: WignerGrid) -> float:
    """Phase-space overlap integral of two grids (measure dq dp)."""
    if not W1.same_geometry(W2):
        raise GridMismatchError(
            f"grids differ: (L={W1.half_width}, N={W1.n_points}) vs (L={W2.half_width}, N={W2.n_points})"
        )
    return _quadrature(W1, W1.values * W2.values)


def l2_norm(W: WignerGrid) -> float:
    return math.sqrt(max(inner_product(W, W), 0.0))


def expectation(W: WignerGrid, symbol: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
    """Un-normalized phase-space average of a Weyl symbol A_W(q, p).

    Returns the integral of W * A_W. Divide by :func:`integrate` for the
    normalized average. For the quadratic symbols used here (H_W, Gamma_W) the
    Weyl-symbol average equals the quantum expectation value exactly; no
    ordering correction is needed because the Weyl transform of p^2 is p^2.
    """
    Q, P = W.mesh()
    values = np.broadcast_to(np.asarray(symbol(Q, P), dtype=float), W.values.shape)
    return _quadrature(W, W.values * values)


def hamiltonian_symbol(q, p):
    """Weyl symbol of the oscillator Hamiltonian, (p^2 + q^2)/2."""
    return 0.5 * (p * p + q * q)


def decay_symbol(params: NhParams) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Weyl symbol of the decay-rate operator for ``params``."""

    def gamma_w(q, p):
        return 0.5 * (params.alpha * p * p + params.beta * q * q + params.gamma)

    return gamma_w


def rotational_asymmetry(W: WignerGrid) -> float:
    """Largest spread of W over grid points at identical distance from the origin.

    Points are grouped by the exact integer key i^2 + j^2 of their offset from
    the central node (N must be odd), which includes pairs such as (5, 0) and
    (3, 4) that are not related by a grid symmetry. The spread is relative to
    max|W|.
    """
    N = W.n_points
    if N % 2 == 0:
        raise ParameterError("rotational asymmetry needs a grid with a central node (odd N)")
    v = W.values
    peak = np.max(np.abs(v))
    if peak == 0:
        return 0.0
    k = np.arange(N) - (N - 1) // 2
    key = (k[:, None] ** 2 + k[None, :] ** 2).ravel()
    order = np.argsort(key, kind="stable")
    key_sorted = key[order]
    vals = v.ravel()[order]
    starts = np.flatnonzero(np.r_[True, key_sorted[1:] != key_sorted[:-1]])
    spread = np.maximum.reduceat(vals, starts) - np.minimum.reduceat(vals, starts)
    return float(spread.max() / peak)
