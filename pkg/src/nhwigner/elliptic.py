"""Closed-form eigenbasis and decay spectrum of the elliptic model (beta = alpha).

For beta = alpha the phase-space generator commutes with rotations about the
origin, and separable solutions in polar coordinates (R, Phi) read

    B_{n,nu}(R, Phi, t) = exp(-lambda t) exp(i nu Phi) b_{n,nu}(R),
    b_{n,nu}(R) = (-1)^n / pi * R^|nu| exp(-R^2) L_n^|nu|(2 R^2),
    lambda_{n,nu} = alpha (2n + 1 + |nu|) + gamma - i nu.

The real combinations B+ (cosine) and B- (sine) span real Wigner functions.
For nu = 0 the radial function b_{n,0} is the Wigner function of the n-th
oscillator eigenstate and integrates to one over the plane.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Mapping

import numpy as np
from scipy import integrate as _spi

from .core import (
    ModeIndex,
    NhParams,
    ParameterError,
    WignerGrid,
    integrate,
    l2_norm,
    laguerre_all,
    make_grid,
)

__all__ = [
    "ComplexEigenvalue",
    "SpectralCoeffs",
    "CriticalState",
    "BasisFunction",
    "DegenerateBasisError",
    "NormalizationWarning",
    "eigenvalue",
    "radial_b",
    "radial_norm",
    "basis_norm_sq",
    "check_basis_norms",
    "basis_real",
    "sample_basis",
    "count_extrema",
    "count_radial_extrema",
    "angular_variation",
    "project",
    "evolve_analytic",
    "lifetime_energy_constraint",
    "resonance_energy",
    "critical_state",
    "schrodinger_form_potential",
    "sturm_liouville_energy",
    "pde_residual",
    "DEFAULT_N_MAX",
    "DEFAULT_NU_MAX",
]

DEFAULT_N_MAX = 12
DEFAULT_NU_MAX = 12
PARITIES = ("+", "-")


class DegenerateBasisError(ParameterError):
    """Requested basis member vanishes identically (B- with nu = 0)."""


class NormalizationWarning(UserWarning):
    """Initial Wigner function does not integrate to one."""


def _require_elliptic(params: NhParams) -> None:
    if not params.is_elliptic:
        raise ParameterError(
            f"elliptic model requires beta == alpha, got alpha={params.alpha!r}, beta={params.beta!r}"
        )


def _check_parity(parity: str) -> str:
    if parity not in PARITIES:
        raise ParameterError(f"parity must be '+' or '-', got {parity!r}")
    return parity


@dataclass(frozen=True)
class ComplexEigenvalue:
    """lambda = re + i im; ``re`` is the decay constant 1/tau."""

    re: float
    im: float

    @property
    def decay_constant(self) -> float:
        return self.re

    @property
    def lifetime(self) -> float:
        """Mean lifetime tau; ``math.inf`` for a non-decaying mode."""
        return math.inf if self.re == 0 else 1.0 / self.re

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


def eigenvalue(m: ModeIndex, params: NhParams) -> ComplexEigenvalue:
    _require_elliptic(params)
    nu = abs(m.nu)
    re = params.alpha * (2 * m.n + 1 + nu) + params.gamma
    return ComplexEigenvalue(re, float(-m.nu))


def _radial_values(n: int, nu: int, R: np.ndarray) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    nu = abs(nu)
    r2 = R * R
    lag = laguerre_all(n, nu, 2.0 * r2)[n]
    return (-1) ** n / math.pi * R**nu * np.exp(-r2) * lag


def radial_b(m: ModeIndex) -> Callable[[np.ndarray], np.ndarray]:
    """Radial eigenfunction R -> (-1)^n/pi R^|nu| exp(-R^2) L_n^|nu|(2R^2)."""
    n, nu = m.n, abs(m.nu)

    def b(R):
        out = _radial_values(n, nu, R)
        return float(out) if out.ndim == 0 else out

    return b


def radial_norm(n: int, nu: int) -> float:
    """Integral of b_{n,nu}(R)^2 R dR over the half-line.

    Substituting u = 2R^2 turns it into the Laguerre orthogonality integral:
    2^-(nu+2) pi^-2 (n+nu)!/n!.
    """
    nu = abs(nu)
    return 2.0 ** (-(nu + 2)) / math.pi**2 * math.factorial(n + nu) / math.factorial(n)


def basis_norm_sq(m: ModeIndex, parity: str = "+") -> float:
    """Squared L2 norm of B+/- at t = 0 over the plane (measure R dR dPhi)."""
    _check_parity(parity)
    nu = abs(m.nu)
    if nu == 0:
        if parity == "-":
            raise DegenerateBasisError("B- with nu = 0 vanishes identically")
        return 2.0 * math.pi * radial_norm(m.n, 0)
    return math.pi * radial_norm(m.n, nu)


@lru_cache(maxsize=None)
def check_basis_norms(n_max: int = DEFAULT_N_MAX, nu_max: int = DEFAULT_NU_MAX, rtol: float = 1e-8) -> float:
    """Cross-check closed-form radial norms against adaptive quadrature.

    Returns the largest relative discrepancy; raises if it exceeds ``rtol``.
    """
    worst = 0.0
    for nu in range(nu_max + 1):
        for n in range(n_max + 1):
            b = radial_b(ModeIndex(n, nu))
            numeric, _ = _spi.quad(lambda r: b(r) ** 2 * r, 0.0, np.inf, limit=400, epsabs=0, epsrel=1e-12)
            exact = radial_norm(n, nu)
            worst = max(worst, abs(numeric - exact) / exact)
    if worst > rtol:
        raise RuntimeError(f"closed-form basis norms disagree with quadrature (rel. err {worst:.3e})")
    return worst


@dataclass(frozen=True)
class BasisFunction:
    """Real eigenfunction B+ (cosine) or B- (sine) at a fixed time.

    Calling it with (R, Phi) evaluates
    A(t, R) cos[nu (t + Phi)] or A(t, R) sin[nu (t + Phi)], with
    A(t, R) = exp(-t/tau) b_{n,nu}(R).
    """

    mode: ModeIndex
    parity: str = "+"
    t: float = 0.0
    decay_constant: float = 0.0

    def amplitude(self, R) -> np.ndarray:
        return math.exp(-self.decay_constant * self.t) * _radial_values(self.mode.n, self.mode.nu, R)

    def _angular(self, Phi):
        arg = self.mode.nu * (self.t + np.asarray(Phi, dtype=float))
        return np.cos(arg) if self.parity == "+" else np.sin(arg)

    def __call__(self, R, Phi) -> np.ndarray:
        return self.amplitude(R) * self._angular(Phi)

    def time_derivative(self, R, Phi) -> np.ndarray:
        """Analytic d/dt of the basis function at (R, Phi)."""
        arg = self.mode.nu * (self.t + np.asarray(Phi, dtype=float))
        d_ang = -np.sin(arg) if self.parity == "+" else np.cos(arg)
        return -self.decay_constant * self(R, Phi) + self.mode.nu * self.amplitude(R) * d_ang

    def sample(self, L: float = 6.0, N: int = 257) -> WignerGrid:
        grid = make_grid(L, N)
        R, Phi = grid.polar()
        return grid.with_values(self(R, Phi), t=self.t)


def basis_real(
    m: ModeIndex,
    parity: str = "+",
    t: float = 0.0,
    params: NhParams | None = None,
) -> BasisFunction:
    """Real basis member B+/-_{n,nu} at time ``t``.

    ``params`` supplies the decay constant and may be omitted only at t = 0.
    Negative nu is accepted and folds onto the natural-number basis through
    B+_{n,-nu} = B+_{n,nu} and B-_{n,-nu} = -B-_{n,nu}.
    """
    _check_parity(parity)
    if m.nu == 0 and parity == "-":
        raise DegenerateBasisError("B- with nu = 0 vanishes identically")
    if t != 0 and params is None:
        raise ParameterError("params are required to evaluate the basis at t != 0")
    if t < 0:
        warnings.warn("t < 0: decaying modes grow backwards in time", RuntimeWarning, stacklevel=2)
    rate = eigenvalue(m, params).re if params is not None else 0.0
    return BasisFunction(m, parity, float(t), rate)


def sample_basis(
    n: int,
    nu: int,
    parity: str = "+",
    t: float = 0.0,
    params: NhParams | None = None,
    L: float = 6.0,
    N: int = 257,
) -> WignerGrid:
    return basis_real(ModeIndex(n, nu), parity, t, params).sample(L, N)


def count_extrema(W: WignerGrid, floor: float = 1e-6) -> int:
    """Count strict local extrema of an interior grid point in its 8-neighbourhood.

    Points with |W| <= floor * max|W| and boundary points are ignored.
    """
    v = W.values
    peak = np.max(np.abs(v))
    if peak == 0:
        return 0
    c = v[1:-1, 1:-1]
    n = v.shape[0]
    is_max = np.ones_like(c, dtype=bool)
    is_min = np.ones_like(c, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = v[1 + di : n - 1 + di, 1 + dj : n - 1 + dj]
            is_max &= c > nb
            is_min &= c < nb
    significant = np.abs(c) > floor * peak
    return int(np.count_nonzero((is_max | is_min) & significant))


def count_radial_extrema(m: ModeIndex, r_max: float = 6.0, n_samples: int = 20001, floor: float = 1e-6) -> int:
    """Number of extrema of the radial profile, counting the centre.

    The profile b(|r|) is sampled on a symmetric line through the origin, so
    the revolved surface's central extremum is counted once.
    """
    r = np.linspace(-r_max, r_max, n_samples)
    v = _radial_values(m.n, abs(m.nu), np.abs(r))
    peak = np.max(np.abs(v))
    c = v[1:-1]
    strict = ((c > v[:-2]) & (c > v[2:])) | ((c < v[:-2]) & (c < v[2:]))
    strict &= np.abs(c) > floor * peak
    # extrema are symmetric about r = 0; the central one is its own mirror
    n_off = int(np.count_nonzero(strict & (r[1:-1] > 0)))
    centre = bool(strict[n_samples // 2 - 1])
    return n_off + int(centre)


def angular_variation(f: Callable, radii, n_angles: int = 720) -> float:
    """Largest spread of f(R, .) over the circle at each radius, relative to max|f|."""
    radii = np.asarray(radii, dtype=float)
    phi = np.linspace(0.0, 2 * math.pi, n_angles, endpoint=False)
    R, P = np.meshgrid(radii, phi, indexing="ij")
    v = f(R, P)
    peak = np.max(np.abs(v))
    if peak == 0:
        return 0.0
    return float(np.max(v.max(axis=1) - v.min(axis=1)) / peak)


@dataclass
class SpectralCoeffs:
    """Real expansion coefficients over the {B+, B-} basis at t = 0.

    Keys are ``(n, nu, parity)`` with nu >= 0; minus-parity entries with
    nu = 0 are rejected. ``residual`` records the relative L2 reconstruction
    error when the coefficients come from :func:`project`.
    """

    coeffs: dict[tuple[int, int, str], float] = field(default_factory=dict)
    n_max: int = 0
    nu_max: int = 0
    residual: float | None = None

    def __post_init__(self):
        clean = {}
        for key, value in dict(self.coeffs).items():
            n, nu, parity = key
            _check_parity(parity)
            if n < 0 or nu < 0:
                raise ParameterError(f"coefficient key {key!r} has a negative index")
            if nu == 0 and parity == "-":
                raise DegenerateBasisError(f"coefficient key {key!r}: B- with nu = 0 is identically zero")
            clean[(int(n), int(nu), parity)] = float(value)
        self.coeffs = clean
        if clean:
            self.n_max = max(self.n_max, max(k[0] for k in clean))
            self.nu_max = max(self.nu_max, max(k[1] for k in clean))

    @classmethod
    def from_modes(cls, entries: Mapping[tuple[int, int, str], float]) -> "SpectralCoeffs":
        return cls(dict(entries))

    def __getitem__(self, key: tuple[int, int, str]) -> float:
        return self.coeffs.get(key, 0.0)

    def __iter__(self) -> Iterator[tuple[int, int, str]]:
        return iter(sorted(self.coeffs))

    def __len__(self) -> int:
        return len(self.coeffs)

    def items(self):
        return sorted(self.coeffs.items())

    @property
    def is_normalizable(self) -> bool:
        """True when some nu = 0 coefficient is non-zero (the state has a trace)."""
        return any(v != 0 for (n, nu, _), v in self.coeffs.items() if nu == 0)

    @property
    def trace(self) -> float:
        """Trace of the expanded state: every B+_{n,0} integrates to one."""
        return sum(v for (n, nu, _), v in self.coeffs.items() if nu == 0)


def _radial_stack(n_max: int, nu: int, R: np.ndarray) -> np.ndarray:
    r2 = R * R
    lag = laguerre_all(n_max, nu, 2.0 * r2)
    envelope = R**nu * np.exp(-r2) / math.pi
    signs = np.array([(-1) ** n for n in range(n_max + 1)], dtype=float)
    return signs.reshape((-1,) + (1,) * R.ndim) * lag * envelope


def _weights(grid: WignerGrid) -> np.ndarray:
    w = np.full(grid.n_points, grid.spacing)
    w[0] = w[-1] = 0.5 * grid.spacing
    return np.outer(w, w)


def project(
    W0: WignerGrid,
    n_max: int = DEFAULT_N_MAX,
    nu_max: int = DEFAULT_NU_MAX,
    check_normalization: bool = True,
) -> SpectralCoeffs:
    """Expand an initial Wigner function over {B+_{n,nu}(0), B-_{n,nu}(0)}.

    Coefficients are trapezoidal overlaps divided by the closed-form norms.
    The reconstruction residual ||W0 - W_rec|| / ||W0|| is stored on the
    result.
    """
    if n_max < 0 or nu_max < 0:
        raise ParameterError("truncation bounds must be non-negative")
    if W0.t != 0:
        warnings.warn("projecting a grid with t != 0 onto the t = 0 basis", RuntimeWarning, stacklevel=2)
    if check_normalization:
        tr = integrate(W0)
        if abs(tr - 1.0) > 1e-6:
            warnings.warn(f"initial Wigner function has trace {tr:.6g}, not 1", NormalizationWarning, stacklevel=2)
    check_basis_norms(max(n_max, DEFAULT_N_MAX), max(nu_max, DEFAULT_NU_MAX))

    R, Phi = W0.polar()
    weighted = _weights(W0) * W0.values
    coeffs: dict[tuple[int, int, str], float] = {}
    for nu in range(nu_max + 1):
        radial = _radial_stack(n_max, nu, R)
        parities = ("+",) if nu == 0 else ("+", "-")
        for parity in parities:
            ang = np.cos(nu * Phi) if parity == "+" else np.sin(nu * Phi)
            overlaps = np.tensordot(radial, weighted * ang, axes=2)
            for n in range(n_max + 1):
                coeffs[(n, nu, parity)] = float(overlaps[n]) / basis_norm_sq(ModeIndex(n, nu), parity)
    result = SpectralCoeffs(coeffs, n_max, nu_max)
    norm0 = l2_norm(W0)
    if norm0 > 0:
        recon = _synthesize(result, 0.0, None, W0.half_width, W0.n_points)
        result.residual = l2_norm(W0.with_values(W0.values - recon.values)) / norm0
    return result


def _synthesize(c: SpectralCoeffs, t: float, params: NhParams | None, L: float, N: int) -> WignerGrid:
    grid = make_grid(L, N)
    R, Phi = grid.polar()
    total = np.zeros_like(R)
    by_nu: dict[int, list[tuple[int, str, float]]] = {}
    for (n, nu, parity), value in c.items():
        if value != 0:
            by_nu.setdefault(nu, []).append((n, parity, value))
    for nu in sorted(by_nu):
        terms = by_nu[nu]
        radial = _radial_stack(max(n for n, _, _ in terms), nu, R)
        cos_part = np.cos(nu * (t + Phi))
        sin_part = np.sin(nu * (t + Phi))
        for n, parity, value in terms:
            decay = 1.0 if t == 0 else math.exp(-eigenvalue(ModeIndex(n, nu), params).re * t)
            total += (value * decay) * radial[n] * (cos_part if parity == "+" else sin_part)
    return grid.with_values(total, t=t)


def evolve_analytic(
    c: SpectralCoeffs,
    t: float,
    params: NhParams | None = None,
    L: float = 6.0,
    N: int = 257,
) -> WignerGrid:
    """Exact elliptic-model evolution of an expansion, sampled on a grid.

    Each term decays as exp(-t/tau_{n,nu}) and its angular pattern advances
    by nu t. ``params`` may be omitted only for t = 0.
    """
    if t != 0:
        if params is None:
            raise ParameterError("params are required for t != 0")
        _require_elliptic(params)
        if t < 0:
            warnings.warn("t < 0: decaying modes grow backwards in time", RuntimeWarning, stacklevel=2)
    return _synthesize(c, float(t), params, L, N)


def lifetime_energy_constraint(E0: float, nu: int, params: NhParams) -> float:
    """Mean lifetime tau tied to the unperturbed energy E0.

    Solves alpha (2 E0 + |nu| + gamma/alpha) tau = 1. Returns ``math.inf``
    where the bracket vanishes (infinite lifetime).
    """
    _require_elliptic(params)
    rate = params.alpha * (2.0 * E0 + abs(nu)) + params.gamma
    return math.inf if rate == 0 else 1.0 / rate


def resonance_energy(nu: int, params: NhParams) -> float:
    """Energy E_c = -(|nu| + gamma/alpha)/2 at which the lifetime peaks."""
    _require_elliptic(params)
    if params.alpha == 0:
        raise ParameterError("resonance energy needs alpha > 0")
    return -0.5 * (abs(nu) + params.gamma / params.alpha) + 0.0


@dataclass(frozen=True)
class CriticalState:
    n_c: float
    gamma_over_alpha: float
    nu: int
    realizable: bool

    @property
    def k(self) -> int:
        """Nearest natural k with (gamma/alpha)_c = -2k - 1 - |nu|."""
        return max(0, round(self.n_c))

    @property
    def critical_gamma_over_alpha(self) -> float:
        return -2.0 * self.k - 1.0 - abs(self.nu)


def critical_state(nu: int, params: NhParams, atol: float = 1e-12) -> CriticalState:
    """Radial index n_c = -(1 + |nu| + gamma/alpha)/2 of the infinitely long-lived state.

    The state is realizable when n_c is a non-negative integer (to ``atol``).
    """
    _require_elliptic(params)
    if params.alpha == 0:
        raise ParameterError("critical state needs alpha > 0")
    ratio = params.gamma / params.alpha
    n_c = -0.5 * (1.0 + abs(nu) + ratio) + 0.0
    nearest = round(n_c)
    realizable = n_c >= -atol and abs(n_c - nearest) <= atol
    return CriticalState(n_c, ratio, abs(int(nu)), realizable)


def schrodinger_form_potential(nu: int) -> Callable[[float], float]:
    """Potential U(R) = 4R^2 + (nu^2 - 1/4)/R^2 of the equivalent radial Schroedinger problem."""

    def U(R):
        R_arr = np.asarray(R, dtype=float)
        if np.any(R_arr <= 0):
            raise ParameterError("U(R) is defined for R > 0 only")
        out = 4.0 * R_arr**2 + (nu * nu - 0.25) / R_arr**2
        return float(out) if out.ndim == 0 else out

    return U


def sturm_liouville_energy(m: ModeIndex, r_min: float = 0.05, r_max: float = 4.0, h: float = 1e-3) -> float:
    """Recover E from -psi'' + U psi = E psi with psi = sqrt(R) b_{n,nu}.

    psi'' is taken by a sixth-order central difference; E is the least-squares
    ratio sum(psi H psi) / sum(psi^2) over [r_min, r_max].
    """
    nu = abs(m.nu)
    R = np.arange(r_min, r_max, h)

    def psi(r):
        return np.sqrt(r) * _radial_values(m.n, nu, r)

    c = (2.0 / 180, -27.0 / 180, 270.0 / 180, -490.0 / 180, 270.0 / 180, -27.0 / 180, 2.0 / 180)
    d2 = sum(ck * psi(R + (k - 3) * h) for k, ck in enumerate(c)) / h**2
    p = psi(R)
    Hp = -d2 + schrodinger_form_potential(nu)(R) * p
    return float(np.sum(p * Hp) / np.sum(p * p))


_D1_4 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2_4 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _stencil(v: np.ndarray, coeffs: np.ndarray, axis: int, h: float, power: int) -> np.ndarray:
    pad = [(0, 0), (0, 0)]
    pad[axis] = (2, 2)
    vp = np.pad(v, pad)
    n = v.shape[axis]
    out = np.zeros_like(v)
    for k, ck in enumerate(coeffs):
        if ck:
            out += ck * np.take(vp, np.arange(k, k + n), axis=axis)
    return out / h**power


def pde_residual(
    m: ModeIndex,
    parity: str,
    params: NhParams,
    L: float = 6.0,
    N: int = 513,
    t: float = 0.0,
) -> float:
    """Max |dB/dt - generator(B)| / max|B| for an analytic basis member.

    The polar generator (alpha/4) Laplacian - (alpha R^2 + gamma) + d/dPhi is
    applied with fourth-order central differences in (q, p), using
    d/dPhi = q d/dp - p d/dq. The time derivative is exact.
    """
    _require_elliptic(params)
    f = basis_real(m, parity, t, params)
    grid = make_grid(L, N)
    Q, P = grid.mesh()
    R, Phi = grid.polar()
    B = f(R, Phi)
    h = grid.spacing
    dq = _stencil(B, _D1_4, 0, h, 1)
    dp = _stencil(B, _D1_4, 1, h, 1)
    lap = _stencil(B, _D2_4, 0, h, 2) + _stencil(B, _D2_4, 1, h, 2)
    gen = 0.25 * params.alpha * lap - (params.alpha * R**2 + params.gamma) * B + (Q * dp - P * dq)
    resid = f.time_derivative(R, Phi) - gen
    return float(np.max(np.abs(resid)) / np.max(np.abs(B)))
