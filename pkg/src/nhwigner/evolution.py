"""Direct numerical integration of the phase-space evolution equation.

For quadratic H_W and Gamma_W the sine/cosine Moyal series truncate after
the second derivative, so the Wigner function obeys exactly

    dW/dt = -(alpha p^2 + beta q^2 + gamma) W - (p d_q - q d_p) W
            + (alpha d_qq + beta d_pp) W / 4.

The equation is discretized with central differences (fourth order by
default, second order on request), zero Dirichlet boundaries and classical
RK4 in time.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import (
    NhParams,
    ParameterError,
    WignerGrid,
    decay_symbol,
    expectation,
    integrate,
    l2_norm,
)
from .elliptic import ComplexEigenvalue

__all__ = [
    "EvolverConfig",
    "TraceSeries",
    "EvolutionResult",
    "StabilityError",
    "NumericalInstabilityError",
    "stability_bound",
    "rhs",
    "effective_decay_constant",
    "evolve",
    "decay_rate_fit",
    "hyperbolic_eigenvalue",
]

log = logging.getLogger(__name__)

INSTABILITY_FACTOR = 1e6
BOUNDARY_TOLERANCE = 1e-12
# traces below this fraction of the integral of |W| are cancellation noise
TRACE_FLOOR = 1e-12


class StabilityError(ParameterError):
    """Time step exceeds the explicit-scheme stability bound."""

    def __init__(self, dt: float, bound: float):
        super().__init__(f"dt = {dt:.6g} exceeds the stability bound {bound:.6g}")
        self.dt = dt
        self.bound = bound


class NumericalInstabilityError(RuntimeError):
    """The solution blew up during time stepping."""


def stability_bound(grid: WignerGrid, params: NhParams) -> float:
    """Largest admissible RK4 step for ``grid`` and ``params``.

    min(0.25 h^2 / (|alpha| + |beta|), 0.5 h / (sqrt(2) L)): a diffusive bound
    from the second-derivative terms and an advective bound from the rotation,
    whose speed peaks at sqrt(2) L in the corners.
    """
    h = grid.spacing
    diffusivity = abs(params.alpha) + abs(params.beta)
    diffusive = math.inf if diffusivity == 0 else 0.25 * h * h / diffusivity
    advective = 0.5 * h / (math.sqrt(2.0) * grid.half_width)
    return min(diffusive, advective)


@dataclass(frozen=True)
class EvolverConfig:
    """Time-stepping controls.

    ``dt`` is an upper bound: the run uses ceil(t_end/dt) equal steps.
    Traces are recorded every ``record_every`` steps; full grids are kept at
    the same stride only when ``keep_snapshots`` is set.
    """

    dt: float
    t_end: float
    scheme: str = "RK4"
    boundary: str = "dirichlet-zero"
    record_every: int = 1
    normalized: bool = False
    order: int = 4
    keep_snapshots: bool = True

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ParameterError(f"dt must be positive, got {self.dt!r}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ParameterError(f"t_end must be positive, got {self.t_end!r}")
        if self.scheme.upper() != "RK4":
            raise ParameterError(f"unsupported scheme {self.scheme!r}; only RK4 is implemented")
        if self.boundary.lower() != "dirichlet-zero":
            raise ParameterError(f"unsupported boundary {self.boundary!r}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ParameterError("record_every must be a positive integer")
        if self.order not in (2, 4):
            raise ParameterError(f"finite-difference order must be 2 or 4, got {self.order!r}")

    @classmethod
    def stable(
        cls,
        grid: WignerGrid,
        params: NhParams,
        t_end: float,
        fraction: float = 0.5,
        **kwargs,
    ) -> "EvolverConfig":
        """Config whose step is ``fraction`` of the stability bound."""
        return cls(dt=fraction * stability_bound(grid, params), t_end=t_end, **kwargs)

    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_end / self.dt - 1e-9))

    def validate(self, grid: WignerGrid, params: NhParams) -> None:
        bound = stability_bound(grid, params)
        if self.dt > bound:
            raise StabilityError(self.dt, bound)


@dataclass
class TraceSeries:
    """Recorded observables along a run.

    ``traces`` is the trace of the non-normalized density (in normalized mode
    it is reconstructed from the accumulated rescale factors), ``norms`` the
    L2 norm of the evolved grid, ``decay_averages`` the normalized average
    of Gamma_W (NaN where the trace vanishes).
    """

    times: np.ndarray
    traces: np.ndarray
    norms: np.ndarray = field(default_factory=lambda: np.empty(0))
    decay_averages: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.traces = np.asarray(self.traces, dtype=float)
        self.norms = np.asarray(self.norms, dtype=float)
        self.decay_averages = np.asarray(self.decay_averages, dtype=float)
        if self.times.shape != self.traces.shape:
            raise ValueError("times and traces must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def log_trace_rate(self) -> np.ndarray:
        """d(ln Tr)/dt at the recorded times (second-order finite differences)."""
        return np.gradient(np.log(self.traces), self.times, edge_order=2)


@dataclass
class EvolutionResult:
    final: WignerGrid
    snapshots: list[WignerGrid]
    series: TraceSeries

    def __iter__(self):
        return iter((self.final, self.snapshots, self.series))


def rhs(W: WignerGrid, params: NhParams, order: int = 4) -> np.ndarray:
    """Time derivative of W under the quadratic phase-space generator.

    Central differences of the requested order with zero values outside the
    grid.
    """
    if order not in (2, 4):
        raise ParameterError(f"finite-difference order must be 2 or 4, got {order!r}")
    out = np.empty_like(W.values)
    _kernels.generator(
        _kernels.padded(W.values), out, W.axis, params.alpha, params.beta, params.gamma, W.spacing, order
    )
    return out


def effective_decay_constant(q, p_momentum, params: NhParams):
    """Local decay rate gamma + alpha p^2 + beta q^2 of the multiplicative term."""
    return params.gamma + params.alpha * p_momentum**2 + params.beta * q**2


def _boundary_level(W: WignerGrid) -> float:
    v = np.abs(W.values)
    peak = v.max()
    if peak == 0:
        return 0.0
    edge = max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max())
    return edge / peak


def _record(W: WignerGrid, params: NhParams, log_scale: float):
    tr = integrate(W)
    avg = expectation(W, decay_symbol(params)) / tr if tr != 0 else math.nan
    return tr * math.exp(log_scale), l2_norm(W), avg


def evolve(W0: WignerGrid, params: NhParams, cfg: EvolverConfig) -> EvolutionResult:
    """Integrate W0 from t = W0.t to W0.t + cfg.t_end.

    In normalized mode the grid is rescaled to unit trace after every step;
    because the scheme is linear this equals integrating the normalized
    (nonlinear) density equation, whose extra term is the generator of that
    rescaling.

    Raises :class:`StabilityError` when ``cfg.dt`` exceeds the bound and
    :class:`NumericalInstabilityError` when max|W| outgrows its admissible
    envelope by a factor of 1e6.
    """
    cfg.validate(W0, params)
    if params.is_hyperbolic and params.alpha > 0 and cfg.t_end > 0.25:
        log.warning(
            "hyperbolic evolution to t=%.3g: the anti-diffusive term makes long horizons ill-conditioned",
            cfg.t_end,
        )
    if _boundary_level(W0) > BOUNDARY_TOLERANCE:
        log.warning("initial data reaches %.3g of its peak at the boundary; enlarge L", _boundary_level(W0))

    n_steps = cfg.n_steps()
    dt = cfg.t_end / n_steps
    x = W0.axis
    h = W0.spacing
    order = int(cfg.order)
    a, b, g = float(params.alpha), float(params.beta), float(params.gamma)

    work = W0.copy()
    log_scale = 0.0
    if cfg.normalized:
        tr0 = integrate(work)
        if abs(tr0) <= TRACE_FLOOR * integrate(work.with_values(np.abs(work.values))):
            raise ParameterError("normalized evolution needs an initial state with non-zero trace")
        work.values /= tr0
        log_scale = math.log(abs(tr0))

    peak0 = float(np.max(np.abs(work.values)))
    # max|W| can grow at most like exp(-min(gamma_eff) t) for a non-negative diffusion
    Q, P = work.mesh()
    min_rate = float(np.min(effective_decay_constant(Q, P, params)))
    growth_rate = max(0.0, -min_rate)

    Wp = _kernels.padded(work.values)
    tmp = np.zeros_like(Wp)
    k1, k2, k3, k4 = (np.empty_like(work.values) for _ in range(4))
    inner = (slice(_kernels.GHOST, -_kernels.GHOST),) * 2

    t0 = W0.t
    times = [t0]
    rec = [_record(work, params, log_scale)]
    snapshots = [work.copy()] if cfg.keep_snapshots else []

    for step in range(1, n_steps + 1):
        peak = _kernels.rk4_step(Wp, tmp, k1, k2, k3, k4, x, a, b, g, h, order, dt)
        t = t0 + step * dt
        if not math.isfinite(peak):
            raise NumericalInstabilityError(f"non-finite values at t = {t:.6g}")
        if cfg.normalized:
            tr = float(_trace_padded(Wp, work))
            if not math.isfinite(tr) or abs(tr) <= TRACE_FLOOR * _trace_padded(np.abs(Wp), work):
                raise NumericalInstabilityError(f"trace vanished at t = {t:.6g}; cannot normalize")
            Wp[inner] /= tr
            log_scale += math.log(abs(tr))
        elif peak > INSTABILITY_FACTOR * peak0 * math.exp(growth_rate * (t - t0)):
            raise NumericalInstabilityError(
                f"max|W| grew to {peak:.3e} (initial {peak0:.3e}) by t = {t:.6g}; reduce dt or t_end"
            )
        if step % cfg.record_every == 0 or step == n_steps:
            current = work.with_values(Wp[inner].copy(), t=t)
            times.append(t)
            rec.append(_record(current, params, log_scale))
            if cfg.keep_snapshots:
                snapshots.append(current)

    final = work.with_values(Wp[inner].copy(), t=t0 + n_steps * dt)
    traces, norms, avgs = (np.array(col) for col in zip(*rec))
    series = TraceSeries(np.array(times), traces, norms, avgs)
    return EvolutionResult(final, snapshots, series)


def _trace_padded(Wp: np.ndarray, like: WignerGrid) -> float:
    g = _kernels.GHOST
    return integrate(like.with_values(Wp[g:-g, g:-g]))


def decay_rate_fit(ts: TraceSeries, observable: str = "trace") -> float:
    """Least-squares slope of -ln(observable) against time.

    ``observable`` is ``"trace"`` (default) or ``"norm"``; the L2 norm is
    the usable observable for modes with nu != 0, whose trace vanishes.
    """
    if observable == "trace":
        y = ts.traces
    elif observable == "norm":
        y = ts.norms
    else:
        raise ParameterError(f"observable must be 'trace' or 'norm', got {observable!r}")
    if y.size < 2:
        raise ParameterError("need at least two samples to fit a rate")
    if np.any(y <= 0):
        raise ParameterError(f"{observable} series must be positive to take logarithms")
    slope, _ = np.polyfit(ts.times, np.log(y), 1)
    return float(-slope)


def hyperbolic_eigenvalue(nu: int, params: NhParams) -> ComplexEigenvalue:
    """lambda_nu = gamma + i nu sqrt(1 + alpha^2) of the hyperbolic model."""
    if not params.is_hyperbolic:
        raise ParameterError(
            f"hyperbolic model requires beta == -alpha, got alpha={params.alpha!r}, beta={params.beta!r}"
        )
    return ComplexEigenvalue(float(params.gamma), nu * math.sqrt(1.0 + params.alpha**2))
