import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhwigner import (
    EvolverConfig,
    ModeIndex,
    NhParams,
    NumericalInstabilityError,
    ParameterError,
    StabilityError,
    TraceSeries,
    decay_rate_fit,
    decay_symbol,
    effective_decay_constant,
    eigenvalue,
    evolve,
    expectation,
    hyperbolic_eigenvalue,
    integrate,
    l2_norm,
    make_grid,
    rhs,
    rotational_asymmetry,
    sample_basis,
    stability_bound,
)

UNIT = NhParams.elliptic(1.0, 0.0)


def rel_l2(a, b):
    return l2_norm(b.with_values(a.values - b.values)) / l2_norm(b)


def gaussian(grid, q0=0.0, p0=0.0, s2=0.5):
    Q, P = grid.mesh()
    return grid.with_values(np.exp(-((Q - q0) ** 2 + (P - p0) ** 2) / (2 * s2)) / (2 * math.pi * s2))


# configuration and stability

def test_stability_bound_formula():
    g = make_grid(6.0, 257)
    h = g.spacing
    assert stability_bound(g, UNIT) == min(0.25 * h * h / 2.0, 0.5 * h / (math.sqrt(2) * 6.0))
    # hyperbolic: |alpha| + |beta| keeps the diffusive bound finite
    assert stability_bound(g, NhParams.hyperbolic(1.0)) == stability_bound(g, UNIT)
    assert stability_bound(g, NhParams(0.0, 0.0)) == 0.5 * h / (math.sqrt(2) * 6.0)


def test_stable_config_uses_fraction():
    g = make_grid(6.0, 65)
    cfg = EvolverConfig.stable(g, UNIT, 1.0, fraction=0.5)
    assert cfg.dt == 0.5 * stability_bound(g, UNIT)
    cfg.validate(g, UNIT)


def test_stability_violation_raises_with_bound():
    W0 = sample_basis(0, 0, N=65)
    bound = stability_bound(W0, UNIT)
    with pytest.raises(StabilityError) as info:
        evolve(W0, UNIT, EvolverConfig(dt=2 * bound, t_end=0.1))
    assert info.value.bound == bound


@pytest.mark.parametrize(
    "kw",
    [
        dict(dt=0.0, t_end=1.0),
        dict(dt=0.1, t_end=-1.0),
        dict(dt=0.1, t_end=1.0, scheme="Euler"),
        dict(dt=0.1, t_end=1.0, boundary="periodic"),
        dict(dt=0.1, t_end=1.0, record_every=0),
        dict(dt=0.1, t_end=1.0, order=3),
    ],
)
def test_config_rejects(kw):
    with pytest.raises(ParameterError):
        EvolverConfig(**kw)


def test_n_steps_rounds_up():
    assert EvolverConfig(dt=0.3, t_end=1.0).n_steps() == 4
    assert EvolverConfig(dt=0.25, t_end=1.0).n_steps() == 4


# right-hand side

def test_rhs_zero():
    assert not rhs(make_grid(6.0, 65), UNIT).any()


@pytest.mark.parametrize("order", [2, 4])
def test_rhs_ground_mode_eigenrelation(order):
    W = sample_basis(0, 0, N=513)
    assert np.max(np.abs(rhs(W, UNIT, order) + W.values)) < 1e-3


def test_rhs_hermitian_limit_is_rotation():
    g = make_grid(6.0, 257)
    W = gaussian(g, 1.0, -0.5)
    Q, P = g.mesh()
    s2 = 0.5
    dq = -(Q - 1.0) / s2 * W.values
    dp = -(P + 0.5) / s2 * W.values
    exact = -(P * dq - Q * dp)
    got = rhs(W, NhParams(0.0, 0.0, 0.0))
    assert np.max(np.abs(got - exact)) / np.max(np.abs(exact)) < 1e-5


def test_rhs_multiplicative_term():
    # constant grid away from the boundary: only -(alpha p^2 + beta q^2 + gamma) W survives
    g = make_grid(2.0, 33)
    W = g.with_values(np.ones((33, 33)))
    p = NhParams(0.5, 0.25, 0.1)
    Q, P = g.mesh()
    inner = (slice(2, -2),) * 2
    np.testing.assert_allclose(rhs(W, p)[inner], -effective_decay_constant(Q, P, p)[inner], rtol=1e-12)


def test_rhs_rejects_order():
    with pytest.raises(ParameterError):
        rhs(make_grid(6.0, 33), UNIT, order=6)


def test_effective_decay_constant_examples():
    assert effective_decay_constant(0.0, 0.0, NhParams(0.3, 0.7, 0.25)) == 0.25
    assert effective_decay_constant(1.0, 1.0, UNIT) == 2.0
    assert effective_decay_constant(2.0, 0.0, NhParams(1.0, -1.0, 0.5)) == -3.5


# time stepping

def test_evolve_first_excited_trace():
    W0 = sample_basis(1, 0, N=257)
    res = evolve(W0, UNIT, EvolverConfig.stable(W0, UNIT, 1.0, record_every=50, keep_snapshots=False))
    assert res.series.traces[-1] / res.series.traces[0] == pytest.approx(math.exp(-3), rel=1e-3)
    assert res.final.t == pytest.approx(1.0, abs=1e-12)


def test_evolve_critical_ground_state_is_stationary():
    p = NhParams.elliptic(1.0, -1.0)
    W0 = sample_basis(0, 0, N=129)
    res = evolve(W0, p, EvolverConfig.stable(W0, p, 1.0, keep_snapshots=False))
    assert np.max(np.abs(res.final.values - W0.values)) < 1e-3


@pytest.mark.parametrize("gamma", [-1.0, 0.0, 2.5])
def test_evolve_normalized_unit_trace(gamma):
    p = NhParams.elliptic(1.0, gamma)
    W0 = sample_basis(0, 0, N=65)
    res = evolve(W0, p, EvolverConfig.stable(W0, p, 0.5, normalized=True, record_every=20))
    for snap in res.snapshots:
        assert integrate(snap) == pytest.approx(1.0, abs=1e-12)


def test_normalized_matches_rescaled_plain_run():
    p = NhParams.elliptic(0.5, 0.3)
    g = make_grid(6.0, 65)
    W0 = gaussian(g, 0.8, 0.2, 0.6)
    cfg = EvolverConfig.stable(g, p, 0.6, record_every=10)
    plain = evolve(W0, p, cfg)
    norm = evolve(W0, p, EvolverConfig.stable(g, p, 0.6, record_every=10, normalized=True))
    for a, b in zip(plain.snapshots, norm.snapshots):
        assert a.t == b.t
        np.testing.assert_allclose(a.values / integrate(a), b.values, rtol=0, atol=1e-10 * np.max(np.abs(b.values)))
    np.testing.assert_allclose(norm.series.traces, plain.series.traces, rtol=1e-10)


def test_normalized_needs_trace():
    W0 = sample_basis(0, 1, N=33)
    with pytest.raises(ParameterError):
        evolve(W0, UNIT, EvolverConfig.stable(W0, UNIT, 0.1, normalized=True))


def test_snapshots_stride_and_times():
    W0 = sample_basis(0, 0, N=33)
    cfg = EvolverConfig.stable(W0, UNIT, 0.5, record_every=7)
    res = evolve(W0, UNIT, cfg)
    n = cfg.n_steps()
    assert len(res.snapshots) == len(res.series.times) == 1 + n // 7 + (n % 7 != 0)
    assert [s.t for s in res.snapshots] == list(res.series.times)
    final, snaps, series = res
    assert final is res.final


def test_evolve_without_snapshots():
    W0 = sample_basis(0, 0, N=33)
    res = evolve(W0, UNIT, EvolverConfig.stable(W0, UNIT, 0.1, keep_snapshots=False))
    assert res.snapshots == [] and res.series.times.size >= 2


def test_evolve_deterministic():
    W0 = sample_basis(1, 2, N=65)
    cfg = EvolverConfig.stable(W0, UNIT, 0.2)
    a, b = evolve(W0, UNIT, cfg), evolve(W0, UNIT, cfg)
    assert np.array_equal(a.final.values, b.final.values)


def test_instability_detector():
    p = NhParams.hyperbolic(1.0, 0.5)
    W0 = sample_basis(0, 0, N=129)
    with pytest.raises(NumericalInstabilityError):
        evolve(W0, p, EvolverConfig.stable(W0, p, 3.0, keep_snapshots=False))


def test_hyperbolic_long_horizon_warns(caplog):
    p = NhParams.hyperbolic(0.5, 0.5)
    W0 = sample_basis(0, 0, N=33)
    with caplog.at_level(logging.WARNING, logger="nhwigner.evolution"):
        evolve(W0, p, EvolverConfig.stable(W0, p, 0.3, keep_snapshots=False))
    assert any("hyperbolic" in r.message for r in caplog.records)


def test_boundary_warning(caplog):
    W0 = sample_basis(0, 0, L=2.0, N=33)
    with caplog.at_level(logging.WARNING, logger="nhwigner.evolution"):
        evolve(W0, UNIT, EvolverConfig.stable(W0, UNIT, 0.01, keep_snapshots=False))
    assert any("boundary" in r.message for r in caplog.records)


# convergence

def test_time_convergence_fourth_order():
    # at the stability bound the time error is far below the spatial error,
    # so the order is measured against a fine-step run on the same grid
    W0 = sample_basis(1, 1, N=33)
    bound = stability_bound(W0, UNIT)
    ref = evolve(W0, UNIT, EvolverConfig(dt=bound / 64, t_end=0.5, keep_snapshots=False)).final
    errs = []
    for k in (1, 2, 4):
        f = evolve(W0, UNIT, EvolverConfig(dt=bound / k, t_end=0.5, keep_snapshots=False)).final
        errs.append(l2_norm(f.with_values(f.values - ref.values)))
    for coarse, fine in zip(errs, errs[1:]):
        assert 12 < coarse / fine < 20


@pytest.mark.parametrize("order, expected", [(2, 4.0), (4, 16.0)])
def test_spatial_convergence(order, expected):
    errs = []
    for N in (65, 129):
        W0 = sample_basis(1, 1, N=N)
        res = evolve(W0, UNIT, EvolverConfig.stable(W0, UNIT, 0.5, order=order, keep_snapshots=False))
        errs.append(rel_l2(res.final, sample_basis(1, 1, t=0.5, params=UNIT, N=N)))
    assert errs[0] / errs[1] == pytest.approx(expected, rel=0.15)


@pytest.mark.slow
@pytest.mark.parametrize("n", range(3))
@pytest.mark.parametrize("nu", range(3))
def test_oracle_equivalence(n, nu):
    W0 = sample_basis(n, nu, N=257)
    res = evolve(W0, UNIT, EvolverConfig.stable(W0, UNIT, 0.5, keep_snapshots=False))
    assert rel_l2(res.final, sample_basis(n, nu, t=0.5, params=UNIT, N=257)) < 1e-3


# trace series and rate fits

def test_decay_rate_fit_synthetic():
    t = np.linspace(0, 2, 41)
    assert decay_rate_fit(TraceSeries(t, np.exp(-2 * t))) == pytest.approx(2.0, abs=1e-10)
    assert decay_rate_fit(TraceSeries(t, t * 0 + 1, norms=np.exp(-0.5 * t)), "norm") == pytest.approx(0.5, abs=1e-10)


def test_decay_rate_fit_rejects():
    t = np.linspace(0, 1, 5)
    with pytest.raises(ParameterError):
        decay_rate_fit(TraceSeries(t, np.array([1.0, 0.5, 0.0, 0.1, 0.1])))
    with pytest.raises(ParameterError):
        decay_rate_fit(TraceSeries(t, np.ones(5)), "energy")
    with pytest.raises(ParameterError):
        decay_rate_fit(TraceSeries(t[:1], np.ones(1)))


def test_trace_series_validation():
    with pytest.raises(ValueError):
        TraceSeries([0.0, 0.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        TraceSeries([0.0, 1.0], [1.0])


@settings(max_examples=30)
@given(rate=st.floats(-3, 10), t_end=st.floats(0.1, 5))
def test_log_trace_rate_exact_for_exponentials(rate, t_end):
    t = np.linspace(0, t_end, 21)
    ts = TraceSeries(t, np.exp(-rate * t))
    np.testing.assert_allclose(ts.log_trace_rate(), -rate, atol=1e-9 * max(1.0, abs(rate)))


def test_decay_rate_from_ground_state_evolution():
    W0 = sample_basis(0, 0, N=129)
    res = evolve(W0, UNIT, EvolverConfig.stable(W0, UNIT, 0.5, record_every=10, keep_snapshots=False))
    assert decay_rate_fit(res.series) == pytest.approx(1.0, abs=1e-3)


def test_hyperbolic_symmetric_gaussian_rate_weak_alpha():
    # the moment cancellation fixes the rate at t = 0; drift grows like alpha^2 t
    p = NhParams.hyperbolic(0.25, 0.5)
    W0 = sample_basis(0, 0, N=129)
    res = evolve(W0, p, EvolverConfig.stable(W0, p, 0.2, record_every=5, keep_snapshots=False))
    assert decay_rate_fit(res.series) == pytest.approx(0.5, abs=5e-2)


@pytest.mark.parametrize("alpha,gamma", [(0.5, 0.5), (0.5, 1.0), (1.0, 0.5), (1.0, 1.0)])
def test_hyperbolic_gaussian_fit_bias(alpha, gamma):
    # ln Tr = -gamma t + alpha^2 t^2 + O(t^3), so a least-squares slope over [0, T] is gamma - alpha^2 T
    p = NhParams.hyperbolic(alpha, gamma)
    W0 = sample_basis(0, 0, N=129)
    res = evolve(W0, p, EvolverConfig.stable(W0, p, 0.2, record_every=1, keep_snapshots=False))
    assert decay_rate_fit(res.series) == pytest.approx(gamma - alpha**2 * 0.2, abs=5e-3)


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_hyperbolic_initial_log_rate_is_gamma(alpha):
    p = NhParams.hyperbolic(alpha, 0.75)
    W0 = sample_basis(0, 0, N=129)
    res = evolve(W0, p, EvolverConfig.stable(W0, p, 0.05, record_every=1, keep_snapshots=False))
    assert -res.series.log_trace_rate()[0] == pytest.approx(0.75, abs=1e-3)


def test_trace_law_elliptic():
    p = NhParams.elliptic(0.5, 0.2)
    g = make_grid(6.0, 129)
    W0 = gaussian(g, 1.0, 0.5, 0.5)
    res = evolve(W0, p, EvolverConfig.stable(g, p, 0.5, record_every=4))
    rate = res.series.log_trace_rate()
    for r, snap in zip(rate, res.snapshots):
        avg = expectation(snap, decay_symbol(p)) / integrate(snap)
        assert r == pytest.approx(-2 * avg, abs=1e-3)
    np.testing.assert_allclose(res.series.decay_averages[1:3], [
        expectation(s, decay_symbol(p)) / integrate(s) for s in res.snapshots[1:3]
    ], rtol=1e-12)


def test_rotational_symmetry_preserved():
    p = NhParams.elliptic(1.0, 0.0)
    W0 = sample_basis(0, 0, N=257)
    res = evolve(W0, p, EvolverConfig.stable(W0, p, 0.5, keep_snapshots=False))
    assert rotational_asymmetry(res.final) < 1e-6
    v = res.final.values
    assert np.max(np.abs(v - np.rot90(v))) <= 1e-14 * np.max(np.abs(v))


# hyperbolic spectrum

def test_hyperbolic_eigenvalue_examples():
    lam = hyperbolic_eigenvalue(0, NhParams.hyperbolic(2.0, 0.7))
    assert (lam.re, lam.im) == (0.7, 0.0)
    lam = hyperbolic_eigenvalue(2, NhParams.hyperbolic(1.0, 0.0))
    assert lam.re == 0.0 and lam.im == pytest.approx(2 * math.sqrt(2), rel=1e-15)
    lam = hyperbolic_eigenvalue(-1, NhParams.hyperbolic(0.0, 1.0))
    assert (lam.re, lam.im) == (1.0, -1.0)


@given(nu=st.integers(-10, 10), alpha=st.floats(0.01, 5), gamma=st.floats(-2, 2))
def test_hyperbolic_rate_independent_of_state(nu, alpha, gamma):
    assert hyperbolic_eigenvalue(nu, NhParams.hyperbolic(alpha, gamma)).re == gamma


def test_hyperbolic_eigenvalue_rejects_elliptic():
    with pytest.raises(ParameterError):
        hyperbolic_eigenvalue(1, UNIT)


def test_elliptic_rates_consistent_with_mode_spectrum():
    for n in range(3):
        assert eigenvalue(ModeIndex(n, 0), UNIT).re == 2 * n + 1
