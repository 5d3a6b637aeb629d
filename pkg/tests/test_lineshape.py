import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as spi

from nhwigner import (
    Lorentzian,
    ModeIndex,
    NhParams,
    ParameterError,
    eigenvalue,
    energy_distribution,
    half_line_fourier,
    half_line_fourier_numeric,
    hyperbolic_energy_distribution,
    measure_hwhm,
    time_signal,
)

UNIT = NhParams.elliptic(1.0, 0.0)


# Lorentzian

def test_lorentzian_peak_and_halfmax():
    f = Lorentzian(0.7, -2.0)
    assert f(-2.0) == pytest.approx(f.peak, rel=1e-15)
    assert f.peak == 1 / (math.pi * 0.7)
    assert f(-2.0 + 0.7) == pytest.approx(f.peak / 2, rel=1e-12)
    assert f(-2.0 - 0.7) == pytest.approx(f.peak / 2, rel=1e-12)


def test_lorentzian_rejects_width():
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ParameterError):
            Lorentzian(bad, 0.0)


@given(hwhm=st.floats(1e-3, 1e3), loc=st.floats(-100, 100))
def test_lorentzian_normalized(hwhm, loc):
    f = Lorentzian(hwhm, loc)
    mass = 0.0
    for a, b in [(-1e3, -1), (-1, 1), (1, 1e3)]:
        mass += spi.quad(f, loc + a * hwhm, loc + b * hwhm, limit=200)[0]
    assert 0.999 <= mass <= 1.0 + 1e-9
    assert f.mass(loc - 1e3 * hwhm, loc + 1e3 * hwhm) == pytest.approx(mass, abs=1e-9)


def test_lorentzian_weak_limit_is_point_mass():
    eps = 0.01
    masses = [Lorentzian(u, 1.0).mass(1.0 - eps, 1.0 + eps) for u in (1.0, 1e-2, 1e-4, 1e-6)]
    assert all(a < b for a, b in zip(masses, masses[1:]))
    assert masses[-1] > 0.9999


def test_lorentzian_shift():
    f = Lorentzian(0.3, 1.0)
    g = f.shifted(2.5)
    E = np.linspace(-3, 3, 101)
    np.testing.assert_array_equal(g(E + 2.5), f(E))


# time signals

def test_time_signal_examples():
    assert time_signal(ModeIndex(0, 0), UNIT)(1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    p = NhParams.elliptic(1.0, -2.0)
    t = np.linspace(0, 50, 11)
    np.testing.assert_allclose(np.abs(time_signal(ModeIndex(0, 1), p)(t)), 1.0, rtol=1e-15)
    # tau^-1 of (0, 2) at alpha = 0.5 is 0.5 (0 + 1 + 2) = 1.5
    T = time_signal(ModeIndex(0, 2), NhParams.elliptic(0.5))
    assert abs(T(math.pi)) == pytest.approx(math.exp(-1.5 * math.pi), rel=1e-13)
    assert T(0.3) == pytest.approx(math.exp(-0.45) * complex(math.cos(0.6), math.sin(0.6)), rel=1e-14)
    # the rate-one signal e^{-t} e^{2it} belongs to gamma = -0.5
    T = time_signal(ModeIndex(0, 2), NhParams.elliptic(0.5, -0.5))
    assert abs(T(math.pi)) == pytest.approx(math.exp(-math.pi), rel=1e-13)


def test_time_signal_rejects_growth():
    with pytest.raises(ParameterError):
        time_signal(ModeIndex(0, 0), NhParams.elliptic(1.0, -2.0))


# half-line transform

def test_fourier_peak_at_minus_nu():
    m = ModeIndex(1, 2)
    p = NhParams.elliptic(0.5, 0.1)
    tau = eigenvalue(m, p).lifetime
    F = half_line_fourier(m, p, -2.0)
    assert F == pytest.approx(tau, rel=1e-15) and F.imag == 0.0


def test_fourier_half_power_points():
    m = ModeIndex(0, 1)
    p = NhParams.elliptic(1.0, 0.5)
    rate = eigenvalue(m, p).re
    peak = abs(half_line_fourier(m, p, -1.0)) ** 2
    for E in (-1.0 - rate, -1.0 + rate):
        assert abs(half_line_fourier(m, p, E)) ** 2 == pytest.approx(peak / 2, rel=1e-12)


def test_fourier_rejects_non_decaying():
    with pytest.raises(ParameterError):
        half_line_fourier(ModeIndex(0, 0), NhParams.elliptic(1.0, -1.0), 0.0)
    with pytest.raises(ParameterError):
        half_line_fourier_numeric(ModeIndex(0, 0), NhParams.elliptic(1.0, -1.0), 0.0)


def test_fourier_array_and_scalar_shapes():
    E = np.linspace(-2, 2, 6).reshape(2, 3)
    assert half_line_fourier(ModeIndex(0, 0), UNIT, E).shape == (2, 3)
    assert half_line_fourier_numeric(ModeIndex(0, 0), UNIT, E).shape == (2, 3)
    assert isinstance(half_line_fourier_numeric(ModeIndex(0, 0), UNIT, 0.5), complex)


@pytest.mark.parametrize("rate", [0.5, 1.0, 3.0])
def test_numeric_transform_matches_closed_form(rate):
    # (0, 1) has tau^-1 = 2 alpha + gamma
    m = ModeIndex(0, 1)
    p = NhParams.elliptic(1.0, rate - 2.0)
    assert eigenvalue(m, p).re == rate
    E = np.linspace(-1.0 - 5 * rate, -1.0 + 5 * rate, 41)
    closed = half_line_fourier(m, p, E)
    numeric = half_line_fourier_numeric(m, p, E)
    assert np.max(np.abs(numeric - closed) / np.abs(closed)) < 1e-6


def test_numeric_transform_converges_with_window():
    m = ModeIndex(0, 0)
    short = half_line_fourier_numeric(m, UNIT, 0.3, t_max=5.0)
    long = half_line_fourier_numeric(m, UNIT, 0.3, t_max=40.0)
    exact = half_line_fourier(m, UNIT, 0.3)
    assert abs(long - exact) < 1e-12 < abs(short - exact) <= math.exp(-5.0)


# Breit-Wigner lines

def test_energy_distribution_examples():
    f = energy_distribution(ModeIndex(0, 0), UNIT)
    assert f.hwhm == 1.0 and f.location == 0.0 and f.peak == pytest.approx(1 / math.pi)
    f = energy_distribution(ModeIndex(1, 0), NhParams.elliptic(0.5))
    assert (f.hwhm, f.location) == (1.5, 0.0)
    f = energy_distribution(ModeIndex(0, 3), UNIT)
    assert abs(f.location) == 3


def test_energy_distribution_is_normalized_transform():
    m = ModeIndex(2, 1)
    p = NhParams.elliptic(0.5, 0.2)
    f = energy_distribution(m, p)
    E = np.linspace(-6, 4, 51)
    np.testing.assert_allclose(f(E), f.hwhm / math.pi * np.abs(half_line_fourier(m, p, E)) ** 2, rtol=1e-13)


def test_measured_hwhm_matches_decay_constant():
    f = energy_distribution(ModeIndex(1, 1), NhParams.elliptic(0.5, 0.1))
    E = np.linspace(f.location - 5 * f.hwhm, f.location + 5 * f.hwhm, 1001)
    assert measure_hwhm(E, f(E)) == pytest.approx(f.hwhm, rel=1e-3)


def test_measure_hwhm_needs_both_crossings():
    E = np.linspace(0, 1, 11)
    with pytest.raises(ValueError):
        measure_hwhm(E, Lorentzian(1.0, 0.0)(E))


def test_hyperbolic_distribution_examples():
    f = hyperbolic_energy_distribution(0, NhParams.hyperbolic(3.0, 0.5))
    assert (f.hwhm, f.location) == (0.5, 0.0)
    p = NhParams.hyperbolic(1.0, 1.0)
    f1, f2 = hyperbolic_energy_distribution(1, p), hyperbolic_energy_distribution(2, p)
    assert f1.hwhm == f2.hwhm
    assert f1.location == pytest.approx(math.sqrt(2), rel=1e-15)
    assert f2.location == pytest.approx(2 * math.sqrt(2), rel=1e-15)
    assert hyperbolic_energy_distribution(3, NhParams.hyperbolic(0.0, 1.0)).location == 3.0


def test_hyperbolic_distribution_needs_positive_gamma():
    for g in (0.0, -0.5):
        with pytest.raises(ParameterError):
            hyperbolic_energy_distribution(1, NhParams.hyperbolic(1.0, g))


def test_elliptic_hyperbolic_width_contrast():
    ell = NhParams.elliptic(0.5, 0.2)
    hyp = NhParams.hyperbolic(0.5, 0.2)
    widths_h = {hyperbolic_energy_distribution(nu, hyp).hwhm for nu in range(6)}
    assert widths_h == {0.2}
    for nu in range(6):
        ws = [energy_distribution(ModeIndex(n, nu), ell).hwhm for n in range(4)]
        np.testing.assert_allclose(np.diff(ws), 2 * 0.5, rtol=1e-14)
    widths_e = {energy_distribution(ModeIndex(0, nu), ell).hwhm for nu in range(6)}
    assert len(widths_e) == 6
