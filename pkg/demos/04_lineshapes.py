"""Energy distributions of decaying modes.

The half-line Fourier transform of each mode's time signal gives a
Breit-Wigner (Lorentzian) line whose half width is the decay rate. Elliptic
widths grow with n; hyperbolic lines share one width and sit on an evenly
spaced ladder.

    python3 demos/04_lineshapes.py
"""

import math

import numpy as np

from nhwigner import (
    ModeIndex,
    NhParams,
    energy_distribution,
    half_line_fourier_numeric,
    hyperbolic_energy_distribution,
    measure_hwhm,
)

ell = NhParams.elliptic(0.5, 0.2)
print("elliptic lines (alpha = 0.5, gamma = 0.2)")
print(" n  nu   location   hwhm    measured hwhm")
for n, nu in [(0, 0), (1, 0), (0, 1), (1, 2)]:
    m = ModeIndex(n, nu)
    line = energy_distribution(m, ell)
    E = np.linspace(line.location - 5 * line.hwhm, line.location + 5 * line.hwhm, 1001)
    numeric = line.hwhm / math.pi * np.abs(half_line_fourier_numeric(m, ell, E)) ** 2
    print(f"{n:2d} {nu:3d}   {line.location:8.3f}   {line.hwhm:5.3f}   {measure_hwhm(E, numeric):.6f}")

hyp = NhParams.hyperbolic(1.0, 0.3)
print("\nhyperbolic lines (alpha = 1, gamma = 0.3)")
for nu in range(4):
    line = hyperbolic_energy_distribution(nu, hyp)
    print(f"nu = {nu}   location = {line.location:.6f}   hwhm = {line.hwhm}")
print(f"ladder spacing sqrt(1 + alpha^2) = {math.sqrt(2):.6f}")
