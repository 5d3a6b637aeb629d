"""Finite-difference evolution against the closed-form spectrum.

Evolves a few basis functions with the RK4 solver, fits their decay rates,
and compares with the exact eigenvalues. Then evolves a displaced Gaussian
at the critical gain, where everything except one mode dies out.

    python3 demos/03_evolution.py
"""

import math
import warnings

import numpy as np

from nhwigner import (
    EvolverConfig,
    ModeIndex,
    NhParams,
    NormalizationWarning,
    decay_rate_fit,
    eigenvalue,
    evolve,
    make_grid,
    project,
    sample_basis,
)

params = NhParams.elliptic(1.0, 0.0)
print("mode     fitted rate   exact rate")
for n, nu in [(0, 0), (1, 0), (0, 1), (2, 2)]:
    W0 = sample_basis(n, nu, L=6.0, N=129)
    res = evolve(W0, params, EvolverConfig.stable(W0, params, 0.5, record_every=5, keep_snapshots=False))
    rate = decay_rate_fit(res.series, "trace" if nu == 0 else "norm")
    print(f"({n},{nu})   {rate:11.6f}   {eigenvalue(ModeIndex(n, nu), params).re:10.6f}")

# gamma = -alpha makes (0, 0) stationary; every other mode decays at >= alpha
critical = NhParams.elliptic(1.0, -1.0)
g = make_grid(6.0, 129)
Q, P = g.mesh()
W0 = g.with_values(np.exp(-((Q - 0.7) ** 2) - P**2) / np.pi)
res = evolve(W0, critical, EvolverConfig.stable(g, critical, 4.0, record_every=50, keep_snapshots=False))
print("\ndisplaced Gaussian at gamma/alpha = -1")
for t, tr in zip(res.series.times[::10], res.series.traces[::10]):
    print(f"t = {t:5.2f}   trace = {tr:.6f}")
# the trace of a non-vacuum component is zero or decays, so it settles on c_{0,0}
with warnings.catch_warnings():
    warnings.simplefilter("ignore", (RuntimeWarning, NormalizationWarning))
    c = project(res.final, 3, 2)
print(f"vacuum overlap exp(-0.7^2 / 2) = {math.exp(-0.49 / 2):.6f}")
top = sorted(c.items(), key=lambda kv: -abs(kv[1]))[:3]
print("dominant components at the end:", ", ".join(f"{k}: {v:.3e}" for k, v in top))
