"""Decay spectrum of the elliptic model.

Prints the complex eigenvalues lambda = tau^-1 - i omega for a block of
(n, nu) modes, then shows how the damping offset gamma can cancel the
decay of one mode entirely.

    python3 demos/01_spectrum.py
"""

from nhwigner import ModeIndex, NhParams, critical_state, eigenvalue

params = NhParams.elliptic(alpha=0.5, gamma=0.1)
print(f"elliptic model, alpha = {params.alpha}, gamma = {params.gamma}\n")
print(" n  nu   decay rate   frequency   lifetime")
for n in range(4):
    for nu in range(4):
        lam = eigenvalue(ModeIndex(n, nu), params)
        print(f"{n:2d} {nu:3d}   {lam.re:10.4f}   {-lam.im + 0.0:9.4f}   {lam.lifetime:8.4f}")

# radial levels are evenly spaced by 2 alpha; the angular index adds alpha each
print("\nspacing in n:", eigenvalue(ModeIndex(1, 0), params).re - eigenvalue(ModeIndex(0, 0), params).re)

# a gain gamma = -alpha (2k + 1 + |nu|) makes mode (k, nu) stationary
for nu in range(3):
    p = NhParams.elliptic(1.0, -(2 * 1 + 1 + nu))
    cs = critical_state(nu, p)
    lam = eigenvalue(ModeIndex(cs.k, nu), p)
    print(f"gamma/alpha = {cs.gamma_over_alpha:+.0f}: mode ({cs.k}, {nu}) decays at rate {lam.re:g}")
