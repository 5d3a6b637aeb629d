"""Elliptic eigenbasis on a phase-space grid.

Samples the real basis functions B+_{n,nu}, checks their orthogonality on
the grid, counts their extrema and writes each one as a PGM image.

    python3 demos/02_basis_functions.py [output-directory]
"""

import sys
from pathlib import Path

import numpy as np

from nhwigner import (
    ModeIndex,
    count_extrema,
    count_radial_extrema,
    inner_product,
    integrate,
    sample_basis,
    write_pgm,
)

out = Path(sys.argv[1] if len(sys.argv) > 1 else "basis_images")
out.mkdir(parents=True, exist_ok=True)

modes = [(n, nu) for n in range(4) for nu in range(4) if n + nu <= 4]
grids = {m: sample_basis(*m, L=6.0, N=257) for m in modes}

print(" n  nu   trace     extrema")
for (n, nu), W in grids.items():
    if nu:
        count = count_extrema(W)
        label = f"{count} (2 nu (n+1) = {2 * nu * (n + 1)})"
    else:
        count = count_radial_extrema(ModeIndex(n, 0))
        label = f"{count} radial (n+1 = {n + 1})"
    print(f"{n:2d} {nu:3d}   {integrate(W):7.4f}   {label}")
    write_pgm(out / f"B_{n}_{nu}.pgm", W)

# normalized Gram matrix: identity up to quadrature error
keys = list(grids)
G = np.array([[inner_product(grids[a], grids[b]) for b in keys] for a in keys])
d = np.sqrt(np.diag(G))
print("\nlargest off-diagonal overlap:", np.max(np.abs(G / np.outer(d, d) - np.eye(len(keys)))))
print(f"images written to {out}/")
