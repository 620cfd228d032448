"""Predicted atoms of the density of states against normalized eigenvalue counts."""

from __future__ import annotations

from polygasket.gasket_graph import build
from polygasket.laplacian import empirical_dos, laplacian
from polygasket.spectrum import dos_atoms

for N in (1, 2):
    dos = dos_atoms(N, 2)
    print(f"N={N}: {len(dos.atoms)} atoms to depth 2, total mass {dos.mass:.6f}")
    kappa = dict(dos.atoms)[1.5]
    for n in (1, 2, 3, 4):
        weight = dict(empirical_dos(laplacian(build(N, n))))
        w = next(w for v, w in weight.items() if abs(v - 1.5) < 1e-8)
        print(f"  n={n}: weight at 3/2 is {w:.5f}, limit {kappa:.5f}")
