"""Spectral decimation on the Sierpinski gasket (N = 1), checked against eigh.

Prints R(z) = 5z - 4z^2, the level-n spectra built from preimage trees, and the
renormalized limit of one decimation path.
"""

from __future__ import annotations

from polygasket.decimation import r_as_rational
from polygasket.gasket_graph import build
from polygasket.laplacian import dense_spectrum, laplacian
from polygasket.spectrum import decimation_path, finite_spectrum

r = r_as_rational(1)
print("R numerator", r.numerator.coeffs, "denominator", r.denominator.coeffs)

for n in range(4):
    ours = finite_spectrum(1, n)
    oracle = dense_spectrum(laplacian(build(1, n))).atoms
    gap = max(abs(a.value - v) for a, (v, _) in zip(ours.atoms, oracle))
    print(f"n={n}: dim {ours.total}, {len(ours.atoms)} distinct values, max gap to eigh {gap:.1e}")

path = decimation_path(1, 0.75, level=1)
print(f"path from z=0.75: limit {path.limit:.10f} after {len(path.iterates)} steps")
