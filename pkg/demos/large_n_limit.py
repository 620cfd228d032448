"""Low eigenvalues for large N approach (2/9) pi^2 k^2."""

from __future__ import annotations

from polygasket.spectrum import large_n_limit_check

for N in (20, 50, 100, 200):
    for k in (1, 2):
        c = large_n_limit_check(N, k)
        print(f"N={N:3d} k={k}: {c.value:.5f} vs {c.target:.5f} (deviation {c.deviation:.2%}, mult {c.multiplicity})")
