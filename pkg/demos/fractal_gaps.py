"""Smallest fractal eigenvalues and their spectral gaps for a few N."""

from __future__ import annotations

from polygasket.spectrum import fractal_eigenvalues, gap_ratios, repeated

for N in (1, 2, 3):
    eigs = fractal_eigenvalues(N, 12)
    print(f"N={N}: " + ", ".join(f"{v:.4f}x{m}" for v, m in eigs[:6]))
    window = repeated(fractal_eigenvalues(N, 201))[:200]
    ratios, worst = gap_ratios(window)
    print(f"      largest ratio among the first 200 positive eigenvalues: {worst:.3f}")
