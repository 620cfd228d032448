"""Spectral decimation on the 3N-gasket family of fractals."""

from __future__ import annotations

from .chebyshev import coefficients, eval_first_kind, eval_second_kind
from .decimation import (
    exceptional_set,
    phi_closed_form,
    poles_of_r,
    r_as_rational,
    r_closed_form,
    r_via_pq,
    set_A,
    set_B,
    sigma_level1,
)
from .gasket_graph import build, geodesic_distance, params, vertex_count
from .laplacian import dense_spectrum, laplacian, schur_complement
from .spectrum import (
    dos_atoms,
    finite_spectrum,
    fractal_eigenvalues,
    gap_ratios,
    inverse_branch_zero,
    large_n_limit_check,
    preimages,
)

__version__ = "0.1.0"

__all__ = [
    "build", "params", "vertex_count", "geodesic_distance",
    "laplacian", "dense_spectrum", "schur_complement",
    "coefficients", "eval_first_kind", "eval_second_kind",
    "r_closed_form", "phi_closed_form", "r_via_pq", "r_as_rational",
    "poles_of_r", "set_A", "set_B", "exceptional_set", "sigma_level1",
    "preimages", "inverse_branch_zero", "finite_spectrum", "fractal_eigenvalues",
    "gap_ratios", "dos_atoms", "large_n_limit_check",
]
