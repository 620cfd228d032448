from __future__ import annotations

import numpy as np
import pytest

from polygasket.decimation import exceptional_set, phi_closed_form, poles_of_phi, r_closed_form
from polygasket.gasket_graph import build
from polygasket.laplacian import (
    SingularBlockError,
    cluster_eigenvalues,
    dense_spectrum,
    dirichlet_block,
    empirical_dos,
    laplacian,
    schur_complement,
)


def _atoms(report):
    return [(round(v, 9), m) for v, m in report.atoms]


def test_level0_matrix():
    for N in (1, 4):
        L = laplacian(build(N, 0)).entries
        np.testing.assert_array_equal(L, [[1, -0.5, -0.5], [-0.5, 1, -0.5], [-0.5, -0.5, 1]])


def test_level1_sierpinski_rows():
    L = laplacian(build(1, 1))
    M = L.entries
    for i in range(6):
        off = M[i][np.arange(6) != i]
        if i in L.boundary_indices:
            assert sorted(off[off != 0].tolist()) == [-0.5, -0.5]
        else:
            assert sorted(off[off != 0].tolist()) == [-0.25] * 4


@pytest.mark.parametrize("N,n", [(1, 2), (2, 2), (3, 1), (5, 1)])
def test_row_sums_and_range(N, n):
    L = laplacian(build(N, n))
    np.testing.assert_allclose(L.entries.sum(axis=1), 0.0, atol=1e-15)
    rep = dense_spectrum(L)
    assert rep.eigenvalues.min() > -1e-12 and rep.eigenvalues.max() < 2.0
    assert rep.multiplicity(0.0) == 1
    assert rep.dimension == L.dimension


def test_symmetrization_is_similar():
    for N, n in ((1, 2), (2, 1), (3, 1)):
        L = laplacian(build(N, n))
        raw = np.sort(np.linalg.eigvals(L.entries).real)
        np.testing.assert_allclose(raw, dense_spectrum(L).eigenvalues, atol=1e-10)


def test_dense_spectrum_examples():
    assert _atoms(dense_spectrum(laplacian(build(1, 0)))) == [(0.0, 1), (1.5, 2)]
    assert _atoms(dense_spectrum(laplacian(build(1, 1)))) == [(0.0, 1), (0.75, 2), (1.5, 3)]
    rep = dense_spectrum(laplacian(build(2, 1)))
    assert rep.multiplicity(1.5) == 6
    for j in range(6):
        assert rep.multiplicity(np.sin(j * np.pi / 6) ** 2) >= 1


def test_clustering():
    atoms = cluster_eigenvalues([0.0, 1e-9, 0.5, 0.5 + 2e-8, 1.0, 1.0 + 1e-6])
    assert [m for _, m in atoms] == [2, 2, 1, 1]
    assert [v for v, _ in atoms] == pytest.approx([5e-10, 0.50000001, 1.0, 1.000001], abs=1e-15)


def test_dirichlet_block():
    D, rep = dirichlet_block(laplacian(build(1, 1)))
    assert D.shape == (3, 3)
    assert _atoms(rep) == [(0.5, 1), (1.25, 2)]
    assert rep.multiplicity(1.5) == 0
    _, rep2 = dirichlet_block(laplacian(build(2, 1)))
    assert rep2.multiplicity(1.5) == 3
    with pytest.raises(ValueError):
        dirichlet_block(laplacian(build(1, 2)))


def _schur_gap(N, z):
    S = schur_complement(laplacian(build(N, 1)), z)
    L0 = laplacian(build(N, 0)).entries
    return np.max(np.abs(S - phi_closed_form(N, z) * (L0 - r_closed_form(N, z) * np.eye(3))))


def test_schur_examples():
    S0 = schur_complement(laplacian(build(1, 1)), 0.0)
    np.testing.assert_allclose(S0, phi_closed_form(1, 0.0) * laplacian(build(1, 0)).entries, atol=1e-12)
    assert r_closed_form(1, 0.1) == pytest.approx(0.46, abs=1e-15)
    assert _schur_gap(1, 0.1) < 1e-10
    assert _schur_gap(2, 0.2) < 1e-9
    assert _schur_gap(2, 0.3) < 1e-9


def test_schur_singular_block():
    with pytest.raises(SingularBlockError):
        schur_complement(laplacian(build(1, 1)), 0.5)
    with pytest.raises(ValueError):
        schur_complement(laplacian(build(1, 2)), 0.1)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_spectral_mapping(N):
    for n in (1, 2, 3):
        if N == 3 and n == 3:
            continue
        fine = dense_spectrum(laplacian(build(N, n)))
        coarse = np.array([v for v, _ in dense_spectrum(laplacian(build(N, n - 1))).atoms])
        E = np.array(exceptional_set(N))
        poles = np.array(poles_of_phi(N))
        for v, _ in fine.atoms:
            if np.min(np.abs(E - v)) < 1e-7 or np.min(np.abs(poles - v)) < 1e-7:
                continue
            assert np.min(np.abs(coarse - r_closed_form(N, v))) < 1e-8


def test_empirical_dos():
    d0 = empirical_dos(laplacian(build(1, 0)))
    assert [(round(v, 9), w) for v, w in d0] == [(0.0, 1 / 3), (1.5, 2 / 3)]
    d1 = empirical_dos(laplacian(build(1, 1)))
    assert [(round(v, 9), w) for v, w in d1] == [(0.0, 1 / 6), (0.75, 1 / 3), (1.5, 1 / 2)]
    d3 = dict(empirical_dos(laplacian(build(1, 3))))
    assert d3[max(d3)] == pytest.approx(15 / 42)
