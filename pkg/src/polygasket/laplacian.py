"""Probabilistic graph Laplacians and the dense eigensolver oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .gasket_graph import LevelGraph

__all__ = [
    "LaplacianMatrix",
    "SpectrumReport",
    "SingularBlockError",
    "laplacian",
    "dense_spectrum",
    "cluster_eigenvalues",
    "dirichlet_block",
    "schur_complement",
    "empirical_dos",
    "DEFAULT_CLUSTER_TOL",
    "MAX_DENSE_DIM",
]

DEFAULT_CLUSTER_TOL = 1e-7
MAX_DENSE_DIM = 20000


class SingularBlockError(ValueError):
    """z is (numerically) an eigenvalue of the interior block D."""


@dataclass(frozen=True, eq=False)
class LaplacianMatrix:
    graph: LevelGraph
    entries: np.ndarray
    boundary_indices: tuple

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def symmetrized(self) -> np.ndarray:
        """I - D^{-1/2} A D^{-1/2}, similar to the random-walk Laplacian."""
        deg = self.graph.degrees().astype(float)
        inv_sqrt = 1.0 / np.sqrt(deg)
        adj = np.zeros_like(self.entries)
        e = self.graph.edges
        adj[e[:, 0], e[:, 1]] = 1.0
        adj[e[:, 1], e[:, 0]] = 1.0
        return np.eye(len(deg)) - inv_sqrt[:, None] * adj * inv_sqrt[None, :]


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    atoms: tuple  # ((value, multiplicity), ...) ascending

    @property
    def dimension(self) -> int:
        return sum(m for _, m in self.atoms)

    def multiplicity(self, value: float, tol: float = 1e-7) -> int:
        return sum(m for v, m in self.atoms if abs(v - value) <= tol)

    def as_dict(self) -> dict:
        return {v: m for v, m in self.atoms}


def laplacian(g: LevelGraph) -> LaplacianMatrix:
    """Delta_n f(x) = f(x) - (1/deg x) sum_{y ~ x} f(y) as a dense matrix."""
    nv = g.num_vertices
    L = np.eye(nv)
    deg = g.degrees()
    for x, nbrs in enumerate(g.adjacency):
        w = 1.0 / deg[x]
        for y in nbrs:
            L[x, y] = -w
    return LaplacianMatrix(graph=g, entries=L, boundary_indices=g.boundary)


def cluster_eigenvalues(values, tol: float = DEFAULT_CLUSTER_TOL) -> tuple:
    """Merge sorted values closer than ``tol`` to their neighbour into atoms."""
    values = np.sort(np.asarray(values, dtype=float))
    atoms = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            chunk = values[start:i]
            atoms.append((float(chunk.mean()), int(len(chunk))))
            start = i
    return tuple(atoms)


def _symmetric_spectrum(S: np.ndarray, tol: float) -> SpectrumReport:
    if S.shape[0] > MAX_DENSE_DIM:
        raise ValueError(f"dimension {S.shape[0]} exceeds the dense guard {MAX_DENSE_DIM}")
    # eigh raises LinAlgError on non-convergence
    w = scipy.linalg.eigh(S, eigvals_only=True, check_finite=True)
    if not np.all(np.isfinite(w)):
        raise np.linalg.LinAlgError("non-finite eigenvalues")
    return SpectrumReport(eigenvalues=w, atoms=cluster_eigenvalues(w, tol))


def dense_spectrum(L: LaplacianMatrix, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> SpectrumReport:
    """Brute-force spectrum of Delta_n with clustered multiplicities."""
    return _symmetric_spectrum(L.symmetrized(), cluster_tol)


def _interior(L: LaplacianMatrix) -> np.ndarray:
    b = set(L.boundary_indices)
    return np.array([i for i in range(L.dimension) if i not in b], dtype=int)


def _blocks(L: LaplacianMatrix):
    if L.graph.level != 1:
        raise ValueError(f"expected a level-1 Laplacian, got level {L.graph.level}")
    b = np.array(L.boundary_indices, dtype=int)
    i = _interior(L)
    M = L.entries
    return M[np.ix_(b, b)], M[np.ix_(b, i)], M[np.ix_(i, b)], M[np.ix_(i, i)]


def dirichlet_block(L: LaplacianMatrix, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    """Interior block D of Delta_1 and its spectrum (Dirichlet eigenvalues)."""
    _, _, _, D = _blocks(L)
    S = L.symmetrized()
    i = _interior(L)
    return D, _symmetric_spectrum(S[np.ix_(i, i)], cluster_tol)


def schur_complement(L: LaplacianMatrix, z: float, tol: float = 1e-9) -> np.ndarray:
    """S(z) = (A - z) - B (D - z)^{-1} C for the boundary/interior split of Delta_1."""
    A, B, C, D = _blocks(L)
    _, report = dirichlet_block(L)
    if np.min(np.abs(report.eigenvalues - z)) < tol:
        raise SingularBlockError(f"z={z!r} is within {tol} of the Dirichlet spectrum")
    Dz = D - z * np.eye(D.shape[0])
    return (A - z * np.eye(3)) - B @ np.linalg.solve(Dz, C)


def empirical_dos(L: LaplacianMatrix, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> tuple:
    """Normalized eigenvalue counting measure: ((value, weight), ...)."""
    report = dense_spectrum(L, cluster_tol)
    dim = L.dimension
    return tuple((v, m / dim) for v, m in report.atoms)
