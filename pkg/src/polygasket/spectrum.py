"""Level-n spectra by decimation, fractal eigenvalues, gaps and density of states.

Every eigenvalue of Delta_n sits on a preimage forest. Its roots are 0 and 3/2
(level 0) and the level-1 values of the sets A and DN (the Dirichlet-Neumann
values sin^2(j pi / N), 1 <= j < N/2). The children of a node y at level l are
the non-exceptional real solutions of R(w) = y in [0, 3/2], placed at level
l + 1. A node's multiplicity in sigma(Delta_n) depends only on the family of
its root and on the excess e = n - l:

    zero          1
    three_halves  (3N + (3N-2)(3N)^e) / (3N-1)
    dn            (3N)^e + 1
    a             ((3N)^e - 1) / (3N-1)

Nodes are keyed by (root, branch indices), never by floating value.

A fractal eigenvalue is c^m Lambda(z) with Lambda(z) = lim c^k Rt^k(z), where Rt
is the inverse branch of R through 0 and z is a node present at level m. The
pair (Rt(z), m + 1) gives the same value, so each eigenvalue is counted once,
at the last node of its chain that is not Rt of its parent (a generator).
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .decimation import (
    COMPANION_N_LIMIT,
    _r_unchecked,
    dirichlet_neumann_values,
    is_exceptional,
    poles_of_r,
    r_as_rational,
    set_A,
)
from .gasket_graph import params, vertex_count

__all__ = [
    "SpectralAtom",
    "Spectrum",
    "DecimationPath",
    "DensityOfStates",
    "LimitCheck",
    "MultiplicityError",
    "PreimageError",
    "ConvergenceError",
    "preimages",
    "branch_point",
    "inverse_branch_zero",
    "finite_spectrum",
    "family_multiplicity",
    "decimation_path",
    "fractal_eigenvalues",
    "gap_ratios",
    "repeated",
    "dos_atoms",
    "large_n_limit_check",
]

VERIFY_TOL = 1e-9
DISTINCT_TOL = 1e-10
MAX_DOS_DEPTH = 6


class MultiplicityError(RuntimeError):
    """Decimated multiplicities do not add up to the vertex count."""


class PreimageError(RuntimeError):
    """A computed preimage failed the |R(w) - lambda| check."""


class ConvergenceError(RuntimeError):
    """The renormalized inverse-branch sequence did not settle."""


@dataclass(frozen=True)
class SpectralAtom:
    value: float
    multiplicity: int
    provenance: str

    def __post_init__(self):
        if self.multiplicity < 0:
            raise ValueError("multiplicity must be non-negative")


@dataclass(frozen=True)
class Spectrum:
    N: int
    level: int
    atoms: tuple
    dim: int

    @property
    def total(self) -> int:
        return sum(a.multiplicity for a in self.atoms)

    def values(self) -> np.ndarray:
        return np.array([a.value for a in self.atoms])

    def multiplicity(self, value: float, tol: float = 1e-7) -> int:
        return sum(a.multiplicity for a in self.atoms if abs(a.value - value) <= tol)

    def as_pairs(self) -> tuple:
        return tuple((a.value, a.multiplicity) for a in self.atoms)


@dataclass(frozen=True)
class DecimationPath:
    seed: float
    level: int
    iterates: tuple
    renormalized: tuple
    limit: float
    residual: float

    def residuals(self) -> np.ndarray:
        return np.abs(np.diff(np.asarray(self.renormalized)))


@dataclass(frozen=True)
class DensityOfStates:
    N: int
    depth: int
    atoms: tuple  # ((value, weight), ...) ascending
    mass: float


@dataclass(frozen=True)
class LimitCheck:
    N: int
    k: int
    value: float
    target: float
    deviation: float
    multiplicity: int


# --- multiplicity families -------------------------------------------------

ZERO, THREE_HALVES, DN, SET_A = "zero", "three_halves", "dn", "a"


def family_multiplicity(N: int, family: str, excess: int) -> int:
    """Multiplicity at level l + excess of a node first appearing at level l."""
    if excess < 0:
        return 0
    m = 3 * N
    if family == ZERO:
        return 1
    if family == THREE_HALVES:
        return (m + (m - 2) * m**excess) // (m - 1)
    if family == DN:
        return m**excess + 1
    if family == SET_A:
        return (m**excess - 1) // (m - 1)
    raise ValueError(f"unknown family {family!r}")


def _dos_weight(N: int, family: str, level: int) -> Fraction:
    """n -> infinity limit of multiplicity / |V_n| for a node at ``level``."""
    m = 3 * N
    scale = Fraction(1, m**level * (2 * m - 3))
    if family == THREE_HALVES:
        return (m - 2) * scale
    if family == DN:
        return (m - 1) * scale
    if family == SET_A:
        return scale
    return Fraction(0)


# --- preimages and the inverse branch ----------------------------------------

def _r(N: int, w):
    return _r_unchecked(N, w)


def _polish_root(N: int, lam: float, w: float, lo: float, hi: float) -> float:
    g = lambda t: float(_r(N, t)) - lam
    h = 1e-7 * max(1.0, abs(w))
    for _ in range(4):
        a, b = max(lo, w - h), min(hi, w + h)
        ga, gb = g(a), g(b)
        if ga == 0.0:
            return a
        if gb == 0.0:
            return b
        if np.isfinite(ga) and np.isfinite(gb) and ga * gb < 0:
            return brentq(g, a, b, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
        h *= 10.0
    return w


def _verify(N: int, lam: float, w: float) -> bool:
    val = float(_r(N, w))
    if not np.isfinite(val):
        return False
    # allow for the slope of R at w turning one ulp of w into a residual
    step = 1e-7 * max(w, 1e-3)
    slope = abs(float(_r(N, w + step)) - float(_r(N, w - step))) / (2 * step)
    return abs(val - lam) < VERIFY_TOL + 8 * np.finfo(float).eps * max(abs(w), 1e-300) * slope


def _companion_preimages(N: int, lam: float, lo: float, hi: float):
    rm = r_as_rational(N)
    num = np.asarray(rm.numerator.coeffs, dtype=float)
    den = np.asarray(rm.denominator.coeffs, dtype=float)
    size = max(len(num), len(den))
    poly = np.zeros(size)
    poly[: len(num)] += num
    poly[: len(den)] -= lam * den
    while len(poly) > 1 and poly[-1] == 0.0:
        poly = poly[:-1]
    r = np.roots(poly[::-1])
    keep = np.abs(r.imag) <= 1e-6 * np.maximum(1.0, np.abs(r))
    cand = np.sort(r[keep].real)
    cand = cand[(cand >= lo - 1e-6) & (cand <= hi + 1e-6)]
    roots = []
    for w in cand:
        w = min(max(float(w), lo), hi)
        roots.append(_polish_root(N, lam, w, lo, hi))
    return roots, len(poly) - 1


def _bracket_preimages(N: int, lam: float, lo: float, hi: float):
    """Sign-change scan on a grid uniform in arccos(1-2z), refined by brentq."""
    samples = max(4000, 80 * N)
    theta = np.linspace(0.0, math.pi, samples)
    grid = np.concatenate([(1.0 - np.cos(theta)) / 2.0, np.linspace(1.0, hi, samples // 4)[1:]])
    poles = poles_of_r(N)
    grid = np.unique(np.concatenate([grid, np.array(poles), [lo, hi]]))
    grid = grid[(grid >= lo) & (grid <= hi)]
    g = lambda t: _r(N, t) - lam
    vals = g(grid)
    roots = []
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        va, vb = vals[i], vals[i + 1]
        if va == 0.0:
            roots.append(float(a))
            continue
        if not (np.isfinite(va) and np.isfinite(vb)) or va * vb > 0:
            continue
        w = brentq(lambda t: float(g(t)), a, b, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
        if any(abs(w - p) < 1e-8 for p in poles):
            continue  # sign change across a pole, not a root
        roots.append(w)
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def _dedup(values, tol):
    out = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def preimages(N: int, lam: float) -> list:
    """All real w in [0, 3/2] with R(w) = lam, sorted."""
    p = params(N)
    N = p.N
    lam = float(lam)
    if not -1e-12 <= lam <= 1.5 + 1e-12:
        raise ValueError(f"lambda={lam!r} outside [0, 3/2]")
    lo, hi = 0.0, 1.5
    roots = None
    if N <= COMPANION_N_LIMIT:
        roots, degree = _companion_preimages(N, lam, lo, hi)
        roots = _dedup(roots, 1e-12)
        if len(roots) > degree or not all(_verify(N, lam, w) for w in roots):
            roots = None
    if roots is None:
        roots = _dedup(_bracket_preimages(N, lam, lo, hi), 1e-12)
    bad = [w for w in roots if not _verify(N, lam, w)]
    if bad:
        raise PreimageError(f"N={N}: preimages {bad} of {lam} fail |R(w) - lambda| < {VERIFY_TOL}")
    if lam == 0.0 and (not roots or roots[0] != 0.0):
        roots = _dedup([0.0] + [w for w in roots if w > 1e-14], 1e-12)
    return roots


@lru_cache(maxsize=None)
def branch_point(N: int) -> tuple:
    """(z_b, R(z_b)): first critical point or pole of R to the right of 0."""
    N = params(N).N
    poles = poles_of_r(N)
    top = poles[0] if poles else 1.5
    z = np.linspace(0.0, top, 4001)[1:-1]
    r = _r(N, z)
    d = np.diff(r)
    falling = np.nonzero(d < 0)[0]
    if len(falling) == 0:
        return (float(top), math.inf) if poles else (1.5, float(_r(N, 1.5)))
    i = int(falling[0])
    a, b = z[max(i - 1, 0)], z[min(i + 1, len(z) - 1)]
    res = minimize_scalar(lambda t: -float(_r(N, t)), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-15})
    return float(res.x), float(-res.fun)


def inverse_branch_zero(N: int, lam: float) -> float:
    """Rt(lam): the root of R(w) = lam on [0, z_b], with Rt(0) = 0."""
    zb, top = branch_point(N)
    lam = float(lam)
    if lam == 0.0:
        return 0.0
    if not 0.0 < lam <= top:
        raise ValueError(f"lambda={lam!r} outside the branch range [0, {top}]")
    if lam == top:
        return zb
    g = lambda t: float(_r(N, t)) - lam
    c = params(N).c
    # R(w) ~ c w near 0, so lam / c is a good starting scale
    hi = min(zb, 4.0 * lam / c)
    if g(hi) < 0:
        hi = zb
    return brentq(g, 0.0, hi, xtol=max(lam * 1e-18, 1e-300), rtol=4 * np.finfo(float).eps, maxiter=500)


# --- the preimage forest -----------------------------------------------------

@dataclass(frozen=True)
class _Node:
    key: tuple
    value: float
    level: int
    family: str
    provenance: str
    root_level: int
    parent: tuple | None = field(default=None, compare=False)


def _roots(N: int) -> list:
    nodes = [
        _Node(("0",), 0.0, 0, ZERO, "seed-0", 0),
        _Node(("3/2",), 1.5, 0, THREE_HALVES, "seed-3/2", 0),
    ]
    for j, v in enumerate(dirichlet_neumann_values(N), start=1):
        nodes.append(_Node(("dn", j), v, 1, DN, f"level1-circle({3 * j})", 1))
    for i, v in enumerate(set_A(N)):
        nodes.append(_Node(("A", i), v, 1, SET_A, "set-A", 1))
    return nodes


def _level1_children(N: int, node: _Node) -> list:
    """Children of the level-0 roots, from the level-1 circle values."""
    m = 3 * N
    out = []
    if node.family == THREE_HALVES:
        for j in range(1, m // 2 + 1):
            if j % 3:
                out.append((math.sin(j * math.pi / m) ** 2, f"level1-circle({j})"))
    elif node.family == ZERO and N % 2 == 0:
        out.append((1.0, f"level1-circle({m // 2})"))
    return out


def _seed_label(node: _Node) -> str:
    p = node.provenance
    return p[p.index(", ") + 2:-1] if p.startswith("preimage") else p


def _make_children(N: int, node: _Node, values) -> list:
    kids = []
    if node.level == 0:
        for i, (v, prov) in enumerate(_level1_children(N, node)):
            kids.append(_Node(node.key + (i,), v, 1, node.family, prov, node.root_level, node.key))
        return kids
    kept = [w for w in values if not is_exceptional(N, w) and not (node.value == 0.0 and w < 1e-12)]
    seed = _seed_label(node)
    for i, w in enumerate(kept):
        depth = node.level + 1 - (1 if node.root_level == 0 else node.root_level)
        prov = f"preimage(depth {depth}, {seed})"
        kids.append(_Node(node.key + (i,), w, node.level + 1, node.family, prov, node.root_level, node.key))
    return kids


def _expand(N: int, nodes: list, jobs: int = 1) -> list:
    """Children of every node, in input order; preimage solves optionally in parallel."""
    need = [n.value for n in nodes if n.level > 0]
    if jobs > 1 and len(need) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            solved = list(pool.map(partial(preimages, N), need, chunksize=max(1, len(need) // (4 * jobs))))
    else:
        solved = [preimages(N, v) for v in need]
    it = iter(solved)
    return [_make_children(N, n, next(it) if n.level > 0 else ()) for n in nodes]


def _forest(N: int, depth: int, jobs: int = 1) -> list:
    """All nodes with level <= depth."""
    frontier = [r for r in _roots(N) if r.level <= depth]
    nodes = list(frontier)
    while frontier:
        frontier = [n for n in frontier if n.level < depth]
        if not frontier:
            break
        children = _expand(N, frontier, jobs)
        frontier = [c for kids in children for c in kids]
        nodes.extend(frontier)
    return nodes


def finite_spectrum(N: int, n: int, jobs: int = 1) -> Spectrum:
    """sigma(Delta_n) with multiplicities, assembled from the preimage forest."""
    N = params(N).N
    if n < 0:
        raise ValueError("level must be >= 0")
    atoms = []
    for node in _forest(N, n, jobs):
        mult = family_multiplicity(N, node.family, n - node.level)
        if mult > 0:
            atoms.append(SpectralAtom(float(node.value), mult, node.provenance))
    atoms.sort(key=lambda a: a.value)
    merged = []
    for a in atoms:
        if merged and a.value - merged[-1].value <= DISTINCT_TOL:
            prev = merged[-1]
            merged[-1] = SpectralAtom(prev.value, prev.multiplicity + a.multiplicity, prev.provenance)
        else:
            merged.append(a)
    dim = vertex_count(N, n)
    total = sum(a.multiplicity for a in merged)
    if total != dim:
        raise MultiplicityError(f"N={N}, n={n}: multiplicities sum to {total}, expected {dim}")
    return Spectrum(N=N, level=n, atoms=tuple(merged), dim=dim)


# --- fractal eigenvalues -----------------------------------------------------

def decimation_path(N: int, z: float, level: int, iters: int = 60, rtol: float = 1e-14) -> DecimationPath:
    """Iterate Rt from z and renormalize by c^(level + k) until the sequence settles."""
    c = float(params(N).c)
    lam = float(z)
    iterates = [lam]
    renorm = [lam * c**level]
    if lam == 0.0:
        return DecimationPath(0.0, level, (0.0,), (0.0,), 0.0, 0.0)
    residual = math.inf
    for k in range(1, iters + 1):
        lam = inverse_branch_zero(N, lam)
        if not 0.0 < lam < iterates[-1]:
            raise ConvergenceError(f"Rt iterates stopped decreasing at step {k} (seed {z})")
        iterates.append(lam)
        renorm.append(lam * c ** (level + k))
        residual = abs(renorm[-1] - renorm[-2])
        if residual <= rtol * renorm[-1]:
            break
    limit = renorm[-1]
    if residual >= 1e-10 * limit:
        raise ConvergenceError(
            f"renormalized sequence from seed {z} not Cauchy after {iters} steps (residual {residual:.3g})"
        )
    return DecimationPath(float(z), level, tuple(iterates), tuple(renorm), limit, residual)


def _lambda0(N: int, z: float, iters: int, cache: dict) -> float:
    if z not in cache:
        cache[z] = decimation_path(N, z, 0, iters).limit
    return cache[z]


def _is_generator(N: int, node: _Node, parent_value: float | None, zb: float, top: float) -> bool:
    if node.family == ZERO and node.value == 0.0:
        return True
    if node.value > top:
        return False
    if parent_value is not None:
        # below z_b the node is Rt(parent) and repeats the parent's eigenvalues
        return node.value >= zb
    # Rt of a root can be exceptional only for 3/2
    return not is_exceptional(N, inverse_branch_zero(N, node.value))


def fractal_eigenvalues(N: int, count: int, iters: int = 60, jobs: int = 1) -> list:
    """The ``count`` smallest distinct eigenvalues of the fractal Laplacian as (lambda, mult)."""
    N = params(N).N
    if count < 1:
        raise ValueError("count must be >= 1")
    c = params(N).c
    zb, top = branch_point(N)
    cache: dict = {}
    floor = _lambda0(N, zb, iters, cache)
    # heap entries: (key, kind, tick, payload); kind 0 expands a node, kind 1 is a
    # resolved eigenvalue, kind 2 a generator whose key is only the lower bound
    # c^level * Lambda(z_b), valid because Lambda increases and z >= z_b
    heap: list = []
    tick = 0

    def push(key, kind, payload):
        nonlocal tick
        heapq.heappush(heap, (key, kind, tick, payload))
        tick += 1

    def first_excess(node):
        e = 0
        while family_multiplicity(N, node.family, e) == 0:
            e += 1
        return e

    def add_node(node, parent_value):
        if _is_generator(N, node, parent_value, zb, top):
            e = first_excess(node)
            if node.value == 0.0:
                push(0.0, 1, (node, None))
            elif parent_value is None:
                push(c ** (node.level + e) * _lambda0(N, node.value, iters, cache), 1, (node, e))
            else:
                push(c ** (node.level + e) * floor, 2, (node, e))
        push(c ** (node.level + 1) * floor, 0, node)

    for r in _roots(N):
        add_node(r, None)

    out: list = []
    while heap:
        key, kind, _, payload = heapq.heappop(heap)
        if len(out) >= count and key > out[-1][0] * (1 + 1e-9):
            break
        if kind == 0:
            node = payload
            for child in _expand(N, [node], jobs)[0]:
                add_node(child, node.value)
            continue
        node, e = payload
        if kind == 2:
            push(c ** (node.level + e) * _lambda0(N, node.value, iters, cache), 1, (node, e))
            continue
        if e is None:
            out.append([0.0, 1])
            continue
        mult = family_multiplicity(N, node.family, e)
        if out and abs(key - out[-1][0]) <= 1e-9 * max(key, 1.0):
            out[-1][1] += mult
        else:
            out.append([key, mult])
        push(key * c, 1, (node, e + 1))
    return [(float(v), int(m)) for v, m in out[:count]]


def gap_ratios(eigs) -> tuple:
    """Consecutive ratios lambda_{k+1}/lambda_k of a sorted positive list, and their max."""
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size < 2:
        raise ValueError("need at least two eigenvalues")
    if np.any(eigs <= 0) or np.any(np.diff(eigs) < 0):
        raise ValueError("eigenvalues must be positive and sorted ascending")
    ratios = eigs[1:] / eigs[:-1]
    return ratios.tolist(), float(ratios.max())


def repeated(eigs_with_mult, positive_only: bool = True) -> list:
    """Expand (lambda, mult) pairs into a list with repeats."""
    out = []
    for v, m in eigs_with_mult:
        if positive_only and v <= 0:
            continue
        out.extend([v] * m)
    return out


# --- density of states -------------------------------------------------------

def dos_atoms(N: int, depth: int, jobs: int = 1) -> DensityOfStates:
    """Atoms of the limiting spectral measure down to ``depth`` preimage steps."""
    N = params(N).N
    if not 0 <= depth <= MAX_DOS_DEPTH:
        raise ValueError(f"depth must be in 0..{MAX_DOS_DEPTH}")
    weights = []
    for node in _forest(N, depth + 1, jobs):
        w = _dos_weight(N, node.family, node.level)
        if w > 0:
            weights.append((float(node.value), w))
    weights.sort()
    atoms = tuple((v, float(w)) for v, w in weights)
    mass = float(sum(w for _, w in weights))
    return DensityOfStates(N=N, depth=depth, atoms=atoms, mass=mass)


# --- large N -----------------------------------------------------------------

def large_n_limit_check(N: int, k: int, iters: int = 60) -> LimitCheck:
    """k-th positive eigenvalue against its N -> infinity limit (2/9) pi^2 k^2."""
    N = params(N).N
    if k < 1 or 4 * k > N:
        raise ValueError(f"k={k} is too large relative to N={N} (need 1 <= k <= N/4)")
    eigs = fractal_eigenvalues(N, k + 1, iters)
    value, mult = eigs[k]
    target = 2.0 / 9.0 * math.pi**2 * k**2
    return LimitCheck(N=N, k=k, value=value, target=target,
                      deviation=abs(value - target) / target, multiplicity=mult)
