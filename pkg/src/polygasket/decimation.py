"""Spectral decimation maps R(z), phi(z) and the exceptional set of the 3N-gasket.

Every closed form below involves T_N and U_{N-1} at sqrt(z). Chebyshev parity
turns these into honest polynomials in z:

    N = 2k even:   T_N(sqrt z) = T_k(2z-1),           sqrt z U_{N-1}(sqrt z) = 2z U_{k-1}(2z-1)
    N = 2k+1 odd:  sqrt z T_N(sqrt z) = z (U_k - U_{k-1})(2z-1),
                   U_{N-1}(sqrt z) = (U_k + U_{k-1})(2z-1)

so the maps are evaluated for real z of either sign without complex arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy
from scipy.optimize import brentq

from .chebyshev import Polynomial, coefficients, eval_first_kind as T, eval_second_kind as U

__all__ = [
    "PoleError",
    "RootCountError",
    "RationalMap",
    "parity_factors",
    "q_factor",
    "r_closed_form",
    "phi_closed_form",
    "r_via_pq",
    "sawtooth_couplings",
    "r_as_rational",
    "poles_of_r",
    "poles_of_phi",
    "set_A",
    "set_B",
    "dirichlet_neumann_values",
    "sigma_level1",
    "exceptional_set",
    "is_exceptional",
    "sawtooth_laplacian",
    "sawtooth_eigenfunction",
    "EXACT_N_LIMIT",
    "COMPANION_N_LIMIT",
]

EXACT_N_LIMIT = 32
# above this, companion matrices of the monomial expansion are too ill-conditioned
COMPANION_N_LIMIT = 24

POLE_TOL = 1e-12


class PoleError(ValueError):
    """Evaluation point too close to a pole."""


class RootCountError(RuntimeError):
    """A root set came out with the wrong number of elements."""


def _check_N(N):
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    return int(N)


def parity_factors(N: int, z):
    """The two parity-reduced Chebyshev factors of R and phi at z.

    Returns ``(T_N(sqrt z), sqrt z U_{N-1}(sqrt z))`` for even N and
    ``(sqrt z T_N(sqrt z), U_{N-1}(sqrt z))`` for odd N.
    """
    z = float(z) if isinstance(z, (float, int, np.floating)) else np.asarray(z, dtype=float)
    y = 2.0 * z - 1.0
    if N % 2 == 0:
        k = N // 2
        return T(k, y), 2.0 * z * U(k - 1, y)
    k = (N - 1) // 2
    uk, ukm = U(k, y), U(k - 1, y)
    return z * (uk - ukm), uk + ukm


def q_factor(N: int, z):
    """2 T_N(1-2z) + 2 U_{N-1}(1-2z) + 1, whose zeros form the set A."""
    if isinstance(z, (float, int, np.floating)):
        x = 1.0 - 2.0 * float(z)
    else:
        x = 1.0 - 2.0 * np.asarray(z, dtype=float)
    return 2.0 * T(N, x) + 2.0 * U(N - 1, x) + 1.0


def _b_factor(N: int, z):
    t, u = parity_factors(N, z)
    if N % 2 == 0:
        return t - 2.0 * (np.asarray(z) - 1.0) * u
    return u - 2.0 * t


def _near(z, points, tol):
    z = float(z)
    return any(abs(z - p) <= tol for p in points)


def r_closed_form(N: int, z: float) -> float:
    N = _check_N(N)
    if _near(z, poles_of_r(N), POLE_TOL):
        raise PoleError(f"z={z!r} is a pole of R for N={N}")
    a, b = parity_factors(N, z)
    if N % 2 == 0:
        return float((z - 1.0) * b * q_factor(N, z) / a)
    return float(a * q_factor(N, z) / b)


def _r_unchecked(N: int, z):
    """Vectorized R without pole checks (inf/nan at poles)."""
    a, b = parity_factors(N, z)
    if isinstance(z, (float, int, np.floating)):
        z = float(z)
        if (a if N % 2 == 0 else b) == 0.0:
            return math.nan
        if N % 2 == 0:
            return (z - 1.0) * b * q_factor(N, z) / a
        return a * q_factor(N, z) / b
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if N % 2 == 0:
            return (z - 1.0) * b * q_factor(N, z) / a
        return a * q_factor(N, z) / b


def phi_closed_form(N: int, z: float) -> float:
    N = _check_N(N)
    if _near(z, poles_of_phi(N), POLE_TOL):
        raise PoleError(f"z={z!r} is a pole of phi for N={N}")
    a, b = parity_factors(N, z)
    q = q_factor(N, z)
    if N % 2 == 0:
        return float((3.0 - 2.0 * z) * a / ((a - 2.0 * (z - 1.0) * b) * q))
    return float((3.0 - 2.0 * z) * b / ((b - 2.0 * a) * q))


def sawtooth_couplings(m: int, z: float):
    """End-to-end couplings of the boundary problem on a sawtooth of length m.

    For an eigenfunction (away from v_0, v_m) with f(v_0) = a, f(v_m) = b,
    f(v_1) + f(u_1) = a * same + b * cross. Returns ``(P, Q, same, cross)``
    where P, Q are the sums f(v_1) + f(u_1) for the antisymmetric and
    symmetric solutions; ``same = (Q + P)/2`` and ``cross = (Q - P)/2``.
    """
    if not 0.0 < z < 1.0:
        raise ValueError("sawtooth couplings need 0 < z < 1")
    f1 = sawtooth_eigenfunction(m, z, "antisymmetric")
    f2 = sawtooth_eigenfunction(m, z, "symmetric")
    P = ((3.0 - 2.0 * z) * f1["v"][1] + 1.0) / (2.0 * (1.0 - z))
    Q = ((3.0 - 2.0 * z) * f2["v"][1] + 1.0) / (2.0 * (1.0 - z))
    return P, Q, (Q + P) / 2.0, (Q - P) / 2.0


def r_via_pq(N: int, z: float) -> float:
    """R(z) rebuilt from the sawtooth eigenfunctions and the a, b, c system.

    The level-1 ring splits into sawtooth segments of length N-1 between the
    junctions adjacent to consecutive boundary teeth. For N = 1 the segments
    are empty and the two-unknown system is solved directly.
    """
    N = _check_N(N)
    if not 0.0 < z < 1.0:
        raise ValueError("r_via_pq is defined for 0 < z < 1")
    if N == 1:
        # h(x0) = h(x2) = a, h(x1) = c; 4(1-z)c = 2a and 4(1-z)a = 1 + a + c
        w = 4.0 * (1.0 - z)
        a = 1.0 / (w - 1.0 - 2.0 / w)
        c = 2.0 * a / w
        return 1.0 + (a + z - 1.0) / (a + c)
    _, _, s, x = sawtooth_couplings(N - 1, z)
    denom = x * (x + s + 4.0 * z - 5.0)
    if abs(denom) < 1e-14:
        raise PoleError(f"degenerate denominator at z={z!r}")
    return ((1.0 + (z - 1.0) * (3.0 - x - s - 4.0 * z))
            * ((x - 1.0) * x - (s + 4.0 * z - 5.0) * (s + 4.0 * z - 3.0)) / denom)


def phi_via_pq(N: int, z: float) -> float:
    """phi(z) = b + c from the same derivation as :func:`r_via_pq`."""
    N = _check_N(N)
    if N == 1:
        w = 4.0 * (1.0 - z)
        a = 1.0 / (w - 1.0 - 2.0 / w)
        return a + 2.0 * a / w
    _, _, s, x = sawtooth_couplings(N - 1, z)
    return -x * (x + s + 4.0 * z - 5.0) / (
        (x + s + 4.0 * z - 3.0) * ((x - 1.0) * x - (s + 4.0 * z - 5.0) * (s + 4.0 * z - 3.0))
    )


# --- exact forms -------------------------------------------------------------

_z = sympy.Symbol("z")


def _sym(poly: Polynomial, arg):
    return sum(sympy.Integer(int(c)) * arg**i for i, c in enumerate(poly.coeffs))


def _parity_reduced(coeffs, parity):
    """Even (parity 0) or odd-shifted (parity 1) coefficients as a poly in z."""
    return sum(sympy.Integer(int(c)) * _z**((i + parity) // 2)
               for i, c in enumerate(coeffs) if i % 2 == parity % 2)


@lru_cache(maxsize=None)
def _exact_factors(N: int):
    tN = coefficients("first", N).coeffs
    uN = coefficients("second", N - 1).coeffs
    if N % 2 == 0:
        f_a = _parity_reduced(tN, 0)           # T_N(sqrt z)
        f_b = _parity_reduced(uN, 1)           # sqrt z U_{N-1}(sqrt z)
    else:
        f_a = _parity_reduced(tN, 1)           # sqrt z T_N(sqrt z)
        f_b = _parity_reduced(uN, 0)           # U_{N-1}(sqrt z)
    q = sympy.expand(
        2 * _sym(coefficients("first", N), 1 - 2 * _z)
        + 2 * _sym(coefficients("second", N - 1), 1 - 2 * _z) + 1
    )
    return sympy.expand(f_a), sympy.expand(f_b), q


def _int_coeffs(expr) -> tuple:
    p = sympy.Poly(expr, _z)
    return tuple(int(c) for c in reversed(p.all_coeffs()))


@dataclass(frozen=True)
class RationalMap:
    N: int
    numerator: Polynomial
    denominator: Polynomial
    real_poles: tuple

    @property
    def degree(self) -> int:
        return max(self.numerator.degree, self.denominator.degree)

    def __call__(self, z):
        """Scalars are evaluated exactly (Fraction Horner) and then rounded,
        since the integer coefficients cancel badly in floating point."""
        if np.ndim(z) == 0:
            x = Fraction(float(z))
            num = _horner_exact(self.numerator.coeffs, x)
            den = _horner_exact(self.denominator.coeffs, x)
            if den == 0:
                raise PoleError(f"z={z!r} is a pole of R for N={self.N}")
            return float(num / den)
        return self.numerator(z) / self.denominator(z)


def _horner_exact(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + int(c)
    return acc


@lru_cache(maxsize=None)
def r_as_rational(N: int) -> RationalMap:
    """R as a gcd-reduced ratio of integer polynomials (N <= 32)."""
    N = _check_N(N)
    if N > EXACT_N_LIMIT:
        raise ValueError(f"exact coefficients are only supported for N <= {EXACT_N_LIMIT}")
    f_a, f_b, q = _exact_factors(N)
    if N % 2 == 0:
        num, den = (_z - 1) * f_b * q, f_a
    else:
        num, den = f_a * q, f_b
    num_p, den_p = sympy.Poly(num, _z), sympy.Poly(den, _z)
    g = num_p.gcd(den_p)
    num_p, den_p = num_p.quo(g), den_p.quo(g)
    # primitive integer form with positive denominator constant term
    _, num_p = num_p.clear_denoms()
    _, den_p = den_p.clear_denoms()
    content = math.gcd(*(int(c) for c in num_p.all_coeffs() + den_p.all_coeffs()))
    sign = -1 if den_p.eval(0) < 0 else 1
    num_c = tuple(sign * int(c) // content for c in reversed(num_p.all_coeffs()))
    den_c = tuple(sign * int(c) // content for c in reversed(den_p.all_coeffs()))
    return RationalMap(N=N, numerator=Polynomial(num_c), denominator=Polynomial(den_c),
                       real_poles=tuple(poles_of_r(N)))


def poles_of_r(N: int) -> list:
    """cos^2(m pi / 2N) for m odd (N even) or m even >= 2 (N odd), m < N."""
    N = _check_N(N)
    start = 1 if N % 2 == 0 else 2
    return sorted(math.cos(m * math.pi / (2 * N)) ** 2 for m in range(start, N, 2))


def dirichlet_neumann_values(N: int) -> list:
    """Zeros of R lying in both sigma(D) and sigma(Delta_1): sin^2(j pi / N), 1 <= j < N/2."""
    N = _check_N(N)
    return sorted(math.sin(j * math.pi / N) ** 2 for j in range(1, (N + 1) // 2) if 2 * j < N)


def _polish(f, roots, lo, hi):
    out = []
    for r in roots:
        # bracket around the approximate root, fall back to the raw value
        h = 1e-6 * max(1.0, abs(r))
        a, b = max(lo, r - h), min(hi, r + h)
        fa, fb = f(a), f(b)
        if fa == 0:
            out.append(a)
        elif fb == 0:
            out.append(b)
        elif fa * fb < 0:
            out.append(brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
        else:
            out.append(r)
    return out


def _bracket_roots(f, lo, hi, samples):
    grid = np.linspace(lo, hi, samples)
    vals = f(grid)
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def _real_roots(f, coeffs, N, expected, lo=-1e-9, hi=1.5 + 1e-9):
    roots = None
    if coeffs is not None and N <= COMPANION_N_LIMIT:
        r = np.roots(np.asarray(coeffs[::-1], dtype=float))
        real = r[np.abs(r.imag) <= 1e-7 * np.maximum(1.0, np.abs(r))].real
        real = np.sort(real[(real >= lo) & (real <= hi)])
        roots = _polish(f, real.tolist(), lo, hi)
        if len(roots) != expected:
            roots = None
    if roots is None:
        roots = _bracket_roots(f, lo, hi, max(4000, 400 * N))
    roots = sorted(roots)
    if len(roots) != expected:
        raise RootCountError(f"expected {expected} roots, found {len(roots)} for N={N}")
    return roots


@lru_cache(maxsize=None)
def _set_A(N):
    coeffs = _int_coeffs(_exact_factors(N)[2]) if N <= COMPANION_N_LIMIT else None
    return tuple(_real_roots(lambda z: q_factor(N, z), coeffs, N, N))


@lru_cache(maxsize=None)
def _set_B(N):
    coeffs = None
    if N <= COMPANION_N_LIMIT:
        f_a, f_b, _ = _exact_factors(N)
        expr = f_a - 2 * (_z - 1) * f_b if N % 2 == 0 else f_b - 2 * f_a
        coeffs = _int_coeffs(sympy.expand(expr))
    return tuple(_real_roots(lambda z: _b_factor(N, z), coeffs, N, N // 2 + 1))


def set_A(N: int) -> list:
    """Real roots of 2 T_N(1-2z) + 2 U_{N-1}(1-2z) + 1 (exactly N of them)."""
    return list(_set_A(_check_N(N)))


def set_B(N: int) -> list:
    """Roots of the symmetric Dirichlet factor (floor(N/2) + 1 of them)."""
    return list(_set_B(_check_N(N)))


def poles_of_phi(N: int) -> list:
    return sorted(set_A(N) + set_B(N))


def sigma_level1(N: int):
    """Spectrum of Delta_1: sin^2(j pi / 3N), j = 0..3N-1, and 3/2 with multiplicity 3N."""
    from .spectrum import SpectralAtom, Spectrum

    N = _check_N(N)
    m = 3 * N
    atoms = [SpectralAtom(0.0, 1, "seed-0")]
    for j in range(1, m // 2 + 1):
        mult = 1 if 2 * j == m else 2
        atoms.append(SpectralAtom(math.sin(j * math.pi / m) ** 2, mult, f"level1-circle({j})"))
    atoms.append(SpectralAtom(1.5, m, "seed-3/2"))
    return Spectrum(N=N, level=1, atoms=tuple(sorted(atoms, key=lambda a: a.value)), dim=2 * m)


def _dedup(values, tol=1e-12):
    out = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


@lru_cache(maxsize=None)
def _exceptional(N):
    cos_family = [math.cos(m * math.pi / (2 * N)) ** 2 for m in range(1, N)]
    return tuple(_dedup([1.5] + set_A(N) + set_B(N) + cos_family))


def exceptional_set(N: int) -> list:
    """{3/2} u A u B u {cos^2(m pi / 2N): m = 1..N-1}."""
    return list(_exceptional(_check_N(N)))


def is_exceptional(N: int, z: float, tol: float = 1e-9) -> bool:
    return _near(z, _exceptional(_check_N(N)), tol)


# --- sawtooth graphs ---------------------------------------------------------

def sawtooth_laplacian(m: int) -> np.ndarray:
    """Probabilistic Laplacian on v_0..v_m (ids 0..m) and teeth u_1..u_m (ids m+1..2m).

    Tooth u_k is joined to v_{k-1} and v_k.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    n = 2 * m + 1
    A = np.zeros((n, n))
    for k in range(m):
        for a, b in ((k, k + 1), (k, m + 1 + k), (k + 1, m + 1 + k)):
            A[a, b] = A[b, a] = 1.0
    return np.eye(n) - A / A.sum(axis=1)[:, None]


def sawtooth_eigenfunction(m: int, z: float, kind: str) -> dict:
    """Antisymmetric (f(v_0) = -f(v_m) = 1) or symmetric (f(v_0) = f(v_m) = 1)
    solution of the boundary eigenvalue problem on the length-m sawtooth.

    Returns ``{"v": values at v_0..v_m, "u": values at u_1..u_m}`` (``u[0]``
    is u_1). Teeth satisfy the eigen-equation at a degree-2 vertex,
    f(u_k) = (f(v_{k-1}) + f(v_k)) / (2(1-z)).
    """
    if kind not in ("antisymmetric", "symmetric"):
        raise ValueError(f"unknown kind {kind!r}")
    if not 0.0 < z < 1.0:
        raise ValueError("need 0 < z < 1")
    theta = math.acos(1.0 - 2.0 * z)
    k = np.arange(m + 1, dtype=float)
    if kind == "antisymmetric":
        den = math.sin(m * theta / 2.0)
        v = -np.sin((k - m / 2.0) * theta)
    else:
        den = math.cos(m * theta / 2.0)
        v = np.cos((k - m / 2.0) * theta)
    if abs(den) < 1e-12:
        raise ValueError(f"z={z!r} is an excluded value (1 - cos(k pi / m))/2")
    v = v / den
    u = (v[:-1] + v[1:]) / (2.0 * (1.0 - z))
    return {"v": v, "u": u}
