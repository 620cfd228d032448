"""Chebyshev polynomials of the first and second kind.

Values are computed with the three-term recurrence so that arguments outside
[-1, 1] are handled by the polynomial itself rather than by cos/arccos.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

__all__ = [
    "Polynomial",
    "eval_first_kind",
    "eval_second_kind",
    "coefficients",
    "EXACT_DEGREE_LIMIT",
]

# beyond this degree integer coefficients are converted to floats
EXACT_DEGREE_LIMIT = 64


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in the monomial basis, coefficients in ascending degree."""

    coeffs: tuple

    def __post_init__(self):
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0]
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return P.polyval(x, np.asarray(self.coeffs, dtype=float))

    def astype_float(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)


def _recurrence(k: int, x, first):
    if isinstance(x, (float, int)) and not isinstance(x, bool):
        # plain floats skip numpy's per-operation overhead
        prev, cur = 1.0, (float(x) if first else 2.0 * x)
        if k == 0:
            return 1.0
        for _ in range(k - 1):
            prev, cur = cur, 2.0 * x * cur - prev
        return cur
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy() if first else 2.0 * x
    for _ in range(k - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur if cur.ndim else float(cur)


def eval_first_kind(k: int, x):
    """T_k(x) via T_{k+1} = 2x T_k - T_{k-1}."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return _recurrence(k, x, first=True)


def eval_second_kind(k: int, x):
    """U_k(x) via U_{k+1} = 2x U_k - U_{k-1}.

    The recurrence is the polynomial itself, so U_k(+-1) = (k+1)(+-1)^k comes
    out without any special casing. ``k = -1`` returns 0 (the usual convention).
    """
    if k == -1:
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return z if z.ndim else 0.0
    if k < 0:
        raise ValueError("k must be >= -1")
    return _recurrence(k, x, first=False)


def coefficients(kind: str, k: int) -> Polynomial:
    """Monomial coefficients of T_k (``kind="first"``) or U_k (``"second"``).

    Exact Python integers up to degree 64, floats (with a warning) above.
    """
    if kind not in ("first", "second"):
        raise ValueError(f"unknown kind {kind!r}")
    if k < 0:
        raise ValueError("k must be non-negative")
    prev = [1]
    if k == 0:
        return Polynomial(tuple(prev))
    cur = [0, 1] if kind == "first" else [0, 2]
    for _ in range(k - 1):
        nxt = [0] + [2 * a for a in cur]
        for i, a in enumerate(prev):
            nxt[i] -= a
        prev, cur = cur, nxt
    if k > EXACT_DEGREE_LIMIT:
        warnings.warn(
            f"Chebyshev coefficients of degree {k} exceed the exact regime; "
            "returned as floats and lose relative precision",
            stacklevel=2,
        )
        return Polynomial(tuple(float(a) for a in cur))
    return Polynomial(tuple(cur))
