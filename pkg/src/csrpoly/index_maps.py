"""Closed-form ranking of column-index tuples by triangle/tetrahedral numbers.

Expanded columns are ordered lexicographically by their index tuple, the
rightmost index varying fastest::

    (0, 0), (0, 1), ..., (0, D-1), (1, 1), ..., (D-1, D-1)   # polynomial
    (0, 1), (0, 2), ..., (0, D-1), (1, 2), ..., (D-2, D-1)   # interaction

The forward maps are written once as numba functions. Public scalar wrappers
run the same source on Python integers (``.py_func``) after checking the
domain, while :mod:`csrpoly.expansion` calls the compiled versions from its
kernels. Inversion is a compiled binary search over the forward map.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .errors import DomainError

INDEX_MAX = 2**63 - 1


class Mode(enum.Enum):
    POLYNOMIAL = "poly"
    INTERACTION = "inter"


@dataclass(frozen=True)
class MappingKind:
    degree: int
    mode: Mode

    def __post_init__(self):
        if self.degree not in (2, 3):
            raise DomainError(f"degree must be 2 or 3, got {self.degree}")
        if not isinstance(self.mode, Mode):
            object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def strict(self) -> bool:
        return self.mode is Mode.INTERACTION

    def __str__(self) -> str:
        return f"{self.mode.value}{self.degree}"


POLY2 = MappingKind(2, Mode.POLYNOMIAL)
INTER2 = MappingKind(2, Mode.INTERACTION)
POLY3 = MappingKind(3, Mode.POLYNOMIAL)
INTER3 = MappingKind(3, Mode.INTERACTION)
ALL_KINDS = (POLY2, INTER2, POLY3, INTER3)


# --- closed forms (int64 when compiled; no intermediate exceeds the result) ---

@njit(cache=True)
def _tri(n):
    if n % 2 == 0:
        return (n // 2) * (n + 1)
    return n * ((n + 1) // 2)


@njit(cache=True)
def _tet(n):
    t = _tri(n)
    if (n + 2) % 3 == 0:
        return t * ((n + 2) // 3)
    return (t // 3) * (n + 2)


@njit(cache=True)
def _f2_inter(i, j, d):
    return _tri(d - 1) - (_tri(d - i - 1) - (j - i - 1))


@njit(cache=True)
def _f2_poly(i, j, d):
    return _tri(d) - (_tri(d - i) - (j - i))


@njit(cache=True)
def _f3_inter(i, j, k, d):
    return _tet(d - 2) - (_tet(d - i - 3) + _tri(d - j - 1) - (k - j - 1))


@njit(cache=True)
def _f3_poly(i, j, k, d):
    return _tet(d) - (_tet(d - i - 1) + _tri(d - j) - (k - j))


def _check_nonneg(n: int, what: str) -> int:
    n = int(n)
    if n < 0:
        raise DomainError(f"{what} must be non-negative, got {n}")
    return n


def _checked(value: int) -> int:
    if value > INDEX_MAX:
        raise OverflowError(f"{value} exceeds the 64-bit index range")
    return value


def triangle(n: int) -> int:
    """n(n+1)/2."""
    return _checked(_tri.py_func(_check_nonneg(n, "n")))


def tetrahedral(n: int) -> int:
    """n(n+1)(n+2)/6."""
    return _checked(_tet.py_func(_check_nonneg(n, "n")))


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient; zero when k > n."""
    return math.comb(_check_nonneg(n, "n"), _check_nonneg(k, "k"))


def expanded_dim(D: int, kind: MappingKind) -> int:
    """Number of distinct degree-K features over D input columns."""
    D = _check_nonneg(D, "D")
    if kind.strict:
        return _checked(math.comb(D, kind.degree))
    return _checked(math.comb(D + kind.degree - 1, kind.degree))


def row_output_nnz(nnz: int, kind: MappingKind) -> int:
    """Entries produced from a row with ``nnz`` stored values.

    Polynomial rows give C(nnz+K-1, K) products, interaction rows C(nnz, K).
    """
    return expanded_dim(nnz, kind)


def _check_tuple(t: Sequence[int], D: int, kind: MappingKind) -> tuple[int, ...]:
    t = tuple(int(x) for x in t)
    if len(t) != kind.degree:
        raise DomainError(f"expected {kind.degree} indices, got {len(t)}")
    if t[0] < 0 or t[-1] >= D:
        raise DomainError(f"indices {t} outside [0, {D})")
    for a, b in zip(t, t[1:]):
        if (a >= b) if kind.strict else (a > b):
            order = "strictly increasing" if kind.strict else "non-decreasing"
            raise DomainError(f"indices {t} must be {order} for {kind.mode.value} mode")
    return t


def map2_interaction(i: int, j: int, D: int) -> int:
    i, j = _check_tuple((i, j), D, INTER2)
    expanded_dim(D, INTER2)
    return _f2_inter.py_func(i, j, int(D))


def map2_polynomial(i: int, j: int, D: int) -> int:
    i, j = _check_tuple((i, j), D, POLY2)
    expanded_dim(D, POLY2)
    return _f2_poly.py_func(i, j, int(D))


def map3_interaction(i: int, j: int, k: int, D: int) -> int:
    i, j, k = _check_tuple((i, j, k), D, INTER3)
    expanded_dim(D, INTER3)
    return _f3_inter.py_func(i, j, k, int(D))


def map3_polynomial(i: int, j: int, k: int, D: int) -> int:
    i, j, k = _check_tuple((i, j, k), D, POLY3)
    expanded_dim(D, POLY3)
    return _f3_poly.py_func(i, j, k, int(D))


_FORWARD = {
    POLY2: map2_polynomial,
    INTER2: map2_interaction,
    POLY3: map3_polynomial,
    INTER3: map3_interaction,
}


def forward_map(t: Sequence[int], D: int, kind: MappingKind) -> int:
    """Column of the expanded matrix holding the product over tuple ``t``."""
    return _FORWARD[kind](*t, D)


@njit(cache=True)
def _forward(i, j, k, d, degree, strict):
    if degree == 2:
        return _f2_inter(i, j, d) if strict else _f2_poly(i, j, d)
    return _f3_inter(i, j, k, d) if strict else _f3_poly(i, j, k, d)


@njit(cache=True)
def _invert(col, d, degree, strict, out):
    """Write the tuple ranked ``col`` into ``out``.

    Bisects the leading index (then the middle one for K=3) on the rank of
    the smallest tuple sharing that prefix; the last index is the remaining
    offset.
    """
    s = 1 if strict else 0
    # largest i whose first tuple (i, i+s, i+2s) ranks <= col
    lo = 0
    hi = d - s * (degree - 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _forward(mid, mid + s, mid + 2 * s, d, degree, strict) <= col:
            lo = mid
        else:
            hi = mid
    i = lo
    if degree == 2:
        out[0] = i
        out[1] = i + s + col - _forward(i, i + s, 0, d, 2, strict)
        return
    lo = i + s
    hi = d - s
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _forward(i, mid, mid + s, d, 3, strict) <= col:
            lo = mid
        else:
            hi = mid
    j = lo
    out[0] = i
    out[1] = j
    out[2] = j + s + col - _forward(i, j, j + s, d, 3, strict)


@njit(cache=True)
def _forward_many(tuples, d, degree, strict, out):
    for n in range(tuples.shape[0]):
        k = tuples[n, 2] if degree == 3 else 0
        out[n] = _forward(tuples[n, 0], tuples[n, 1], k, d, degree, strict)


@njit(cache=True)
def _invert_many(cols, d, degree, strict, out):
    for n in range(cols.shape[0]):
        _invert(cols[n], d, degree, strict, out[n])


def invert_map(col: int, D: int, kind: MappingKind) -> tuple[int, ...]:
    """Index tuple stored in expanded column ``col``."""
    D = _check_nonneg(D, "D")
    col = int(col)
    size = expanded_dim(D, kind)
    if not 0 <= col < size:
        raise DomainError(f"column {col} outside [0, {size})")
    out = np.empty(kind.degree, dtype=np.int64)
    _invert(col, D, kind.degree, kind.strict, out)
    return tuple(out.tolist())


def forward_map_many(tuples, D: int, kind: MappingKind) -> np.ndarray:
    """Vectorised :func:`forward_map` over an ``(n, K)`` integer array."""
    t = np.asarray(tuples, dtype=np.int64).reshape(-1, kind.degree)
    D = _check_nonneg(D, "D")
    expanded_dim(D, kind)
    if t.size:
        steps = np.diff(t, axis=1)
        if t.min() < 0 or t.max() >= D or np.any(steps < (1 if kind.strict else 0)):
            raise DomainError(f"tuples outside the {kind} domain for D={D}")
    out = np.empty(t.shape[0], dtype=np.int64)
    _forward_many(t, D, kind.degree, kind.strict, out)
    return out


def invert_map_many(cols, D: int, kind: MappingKind) -> np.ndarray:
    """Vectorised :func:`invert_map`; returns an ``(n, K)`` array."""
    c = np.asarray(cols, dtype=np.int64).reshape(-1)
    size = expanded_dim(_check_nonneg(D, "D"), kind)
    if c.size and (c.min() < 0 or c.max() >= size):
        raise DomainError(f"columns outside [0, {size})")
    out = np.empty((c.size, kind.degree), dtype=np.int64)
    _invert_many(c, int(D), kind.degree, kind.strict, out)
    return out
