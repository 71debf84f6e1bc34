"""Degree-2/3 polynomial and interaction expansion of CSR matrices.

:func:`expand` works directly on the sparse representation in two passes:
the first sizes every output row from its stored-entry count, the second
walks the K-combinations of each row's stored entries and places every
product with the closed-form column ranking from :mod:`csrpoly.index_maps`.
Only nonzero inputs are ever multiplied.

:func:`expand_dense` is the conventional counter-based algorithm over all
columns. It produces the same column layout and serves both as the
benchmark baseline and as the reference the sparse path is tested against.

Augmented output is laid out in blocks ``[bias | degree 1 | degree 2 |
degree 3]``; each block is ordered by its own ranking and shifted by the
widths of the blocks before it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from .csr import INDEX_MAX, CsrMatrix, _trusted_csr
from .errors import DomainError, NonCanonicalError
from .index_maps import (
    MappingKind,
    _f2_inter,
    _f2_poly,
    _f3_inter,
    _f3_poly,
    _tet,
    _tri,
    expanded_dim,
    invert_map_many,
    row_output_nnz,
)


@dataclass(frozen=True)
class ExpansionSpec:
    kind: MappingKind
    include_lower_degrees: bool = False
    include_bias: bool = False

    def __post_init__(self):
        if self.include_bias and not self.include_lower_degrees:
            raise DomainError("include_bias requires include_lower_degrees")

    @property
    def degree(self) -> int:
        return self.kind.degree

    def blocks(self) -> list[tuple[int, MappingKind | None]]:
        """``(degree, kind)`` per output block, in column order.

        Degrees 0 and 1 carry no mapping kind.
        """
        out: list[tuple[int, MappingKind | None]] = []
        if self.include_bias:
            out.append((0, None))
        if self.include_lower_degrees:
            out.append((1, None))
            if self.kind.degree == 3:
                out.append((2, MappingKind(2, self.kind.mode)))
        out.append((self.kind.degree, self.kind))
        return out

    def block_widths(self, D: int) -> list[int]:
        widths = []
        for degree, kind in self.blocks():
            widths.append(1 if degree == 0 else D if degree == 1 else expanded_dim(D, kind))
        return widths

    def block_offsets(self, D: int) -> dict[int, int]:
        """First output column of each block, keyed by block degree."""
        offsets, start = {}, 0
        for (degree, _), width in zip(self.blocks(), self.block_widths(D)):
            offsets[degree] = start
            start += width
        return offsets

    def output_dim(self, D: int) -> int:
        total = sum(self.block_widths(D))
        if total > INDEX_MAX:
            raise OverflowError(f"expanded dimension {total} exceeds the 64-bit index range")
        return total

    def row_entries(self, nnz: int) -> int:
        """Stored entries in an output row built from ``nnz`` input entries."""
        total = 0
        for degree, kind in self.blocks():
            total += 1 if degree == 0 else nnz if degree == 1 else row_output_nnz(nnz, kind)
        return total


@dataclass
class ExpansionStats:
    """Counters filled in by an instrumented :func:`expand` call."""

    entries: int = 0
    products: dict[int, int] = field(default_factory=lambda: {2: 0, 3: 0})

    @property
    def multiplications(self) -> int:
        """Scalar multiplications; a degree-3 product costs two."""
        return self.products[2] + 2 * self.products[3]


# --- sparse kernels ---------------------------------------------------------

@njit(cache=True)
def _row_count(r, degree, strict):
    if degree == 2:
        if strict:
            return _tri(r - 1) if r >= 2 else 0
        return _tri(r)
    if strict:
        return _tet(r - 2) if r >= 3 else 0
    return _tet(r)


@njit(cache=True)
def _count_pass(row_ptr, col, n_cols, degree, strict, bias, lower, out_ptr):
    """Fill ``out_ptr``; returns -1 when the input rows are not canonical."""
    n_rows = row_ptr.shape[0] - 1
    out_ptr[0] = 0
    for i in range(n_rows):
        a0 = row_ptr[i]
        a1 = row_ptr[i + 1]
        for a in range(a0, a1):
            if col[a] < 0 or col[a] >= n_cols:
                return -1
            if a > a0 and col[a] <= col[a - 1]:
                return -1
        r = a1 - a0
        n = _row_count(r, degree, strict)
        if bias:
            n += 1
        if lower:
            n += r
            if degree == 3:
                n += _row_count(r, 2, strict)
        out_ptr[i + 1] = out_ptr[i] + n
    return 0


def _fill_pass_py(row_ptr, col, val, D, degree, strict, bias, lower,
                  off1, off2, off3, out_ptr, out_col, out_val):
    """Second pass; returns the number of degree-2 and degree-3 products."""
    n_rows = row_ptr.shape[0] - 1
    s = 1 if strict else 0
    n2 = 0
    n3 = 0
    for i in prange(n_rows):
        a0 = row_ptr[i]
        a1 = row_ptr[i + 1]
        n = out_ptr[i]
        m2 = 0
        m3 = 0
        if bias:
            out_col[n] = 0
            out_val[n] = 1.0
            n += 1
        if lower:
            for a in range(a0, a1):
                out_col[n] = off1 + col[a]
                out_val[n] = val[a]
                n += 1
        if degree == 2 or lower:
            for a in range(a0, a1):
                ja = col[a]
                va = val[a]
                for b in range(a + s, a1):
                    jb = col[b]
                    if strict:
                        out_col[n] = off2 + _f2_inter(ja, jb, D)
                    else:
                        out_col[n] = off2 + _f2_poly(ja, jb, D)
                    out_val[n] = va * val[b]
                    n += 1
                    m2 += 1
        if degree == 3:
            for a in range(a0, a1):
                ja = col[a]
                va = val[a]
                for b in range(a + s, a1):
                    jb = col[b]
                    vb = val[b]
                    for c in range(b + s, a1):
                        jc = col[c]
                        if strict:
                            out_col[n] = off3 + _f3_inter(ja, jb, jc, D)
                        else:
                            out_col[n] = off3 + _f3_poly(ja, jb, jc, D)
                        out_val[n] = (va * vb) * val[c]
                        n += 1
                        m3 += 1
        n2 += m2
        n3 += m3
    return n2, n3


_fill_pass = njit(cache=True)(_fill_pass_py)
_fill_pass_parallel = njit(cache=True, parallel=True)(_fill_pass_py)


def _check_capacity(m: CsrMatrix, spec: ExpansionSpec) -> int:
    """Output width, after proving every size fits in 64-bit indices."""
    out_dim = spec.output_dim(m.n_cols)
    if m.n_rows:
        max_r = int(m.row_nnz().max())
        if m.n_rows * spec.row_entries(max_r) > INDEX_MAX:
            nnz, counts = np.unique(m.row_nnz(), return_counts=True)
            total = sum(int(c) * spec.row_entries(int(r)) for r, c in zip(nnz, counts))
            if total > INDEX_MAX:
                raise OverflowError(f"expanded matrix would hold {total} entries")
    return out_dim


def expand(
    m: CsrMatrix,
    spec: ExpansionSpec,
    *,
    parallel: bool = False,
    stats: ExpansionStats | None = None,
) -> CsrMatrix:
    """Expand ``m`` without densifying it.

    ``parallel`` fills rows with numba threads; the result is bit-identical
    to the sequential fill. Pass an :class:`ExpansionStats` to collect entry
    and product counts.
    """
    out_dim = _check_capacity(m, spec)
    degree = spec.kind.degree
    strict = spec.kind.strict
    out_ptr = np.empty(m.n_rows + 1, dtype=np.int64)
    if _count_pass(m.row_ptr, m.col_indices, m.n_cols, degree, strict,
                   spec.include_bias, spec.include_lower_degrees, out_ptr) < 0:
        raise NonCanonicalError("input rows must have strictly increasing in-range columns")
    total = int(out_ptr[-1])
    out_col = np.empty(total, dtype=np.int64)
    out_val = np.empty(total, dtype=np.float64)
    offsets = spec.block_offsets(m.n_cols)
    fill = _fill_pass_parallel if parallel else _fill_pass
    n2, n3 = fill(m.row_ptr, m.col_indices, m.values, m.n_cols, degree, strict,
                 spec.include_bias, spec.include_lower_degrees,
                 offsets.get(1, 0), offsets.get(2, 0), offsets.get(3, 0),
                 out_ptr, out_col, out_val)
    if stats is not None:
        stats.entries += total
        stats.products[2] += int(n2)
        stats.products[3] += int(n3)
    return _trusted_csr(m.n_rows, out_dim, out_ptr, out_col, out_val)


# --- dense baseline ---------------------------------------------------------

@njit(cache=True)
def _dense_fill(a, degree, strict, bias, lower, out):
    n_rows, D = a.shape
    s = 1 if strict else 0
    for i in range(n_rows):
        cp = 0
        if bias:
            out[i, cp] = 1.0
            cp += 1
        if lower:
            for j in range(D):
                out[i, cp] = a[i, j]
                cp += 1
        if degree == 2 or lower:
            for j0 in range(D):
                for j1 in range(j0 + s, D):
                    out[i, cp] = a[i, j0] * a[i, j1]
                    cp += 1
        if degree == 3:
            for j0 in range(D):
                for j1 in range(j0 + s, D):
                    for j2 in range(j1 + s, D):
                        out[i, cp] = (a[i, j0] * a[i, j1]) * a[i, j2]
                        cp += 1


def dense_output_bytes(n_rows: int, n_cols: int, spec: ExpansionSpec) -> int:
    return 8 * n_rows * spec.output_dim(n_cols)


def expand_dense(a, spec: ExpansionSpec) -> np.ndarray:
    """Reference expansion of a dense ``(n_rows, D)`` array.

    Every row visits all column combinations and a running counter assigns
    the output column, so zeros are multiplied like any other value.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DomainError("dense input must be two-dimensional")
    n_rows, D = a.shape
    out_dim = spec.output_dim(D)
    if n_rows * out_dim > INDEX_MAX:
        raise OverflowError("dense expansion size exceeds the 64-bit index range")
    out = np.empty((n_rows, out_dim), dtype=np.float64)
    _dense_fill(a, spec.kind.degree, spec.kind.strict,
                spec.include_bias, spec.include_lower_degrees, out)
    return out


# --- feature attribution ----------------------------------------------------

def feature_names(D: int, spec: ExpansionSpec) -> list[tuple[int, ...]]:
    """Input-column tuple behind every output column.

    The tuple length tags the block: ``()`` is the bias, ``(j,)`` the copied
    input column ``j``, longer tuples are products.
    """
    names: list[tuple[int, ...]] = []
    spec.output_dim(D)
    for (degree, kind), width in zip(spec.blocks(), spec.block_widths(D)):
        if degree == 0:
            names.append(())
        elif degree == 1:
            names.extend((j,) for j in range(D))
        else:
            names.extend(map(tuple, invert_map_many(np.arange(width), D, kind).tolist()))
    return names


def format_feature(t: tuple[int, ...], prefix: str = "x") -> str:
    """``(0, 0, 2)`` -> ``'x0^2*x2'``; the bias tuple renders as ``'1'``."""
    if not t:
        return "1"
    parts = []
    for j in dict.fromkeys(t):
        power = t.count(j)
        parts.append(f"{prefix}{j}" + (f"^{power}" if power > 1 else ""))
    return "*".join(parts)
