"""Compressed sparse row matrices: construction, validation, dense interop,
random generation and Matrix Market I/O.

A :class:`CsrMatrix` stores the three usual vectors (row pointers, column
indices, values) plus an explicit shape, since the column count cannot be
recovered from the stored entries. Index arrays are ``int64`` and values are
``float64``; all arrays are read-only once the matrix is built.
"""
from __future__ import annotations

from dataclasses import dataclass
from os import PathLike
from typing import Iterable, Sequence, TextIO, Union

import numpy as np

from .errors import (
    ArgumentError,
    NonCanonicalError,
    OutOfRangeError,
    ParseError,
    StructureError,
    UnsupportedError,
)

INDEX_MAX = np.iinfo(np.int64).max

# numpy's PCG64 bit generator; its output stream is fixed across platforms
# and numpy releases, unlike the legacy global RandomState.
PRNG_ALGORITHM = "PCG64"

_MM_HEADER = "%%MatrixMarket matrix coordinate real general"

# cap on cells drawn per block in random_csr, keeps the mask allocation small
_RANDOM_BLOCK_CELLS = 1 << 22


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _as_index_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise StructureError(f"{name} must be one-dimensional")
    if arr.size == 0:
        return np.zeros(0, dtype=np.int64)
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or not np.all(arr == np.floor(arr)):
            raise StructureError(f"{name} must contain integers")
    elif arr.dtype.kind not in "iu":
        # Python ints beyond int64 end up as object arrays.
        raise OverflowError(f"{name} entries exceed the 64-bit index range")
    if arr.dtype.kind == "u" and arr.size and int(arr.max()) > INDEX_MAX:
        raise OverflowError(f"{name} entries exceed the 64-bit index range")
    if arr.dtype.kind == "f" and arr.size and float(np.abs(arr).max()) > 2.0**53:
        raise OverflowError(f"{name} entries are not exactly representable")
    return np.array(arr, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """Immutable canonical CSR matrix.

    Build instances through :func:`new_csr`, :func:`canonicalize`,
    :func:`from_dense` or :func:`random_csr`; all of them validate.
    """

    n_rows: int
    n_cols: int
    row_ptr: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.row_ptr[-1])

    def row_nnz(self) -> np.ndarray:
        """Stored-entry count of every row."""
        return np.diff(self.row_ptr)

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        start, stop = self.row_ptr[i], self.row_ptr[i + 1]
        return self.col_indices[start:stop], self.values[start:stop]

    def validate(self) -> None:
        _check_structure(self.n_rows, self.n_cols, self.row_ptr, self.col_indices, self.values)

    def __eq__(self, other: object) -> bool:
        """Field-wise equality; values compare bit-for-bit."""
        if not isinstance(other, CsrMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.col_indices, other.col_indices)
            and self.values.tobytes() == other.values.tobytes()
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"CsrMatrix(shape={self.shape}, nnz={self.nnz})"


def _check_structure(n_rows, n_cols, row_ptr, col_indices, values) -> None:
    if n_rows < 0 or n_cols < 0:
        raise StructureError("matrix dimensions must be non-negative")
    if row_ptr.shape != (n_rows + 1,):
        raise StructureError(f"row_ptr has {row_ptr.size} entries, expected {n_rows + 1}")
    if row_ptr[0] != 0:
        raise StructureError("row_ptr[0] must be 0")
    if np.any(np.diff(row_ptr) < 0):
        raise StructureError("row_ptr must be non-decreasing")
    nnz = int(row_ptr[-1])
    if col_indices.size != nnz or values.size != nnz:
        raise StructureError(
            f"row_ptr ends at {nnz} but there are {col_indices.size} column indices "
            f"and {values.size} values"
        )
    if nnz == 0:
        return
    if col_indices.min() < 0:
        raise OutOfRangeError("negative column index")
    if col_indices.max() >= n_cols:
        raise OutOfRangeError(f"column index {int(col_indices.max())} >= n_cols {n_cols}")
    # A step that is not strictly positive is only legal where a new row starts.
    step_ok = np.diff(col_indices) > 0
    row_start = np.zeros(nnz, dtype=bool)
    starts = row_ptr[:-1][row_ptr[:-1] < nnz]
    row_start[starts] = True
    if not np.all(step_ok | row_start[1:]):
        raise NonCanonicalError("column indices within a row must be strictly increasing")


def new_csr(
    n_rows: int,
    n_cols: int,
    row_ptr: Sequence[int],
    col_indices: Sequence[int],
    values: Sequence[float],
) -> CsrMatrix:
    """Validate raw CSR arrays and wrap them in a :class:`CsrMatrix`.

    Stored zero values are accepted as given.
    """
    n_rows, n_cols = int(n_rows), int(n_cols)
    if n_rows > INDEX_MAX - 1 or n_cols > INDEX_MAX:
        raise OverflowError("matrix dimensions exceed the 64-bit index range")
    rp = _as_index_array(row_ptr, "row_ptr")
    ci = _as_index_array(col_indices, "col_indices")
    vals = np.array(values, dtype=np.float64)
    if vals.ndim != 1:
        raise StructureError("values must be one-dimensional")
    _check_structure(n_rows, n_cols, rp, ci, vals)
    return CsrMatrix(n_rows, n_cols, _frozen(rp), _frozen(ci), _frozen(vals))


def _trusted_csr(n_rows, n_cols, row_ptr, col_indices, values) -> CsrMatrix:
    """Wrap arrays produced by this package's own kernels without re-checking."""
    return CsrMatrix(
        int(n_rows),
        int(n_cols),
        _frozen(np.ascontiguousarray(row_ptr, dtype=np.int64)),
        _frozen(np.ascontiguousarray(col_indices, dtype=np.int64)),
        _frozen(np.ascontiguousarray(values, dtype=np.float64)),
    )


def canonicalize(
    n_rows: int, n_cols: int, triplets: Iterable[tuple[int, int, float]]
) -> CsrMatrix:
    """Build a canonical matrix from ``(row, col, value)`` triplets in any order.

    Duplicate cells are summed and cells whose sum is exactly 0.0 are dropped.
    """
    trip = list(triplets)
    rows = np.array([t[0] for t in trip], dtype=np.int64)
    cols = np.array([t[1] for t in trip], dtype=np.int64)
    vals = np.array([t[2] for t in trip], dtype=np.float64)
    return _canonicalize_arrays(int(n_rows), int(n_cols), rows, cols, vals)


def _canonicalize_arrays(n_rows, n_cols, rows, cols, vals) -> CsrMatrix:
    if n_rows < 0 or n_cols < 0:
        raise StructureError("matrix dimensions must be non-negative")
    if rows.size:
        if rows.min() < 0 or rows.max() >= n_rows:
            raise OutOfRangeError(f"row index outside [0, {n_rows})")
        if cols.min() < 0 or cols.max() >= n_cols:
            raise OutOfRangeError(f"column index outside [0, {n_cols})")
    # stable sort keeps duplicate summation in input order
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    if rows.size:
        new_cell = np.ones(rows.size, dtype=bool)
        new_cell[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(new_cell)
        if starts.size != rows.size:
            rows, cols, vals = rows[starts], cols[starts], np.add.reduceat(vals, starts)
        keep = vals != 0.0
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    row_ptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n_rows), out=row_ptr[1:])
    return _trusted_csr(n_rows, n_cols, row_ptr, cols, vals)


def to_dense(m: CsrMatrix) -> np.ndarray:
    """Row-major ``float64`` array of shape ``(n_rows, n_cols)``."""
    out = np.zeros(m.shape, dtype=np.float64)
    rows = np.repeat(np.arange(m.n_rows, dtype=np.int64), m.row_nnz())
    out[rows, m.col_indices] = m.values
    return out


def from_dense(a) -> CsrMatrix:
    """Store exactly the nonzero entries of a two-dimensional array."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise StructureError("dense input must be two-dimensional")
    n_rows, n_cols = a.shape
    rows, cols = np.nonzero(a)
    row_ptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n_rows), out=row_ptr[1:])
    return _trusted_csr(n_rows, n_cols, row_ptr, cols, a[rows, cols])


def random_csr(n_rows: int, n_cols: int, density: float, seed: int) -> CsrMatrix:
    """Random matrix whose cells are independently nonzero with probability
    ``density``; nonzero values are uniform on (0, 1].

    The stream comes from a PCG64 generator seeded with ``seed``, so equal
    arguments give bit-identical matrices on every platform.
    """
    if not 0.0 <= density <= 1.0:
        raise ArgumentError(f"density must lie in [0, 1], got {density}")
    if n_rows < 0 or n_cols < 0:
        raise ArgumentError("matrix dimensions must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    block = max(1, _RANDOM_BLOCK_CELLS // max(n_cols, 1))
    row_parts, col_parts, val_parts = [], [], []
    for r0 in range(0, n_rows, block):
        r1 = min(n_rows, r0 + block)
        mask = rng.random((r1 - r0, n_cols)) < density
        rows, cols = np.nonzero(mask)
        # 1 - U[0, 1) is uniform on (0, 1]
        vals = 1.0 - rng.random(rows.size)
        row_parts.append(rows + r0)
        col_parts.append(cols)
        val_parts.append(vals)
    rows = np.concatenate(row_parts) if row_parts else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(col_parts) if col_parts else np.zeros(0, dtype=np.int64)
    vals = np.concatenate(val_parts) if val_parts else np.zeros(0)
    row_ptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n_rows), out=row_ptr[1:])
    return _trusted_csr(n_rows, n_cols, row_ptr, cols, vals)


PathType = Union[str, "PathLike[str]"]


def write_matrix_market(m: CsrMatrix, path: Union[PathType, TextIO]) -> None:
    """Write ``m`` to a path or an open text stream, 1-based, shortest
    round-tripping float repr."""
    if hasattr(path, "write"):
        _write_mm(m, path)
        return
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        _write_mm(m, fh)


def _write_mm(m: CsrMatrix, fh: TextIO) -> None:
    rows = np.repeat(np.arange(m.n_rows, dtype=np.int64), m.row_nnz())
    fh.write(_MM_HEADER + "\n")
    fh.write(f"{m.n_rows} {m.n_cols} {m.nnz}\n")
    fh.writelines(
        f"{r + 1} {c + 1} {v!r}\n"
        for r, c, v in zip(rows.tolist(), m.col_indices.tolist(), m.values.tolist())
    )


def read_matrix_market(path: PathType) -> CsrMatrix:
    """Read a ``matrix coordinate real general`` file (1-based indices)."""
    with open(path, encoding="ascii", errors="replace") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file")
    _check_header(lines[0])
    body = (ln.strip() for ln in lines[1:])
    body = [ln for ln in body if ln and not ln.startswith("%")]
    if not body:
        raise ParseError("missing size line")
    size = body[0].split()
    if len(size) != 3:
        raise ParseError(f"malformed size line: {body[0]!r}")
    try:
        n_rows, n_cols, nnz = (int(tok) for tok in size)
    except ValueError:
        raise ParseError(f"malformed size line: {body[0]!r}") from None
    if min(n_rows, n_cols, nnz) < 0:
        raise ParseError("negative size in size line")
    entries = body[1:]
    if len(entries) != nnz:
        raise ParseError(f"size line declares {nnz} entries, found {len(entries)}")
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    for n, line in enumerate(entries):
        tok = line.split()
        if len(tok) != 3:
            raise ParseError(f"malformed entry line: {line!r}")
        try:
            r, c, v = int(tok[0]), int(tok[1]), float(tok[2])
        except ValueError:
            raise ParseError(f"malformed entry line: {line!r}") from None
        if not (1 <= r <= n_rows and 1 <= c <= n_cols):
            raise OutOfRangeError(f"entry ({r}, {c}) outside declared shape {n_rows}x{n_cols}")
        rows[n], cols[n], vals[n] = r - 1, c - 1, v
    return _canonicalize_arrays(n_rows, n_cols, rows, cols, vals)


def _check_header(line: str) -> None:
    tok = line.strip().split()
    if len(tok) != 5 or tok[0].lower() != "%%matrixmarket":
        raise ParseError(f"not a Matrix Market header: {line!r}")
    obj, fmt, field, symmetry = (t.lower() for t in tok[1:])
    if obj != "matrix" or fmt not in ("coordinate", "array"):
        raise ParseError(f"unrecognised header: {line!r}")
    if fmt != "coordinate":
        raise UnsupportedError("only coordinate format is supported")
    if field not in ("real", "integer", "complex", "pattern"):
        raise ParseError(f"unknown field type {field!r}")
    if field in ("complex", "pattern"):
        raise UnsupportedError(f"{field} matrices are not supported")
    if symmetry not in ("general", "symmetric", "skew-symmetric", "hermitian"):
        raise ParseError(f"unknown symmetry {symmetry!r}")
    if symmetry != "general":
        raise UnsupportedError(f"{symmetry} matrices are not supported")
