"""Scaling studies of sparse vs dense expansion.

One :class:`BenchConfig` varies a single parameter (density, dimension or row
count) while holding the other two fixed. Every grid point and repetition
gets a fresh random matrix; each requested algorithm and kind is timed on it
and logged as one :class:`BenchRecord`. Dense inputs are densified before the
clock starts.
"""
from __future__ import annotations

import csv
import enum
import logging
import time
from dataclasses import dataclass, fields
from os import PathLike
from typing import Iterable, Sequence, Union

import numpy as np

from .csr import random_csr, to_dense
from .errors import ArgumentError
from .expansion import (
    ExpansionSpec,
    ExpansionStats,
    dense_output_bytes,
    expand,
    expand_dense,
)
from .index_maps import POLY2, MappingKind, Mode, expanded_dim

log = logging.getLogger(__name__)

DEFAULT_MEMORY_CAP = 2 * 1024**3

CSV_HEADER = [
    "algorithm", "degree", "mode", "n_rows", "n_cols", "density",
    "rep", "wall_seconds", "nnz_in", "nnz_out", "product_count",
]


class Vary(enum.Enum):
    DENSITY = "density"
    DIMENSION = "dim"
    ROWS = "rows"


class Algorithm(enum.Enum):
    SPARSE = "sparse"
    DENSE = "dense"


@dataclass(frozen=True)
class BenchConfig:
    vary: Vary
    values: Sequence[float]
    fixed_n_rows: int = 100
    fixed_n_cols: int = 500
    fixed_density: float = 0.1
    kinds: Sequence[MappingKind] = (POLY2,)
    algorithms: Sequence[Algorithm] = (Algorithm.SPARSE, Algorithm.DENSE)
    repetitions: int = 20
    seed: int = 0
    warmup: int = 0
    memory_cap_bytes: int = DEFAULT_MEMORY_CAP

    def __post_init__(self):
        vals = list(self.values)
        if not vals:
            raise ArgumentError("values must be non-empty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ArgumentError("values must be strictly increasing")
        if self.repetitions < 1:
            raise ArgumentError("repetitions must be at least 1")
        if self.warmup < 0:
            raise ArgumentError("warmup must be non-negative")
        object.__setattr__(self, "values", tuple(vals))
        object.__setattr__(self, "kinds", tuple(self.kinds))
        object.__setattr__(self, "algorithms", tuple(Algorithm(a) for a in self.algorithms))

    def point(self, value) -> tuple[int, int, float]:
        """``(n_rows, n_cols, density)`` at one grid value."""
        n, d, dens = self.fixed_n_rows, self.fixed_n_cols, self.fixed_density
        if self.vary is Vary.DENSITY:
            dens = float(value)
        elif self.vary is Vary.DIMENSION:
            d = int(value)
        else:
            n = int(value)
        return n, d, dens


@dataclass
class BenchRecord:
    """One timed expansion.

    ``wall_seconds`` is ``None`` for a point skipped under the memory cap;
    the counts are then ``None`` as well.
    """

    algorithm: Algorithm
    degree: int
    mode: Mode
    n_rows: int
    n_cols: int
    density: float
    rep: int
    wall_seconds: float | None
    nnz_in: int
    nnz_out: int | None
    product_count: int | None

    @property
    def kind(self) -> MappingKind:
        return MappingKind(self.degree, self.mode)

    @property
    def skipped(self) -> bool:
        return self.wall_seconds is None

    def x(self, vary: Vary) -> float:
        return {Vary.DENSITY: self.density, Vary.DIMENSION: self.n_cols,
                Vary.ROWS: self.n_rows}[vary]


def derive_seed(seed: int, point_index: int, rep: int) -> int:
    """Independent 64-bit seed for one (grid point, repetition)."""
    ss = np.random.SeedSequence([seed, point_index, rep])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _time_sparse(m, spec):
    stats = ExpansionStats()
    t0 = time.perf_counter()
    out = expand(m, spec, stats=stats)
    elapsed = time.perf_counter() - t0
    return elapsed, out.nnz, stats.products[spec.degree]


def _time_dense(a, spec):
    t0 = time.perf_counter()
    out = expand_dense(a, spec)
    elapsed = time.perf_counter() - t0
    # every cell of the expanded block is a product, zero or not
    return elapsed, int(np.count_nonzero(out)), a.shape[0] * expanded_dim(a.shape[1], spec.kind)


def prepare_kernels() -> None:
    """Trigger JIT compilation so no timed call pays for it."""
    m = random_csr(3, 4, 0.5, 0)
    for degree in (2, 3):
        for mode in Mode:
            spec = ExpansionSpec(MappingKind(degree, mode))
            expand(m, spec, stats=ExpansionStats())
            expand_dense(to_dense(m), spec)


def run_bench(config: BenchConfig) -> list[BenchRecord]:
    """Run the full grid; records come out in grid, rep, kind, algorithm order."""
    prepare_kernels()
    records: list[BenchRecord] = []
    for p, value in enumerate(config.values):
        n_rows, n_cols, density = config.point(value)
        specs = [ExpansionSpec(k) for k in config.kinds]
        dense_ok = {}
        for spec in specs:
            need = dense_output_bytes(n_rows, n_cols, spec) + 8 * n_rows * n_cols
            dense_ok[spec.kind] = need <= config.memory_cap_bytes
            if Algorithm.DENSE in config.algorithms and not dense_ok[spec.kind]:
                log.warning("skipping dense %s at %dx%d: needs %d bytes (cap %d)",
                            spec.kind, n_rows, n_cols, need, config.memory_cap_bytes)
        for rep in range(config.repetitions):
            m = random_csr(n_rows, n_cols, density, derive_seed(config.seed, p, rep))
            dense = None
            if Algorithm.DENSE in config.algorithms and any(dense_ok.values()):
                dense = to_dense(m)
            for spec in specs:
                for algo in config.algorithms:
                    rec = BenchRecord(algo, spec.degree, spec.kind.mode, n_rows, n_cols,
                                      density, rep, None, m.nnz, None, None)
                    if algo is Algorithm.SPARSE:
                        for _ in range(config.warmup):
                            expand(m, spec)
                        rec.wall_seconds, rec.nnz_out, rec.product_count = _time_sparse(m, spec)
                    elif dense_ok[spec.kind]:
                        for _ in range(config.warmup):
                            expand_dense(dense, spec)
                        rec.wall_seconds, rec.nnz_out, rec.product_count = _time_dense(dense, spec)
                    records.append(rec)
            log.debug("point %s rep %d done", value, rep)
    return records


def mean_times(records: Iterable[BenchRecord], vary: Vary) -> dict[float, float]:
    """Mean wall time per grid value, ignoring skipped records."""
    groups: dict[float, list[float]] = {}
    for r in records:
        if not r.skipped:
            groups.setdefault(r.x(vary), []).append(r.wall_seconds)
    return {x: float(np.mean(ts)) for x, ts in sorted(groups.items())}


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size < 3 or xs.size != ys.size:
        raise ArgumentError("need at least three (x, y) pairs")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ArgumentError("log-log fit needs strictly positive values")
    lx, ly = np.log(xs), np.log(ys)
    lx_c = lx - lx.mean()
    return float(np.dot(lx_c, ly - ly.mean()) / np.dot(lx_c, lx_c))


def fit_loglog_slope(records: Iterable[BenchRecord], vary: Vary) -> float:
    """Slope of mean runtime against the varied parameter.

    ``records`` should already be filtered to one algorithm and kind.
    """
    means = mean_times(records, vary)
    return loglog_slope(list(means), list(means.values()))


def select(records: Iterable[BenchRecord], algorithm: Algorithm,
           kind: MappingKind) -> list[BenchRecord]:
    return [r for r in records if r.algorithm is algorithm and r.kind == kind]


PathType = Union[str, "PathLike[str]"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(records: Iterable[BenchRecord], path: PathType) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([_fmt(getattr(r, f.name)) for f in fields(BenchRecord)])


def read_csv(path: PathType) -> list[BenchRecord]:
    def opt(conv, s):
        return None if s == "" else conv(s)

    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ArgumentError(f"unexpected CSV header {header}")
        for row in reader:
            out.append(BenchRecord(
                Algorithm(row[0]), int(row[1]), Mode(row[2]), int(row[3]), int(row[4]),
                float(row[5]), int(row[6]), opt(float, row[7]), int(row[8]),
                opt(int, row[9]), opt(int, row[10]),
            ))
    return out
