import math

import pytest

from csrpoly.benchmark import (
    CSV_HEADER,
    Algorithm,
    BenchConfig,
    BenchRecord,
    Vary,
    derive_seed,
    fit_loglog_slope,
    loglog_slope,
    mean_times,
    read_csv,
    run_bench,
    select,
    write_csv,
)
from csrpoly.csr import random_csr
from csrpoly.errors import ArgumentError
from csrpoly.index_maps import INTER3, POLY2, POLY3, Mode


def test_record_count():
    cfg = BenchConfig(Vary.DENSITY, [0.05, 0.1, 0.2, 0.4], fixed_n_rows=10,
                      fixed_n_cols=30, repetitions=20)
    records = run_bench(cfg)
    assert len(records) == 4 * 20 * 2
    assert all(r.wall_seconds >= 0 for r in records)


def test_record_order():
    cfg = BenchConfig(Vary.ROWS, [2, 4], fixed_n_cols=6, kinds=(POLY2, INTER3),
                      repetitions=2)
    records = run_bench(cfg)
    keys = [(r.n_rows, r.rep, str(r.kind), r.algorithm.value) for r in records]
    assert keys == [
        (n, rep, k, a)
        for n in (2, 4) for rep in (0, 1) for k in ("poly2", "inter3") for a in ("sparse", "dense")
    ]


def test_zero_density_has_no_products():
    cfg = BenchConfig(Vary.DENSITY, [0.0, 0.5], fixed_n_rows=5, fixed_n_cols=8,
                      algorithms=[Algorithm.SPARSE], repetitions=3)
    for r in run_bench(cfg):
        if r.density == 0.0:
            assert r.product_count == 0 and r.nnz_out == 0


def test_sparse_counts_match_generated_matrices():
    cfg = BenchConfig(Vary.DIMENSION, [10, 20, 40], fixed_n_rows=15, fixed_density=0.3,
                      kinds=(POLY2, POLY3), repetitions=3, seed=17)
    records = run_bench(cfg)
    for r in records:
        p = cfg.values.index(r.n_cols)
        m = random_csr(r.n_rows, r.n_cols, r.density, derive_seed(17, p, r.rep))
        assert r.nnz_in == m.nnz
        if r.algorithm is Algorithm.SPARSE:
            expected = sum(math.comb(int(k) + r.degree - 1, r.degree) for k in m.row_nnz())
            assert r.product_count == expected == r.nnz_out
        else:
            # dense multiplies over every column tuple and finds the same nonzeros
            assert r.product_count == r.n_rows * math.comb(r.n_cols + r.degree - 1, r.degree)
            sparse = [s for s in records if s.algorithm is Algorithm.SPARSE
                      and s.n_cols == r.n_cols and s.rep == r.rep and s.kind == r.kind]
            assert r.nnz_out == sparse[0].nnz_out


def test_runs_are_reproducible():
    cfg = BenchConfig(Vary.DENSITY, [0.1, 0.3], fixed_n_rows=8, fixed_n_cols=12, repetitions=4)
    a, b = run_bench(cfg), run_bench(cfg)
    strip = lambda rs: [(r.nnz_in, r.nnz_out, r.product_count) for r in rs]
    assert strip(a) == strip(b)


def test_memory_cap_skips_dense_only():
    cfg = BenchConfig(Vary.DIMENSION, [10, 200], fixed_n_rows=4, fixed_density=0.05,
                      kinds=(POLY3,), repetitions=2, memory_cap_bytes=1_000_000)
    records = run_bench(cfg)
    dense_big = [r for r in records if r.algorithm is Algorithm.DENSE and r.n_cols == 200]
    assert dense_big and all(r.skipped for r in dense_big)
    assert all(not r.skipped for r in records if r.algorithm is Algorithm.SPARSE)
    assert all(not r.skipped for r in records if r.n_cols == 10)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(values=[]),
        dict(values=[0.2, 0.1]),
        dict(values=[0.1, 0.1]),
        dict(values=[0.1], repetitions=0),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ArgumentError):
        BenchConfig(Vary.DENSITY, **kwargs)


def test_slope_synthetic():
    xs = [1.0, 2.0, 4.0, 8.0, 16.0]
    assert loglog_slope(xs, [3 * x**2 for x in xs]) == pytest.approx(2.0, abs=1e-9)
    assert loglog_slope(xs, [0.7] * 5) == pytest.approx(0.0, abs=1e-12)
    assert loglog_slope([0.04, 0.08, 0.16], [x**3 for x in (0.04, 0.08, 0.16)]) == pytest.approx(3.0, abs=1e-9)


def test_slope_errors():
    with pytest.raises(ArgumentError):
        loglog_slope([1, 2], [1, 2])
    with pytest.raises(ArgumentError):
        loglog_slope([0, 1, 2], [1, 2, 3])
    with pytest.raises(ArgumentError):
        loglog_slope([1, 2, 3], [1, -2, 3])


def _rec(n_cols, rep, secs, algo=Algorithm.SPARSE):
    return BenchRecord(algo, 2, Mode.POLYNOMIAL, 10, n_cols, 0.1, rep, secs, 5, 7, 7)


def test_fit_uses_means():
    recs = [_rec(d, rep, d**2 * f) for d in (10, 20, 40) for rep, f in enumerate((0.5, 1.5))]
    assert mean_times(recs, Vary.DIMENSION) == {10: 100.0, 20: 400.0, 40: 1600.0}
    assert fit_loglog_slope(recs, Vary.DIMENSION) == pytest.approx(2.0, abs=1e-9)
    assert select(recs, Algorithm.DENSE, POLY2) == []


def test_csv_round_trip(tmp_path):
    recs = [_rec(10, 0, 0.125), _rec(20, 1, 1e-7),
            BenchRecord(Algorithm.DENSE, 3, Mode.INTERACTION, 5, 900, 0.2, 0, None, 3, None, None)]
    p = tmp_path / "b.csv"
    write_csv(recs, p)
    lines = p.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[3] == "dense,3,inter,5,900,0.2,0,,3,,"
    assert read_csv(p) == recs


def test_csv_empty(tmp_path):
    p = tmp_path / "e.csv"
    write_csv([], p)
    assert p.read_text() == ",".join(CSV_HEADER) + "\n"
    assert read_csv(p) == []


def test_derived_seeds_differ():
    seeds = {derive_seed(0, p, r) for p in range(5) for r in range(20)}
    assert len(seeds) == 100
