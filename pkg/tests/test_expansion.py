import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csrpoly.csr import from_dense, new_csr, random_csr, to_dense
from csrpoly.errors import DomainError
from csrpoly.expansion import (
    ExpansionSpec,
    ExpansionStats,
    expand,
    expand_dense,
    feature_names,
    format_feature,
)
from csrpoly.index_maps import ALL_KINDS, INTER2, INTER3, POLY2, POLY3, forward_map, row_output_nnz

AUGMENTATIONS = [(False, False), (True, False), (True, True)]
ALL_SPECS = [ExpansionSpec(k, lo, b) for k in ALL_KINDS for lo, b in AUGMENTATIONS]


def spec_id(spec):
    return f"{spec.kind}{'+lower' if spec.include_lower_degrees else ''}{'+bias' if spec.include_bias else ''}"


def brute_force(dense_rows, spec):
    """Enumerate every column tuple with itertools; the running position is the column."""
    D = len(dense_rows[0]) if dense_rows else 0
    out = []
    for row in dense_rows:
        feats = []
        for degree, kind in spec.blocks():
            if degree == 0:
                feats.append(1.0)
            elif degree == 1:
                feats.extend(row)
            else:
                gen = itertools.combinations if kind.strict else itertools.combinations_with_replacement
                for t in gen(range(D), degree):
                    v = row[t[0]] * row[t[1]]
                    if degree == 3:
                        v = v * row[t[2]]
                    feats.append(v)
        out.append(feats)
    return out


ROW = [[0.0, 2.0, 0.0, 3.0]]


def test_poly2_example():
    out = expand(from_dense(ROW), ExpansionSpec(POLY2))
    assert out.n_cols == 10
    assert out.col_indices.tolist() == [4, 6, 9]
    assert out.values.tolist() == [4.0, 6.0, 9.0]


def test_inter2_example():
    out = expand(from_dense(ROW), ExpansionSpec(INTER2))
    assert out.n_cols == 6
    assert out.col_indices.tolist() == [4]
    assert out.values.tolist() == [6.0]


def test_dense_poly2_example():
    assert expand_dense(np.array(ROW), ExpansionSpec(POLY2)).tolist() == [
        [0, 0, 0, 0, 4, 0, 6, 0, 0, 9]
    ]
    assert brute_force(ROW, ExpansionSpec(POLY2)) == [[0, 0, 0, 0, 4, 0, 6, 0, 0, 9]]


def test_dense_inter2_all_ones():
    assert expand_dense(np.ones((1, 4)), ExpansionSpec(INTER2)).tolist() == [[1.0] * 6]


@pytest.mark.parametrize("spec", ALL_SPECS, ids=spec_id)
def test_all_zero_input(spec):
    m = new_csr(3, 5, [0, 0, 0, 0], [], [])
    out = expand(m, spec)
    assert out.shape == (3, spec.output_dim(5))
    expected_per_row = spec.row_entries(0)
    assert out.row_nnz().tolist() == [expected_per_row] * 3
    if not spec.include_bias:
        assert out.nnz == 0


def test_k3_poly_random_against_dense():
    m = random_csr(3, 5, 0.6, seed=3)
    spec = ExpansionSpec(POLY3)
    assert expand(m, spec) == from_dense(expand_dense(to_dense(m), spec))


@pytest.mark.parametrize("spec", ALL_SPECS, ids=spec_id)
def test_matches_brute_force(spec):
    for seed in range(10):
        m = random_csr(4, 6, [0.2, 0.5, 1.0][seed % 3], seed)
        ref = from_dense(np.array(brute_force(to_dense(m).tolist(), spec)).reshape(4, -1))
        assert expand(m, spec) == ref
        assert np.array_equal(expand_dense(to_dense(m), spec), to_dense(ref))


@pytest.mark.parametrize("spec", ALL_SPECS, ids=spec_id)
def test_oracle_equivalence_50(spec):
    rng = np.random.default_rng(5)
    for _ in range(50):
        n, d = int(rng.integers(1, 9)), int(rng.integers(1, 13))
        m = random_csr(n, d, float(rng.uniform(0, 1)), int(rng.integers(2**62)))
        out = expand(m, spec)
        out.validate()
        assert out == from_dense(expand_dense(to_dense(m), spec))


@pytest.mark.parametrize("spec", ALL_SPECS, ids=spec_id)
def test_row_counts(spec):
    m = random_csr(30, 15, 0.3, 8)
    out = expand(m, spec)
    assert out.row_nnz().tolist() == [spec.row_entries(int(r)) for r in m.row_nnz()]


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_product_count(kind):
    m = random_csr(40, 20, 0.3, 1)
    stats = ExpansionStats()
    out = expand(m, ExpansionSpec(kind), stats=stats)
    expected = sum(row_output_nnz(int(r), kind) for r in m.row_nnz())
    assert stats.products[kind.degree] == expected == out.nnz
    assert stats.multiplications == (kind.degree - 1) * expected


def test_product_count_with_lower_blocks():
    m = random_csr(10, 8, 0.5, 2)
    stats = ExpansionStats()
    expand(m, ExpansionSpec(POLY3, True, True), stats=stats)
    r = m.row_nnz()
    assert stats.products[2] == sum(row_output_nnz(int(x), POLY2) for x in r)
    assert stats.products[3] == sum(row_output_nnz(int(x), POLY3) for x in r)
    assert stats.entries == m.n_rows + m.nnz + stats.products[2] + stats.products[3]


def test_stored_zeros_propagate():
    m = new_csr(1, 3, [0, 2], [0, 2], [0.0, 2.0])
    out = expand(m, ExpansionSpec(POLY2))
    assert out.col_indices.tolist() == [0, 2, 5]
    assert out.values.tolist() == [0.0, 0.0, 4.0]


def test_k3_product_order():
    # (a*b)*c and a*(b*c) differ for these values; the former is required
    a, b, c = 0.1, 0.7, 0.3
    assert (a * b) * c != a * (b * c)
    m = new_csr(1, 3, [0, 3], [0, 1, 2], [a, b, c])
    out = expand(m, ExpansionSpec(INTER3))
    assert out.values.tolist() == [(a * b) * c]


def test_parallel_fill_is_identical():
    m = random_csr(60, 40, 0.3, 4)
    for spec in ALL_SPECS:
        assert expand(m, spec, parallel=True) == expand(m, spec)


def test_deterministic_bytes():
    m = random_csr(20, 30, 0.2, 6)
    a, b = expand(m, ExpansionSpec(POLY3)), expand(m, ExpansionSpec(POLY3))
    assert a.values.tobytes() == b.values.tobytes()
    assert a.col_indices.tobytes() == b.col_indices.tobytes()


def test_large_dimension_columns_use_exact_arithmetic():
    # T3(D) is close to the int64 limit here; compiled columns must match Python ints
    D = 3_800_000
    cols = [0, 5, D - 3, D - 2, D - 1]
    m = new_csr(1, D, [0, len(cols)], cols, [1.0] * len(cols))
    for kind in (POLY3, INTER3, POLY2, INTER2):
        out = expand(m, ExpansionSpec(kind))
        gen = itertools.combinations if kind.strict else itertools.combinations_with_replacement
        expected = [forward_map(t, D, kind) for t in gen(cols, kind.degree)]
        assert out.col_indices.tolist() == expected


def test_output_overflow():
    m = new_csr(1, 4_000_000, [0, 1], [0], [1.0])
    with pytest.raises(OverflowError):
        expand(m, ExpansionSpec(POLY3))


def test_bias_requires_lower():
    with pytest.raises(DomainError):
        ExpansionSpec(POLY2, include_bias=True)


def test_augmented_layout():
    spec = ExpansionSpec(POLY3, True, True)
    assert spec.block_offsets(4) == {0: 0, 1: 1, 2: 5, 3: 15}
    assert spec.output_dim(4) == 35


def test_feature_names_examples():
    assert feature_names(4, ExpansionSpec(INTER2)) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert feature_names(1, ExpansionSpec(POLY2)) == [(0, 0)]
    assert feature_names(5, ExpansionSpec(INTER3)) == [
        (0, 1, 2), (0, 1, 3), (0, 1, 4), (0, 2, 3), (0, 2, 4),
        (0, 3, 4), (1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4),
    ]


@pytest.mark.parametrize("spec", ALL_SPECS, ids=spec_id)
def test_feature_names_track_products(spec):
    D = 5
    names = feature_names(D, spec)
    assert len(names) == spec.output_dim(D)
    x = np.array([[2.0, 3.0, 5.0, 7.0, 11.0]])
    dense = expand_dense(x, spec)[0]
    for q, t in enumerate(names):
        assert dense[q] == np.prod([x[0, j] for j in t])


def test_format_feature():
    assert format_feature(()) == "1"
    assert format_feature((3,)) == "x3"
    assert format_feature((0, 0, 2)) == "x0^2*x2"
    assert format_feature((1, 4), prefix="f") == "f1*f4"


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ALL_SPECS), st.integers(1, 6), st.integers(1, 9),
       st.floats(0, 1), st.integers(0, 2**63))
def test_oracle_property(spec, n, d, density, seed):
    m = random_csr(n, d, density, seed)
    out = expand(m, spec)
    out.validate()
    assert out == from_dense(expand_dense(to_dense(m), spec))
