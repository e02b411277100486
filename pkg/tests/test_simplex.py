import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from esskit.errors import (
    AllZeroWeights,
    IndexOutOfRange,
    InvalidSize,
    InvalidWeight,
    NormalizationError,
)
from esskit.simplex import (
    NORMALIZATION_TOL,
    WeightVector,
    normalize,
    read_weights_csv,
    replicate,
    sample_simplex,
    sort_ascending,
    uniform,
    vertex,
    write_weights_csv,
)

from .helpers import simplex_points

raw_weights = st.lists(
    st.floats(min_value=0.0, max_value=1e12, allow_nan=False), min_size=1, max_size=30
).filter(lambda xs: max(xs) > 0)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ([2, 2], [0.5, 0.5]),
        ([1, 0, 0], [1, 0, 0]),
        ([3, 1, 4, 2], [0.3, 0.1, 0.4, 0.2]),
    ],
)
def test_normalize_examples(raw, expected):
    assert normalize(raw).allclose(expected, atol=1e-15)


@pytest.mark.parametrize(
    "raw, exc",
    [
        ([0, 0, 0], AllZeroWeights),
        ([1, -1], InvalidWeight),
        ([1, math.nan], InvalidWeight),
        ([1, math.inf], InvalidWeight),
        ([], InvalidSize),
    ],
)
def test_normalize_rejects(raw, exc):
    with pytest.raises(exc):
        normalize(raw)


def test_normalize_huge_values_do_not_overflow():
    w = normalize([1e308, 1e308, 1e308])
    assert w.allclose([1 / 3] * 3)


@given(raw_weights)
def test_normalize_sums_to_one_and_is_idempotent(raw):
    w = normalize(raw)
    assert abs(w.entries.sum() - 1.0) <= NORMALIZATION_TOL
    assert normalize(w.entries).allclose(w.entries, atol=1e-15)


@given(raw_weights, st.floats(min_value=1e-6, max_value=1e6))
def test_normalize_scale_invariant(raw, c):
    assume(all(x == 0 or c * x >= 1e-300 for x in raw))  # no underflow on scaling
    a = normalize(raw).entries
    b = normalize([c * x for x in raw]).entries
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


def test_normalize_preserves_exact_zeros():
    w = normalize([1e-300, 0.0, 1.0])
    assert w.n_zeros == 1
    assert w.entries[0] > 0.0


def test_weight_vector_validates_sum():
    WeightVector([0.5, 0.5 + 0.5e-9])
    with pytest.raises(NormalizationError):
        WeightVector([0.5, 0.5 + 2e-9])


def test_weight_vector_is_read_only():
    w = WeightVector([0.25, 0.75])
    with pytest.raises(ValueError):
        w.entries[0] = 1.0


def test_large_vector_sum_uses_compensated_accumulation():
    n = 1_000_003
    w = WeightVector(np.full(n, 1.0 / n))
    assert w.n == n


@pytest.mark.parametrize("n", [1, 4, 5])
def test_uniform(n):
    w = uniform(n)
    assert w.n == n
    assert np.all(w.entries == 1.0 / n)


def test_uniform_zero():
    with pytest.raises(InvalidSize):
        uniform(0)


@pytest.mark.parametrize(
    "n, j, expected",
    [(5, 1, [1, 0, 0, 0, 0]), (3, 2, [0, 1, 0]), (1, 1, [1])],
)
def test_vertex(n, j, expected):
    assert vertex(n, j).allclose(expected, atol=0.0)


@pytest.mark.parametrize("j", [0, 4, -1])
def test_vertex_out_of_range(j):
    with pytest.raises(IndexOutOfRange):
        vertex(3, j)


def test_replicate_examples():
    v = [0, 1, 0]
    assert replicate(v, 2).allclose([0, 0.5, 0, 0, 0.5, 0], atol=0.0)
    assert replicate(v, 3).allclose([0, 1 / 3, 0, 0, 1 / 3, 0, 0, 1 / 3, 0], atol=0.0)
    w = WeightVector([0.2, 0.8])
    assert replicate(w, 1) == w
    with pytest.raises(InvalidSize):
        replicate(w, 0)


@given(simplex_points(), st.integers(1, 7))
def test_replicate_stays_on_simplex(w, m):
    r = replicate(w, m)
    assert r.n == m * w.size
    assert abs(r.entries.sum() - 1.0) <= NORMALIZATION_TOL


def test_sort_ascending_examples():
    assert sort_ascending([0.5, 0.2, 0.3]).allclose([0.2, 0.3, 0.5], atol=0.0)
    assert sort_ascending([1, 0, 0]).allclose([0, 0, 1], atol=0.0)
    assert sort_ascending(uniform(4)) == uniform(4)


@given(simplex_points())
def test_sort_ascending_is_sorted_permutation(w):
    s = sort_ascending(w).entries
    assert np.all(np.diff(s) >= 0)
    assert sorted(w.tolist()) == s.tolist()


def test_sample_simplex_zero_probes(rng):
    draws = [sample_simplex(rng, 6, 1.0) for _ in range(200)]
    for w in draws:
        assert abs(w.sum() - 1.0) < 1e-12
        assert 1 <= np.count_nonzero(w) <= 5


def test_weights_csv_round_trip(tmp_path):
    w = normalize([3.0, 1.0, 0.0, 2.5])
    path = tmp_path / "w.csv"
    write_weights_csv(path, w, comment="example")
    assert read_weights_csv(path) == w


def test_raw_weights_csv_is_normalized(tmp_path):
    path = tmp_path / "raw.csv"
    write_weights_csv(path, [2.0, 2.0], raw=True)
    assert read_weights_csv(path).allclose([0.5, 0.5])


@pytest.mark.parametrize(
    "text, exc",
    [
        ("", InvalidSize),
        ("w\n", InvalidSize),
        ("weights\n0.5\n0.5\n", InvalidWeight),
        ("w\nabc\n", InvalidWeight),
        ("w\n0.5\n0.6\n", NormalizationError),
    ],
)
def test_weights_csv_errors(tmp_path, text, exc):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(exc):
        read_weights_csv(path)
