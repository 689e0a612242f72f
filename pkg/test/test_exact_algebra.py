import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_rank
from src.exact_algebra import (
    DimensionMismatchError,
    ExactMatrix,
    MixedFieldError,
    PRIME_FLOOR,
    Residue,
    bareiss_rank,
    draw_prime,
    format_rational,
    kernel_basis,
    modular_rank,
    modular_rank_numpy,
    modular_ranks,
    parse_rational,
    rank,
    rank_multimodular,
    to_rational,
)

small_ints = st.integers(min_value=-6, max_value=6)


@st.composite
def int_matrices(draw, max_rows=6, max_cols=6):
    rows = draw(st.integers(min_value=1, max_value=max_rows))
    cols = draw(st.integers(min_value=1, max_value=max_cols))
    return draw(st.lists(st.lists(small_ints, min_size=cols, max_size=cols), min_size=rows, max_size=rows))


def test_rank_of_identity_and_zeros():
    assert rank(ExactMatrix.identity(4)) == 4
    assert rank(ExactMatrix.zeros(3, 5)) == 0


def test_rank_with_fractions():
    M = ExactMatrix.from_rows([[Fraction(1, 2), Fraction(1, 3)], [3, 2]])
    assert rank(M) == 1
    M = ExactMatrix.from_rows([[Fraction(1, 2), 1], [1, Fraction(1, 2)]])
    assert rank(M) == 2


def test_rank_modular_detects_characteristic():
    # det = 5: singolare modulo 5, invertibile sui razionali
    rows = [[1, 2], [-1, 3]]
    assert rank(ExactMatrix.from_rows(rows)) == 2
    assert rank(ExactMatrix.from_rows(rows, modulus=5)) == 1
    assert modular_rank(rows, 2, 7) == 2


def test_residue_matrix_is_modular():
    M = ExactMatrix.from_rows([[Residue.of(3, 7), Residue.of(-1, 7)]])
    assert M.modulus == 7
    assert M.entries == (3, 6)


def test_mixed_fields_rejected():
    with pytest.raises(MixedFieldError):
        ExactMatrix.from_rows([[Residue.of(1, 7), 2]])
    with pytest.raises(MixedFieldError):
        ExactMatrix.from_rows([[Residue.of(1, 7), Residue.of(1, 11)]])


def test_ragged_rows_rejected():
    with pytest.raises(DimensionMismatchError):
        ExactMatrix.from_rows([[1, 2], [3]])


def test_floats_rejected():
    with pytest.raises(ValueError):
        to_rational(0.5)
    with pytest.raises(ValueError):
        to_rational(True)
    with pytest.raises(ValueError):
        parse_rational("0.5")


def test_rational_text_format():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational("4") == 4
    assert format_rational(Fraction(44, 16)) == "11/4"
    assert format_rational(3) == "3/1"


def test_kernel_basis_rational_is_primitive():
    M = ExactMatrix.from_rows([[1, 1, 1], [0, 2, 4]])
    basis = kernel_basis(M)
    assert basis == [(1, -2, 1)]
    assert M.mul_vector(basis[0]) == [0, 0]


def test_kernel_basis_modular():
    M = ExactMatrix.from_rows([[1, 2], [2, 4]], modulus=5)
    (v,) = kernel_basis(M)
    assert M.mul_vector(v) == [0, 0]


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_bareiss_matches_naive_elimination(rows):
    assert bareiss_rank(rows, len(rows[0])) == naive_rank(rows)


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rank_nullity(rows):
    M = ExactMatrix.from_rows(rows)
    basis = kernel_basis(M)
    assert rank(M) + len(basis) == M.cols
    for v in basis:
        assert all(x == 0 for x in M.mul_vector(v))


@settings(max_examples=40, deadline=None)
@given(int_matrices())
def test_modular_rank_never_exceeds_rational(rows):
    ncols = len(rows[0])
    assert modular_rank(rows, ncols, 3) <= naive_rank(rows)


@settings(max_examples=30, deadline=None)
@given(int_matrices())
def test_numpy_kernel_matches_python_kernel(rows):
    p = 2147483647
    ncols = len(rows[0])
    assert modular_rank_numpy(rows, ncols, p) == modular_rank(rows, ncols, p)


def test_numpy_kernel_rejects_large_primes():
    with pytest.raises(ValueError):
        modular_rank_numpy([[1]], 1, 2 ** 61 - 1)


def test_draw_prime_range_and_determinism():
    p = draw_prime(random.Random(5))
    assert PRIME_FLOOR < p < 2 ** 62
    assert p == draw_prime(random.Random(5))
    small = draw_prime(random.Random(5), small=True)
    assert 2 ** 30 < small < 2 ** 31


def test_multimodular_equals_rational_rank():
    rng = random.Random(11)
    rows = [[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(7)] for _ in range(5)]
    rows.append([a + b for a, b in zip(rows[0], rows[1])])
    M = ExactMatrix.from_rows(rows)
    assert rank_multimodular(M, num_primes=2, seed=3) == rank(M) == naive_rank(rows)


def test_modular_ranks_stop_at_full():
    results = modular_ranks([[1, 0], [0, 1]], 2, [1, 1], num_primes=3, seed=1, stop_at_full=True)
    assert len(results) == 1
    assert results[0][1] == 2


def test_rank_multimodular_rejects_modular_input():
    with pytest.raises(MixedFieldError):
        rank_multimodular(ExactMatrix.identity(2, modulus=7), 2)


def _random_rows(rng, nrows, ncols, bound, dependent=0):
    """Righe casuali; le ultime `dependent` sono combinazioni intere delle altre."""
    rows = [[Fraction(rng.randint(-bound, bound), rng.randint(1, 9)) for _ in range(ncols)]
            for _ in range(nrows - dependent)]
    for _ in range(dependent):
        a, b = rng.sample(range(len(rows)), 2) if len(rows) > 1 else (0, 0)
        ka, kb = rng.randint(-3, 3), rng.randint(-3, 3)
        rows.append([ka * x + kb * y for x, y in zip(rows[a], rows[b])])
    rng.shuffle(rows)
    return rows


big_ints = st.integers(min_value=-10 ** 6, max_value=10 ** 6)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7).flatmap(
    lambda c: st.lists(st.lists(big_ints, min_size=c, max_size=c), min_size=1, max_size=7)))
def test_rank_equals_rank_of_transpose(rows):
    M = ExactMatrix.from_rows(rows)
    assert rank(M) == rank(M.transpose())


@pytest.mark.parametrize("seed", range(20))
def test_rank_eight_by_eight_matches_naive(seed):
    rng = random.Random(seed)
    rows = _random_rows(rng, 8, 8, 50, dependent=seed % 4)
    assert rank(ExactMatrix.from_rows(rows)) == naive_rank(rows)


@pytest.mark.parametrize("seed", range(30))
def test_multimodular_twelve_by_twelve(seed):
    rng = random.Random(1000 + seed)
    M = ExactMatrix.from_rows(_random_rows(rng, 12, 12, 10 ** 6, dependent=seed % 5))
    assert rank_multimodular(M, num_primes=2, seed=seed) == rank(M)


def test_multimodular_equals_rank_on_randomized_suite():
    rng = random.Random(2024)
    for _ in range(100):
        nrows, ncols = rng.randint(1, 9), rng.randint(1, 9)
        rows = _random_rows(rng, nrows, ncols, 10 ** 6, dependent=rng.randint(0, nrows - 1))
        M = ExactMatrix.from_rows(rows)
        assert rank_multimodular(M, num_primes=2, seed=rng.randint(0, 10 ** 6)) == rank(M)


@pytest.mark.parametrize("seed", range(10))
def test_kernel_six_by_ten(seed):
    rng = random.Random(500 + seed)
    M = ExactMatrix.from_rows(_random_rows(rng, 6, 10, 100, dependent=seed % 3))
    basis = kernel_basis(M)
    assert len(basis) == 10 - rank(M)
    for v in basis:
        assert all(x == 0 for x in M.mul_vector(v))


def test_multimodular_trivial_cases():
    assert rank_multimodular(ExactMatrix.identity(5), num_primes=1) == 5
    assert rank_multimodular(ExactMatrix.zeros(4, 7), num_primes=3) == 0
