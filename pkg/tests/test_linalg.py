import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from koszulkit.linalg import Field, LinalgError, Matrix, QQ

from oracle_linalg import cofactor_det, check_kernel, oracle_rank

F2 = Field(2)
F5 = Field(5)


def rand_matrix(field, rows, cols, rng, span=6):
    if field.char == 0:
        entries = [[Fraction(rng.randint(-span, span), rng.randint(1, 4)) for _ in range(cols)]
                   for _ in range(rows)]
    else:
        entries = [[rng.randrange(field.char) for _ in range(cols)] for _ in range(rows)]
    return Matrix.from_rows(field, entries)


# ---------------------------------------------------------------- scalars

def test_characteristic_must_be_prime_or_zero():
    with pytest.raises(LinalgError):
        Field(4)


@given(st.fractions(max_denominator=50), st.fractions(max_denominator=50))
def test_rational_field_ops_match_fraction_arithmetic(a, b):
    assert QQ.add(QQ.of(a), QQ.of(b)) == a + b
    assert QQ.mul(QQ.of(a), QQ.of(b)) == a * b
    if b != 0:
        assert QQ.div(QQ.of(a), QQ.of(b)) == a / b


@given(st.integers(-40, 40), st.integers(-40, 40))
def test_prime_field_ops_are_canonical_residues(a, b):
    x, y = F5.of(a), F5.of(b)
    assert 0 <= x < 5 and 0 <= y < 5
    assert F5.add(x, y) == (a + b) % 5
    assert F5.mul(x, y) == (a * b) % 5
    if y:
        assert F5.mul(F5.inv(y), y) == 1


@given(st.fractions(max_denominator=30))
def test_scalar_string_round_trip_rational(a):
    s = QQ.format(QQ.of(a))
    assert QQ.parse(s) == a
    if a.denominator == 1:
        assert "/" not in s
    else:
        num, den = s.split("/")
        assert int(den) > 0
        from math import gcd
        assert gcd(int(num), int(den)) == 1


def test_scalar_string_round_trip_prime_field():
    for v in range(5):
        assert F5.parse(F5.format(v)) == v
    assert F5.parse("7/2") == F5.of(Fraction(7, 2))


# ---------------------------------------------------------------- rref

def test_rref_identity_is_fixed():
    m = Matrix.identity(QQ, 3)
    r, pivots, rank = m.rref()
    assert r == m and pivots == (0, 1, 2) and rank == 3


def test_rref_proportional_rows():
    m = Matrix.from_rows(QQ, [[1, 2], [2, 4]])
    r, pivots, rank = m.rref()
    assert rank == 1
    assert r.data == [[Fraction(1), Fraction(2)], [Fraction(0), Fraction(0)]]


def test_rref_f2_rank_matches_determinant_oracle():
    m = Matrix.from_rows(F2, [[1, 1], [1, 2]])
    # over F_2 the second row is [1, 0]; det = 1 by cofactor expansion
    det = cofactor_det(m.data, F2)
    assert det == 1
    assert m.rank() == 2


def test_rref_is_idempotent_randomized():
    rng = random.Random(11)
    for field in (QQ, F5):
        for _ in range(20):
            m = rand_matrix(field, rng.randint(0, 5), rng.randint(0, 5), rng)
            r, _, _ = m.rref()
            r2, _, _ = r.rref()
            assert r == r2


def test_rank_equals_transpose_rank_randomized():
    rng = random.Random(7)
    for field in (QQ, F2, F5):
        for _ in range(25):
            m = rand_matrix(field, rng.randint(1, 6), rng.randint(1, 6), rng)
            assert m.rank() == m.transpose().rank()
            assert m.rank() == oracle_rank(m.data, field)


# ---------------------------------------------------------------- kernel

def test_kernel_of_zero_matrix():
    k = Matrix.zeros(QQ, 2, 2).kernel_basis()
    assert k.cols == 2 and k.rank() == 2


def test_kernel_of_single_relation():
    k = Matrix.from_rows(QQ, [[1, 1]]).kernel_basis()
    assert k.cols == 1
    v = k.col(0)
    assert v[0] == -v[1] != 0


def test_kernel_random_5x7_against_dual_oracle():
    rng = random.Random(5)
    m = rand_matrix(QQ, 5, 7, rng)
    k = m.kernel_basis()
    # independent oracle: re-derive the rank with a second elimination
    # routine, and check M @ k == 0 column by column
    r_oracle = oracle_rank(m.data, QQ)
    assert k.cols == 7 - r_oracle
    assert check_kernel(m.data, [k.col(j) for j in range(k.cols)], QQ)
    assert k.rank() == k.cols


def test_rank_nullity_every_instance():
    rng = random.Random(13)
    for field in (QQ, F5):
        for _ in range(30):
            m = rand_matrix(field, rng.randint(0, 6), rng.randint(0, 6), rng)
            assert m.cols == m.rank() + m.kernel_basis().cols


# ---------------------------------------------------------------- solve

def test_solve_identity_returns_rhs():
    a = Matrix.identity(QQ, 3)
    assert a.solve([5, -2, Fraction(1, 3)]) == [5, -2, Fraction(1, 3)]


def test_solve_underdetermined_consistent():
    a = Matrix.from_rows(QQ, [[1, 1]])
    x = a.solve([3])
    assert x is not None and x[0] + x[1] == 3


def test_solve_inconsistent_returns_none():
    a = Matrix.from_rows(QQ, [[1], [1]])
    assert a.solve([0, 1]) is None


def test_solvability_iff_augmented_rank_matches():
    rng = random.Random(3)
    for field in (QQ, F5):
        for _ in range(40):
            a = rand_matrix(field, rng.randint(1, 5), rng.randint(1, 5), rng)
            b = [field.of(rng.randint(-4, 4)) for _ in range(a.rows)]
            aug = a.hstack(Matrix.column(field, b))
            x = a.solve(b)
            if aug.rank() == a.rank():
                assert x is not None
                res = a.mul(Matrix.column(field, x))
                assert res.col(0) == b
            else:
                assert x is None
