import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fourblock.errors import SingularMatrix, ZeroVector
from fourblock.exactmath import (adjugate, det, format_rational, identity, inverse, lcm_all,
                                 matmul, normalize, parse_rational, primitive, rank, solve_unique)


def test_det_examples():
    assert det(((0, 2), (2, 2))) == -4
    assert det(identity(3)) == 1
    assert det(((1, 2), (2, 4))) == 0


def test_inverse_examples():
    assert inverse(((0, 2), (2, 2))) == ((Fraction(-1, 2), Fraction(1, 2)), (Fraction(1, 2), 0))
    assert inverse(identity(3)) == identity(3)
    with pytest.raises(SingularMatrix):
        inverse(((1, 1), (1, 1)))


def test_primitive_examples():
    assert primitive((2, -4)) == (1, -2)
    assert primitive((0, 3)) == (0, 1)
    assert primitive((5, 7)) == (5, 7)
    with pytest.raises(ZeroVector):
        primitive((0, 0))


def test_lcm_examples():
    assert lcm_all([1, 2]) == 2
    assert lcm_all([]) == 1
    assert lcm_all([2, 3, 4]) == 12


def test_rational_strings():
    assert format_rational(Fraction(6, -4)) == "-3/2"
    assert format_rational(7) == "7"
    assert parse_rational("-3/2") == Fraction(-3, 2)
    assert normalize(Fraction(4, 2)) == 2 and type(normalize(Fraction(4, 2))) is int


def _nonsingular(rnd, d):
    while True:
        A = tuple(tuple(rnd.randint(-9, 9) for _ in range(d)) for _ in range(d))
        if det(A) != 0:
            return A


def test_inverse_roundtrip_500():
    rnd = random.Random(3)
    for _ in range(500):
        A = _nonsingular(rnd, rnd.randint(1, 4))
        assert matmul(A, inverse(A)) == identity(len(A))


small = st.integers(-9, 9)


@given(st.integers(1, 3).flatmap(lambda d: st.tuples(
    st.lists(st.lists(small, min_size=d, max_size=d), min_size=d, max_size=d),
    st.lists(st.lists(small, min_size=d, max_size=d), min_size=d, max_size=d))))
def test_det_multiplicative(pair):
    A, B = pair
    assert det(matmul(A, B)) == det(A) * det(B)


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_adjugate_identity(A):
    d = det(A)
    prod = matmul(A, adjugate(A))
    assert prod == tuple(tuple(d if i == j else 0 for j in range(3)) for i in range(3))


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(small, min_size=3, max_size=3))
def test_results_are_exact(A, b):
    if det(A) == 0:
        assert rank(A) < 3
        return
    x = solve_unique(A, b)
    assert all(isinstance(v, (int, Fraction)) for v in x)
    assert all(sum(a * xv for a, xv in zip(row, x)) == bv for row, bv in zip(A, b))
