import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fourblock import cones
from fourblock.errors import NotInCone, ParamsTooLarge
from fourblock.exactmath import columns, det, from_columns, identity, inverse, matvec, rank

FIG_U = [((1, 0), (-1, 1)), ((1, 0), (0, 1)), ((1, -1), (0, 1)),
         ((1, 0), (1, 1)), ((1, -1), (1, 1)), ((1, -1), (1, 0))]


def _colset(U):
    return frozenset(columns(U))


@pytest.fixture(scope="module")
def b21():
    return cones.enumerate_bases(2, 1)


def test_enumerate_small():
    assert cones.enumerate_bases(1, 1).bases == (((-1,),), ((1,),))
    with pytest.raises(ParamsTooLarge):
        cones.enumerate_bases(3, 2, cap=1000)


def test_enumerate_matches_brute_force(b21):
    brute = [M for M in itertools.product(itertools.product((-1, 0, 1), repeat=2), repeat=2)
             if M[0][0] * M[1][1] - M[0][1] * M[1][0] != 0]
    assert len(b21.bases) == len(brute) == 48
    assert set(b21.bases) == set(brute)
    assert all(M in b21.bases for M in FIG_U)


def test_generating_bases_worked_example(b21):
    U = cones.generating_bases((9, 18), b21)
    assert {_colset(M) for M in U} == {_colset(M) for M in FIG_U}
    assert cones.generating_bases((0, 0), b21) == b21.bases
    assert cones.generating_bases((1,), cones.enumerate_bases(1, 1)) == (((1,),),)


def test_intersection_generators_examples(b21):
    U = cones.generating_bases((9, 18), b21)
    assert set(cones.intersection_generators(U).generators) == {(0, 1), (1, 1)}
    assert set(cones.intersection_generators([identity(2)]).generators) == {(1, 0), (0, 1)}


def test_psi_phi():
    assert cones.compute_psi(cones.enumerate_bases(2, 1)) == 2
    assert cones.compute_psi(cones.enumerate_bases(1, 1)) == 1
    assert cones.compute_phi(1, 1) == 1
    assert cones.compute_phi(2, 1) == 1


def test_psi_phi_delta2_brute_force():
    mats = [M for M in itertools.product(itertools.product(range(-2, 3), repeat=2), repeat=2)
            if M[0][0] * M[1][1] - M[0][1] * M[1][0]]
    from math import lcm
    assert cones.compute_psi(cones.enumerate_bases(2, 2)) == lcm(*(abs(det(M)) for M in mats)) == 120
    # every facet normal of a 2x2 cone is orthogonal to one column, so the
    # primitive directions orthogonal to a normal are the primitive columns
    phi = max(max(abs(a) for a in col) for M in mats for col in columns(M))
    assert cones.compute_phi(2, 2) == phi == 2


def test_caratheodory_examples():
    V, mu = cones.caratheodory_select(((0, 1), (1, 1)), (9, 18))
    assert V == ((0, 1), (1, 1)) and mu == (9, 9)
    V, mu = cones.caratheodory_select(((1, 2),), (3, 6))
    assert V == ((1, 2),) and mu == (3,)
    V, _ = cones.caratheodory_select(((0, 1), (1, 1)), (0, 5))
    assert V == ((0, 1),)
    with pytest.raises(NotInCone):
        cones.caratheodory_select(((0, 1), (1, 1)), (1, 0))


def test_extend_to_basis():
    assert cones.extend_to_basis(((0, 1), (1, 1)), 2) == from_columns(((0, 1), (1, 1)), 2)
    assert cones.extend_to_basis(((0, 1),), 2) == ((0, 1), (1, 0))
    assert cones.extend_to_basis((), 2) == identity(2)


def _random_point(rnd, d):
    return tuple(Fraction(rnd.randint(-30, 30), rnd.randint(1, 4)) for _ in range(d))


@pytest.mark.parametrize("d,delta", [(1, 1), (2, 1), (2, 2)])
def test_generator_integrality_and_cone_equality(d, delta):
    """Psi g is integral in every basis of the intersection, and cone(P) is the intersection."""
    rnd = random.Random(d * 10 + delta)
    bases = cones.enumerate_bases(d, delta)
    psi = cones.compute_psi(bases)
    phi = cones.compute_phi(d, delta, bases)
    for _ in range(40 if delta == 1 else 10):
        w = tuple(rnd.randint(-9, 9) for _ in range(d))
        U = cones.generating_bases(w, bases)
        P = cones.intersection_generators(U).generators
        for g in P:
            assert max(abs(a) for a in g) <= phi
            for B in U:
                coords = matvec(inverse(B), g)
                assert all(c >= 0 and (psi * c).denominator == 1 for c in coords)
        for g, h in itertools.combinations(P, 2):
            assert rank((g, h)) == 2 or (d == 1 and g != h)
        V, mu = cones.caratheodory_select(P, w)
        assert tuple(sum(m * v[k] for m, v in zip(mu, V)) for k in range(d)) == w
        assert rank(from_columns(V, d)) == len(V) if V else True
        for _ in range(5):
            x = _random_point(rnd, d)
            in_all = all(cones.in_cone(B, x) for B in U)
            try:
                cones.caratheodory_select(P, x)
                in_p = True
            except NotInCone:
                in_p = False
            assert in_all == in_p


@given(st.tuples(st.integers(-20, 20), st.integers(-20, 20)))
def test_witness_in_its_intersection(w):
    bases = cones.enumerate_bases(2, 1)
    P = cones.intersection_generators(cones.generating_bases(w, bases)).generators
    V, mu = cones.caratheodory_select(P, w)
    assert all(m > 0 for m in mu)
