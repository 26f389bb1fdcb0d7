import random

import pytest

from fourblock.errors import BoxTooLarge, SearchBudgetExceeded
from fourblock.instance import FourBlockInstance
from fourblock.oracle import (brute_force_solve, check_faithful, enumerate_solutions, find_split,
                              reachable_sums)

FIG = {(5, 10): 1, (0, 2): 2, (2, 2): 2}


def _inst(D, b, c=(1, 1), b0=0):
    return FourBlockInstance(s=0, t=2, d=1, m=1, n=1, A=((),), B_list=(((1, 0),),),
                             C_list=(((),),), D_list=(D,), b0=(b0,), b_list=(b,), c0=(),
                             c_list=(c,))


def test_enumerate_examples():
    assert enumerate_solutions(((1, -1),), (1,), 2) == [(1, 0), (2, 1)]
    assert enumerate_solutions(((1, 0), (0, 1)), (2, 3), 5) == [(2, 3)]
    assert enumerate_solutions(((1, 1),), (-1,), 5) == []


def test_enumerate_is_exact():
    rnd = random.Random(2)
    for _ in range(20):
        D = tuple(tuple(rnd.randint(-1, 1) for _ in range(3)) for _ in range(2))
        b = tuple(rnd.randint(-3, 3) for _ in range(2))
        sols = set(enumerate_solutions(D, b, 4))
        for x in ((a, b_, c) for a in range(5) for b_ in range(5) for c in range(5)):
            ok = all(sum(r * v for r, v in zip(row, x)) == bb for row, bb in zip(D, b))
            assert ok == (x in sols)


def test_brute_force_examples():
    assert brute_force_solve(_inst(((0, 0),), (1,)), 5).status == "INFEASIBLE"
    rep = brute_force_solve(_inst(((1, -1),), (0,)), 5)
    assert rep.status == "OPTIMAL" and rep.value == 0
    rep = brute_force_solve(_inst(((1, -1),), (1,), b0=3), 5)
    assert rep.value == 5 and rep.witness.x_bricks == ((3, 2),)
    with pytest.raises(BoxTooLarge):
        brute_force_solve(FourBlockInstance(s=0, t=12, d=0, m=0, n=1, A=(), B_list=((),), C_list=((),),
                                            D_list=((),), b0=(), b_list=((),), c0=(), c_list=((0,) * 12,)), 6)


def test_worked_example_is_faithful():
    rnd = random.Random(3)
    for _ in range(10):
        D = tuple(tuple(rnd.randint(-1, 1) for _ in range(3)) for _ in range(2))
        assert check_faithful(FIG, D, (9, 18), 25)


def test_vacuous_and_broken():
    assert check_faithful({(1,): 1}, ((2,),), (1,), 10)
    # the parts of an odd split of 2 along D = (1 -1) need not exist
    assert not check_faithful({(1,): 2}, ((2, 0),), (2,), 5)


def test_find_split():
    D = ((1, -1),)
    split = find_split({(1,): 1, (2,): 1}, D, (5, 2))
    assert split is not None
    assert sorted(p for p, _ in split) == [(1,), (2,)]
    assert tuple(map(sum, zip(*(y for _, y in split)))) == (5, 2)
    assert find_split({(1,): 3}, ((2,),), (1,)) is None
    with pytest.raises(SearchBudgetExceeded):
        find_split({(0,): 8}, ((1, -1),), (9, 9), budget=5)


def test_reachable_sums_monotone():
    D = ((1, -1, 0), (0, 1, -1))
    a = reachable_sums([(1, 0), (0, 1)], D, 6)
    # the two parts have minimal solutions (1,0,0) and (1,1,0)
    assert a[(2, 1, 0)] and a[(3, 2, 1)] and not a[(1, 0, 0)] and not a[(0, 0, 0)]
