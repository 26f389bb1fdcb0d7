import random
from fractions import Fraction

import pytest

from fourblock.arrangement import face_of
from fourblock.decomposition import as_multiset, build_scheme, evaluate
from fourblock.exactmath import dot, matvec, vsub
from fourblock.graver import decompose_solution
from fourblock.instance import FourBlockInstance, GenParams, check_solution, random_instance
from fourblock.milp import INTEGER, OPTIMAL, solve_milp
from fourblock.oracle import brute_force_solve, find_split
from fourblock.solver import (Guess, SolveOptions, _Tables, build_config_ilp, guesses_from_faces,
                              lift_hyperplanes, prepare_bricks, reconstruct, solve, x0_box)


def _agree(inst, box=6, **kw):
    got = solve(inst, SolveOptions(**kw))
    ref = brute_force_solve(inst, box)
    assert (got.status, got.objective) == (ref.status, ref.value)
    if got.solution is not None:
        assert check_solution(inst, got.solution)[0]
    return got


def test_nfold_instance():
    inst = FourBlockInstance(
        s=0, t=2, d=1, m=1, n=3, A=((),), B_list=(((1, 0),),) * 3, C_list=(((),),) * 3,
        D_list=(((1, -1),),) * 3, b0=(4,), b_list=((1,), (0,), (2,)), c0=(),
        c_list=((1, 2), (3, 1), (1, 1)))
    assert _agree(inst).status == OPTIMAL


def test_global_variable_family():
    # brick i: x0 - x_i1 + x_i2 ... in the C_i = -e_j, D_i = (1 -1) shape
    inst = FourBlockInstance(
        s=1, t=2, d=1, m=1, n=3, A=((1,),), B_list=(((1, 0),),) * 3, C_list=(((-1,),),) * 3,
        D_list=(((1, -1),),) * 3, b0=(5,), b_list=((0,), (-1,), (1,)), c0=(2,),
        c_list=((1, 1), (2, 1), (1, 3)))
    assert _agree(inst).status == OPTIMAL


def test_contradictory_brick():
    inst = FourBlockInstance(
        s=1, t=2, d=1, m=1, n=2, A=((1,),), B_list=(((1, 1),),) * 2, C_list=(((0,),),) * 2,
        D_list=(((1, -1),), ((0, 0),)), b0=(3,), b_list=((0,), (2,)), c0=(1,), c_list=((1, 1),) * 2)
    assert solve(inst).status == "INFEASIBLE"


def test_unbounded_instance():
    inst = FourBlockInstance(
        s=1, t=2, d=1, m=1, n=1, A=((1,),), B_list=(((1, -1),),), C_list=(((0,),),),
        D_list=(((1, -1),),), b0=(2,), b_list=((0,),), c0=(1,), c_list=((-1, -1),))
    assert solve(inst).status == "UNBOUNDED"


def test_zero_instance_reconstructs_zero():
    inst = FourBlockInstance(
        s=1, t=2, d=1, m=1, n=2, A=((1,),), B_list=(((1, 0),),) * 2, C_list=(((1,),),) * 2,
        D_list=(((1, -1),),) * 2, b0=(0,), b_list=((0,), (0,)), c0=(1,), c_list=((1, 2),) * 2)
    sol = solve(inst).solution
    assert sol.x0 == (0,) and sol.x_bricks == ((0, 0), (0, 0)) and sol.objective == 0


def test_d_zero_and_non_uniform():
    inst = FourBlockInstance(
        s=1, t=2, d=0, m=1, n=2, A=((1,),), B_list=(((1, 1),),) * 2, C_list=((), ()),
        D_list=((), ()), b0=(3,), b_list=((), ()), c0=(2,), c_list=((1, 3), (2, 1)))
    assert _agree(inst).objective == 3
    inst = random_instance(GenParams(s=1, t=2, d=1, m=1, n=2, uniform_b=False), 3)
    got = _agree(inst)
    assert got.stats.get("reduced") is True


@pytest.mark.parametrize("seed", range(6))
def test_options_do_not_change_answer(seed):
    inst = random_instance(GenParams(s=rnd_s(seed), t=2, d=1, m=1, n=3, planted=1.0), seed)
    ref = brute_force_solve(inst, 6)
    for kw in ({}, {"q_mode": "vector"}, {"domain_box": False}, {"threads": 2},
               {"p_kind": INTEGER}):
        got = solve(inst, SolveOptions(**kw))
        assert (got.status, got.objective) == (ref.status, ref.value), kw


def rnd_s(seed):
    return (0, 1, 2)[seed % 3]


def _programs(q_mode, count=8, seed=21):
    rnd = random.Random(seed)
    out = []
    k = 0
    while len(out) < count:
        k += 1
        inst = random_instance(GenParams(s=rnd.choice([1, 2]), t=2, d=rnd.choice([1, 2]), m=2, n=3,
                                         planted=1.0), seed * 100 + k)
        ref = brute_force_solve(inst, 6)
        if ref.status != OPTIMAL:
            continue
        scheme = build_scheme(inst.d, max(inst.delta, 1))
        lifted = lift_hyperplanes(inst, scheme)
        x0 = ref.witness.x0
        guess = Guess(tuple(x % scheme.M for x in x0), face_of(x0, lifted.hyperplanes), x0)
        bricks = prepare_bricks(inst, scheme, lifted, guess, _Tables())
        prog = build_config_ilp(inst, scheme, bricks, guess, lifted, q_mode=q_mode)
        out.append((inst, scheme, bricks, prog, ref))
    return out


def test_p_structure_audit():
    for inst, scheme, bricks, prog, _ in _programs("vector"):
        lp = prog.lp
        members = {}
        for pos, (coefs, _) in enumerate(lp.eq_rows):
            for k in coefs:
                members.setdefault(k, []).append(pos)
        fam3, fam4, fam5 = set(prog.rows3.values()), set(prog.rows4.values()), set(prog.rows5.values())
        for (i, bp, x), k in prog.p_index.items():
            rows = members[k]
            assert len(rows) == 2
            assert prog.rows3[x] in rows and prog.rows5[(i, bp)] in rows
        for (i, g), k in prog.pg_index.items():
            assert members[k] == [prog.rows4[g]]
        p_vars = set(prog.p_index.values()) | set(prog.pg_index.values())
        for pos in range(inst.m):
            assert not p_vars & set(lp.eq_rows[pos][0])
        assert not (fam3 | fam4 | fam5) & set(range(inst.m))


def test_row5_matches_decomposition():
    """The affine right-hand side of family (5) evaluated at v is the decomposition of b_i - C_i x0."""
    for inst, scheme, bricks, prog, ref in _programs("vector", count=5, seed=22):
        x0 = ref.witness.x0
        v = [(x - r) // scheme.M for x, r in zip(x0, prog.r)]
        for bd in bricks:
            y = vsub(inst.b_list[bd.index], matvec(inst.C_list[bd.index], x0))
            ms = as_multiset(bd.amap, evaluate(bd.amap, y))
            for bp, pos in ((bp, prog.rows5[(bd.index, bp)]) for bp in bd.rows):
                coefs, rhs = prog.lp.eq_rows[pos]
                val = rhs - sum(coefs.get(prog.v_index[j], 0) * v[j] for j in range(inst.s))
                assert val == ms[bp]


def test_worked_example_wiring():
    inst = FourBlockInstance(
        s=1, t=3, d=2, m=1, n=1, A=((1,),), B_list=(((1, 1, 1),),), C_list=(((-1,), (-2,)),),
        D_list=(((1, 0, 1), (0, 1, 1)),), b0=(40,), b_list=((0, 0),), c0=(0,), c_list=((1, 1, 1),))
    scheme = build_scheme(2, 1, t_dec=2, modulus=4)
    lifted = lift_hyperplanes(inst, scheme)
    x0 = (9,)
    guess = Guess((1,), face_of(x0, lifted.hyperplanes), x0)
    bd, = prepare_bricks(inst, scheme, lifted, guess, _Tables())
    prog = build_config_ilp(inst, scheme, [bd], guess, lifted, q_mode="vector")
    expect = {(5, 10): 1, (0, 2): 2, (2, 2): 2}
    assert set(bd.rows) == set(expect)
    for bp, k in expect.items():
        coefs, rhs = prog.lp.eq_rows[prog.rows5[(0, bp)]]
        assert rhs - coefs.get(prog.v_index[0], 0) * 2 == k


def test_feasible_solution_maps_into_program():
    """A feasible solution of the instance yields a feasible program assignment of equal cost."""
    for inst, scheme, bricks, prog, ref in _programs("vector", count=8, seed=23):
        sol = ref.witness
        lp = prog.lp
        x = [0] * lp.num_vars
        for j in range(inst.s):
            x[prog.v_index[j]] = (sol.x0[j] - prog.r[j]) // scheme.M
        for bd in bricks:
            D = inst.D_list[bd.index]
            y = vsub(inst.b_list[bd.index], matvec(inst.C_list[bd.index], sol.x0))
            ms = as_multiset(bd.amap, evaluate(bd.amap, y))
            split = find_split(ms, D, sol.x_bricks[bd.index])
            assert split is not None
            for bp, part in split:
                xb, gm = decompose_solution(D, part, graver_nonneg=bd.graver_nonneg)
                x[prog.p_index[(bd.index, bp, xb)]] += 1
                for g, k in gm.items():
                    x[prog.pg_index[(bd.index, g)]] += k
        for (i, bp, xp), k in prog.p_index.items():
            x[prog.q_index[xp]] += x[k]
        for (i, g), k in prog.pg_index.items():
            x[prog.g_index[g]] += x[k]
        assert lp.is_feasible(x)
        assert lp.value(x) + prog.constant == sol.objective
        res = solve_milp(lp)
        assert res.status == OPTIMAL and res.value + prog.constant == sol.objective
        assert reconstruct(inst, prog, res).objective == sol.objective


def test_guess_partition():
    rnd = random.Random(8)
    inst = random_instance(GenParams(s=1, t=2, d=1, m=1, n=3), 5)
    scheme = build_scheme(1, 1)
    lifted = lift_hyperplanes(inst, scheme)
    guesses, _ = guesses_from_faces(inst, scheme, lifted, SolveOptions())
    keys = [(g.r, g.pv) for g in guesses]
    assert len(keys) == len(set(keys))
    for _ in range(1000):
        x0 = (rnd.randint(-200, 200),)
        key = (tuple(x % scheme.M for x in x0), face_of(x0, lifted.hyperplanes))
        assert keys.count(key) == 1


def test_x0_box_contains_optimum():
    for seed in range(10):
        inst = random_instance(GenParams(s=2, t=2, d=1, m=1, n=2, planted=1.0), seed)
        ref = brute_force_solve(inst, 6)
        box = x0_box(inst)
        if ref.status == OPTIMAL:
            assert all(lo <= x <= hi for x, (lo, hi) in zip(ref.witness.x0, box))


def test_feasible_solution_maps_into_program_with_graver_parts():
    """Same check on a non-optimal solution whose bricks need nonnegative Graver elements."""
    inst = FourBlockInstance(
        s=1, t=2, d=1, m=1, n=2, A=((1,),), B_list=(((1, 2),),) * 2, C_list=(((-1,),), ((1,),)),
        D_list=(((1, -1),),) * 2, b0=(36,), b_list=((4,), (9,)), c0=(1,), c_list=((1, 1), (2, 1)))
    x0, xs = (5,), ((12, 3), (7, 3))
    from fourblock.instance import make_solution
    sol = make_solution(inst, x0, xs)
    assert check_solution(inst, sol)[0]
    scheme = build_scheme(1, 1)
    lifted = lift_hyperplanes(inst, scheme)
    guess = Guess(tuple(x % scheme.M for x in x0), face_of(x0, lifted.hyperplanes), x0)
    bricks = prepare_bricks(inst, scheme, lifted, guess, _Tables())
    prog = build_config_ilp(inst, scheme, bricks, guess, lifted, q_mode="vector")
    x = [0] * prog.lp.num_vars
    x[prog.v_index[0]] = (x0[0] - prog.r[0]) // scheme.M
    graver_used = 0
    for bd in bricks:
        y = vsub(inst.b_list[bd.index], matvec(inst.C_list[bd.index], x0))
        split = find_split(as_multiset(bd.amap, evaluate(bd.amap, y)), inst.D_list[bd.index], xs[bd.index])
        for bp, part in split:
            xb, gm = decompose_solution(inst.D_list[bd.index], part, graver_nonneg=bd.graver_nonneg)
            x[prog.p_index[(bd.index, bp, xb)]] += 1
            for g, k in gm.items():
                x[prog.pg_index[(bd.index, g)]] += k
                graver_used += k
    for (i, bp, xp), k in prog.p_index.items():
        x[prog.q_index[xp]] += x[k]
    for (i, g), k in prog.pg_index.items():
        x[prog.g_index[g]] += x[k]
    assert graver_used > 0
    assert prog.lp.is_feasible(x) and prog.lp.value(x) + prog.constant == sol.objective
    res = solve_milp(prog.lp)
    assert res.value + prog.constant <= sol.objective


@pytest.mark.slow
def test_full_face_enumeration_matches_oracle():
    """Same oracle check with the x0 box presolve switched off, so every (r, F) pair is built."""
    rnd = random.Random(99)
    guesses = 0
    for k in range(30):
        p = GenParams(s=rnd.choice([1, 2]), d=1, m=rnd.choice([1, 2]), t=rnd.choice([1, 2, 3]),
                      n=rnd.randint(1, 4))
        inst = random_instance(p, 99000 + k)
        got = solve(inst, SolveOptions(domain_box=False))
        ref = brute_force_solve(inst, 6)
        assert (got.status, got.objective) == (ref.status, ref.value), k
        guesses += got.stats.get("guesses", 0)
    assert guesses > 100
