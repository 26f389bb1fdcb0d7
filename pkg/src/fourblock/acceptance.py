"""Acceptance checks, shared by ``fourblock selftest`` and the test suite.

Each ``criterion_*`` function returns a :class:`CriterionResult`; none of
them raise on a failed check.
"""

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cones, graver
from .arrangement import Hyperplane, enumerate_faces, exhaustive_faces, face_of
from .decomposition import (PLUS, as_multiset, build_affine_map, build_scheme, decompose,
                            default_tdec, evaluate)
from .instance import FourBlockInstance, GenParams, random_instance, reduce_to_b_uniform
from .milp import CONTINUOUS, INTEGER, OPTIMAL, integral_vertex_restore, solve_milp
from .oracle import brute_force_solve, check_faithful
from .solver import (SolveOptions, _Tables, build_config_ilp, guesses_from_box, lift_hyperplanes,
                     prepare_bricks, solve, x0_box)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] criterion {self.number}: {self.name} ({self.seconds:.1f}s) {self.detail}"


def _timed(number, name, fn):
    start = time.perf_counter()
    try:
        passed, detail, data = fn()
    except Exception as exc:  # a crash is a failed criterion, reported not raised
        passed, detail, data = False, f"error: {type(exc).__name__}: {exc}", {}
    return CriterionResult(number, name, passed, detail, time.perf_counter() - start, data)


# ---------------------------------------------------------------- 1

def worked_example():
    """All quantities of the b = (9, 18) example on the lattice (1, 2) + 4 Z^2."""
    bases = cones.enumerate_bases(2, 1)
    psi = cones.compute_psi(bases)
    U = cones.generating_bases((9, 18), bases)
    P = cones.intersection_generators(U)
    scheme = build_scheme(2, 1, t_dec=2, modulus=4)
    r, pv = scheme.classify((9, 18))
    amap = build_affine_map(scheme, r, (9, 18), pv)
    mult = evaluate(amap, (9, 18), scheme)
    return {
        "psi": psi, "generators": set(P.generators), "r": r,
        "w": amap.support[1:], "q": amap.q, "multiset": as_multiset(amap, mult),
        "gamma": amap.gamma, "S": amap.S,
    }


def criterion_1_worked_example():
    def run():
        start = time.perf_counter()
        got = worked_example()
        elapsed = time.perf_counter() - start
        want = {
            "psi": 2, "generators": {(0, 1), (1, 1)}, "r": (1, 2),
            "w": ((0, 2), (2, 2)), "q": (5, 10),
            "multiset": {(5, 10): 1, (0, 2): 2, (2, 2): 2},
        }
        bad = [k for k in want if got[k] != want[k]]
        ok = not bad and elapsed < 1.0
        detail = f"mismatch in {bad}" if bad else f"exact match in {elapsed:.3f}s"
        return ok, detail, got
    return _timed(1, "worked decomposition example b=(9,18)", run)


# ---------------------------------------------------------------- 2

def oracle_params(rnd):
    return GenParams(
        s=rnd.choice([0, 1, 2]), d=rnd.choice([1, 2]), m=rnd.choice([1, 2]),
        t=rnd.choice([1, 2, 3]), n=rnd.randint(1, 5), delta=1, delta_bar=1,
        rhs_bound=6, box_bound=20,
    )


def criterion_2_oracle_equivalence(count=200, seed=2024, budget=1800.0):
    def run():
        rnd = random.Random(seed)
        mismatches, feasible, start = [], 0, time.perf_counter()
        for k in range(count):
            p = oracle_params(rnd)
            inst = random_instance(p, seed * 1000 + k)
            got = solve(inst)
            ref = brute_force_solve(inst, min(p.rhs_bound, p.box_bound))
            feasible += ref.status == "OPTIMAL"
            if got.status != ref.status or got.objective != ref.value:
                mismatches.append((k, got.status, got.objective, ref.status, ref.value))
        elapsed = time.perf_counter() - start
        mixed = 0 < feasible < count
        ok = not mismatches and mixed and elapsed <= budget
        detail = (f"{count - len(mismatches)}/{count} agree, {feasible} feasible, "
                  f"{count - feasible} infeasible, {elapsed:.0f}s of {budget:.0f}s")
        return ok, detail, {"mismatches": mismatches}
    return _timed(2, "solver equals brute force on random instances", run)


# ---------------------------------------------------------------- 3

def faithfulness_report(d, t_dec, samples, matrices, seed, bound=25, norm=60):
    scheme = build_scheme(d, 1, t_dec)
    rnd = random.Random(seed)
    failures = []
    for _ in range(samples):
        b = tuple(rnd.randint(-norm, norm) for _ in range(d))
        amap, mult = decompose(scheme, b)
        if mult[0] != 1:
            failures.append((b, "q multiplicity"))
        if any(m % t_dec for m in mult[1:]):
            failures.append((b, "w multiplicity not divisible by t_dec"))
        total = [sum(m * v[j] for m, v in zip(mult, amap.support)) for j in range(d)]
        if tuple(total) != b:
            failures.append((b, "sum"))
        for v in amap.support:
            if any(v[j] * b[j] < 0 or abs(v[j]) > abs(b[j]) for j in range(d)):
                failures.append((b, f"part {v} not conformal"))
        f = as_multiset(amap, mult)
        for _ in range(matrices):
            D = tuple(tuple(rnd.randint(-1, 1) for _ in range(3)) for _ in range(d))
            if not check_faithful(f, D, b, bound):
                failures.append((b, f"not faithful for D={D}"))
    return failures


def criterion_3_faithfulness(samples=50, matrices=10, seed=7):
    def run():
        failures, cases = [], 0
        for d in (1, 2):
            for t_dec in sorted({2, default_tdec(d, 1)}):
                failures += faithfulness_report(d, t_dec, samples, matrices, seed + 10 * d + t_dec)
                cases += samples
        return not failures, f"{cases} domains x {matrices} matrices, {len(failures)} failures", {"failures": failures[:10]}
    return _timed(3, "decompositions are exact, conformal and faithful", run)


# ---------------------------------------------------------------- 4

def random_hyperplanes(rnd, dim, k):
    return [Hyperplane(tuple(rnd.randint(-2, 2) for _ in range(dim)), rnd.randint(-3, 3)) for _ in range(k)]


def sample_point(rnd, H, dim):
    mode = rnd.randrange(3)
    if mode == 0 or dim == 0:
        return tuple(Fraction(rnd.randint(-40, 40), rnd.randint(1, 6)) for _ in range(dim))
    if mode == 1:
        return tuple(rnd.randint(-4, 4) for _ in range(dim))
    # a point on a random nondegenerate hyperplane
    h = rnd.choice(H)
    x = [Fraction(rnd.randint(-20, 20), rnd.randint(1, 4)) for _ in range(dim)]
    nz = [j for j in range(dim) if h.a[j]]
    if nz:
        j = nz[0]
        rest = sum(h.a[k] * x[k] for k in range(dim) if k != j)
        x[j] = (Fraction(h.beta) - rest) / h.a[j]
    return tuple(x)


def criterion_4_arrangements(sets=10, points=1000, seed=11):
    def run():
        rnd = random.Random(seed)
        problems = []
        for k in range(sets):
            dim = k % 3
            H = random_hyperplanes(rnd, dim, rnd.randint(1, 5))
            arr = enumerate_faces(H, dim)
            got = set(arr.position_vectors())
            ref = set(exhaustive_faces(H, dim))
            if got != ref or len(got) != len(arr.faces):
                problems.append((k, "face set differs from exhaustive scan"))
            for pv, w in arr.faces:
                if face_of(w, H) != pv:
                    problems.append((k, "witness off its face"))
            for _ in range(points):
                x = sample_point(rnd, H, dim)
                if face_of(x, H) not in got:
                    problems.append((k, f"point {x} in no face"))
                    break
        return not problems, f"{sets} arrangements, {sets * points} sample points, {len(problems)} problems", {"problems": problems}
    return _timed(4, "face enumeration equals exhaustive scan", run)


# ---------------------------------------------------------------- 5

def brute_force_graver(D):
    """Conformally minimal kernel vectors, by enumerating a norm box."""
    d = len(D)
    t = len(D[0])
    delta = max((abs(a) for row in D for a in row), default=0)
    bound = (2 * d * max(delta, 1) + 1) ** d
    axes = np.meshgrid(*[np.arange(-bound, bound + 1)] * t, indexing="ij")
    X = np.stack([a.ravel() for a in axes], axis=1)
    X = X[np.abs(X).sum(axis=1) <= bound]
    X = X[np.all(X @ np.array(D).T == 0, axis=1)]
    X = X[np.abs(X).sum(axis=1) > 0]
    X = X[np.argsort(np.abs(X).sum(axis=1), kind="stable")]
    minimal = np.zeros((0, t), dtype=X.dtype)
    for g in X:
        if len(minimal):
            conf = np.all((minimal * g >= 0) & (np.abs(minimal) <= np.abs(g)), axis=1)
            if conf.any():
                continue
        minimal = np.vstack([minimal, g])
    return sorted(tuple(int(v) for v in row) for row in minimal)


def graver_matrices(random_count, seed):
    rnd = random.Random(seed)
    mats = [((a, b),) for a, b in itertools.product((-1, 0, 1), repeat=2)]
    mats += [((a, b), (c, e)) for a, b, c, e in itertools.product((-1, 0, 1), repeat=4)]
    mats += [tuple(tuple(rnd.randint(-1, 1) for _ in range(3)) for _ in range(2)) for _ in range(random_count)]
    return mats


def criterion_5_graver(random_count=20, seed=5):
    def run():
        bad = []
        mats = graver_matrices(random_count, seed)
        for D in mats:
            if list(graver.graver_basis(D).elements) != brute_force_graver(D):
                bad.append(D)
        return not bad, f"{len(mats) - len(bad)}/{len(mats)} matrices agree", {"bad": bad}
    return _timed(5, "Graver bases equal brute-force minimal filter", run)


# ---------------------------------------------------------------- 6

def random_config_programs(count, seed, q_mode="vector"):
    """Configuration programs from guesses of random feasible instances."""
    rnd = random.Random(seed)
    out = []
    k = 0
    while len(out) < count and k < 50 * count:
        k += 1
        p = GenParams(s=rnd.choice([0, 1, 2]), d=rnd.choice([1, 2]), m=rnd.choice([1, 2]),
                      t=rnd.choice([2, 3]), n=rnd.randint(1, 4), planted=1.0)
        inst = random_instance(p, seed * 1000 + k)
        box = x0_box(inst)
        if box is None:
            continue
        scheme = build_scheme(inst.d, max(inst.delta, 1))
        lifted = lift_hyperplanes(inst, scheme)
        guesses, _ = guesses_from_box(inst, scheme, lifted, box)
        if not guesses:
            continue
        guess = rnd.choice(guesses)
        bricks = prepare_bricks(inst, scheme, lifted, guess, _Tables())
        if bricks is None:
            continue
        prog = build_config_ilp(inst, scheme, bricks, guess, lifted, box, q_mode=q_mode)
        if prog is not None:
            out.append((inst, prog))
    return out


def criterion_6_tu_relaxation(programs=30, seed=6):
    def run():
        bad, optimal = [], 0
        progs = random_config_programs(programs, seed)
        for idx, (inst, prog) in enumerate(progs):
            p_vars = set(prog.p_index.values()) | set(prog.pg_index.values())
            relaxed = solve_milp(prog.lp)
            integral = solve_milp(prog.lp.with_kinds({k: INTEGER for k in p_vars}))
            if relaxed.status != integral.status or relaxed.value != integral.value:
                bad.append((idx, "values differ"))
                continue
            if relaxed.status == OPTIMAL:
                optimal += 1
                fixed = {k: int(relaxed.assignment[k]) for k, v in enumerate(prog.lp.variables) if v.kind == INTEGER}
                restored = integral_vertex_restore(prog.lp, fixed)
                if any(Fraction(restored.assignment[k]).denominator != 1 for k in p_vars):
                    bad.append((idx, "fractional p"))
        ok = not bad and len(progs) == programs
        return ok, f"{len(progs)} programs ({optimal} optimal), {len(bad)} disagreements", {"bad": bad}
    return _timed(6, "p-family relaxation is exact", run)


# ---------------------------------------------------------------- 7

def criterion_7_reduction(count=30, seed=17):
    def run():
        rnd = random.Random(seed)
        bad, feasible = [], 0
        for k in range(count):
            p = GenParams(s=rnd.choice([0, 1]), t=rnd.choice([1, 2]), d=1, m=1,
                          n=rnd.randint(1, 4), delta=1, delta_bar=1, uniform_b=False)
            inst = random_instance(p, seed * 1000 + k)
            reduced, _ = reduce_to_b_uniform(inst)
            got = solve(reduced)
            ref = brute_force_solve(inst, min(p.rhs_bound, p.box_bound))
            feasible += ref.status == "OPTIMAL"
            if got.status != ref.status or got.objective != ref.value:
                bad.append((k, got.status, got.objective, ref.status, ref.value))
        return not bad, f"{count - len(bad)}/{count} agree ({feasible} feasible)", {"bad": bad}
    return _timed(7, "B-uniform reduction preserves the optimum", run)


# ---------------------------------------------------------------- 8

def bench_instance(n):
    """Fixed family with s=1, d=1, t=2, m=1: brick i caps x0 + x_i at 7i + 5."""
    return FourBlockInstance(
        s=1, t=2, d=1, m=1, n=n, A=((1,),), B_list=(((1, 0),),) * n,
        C_list=(((1,),),) * n, D_list=(((1, 1),),) * n,
        b0=(3 + n,), b_list=tuple((7 * i + 5,) for i in range(n)),
        c0=(-1,), c_list=tuple((1, 2) if i % 2 else (2, 1) for i in range(n)),
    )


def bench_rows(ns=(2, 4, 8, 16)):
    rows = []
    for n in ns:
        st = solve(bench_instance(n), SolveOptions(domain_box=False))
        rows.append({"n": n, "status": st.status, "objective": st.objective,
                     "guesses": st.stats["guesses"], "faces": st.stats["faces"],
                     "lifted_hyperplanes": st.stats["lifted_hyperplanes"],
                     "guesses_solved": st.stats["guesses_solved"],
                     "milp_nodes": st.stats["milp_nodes"], "wall_time": st.stats["wall_time"]})
    return rows


def criterion_8_scaling(ns=(2, 4, 8, 16)):
    def run():
        rows = bench_rows(ns)
        g = [r["guesses"] for r in rows]
        increasing = all(a < b for a, b in zip(g, g[1:]))
        ratios = [r["guesses"] / r["n"] for r in rows]
        # linear growth: guesses per brick stays within a constant band
        linear = max(ratios) <= 2 * min(ratios)
        done = all(r["status"] == "OPTIMAL" for r in rows)
        detail = "guesses " + ", ".join(f"n={r['n']}:{r['guesses']}" for r in rows)
        return increasing and linear and done, detail, {"rows": rows}
    return _timed(8, "guess count grows linearly in n", run)


CRITERIA = [
    criterion_1_worked_example,
    criterion_2_oracle_equivalence,
    criterion_3_faithfulness,
    criterion_4_arrangements,
    criterion_5_graver,
    criterion_6_tu_relaxation,
    criterion_7_reduction,
    criterion_8_scaling,
]


def run_all(selected=None, out=print):
    results = []
    for k, fn in enumerate(CRITERIA, start=1):
        if selected and k not in selected:
            continue
        res = fn()
        out(res.line())
        results.append(res)
    return results
