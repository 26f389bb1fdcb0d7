"""Brute-force ground truth for small instances."""

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BoxTooLarge, SearchBudgetExceeded
from .instance import make_solution

GRID_CAP = 5_000_000


@dataclass
class OracleReport:
    status: str  # "OPTIMAL" | "INFEASIBLE"
    value: object = None
    witness: object = None  # Solution
    counts: dict = field(default_factory=dict)


def _grid(t, bound):
    if (bound + 1) ** t > GRID_CAP:
        raise BoxTooLarge(f"(bound+1)^t = {(bound + 1) ** t} exceeds {GRID_CAP}")
    if t == 0:
        return np.zeros((1, 0), dtype=np.int64)
    axes = np.meshgrid(*[np.arange(bound + 1, dtype=np.int64)] * t, indexing="ij")
    return np.stack([a.ravel() for a in axes], axis=1)


def enumerate_solutions(D, b, bound, t=None):
    """All x in [0, bound]^t with D x = b, in lexicographic order."""
    t = (len(D[0]) if D else 0) if t is None else t
    X = _grid(t, bound)
    if D:
        Dm = np.array(D, dtype=np.int64).reshape(len(D), t)
        ok = np.all(X @ Dm.T == np.array(b, dtype=np.int64), axis=1)
        X = X[ok]
    elif any(b):
        return []
    return [tuple(int(v) for v in row) for row in X]


def brute_force_solve(inst, box):
    """Exact optimum with every variable restricted to [0, box]."""
    s, t, m = inst.s, inst.t, inst.m
    if (box + 1) ** s > GRID_CAP:
        raise BoxTooLarge("x0 box too large")
    X = _grid(t, box)
    brick_cache = {}
    counts = {"x0_points": 0, "brick_tables": 0}

    def brick_options(i, rhs):
        key = (inst.D_list[i], inst.B_list[i], inst.c_list[i], rhs)
        if key not in brick_cache:
            counts["brick_tables"] += 1
            D = np.array(inst.D_list[i], dtype=np.int64).reshape(inst.d, t)
            ok = np.all(X @ D.T == np.array(rhs, dtype=np.int64), axis=1) if inst.d else np.ones(len(X), bool)
            sols = X[ok]
            opts = {}
            if len(sols):
                Bm = np.array(inst.B_list[i], dtype=np.int64).reshape(m, t)
                Bx = sols @ Bm.T if m else np.zeros((len(sols), 0), dtype=np.int64)
                cost = sols @ np.array(inst.c_list[i], dtype=np.int64)
                for row, bx, c in zip(sols, Bx, cost):
                    k = tuple(int(v) for v in bx)
                    c = int(c)
                    if k not in opts or c < opts[k][0]:
                        opts[k] = (c, tuple(int(v) for v in row))
            brick_cache[key] = opts
        return brick_cache[key]

    best = None
    for x0 in itertools.product(range(box + 1), repeat=s):
        counts["x0_points"] += 1
        per_brick = []
        feasible = True
        for i in range(inst.n):
            rhs = tuple(bi - sum(c * x for c, x in zip(row, x0)) for bi, row in zip(inst.b_list[i], inst.C_list[i]))
            opts = brick_options(i, rhs)
            if not opts:
                feasible = False
                break
            per_brick.append(opts)
        if not feasible:
            continue
        target = tuple(b - sum(a * x for a, x in zip(row, x0)) for b, row in zip(inst.b0, inst.A))
        # reachable range of the remaining bricks, for pruning
        lo = [[0] * m for _ in range(inst.n + 1)]
        hi = [[0] * m for _ in range(inst.n + 1)]
        for i in range(inst.n - 1, -1, -1):
            keys = list(per_brick[i])
            for r in range(m):
                lo[i][r] = lo[i + 1][r] + min(k[r] for k in keys)
                hi[i][r] = hi[i + 1][r] + max(k[r] for k in keys)
        states = {(0,) * m: (0, None)}
        layers = []
        for i in range(inst.n):
            nxt = {}
            for partial, (cost, _) in states.items():
                for k, (c, _x) in per_brick[i].items():
                    new = tuple(p + v for p, v in zip(partial, k))
                    if any(target[r] - new[r] < lo[i + 1][r] or target[r] - new[r] > hi[i + 1][r] for r in range(m)):
                        continue
                    total = cost + c
                    if new not in nxt or total < nxt[new][0]:
                        nxt[new] = (total, (partial, k))
            layers.append(nxt)
            states = nxt
            if not states:
                break
        if target not in states:
            continue
        value = sum(c * x for c, x in zip(inst.c0, x0)) + states[target][0]
        if best is not None and value >= best[0]:
            continue
        xs = []
        key = target
        for i in range(inst.n - 1, -1, -1):
            partial, k = layers[i][key][1]
            xs.append(per_brick[i][k][1])
            key = partial
        best = (value, x0, tuple(reversed(xs)))
    if best is None:
        return OracleReport("INFEASIBLE", counts=counts)
    sol = make_solution(inst, best[1], best[2])
    return OracleReport("OPTIMAL", sol.objective, sol, counts)


# ------------------------------------------------------- faithfulness

def _part_solutions(D, t, part, bound):
    return enumerate_solutions(D, part, bound, t)


def reachable_sums(parts, D, bound, t=None):
    """Boolean array over [0, bound]^t marking sums of one solution per part.

    ``parts`` is a list of right-hand sides (repeated according to their
    multiplicity).  Every partial sum of nonnegative vectors stays below
    its total, so truncating at ``bound`` loses nothing.
    """
    t = (len(D[0]) if D else 0) if t is None else t
    shape = (bound + 1,) * t
    reach = np.zeros(shape, dtype=bool)
    reach[(0,) * t] = True
    cache = {}
    for part in parts:
        part = tuple(part)
        if part not in cache:
            cache[part] = _part_solutions(D, t, part, bound)
        nxt = np.zeros(shape, dtype=bool)
        for y in cache[part]:
            src = tuple(slice(0, bound + 1 - v) for v in y)
            dst = tuple(slice(v, bound + 1) for v in y)
            nxt[dst] |= reach[src]
        reach = nxt
        if not reach.any():
            break
    return reach


def check_faithful(multiset, D, b, bound, t=None):
    """Does every solution x <= bound of D x = b split along the multiset?"""
    t = (len(D[0]) if D else 0) if t is None else t
    parts = [v for v, k in sorted(multiset.items()) for _ in range(k)]
    sols = enumerate_solutions(D, b, bound, t)
    if not sols:
        return True
    reach = reachable_sums(parts, D, bound, t)
    return all(reach[x] for x in sols)


def find_split(multiset, D, x, budget=1_000_000):
    """Explicit split of x into one solution per part, or None.

    Memoised recursion on (part index, remaining x).  Parts of
    multiplicity one are handled last, since they are the most constrained.
    """
    t = len(x)
    parts = sorted(multiset.items(), key=lambda kv: (kv[1] == 1, kv[0]))
    parts = [v for v, k in parts for _ in range(k)]
    bound = max(x, default=0)
    sols = {}
    for p in set(parts):
        sols[p] = [y for y in enumerate_solutions(D, p, bound, t)]
    calls = [0]

    @lru_cache(maxsize=None)
    def rec(k, rem):
        calls[0] += 1
        if calls[0] > budget:
            raise SearchBudgetExceeded(f"split search exceeded {budget} calls")
        if k == len(parts):
            return () if not any(rem) else None
        for y in sols[parts[k]]:
            if all(a <= b for a, b in zip(y, rem)):
                rest = rec(k + 1, tuple(b - a for a, b in zip(y, rem)))
                if rest is not None:
                    return (y,) + rest
        return None

    out = rec(0, tuple(x))
    if out is None:
        return None
    return list(zip(parts, out))
