"""4-block instances: data model, JSON format, solution checking, generation.

An instance encodes

    min  c0.x0 + sum_i ci.xi
    s.t. A x0 + sum_i Bi xi = b0
         Ci x0 + Di xi      = bi      for every brick i
         x0, xi >= 0 integral
"""

import itertools
import json
import random
from dataclasses import dataclass, field

from .errors import DimensionMismatch, NonIntegerEntry, ParseError
from .exactmath import dot, matvec

SCALAR_KEYS = ("s", "t", "d", "m", "n")


def _max_abs(*matrices):
    return max((abs(x) for M in matrices for row in M for x in row), default=0)


@dataclass(frozen=True)
class FourBlockInstance:
    s: int
    t: int
    d: int
    m: int
    n: int
    A: tuple
    B_list: tuple
    C_list: tuple
    D_list: tuple
    b0: tuple
    b_list: tuple
    c0: tuple
    c_list: tuple

    def __post_init__(self):
        _validate(self)

    @property
    def b_uniform(self):
        return all(B == self.B_list[0] for B in self.B_list)

    @property
    def B(self):
        """The shared B block of a B-uniform instance."""
        if not self.b_uniform:
            raise ValueError("instance is not B-uniform")
        return self.B_list[0]

    @property
    def delta(self):
        """Largest absolute coefficient of the diagonal blocks."""
        return _max_abs(*self.D_list)

    @property
    def delta_bar(self):
        """Largest absolute coefficient of the whole constraint matrix."""
        return _max_abs(self.A, *self.B_list, *self.C_list, *self.D_list)

    def objective(self, x0, xs):
        return dot(self.c0, x0) + sum(dot(c, x) for c, x in zip(self.c_list, xs))


@dataclass(frozen=True)
class Solution:
    x0: tuple
    x_bricks: tuple
    objective: int


@dataclass
class SolveStatus:
    status: str  # "OPTIMAL" | "INFEASIBLE" | "UNBOUNDED"
    solution: Solution = None
    stats: dict = field(default_factory=dict)

    @property
    def objective(self):
        return self.solution.objective if self.solution is not None else None


def _shape_check(name, M, rows, cols):
    if len(M) != rows or any(len(r) != cols for r in M):
        got = f"{len(M)}x{len(M[0]) if M else 0}"
        raise DimensionMismatch(f"{name}: expected {rows}x{cols}, got {got}")


def _vec_check(name, v, length):
    if len(v) != length:
        raise DimensionMismatch(f"{name}: expected length {length}, got {len(v)}")


def _validate(inst):
    s, t, d, m, n = inst.s, inst.t, inst.d, inst.m, inst.n
    if min(s, t, d, m) < 0 or n < 1:
        raise DimensionMismatch("dimensions must be nonnegative and n >= 1")
    _shape_check("A", inst.A, m, s)
    _vec_check("b0", inst.b0, m)
    _vec_check("c0", inst.c0, s)
    for name, blocks in (("B_list", inst.B_list), ("C_list", inst.C_list),
                         ("D_list", inst.D_list), ("b_list", inst.b_list),
                         ("c_list", inst.c_list)):
        if len(blocks) != n:
            raise DimensionMismatch(f"{name}: expected {n} bricks, got {len(blocks)}")
    for i in range(n):
        _shape_check(f"B_list[{i}]", inst.B_list[i], m, t)
        _shape_check(f"C_list[{i}]", inst.C_list[i], d, s)
        _shape_check(f"D_list[{i}]", inst.D_list[i], d, t)
        _vec_check(f"b_list[{i}]", inst.b_list[i], d)
        _vec_check(f"c_list[{i}]", inst.c_list[i], t)


# ---------------------------------------------------------------- JSON format

def _int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise NonIntegerEntry(f"{where}: {x!r} is not an integer")
    return x


def _vector(x, where):
    if not isinstance(x, list):
        raise ParseError(f"{where}: expected an array")
    return tuple(_int(a, where) for a in x)


def _matrix(x, where):
    if not isinstance(x, list):
        raise ParseError(f"{where}: expected an array of arrays")
    return tuple(_vector(row, where) for row in x)


def instance_from_dict(doc):
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    try:
        dims = {k: _int(doc[k], k) for k in SCALAR_KEYS}
        n = dims["n"]
        if "B" in doc:
            B = _matrix(doc["B"], "B")
            B_list = (B,) * n
        else:
            B_list = tuple(_matrix(M, "B_list") for M in doc["B_list"])
        C_list = tuple(_matrix(M, "C_list") for M in doc["C_list"])
        D_list = tuple(_matrix(M, "D_list") for M in doc["D_list"])
        b_list = tuple(_vector(v, "b_list") for v in doc["b_list"])
        c_list = tuple(_vector(v, "c_list") for v in doc["c_list"])
        A = _matrix(doc["A"], "A")
        b0 = _vector(doc["b0"], "b0")
        c0 = _vector(doc["c0"], "c0")
    except KeyError as exc:
        raise ParseError(f"missing key {exc.args[0]!r}") from None
    except TypeError as exc:
        raise ParseError(str(exc)) from None
    # JSON cannot express an m x 0 matrix row count; [] means "no columns"
    if dims["s"] == 0 and A == () and dims["m"] > 0:
        A = ((),) * dims["m"]
    C_list = tuple(((),) * dims["d"] if dims["s"] == 0 and C == () else C for C in C_list)
    return FourBlockInstance(**dims, A=A, B_list=B_list, C_list=C_list,
                             D_list=D_list, b0=b0, b_list=b_list, c0=c0, c_list=c_list)


def parse_instance(text):
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return instance_from_dict(doc)


def instance_to_dict(inst):
    def mat(M):
        return [list(r) for r in M]

    doc = {k: getattr(inst, k) for k in SCALAR_KEYS}
    doc["A"] = mat(inst.A)
    if inst.b_uniform:
        doc["B"] = mat(inst.B_list[0])
    else:
        doc["B_list"] = [mat(B) for B in inst.B_list]
    doc["C_list"] = [mat(C) for C in inst.C_list]
    doc["D_list"] = [mat(D) for D in inst.D_list]
    doc["b0"] = list(inst.b0)
    doc["b_list"] = [list(b) for b in inst.b_list]
    doc["c0"] = list(inst.c0)
    doc["c_list"] = [list(c) for c in inst.c_list]
    return doc


def serialize_instance(inst):
    return json.dumps(instance_to_dict(inst))


# ----------------------------------------------------------------- checking

def check_solution(inst, sol):
    """Return ``(ok, report)``; report names the first violated row."""
    x0, xs = tuple(sol.x0), tuple(tuple(x) for x in sol.x_bricks)
    if len(x0) != inst.s or len(xs) != inst.n or any(len(x) != inst.t for x in xs):
        return False, "dimension mismatch"
    if any(v < 0 for v in x0):
        return False, "x0 negative"
    for i, x in enumerate(xs):
        if any(v < 0 for v in x):
            return False, f"brick {i} negative"
    lhs = list(matvec(inst.A, x0))
    for B, x in zip(inst.B_list, xs):
        for r, val in enumerate(matvec(B, x)):
            lhs[r] += val
    for r in range(inst.m):
        if lhs[r] != inst.b0[r]:
            return False, f"global row {r}"
    for i in range(inst.n):
        Cx = matvec(inst.C_list[i], x0)
        Dx = matvec(inst.D_list[i], xs[i])
        for r in range(inst.d):
            if Cx[r] + Dx[r] != inst.b_list[i][r]:
                return False, f"brick {i} row {r}"
    if inst.objective(x0, xs) != sol.objective:
        return False, "objective mismatch"
    return True, None


def make_solution(inst, x0, xs):
    x0 = tuple(int(v) for v in x0)
    xs = tuple(tuple(int(v) for v in x) for x in xs)
    return Solution(x0, xs, inst.objective(x0, xs))


# ----------------------------------------------------------- B-uniformity

def reduce_to_b_uniform(inst):
    """Rewrite an instance so that all B blocks coincide.

    Every column pattern (p, q) in [-D̄, D̄]^m x [-D̄, D̄]^d becomes one local
    variable with B-column p.  Patterns absent from a brick get a leading 1 in
    an extra local row with right-hand side 0, which pins them to zero.
    Returns ``(new_instance, back_map)`` where ``back_map[i][j]`` is the
    original column of brick ``i`` behind new column ``j`` (or ``None``).
    """
    dbar = inst.delta_bar
    m, d = inst.m, inst.d
    rng = range(-dbar, dbar + 1)
    patterns = list(itertools.product(rng, repeat=m + d))
    t_new = len(patterns)
    B_new = tuple(tuple(pat[r] for pat in patterns) for r in range(m))

    C_list, D_list, b_list, c_list, back_map = [], [], [], [], []
    for i in range(inst.n):
        B, D, c = inst.B_list[i], inst.D_list[i], inst.c_list[i]
        best = {}
        for j in range(inst.t):
            key = tuple(B[r][j] for r in range(m)) + tuple(D[r][j] for r in range(d))
            if key not in best or c[j] < c[best[key]]:
                best[key] = j
        cols, costs, back = [], [], []
        for pat in patterns:
            q = pat[m:]
            if pat in best:
                j = best[pat]
                cols.append((0,) + q)
                costs.append(c[j])
                back.append(j)
            else:
                cols.append((1,) + q)
                costs.append(0)
                back.append(None)
        D_list.append(tuple(tuple(col[r] for col in cols) for r in range(d + 1)))
        C_list.append(((0,) * inst.s,) + tuple(inst.C_list[i]))
        b_list.append((0,) + tuple(inst.b_list[i]))
        c_list.append(tuple(costs))
        back_map.append(tuple(back))

    new = FourBlockInstance(
        s=inst.s, t=t_new, d=d + 1, m=m, n=inst.n, A=inst.A,
        B_list=(B_new,) * inst.n, C_list=tuple(C_list), D_list=tuple(D_list),
        b0=inst.b0, b_list=tuple(b_list), c0=inst.c0, c_list=tuple(c_list),
    )
    return new, tuple(back_map)


def lift_solution(inst, back_map, reduced_sol):
    """Map a solution of the reduced instance back to the original columns."""
    xs = []
    for i, x_new in enumerate(reduced_sol.x_bricks):
        x = [0] * inst.t
        for j, orig in enumerate(back_map[i]):
            if orig is None:
                if x_new[j] != 0:
                    raise ValueError("absent column carries a nonzero value")
            else:
                x[orig] += x_new[j]
        xs.append(tuple(x))
    return make_solution(inst, reduced_sol.x0, xs)


# ------------------------------------------------------------- generation

@dataclass(frozen=True)
class GenParams:
    s: int = 1
    t: int = 2
    d: int = 1
    m: int = 1
    n: int = 2
    delta: int = 1
    delta_bar: int = 1
    rhs_bound: int = 6
    box_bound: int = 20
    cost_bound: int = 3
    uniform_b: bool = True
    planted: float = 0.5  # probability that the right-hand sides come from a planted solution


def random_instance(params, seed):
    """Deterministic random instance whose variables are all boxed.

    Row 0 of every brick is a capacity row: all-ones in D_i, 0/1 entries in
    C_i (all ones in brick 0) and a right-hand side in [0, cap] with
    cap = min(rhs_bound, box_bound).  Every variable therefore lies in
    [0, cap], so exhaustive enumeration over that box is complete.
    """
    p = params
    if p.d < 1:
        raise ValueError("random_instance needs d >= 1 for the capacity row")
    rnd = random.Random(seed)
    cap = min(p.rhs_bound, p.box_bound)

    def mat(rows, cols, bound):
        return tuple(tuple(rnd.randint(-bound, bound) for _ in range(cols)) for _ in range(rows))

    def vec(length, lo, hi):
        return tuple(rnd.randint(lo, hi) for _ in range(length))

    A = mat(p.m, p.s, p.delta_bar)
    shared_B = mat(p.m, p.t, p.delta_bar)
    B_list, C_list, D_list, b_list, c_list = [], [], [], [], []
    for i in range(p.n):
        B_list.append(shared_B if p.uniform_b else mat(p.m, p.t, p.delta_bar))
        cap_row_c = (1,) * p.s if i == 0 else vec(p.s, 0, min(1, p.delta_bar))
        C_list.append((cap_row_c,) + mat(p.d - 1, p.s, p.delta_bar))
        D_list.append(((min(1, p.delta),) * p.t,) + mat(p.d - 1, p.t, p.delta))
        b_list.append((rnd.randint(0, cap),) + vec(p.d - 1, -p.rhs_bound, p.rhs_bound))
        c_list.append(vec(p.t, -p.cost_bound, p.cost_bound))
    b0 = vec(p.m, -p.rhs_bound, p.rhs_bound)
    c0 = vec(p.s, -p.cost_bound, p.cost_bound)
    if rnd.random() < p.planted:
        b0, b_list = _planted_rhs(rnd, p, cap, A, B_list, C_list, D_list)
    return FourBlockInstance(
        s=p.s, t=p.t, d=p.d, m=p.m, n=p.n, A=A, B_list=tuple(B_list),
        C_list=tuple(C_list), D_list=tuple(D_list),
        b0=b0, b_list=tuple(b_list), c0=c0, c_list=tuple(c_list),
    )


def _planted_rhs(rnd, p, cap, A, B_list, C_list, D_list):
    """Right-hand sides of a random solution that respects every capacity row."""

    def spread(total, length):
        out = []
        for _ in range(length):
            k = rnd.randint(0, total)
            out.append(k)
            total -= k
        rnd.shuffle(out)
        return tuple(out)

    x0 = spread(rnd.randint(0, cap // 2), p.s)
    b_list, total = [], [0] * p.m
    for i in range(p.n):
        room = cap - matvec(C_list[i], x0)[0]
        xi = spread(rnd.randint(0, room), p.t)
        b_list.append(tuple(a + b for a, b in zip(matvec(C_list[i], x0), matvec(D_list[i], xi))))
        total = [a + b for a, b in zip(total, matvec(B_list[i], xi))]
    b0 = tuple(a + b for a, b in zip(matvec(A, x0), total))
    return b0, b_list
