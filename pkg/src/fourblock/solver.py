"""The guess-and-configure algorithm for B-uniform 4-block ILPs.

For a residue r of x0 modulo M and a face F of the lifted arrangement, every
brick right-hand side b_i - C_i x0 stays in one decomposition domain, so its
solutions are counted by a configuration program whose only integer
variables are v (x0 = r + M v) and the aggregated counts q.
"""

import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import graver
from .arrangement import Pos, enumerate_faces, face_of, position_of, preimage_hyperplane
from .decomposition import aggregated_rows, build_affine_map, build_scheme, canonical_hyperplane
from .errors import ReconstructionMismatch
from .exactmath import as_rational, dot, matvec, normalize
from .instance import (FourBlockInstance, SolveStatus, check_solution, lift_solution,
                       make_solution, reduce_to_b_uniform)
from .milp import (CONTINUOUS, INFEASIBLE, INTEGER, OPTIMAL, UNBOUNDED, LinearProgram,
                   integral_vertex_restore, solve_lp_exact, solve_milp)

log = logging.getLogger(__name__)


@dataclass
class SolveOptions:
    t_dec: int = None          # defaults to (2 Delta + 1)^d
    modulus: int = None        # override of the scheme modulus (testing only)
    face_cap: int = 200000
    node_cap: int = 100000
    threads: int = 1
    domain_box: bool = True    # use LP bounds on x0 to skip empty guesses
    box_point_cap: int = 200000
    p_kind: str = CONTINUOUS   # INTEGER turns the p-family into integers
    q_mode: str = "image"      # "vector": one q per x' and g; "image": one per value of B x'


@dataclass
class BrickData:
    index: int
    graver_nonneg: tuple
    residue: tuple = None
    position: tuple = None
    amap: object = None
    rows: dict = None          # support vector -> (Lambda row, mu)
    tables: dict = None        # support vector -> base solutions


@dataclass
class ConfigurationProgram:
    lp: LinearProgram
    r: tuple
    M: int
    v_index: list
    q_index: dict              # x' -> variable index
    g_index: dict              # g -> variable index
    p_index: dict              # (brick, b', x') -> variable index
    pg_index: dict             # (brick, g) -> variable index
    rows3: dict = field(default_factory=dict)   # x' -> eq row position
    rows4: dict = field(default_factory=dict)   # g -> eq row position
    rows5: dict = field(default_factory=dict)   # (brick, b') -> eq row position
    constant: object = 0       # objective constant c0.r


# ------------------------------------------------------------ lifting

@dataclass
class LiftedArrangement:
    hyperplanes: list
    provenance: dict  # (brick, k) -> (lifted index, orientation) or (None, constant Pos)


def lift_hyperplanes(inst, scheme):
    H, index, prov = [], {}, {}
    for i in range(inst.n):
        for k, h in enumerate(scheme.hyperplanes):
            L = preimage_hyperplane(h, inst.C_list[i], inst.b_list[i])
            if not any(L.a):
                prov[(i, k)] = (None, position_of((0,) * inst.s, L))
                continue
            c, orient = canonical_hyperplane(L.a, L.beta)
            if c not in index:
                index[c] = len(H)
                H.append(c)
            prov[(i, k)] = (index[c], orient)
    return LiftedArrangement(H, prov)


def brick_position(lifted, pv, i, count):
    out = []
    for k in range(count):
        idx, val = lifted.provenance[(i, k)]
        out.append(val if idx is None else Pos(val * int(pv[idx])))
    return tuple(out)


# ------------------------------------------------------------ presolve

def relaxation_lp(inst):
    lp = LinearProgram()
    x0 = [lp.add_var(f"x0_{j}", cost=inst.c0[j]) for j in range(inst.s)]
    xs = [[lp.add_var(f"x{i}_{j}", cost=inst.c_list[i][j]) for j in range(inst.t)] for i in range(inst.n)]
    for r in range(inst.m):
        coefs = {x0[j]: inst.A[r][j] for j in range(inst.s)}
        for i in range(inst.n):
            for j in range(inst.t):
                if inst.B_list[i][r][j]:
                    coefs[xs[i][j]] = inst.B_list[i][r][j]
        lp.add_eq(coefs, inst.b0[r])
    for i in range(inst.n):
        for r in range(inst.d):
            coefs = {x0[j]: inst.C_list[i][r][j] for j in range(inst.s)}
            coefs.update({xs[i][j]: inst.D_list[i][r][j] for j in range(inst.t)})
            lp.add_eq(coefs, inst.b_list[i][r])
    return lp, x0


def x0_box(inst):
    """LP bounds on each x0 coordinate: list of (lo, hi) with None for infinite,
    or None when the relaxation is infeasible."""
    lp, x0 = relaxation_lp(inst)
    feas = solve_lp_exact(lp.with_objective([0] * lp.num_vars))
    if feas.status == INFEASIBLE:
        return None
    box = []
    for j in x0:
        bounds = []
        for sign in (1, -1):
            obj = [0] * lp.num_vars
            obj[j] = sign
            res = solve_lp_exact(lp.with_objective(obj))
            bounds.append(None if res.status == UNBOUNDED else sign * as_rational(res.value))
        lo, hi = bounds
        box.append((0 if lo is None else math.ceil(lo), None if hi is None else math.floor(hi)))
    return box


# ------------------------------------------------------------ guesses

@dataclass(frozen=True)
class Guess:
    r: tuple
    pv: tuple
    witness: tuple


def guesses_from_box(inst, scheme, lifted, box):
    found = {}
    ranges = [range(lo, hi + 1) for lo, hi in box]
    for x0 in itertools.product(*ranges):
        r = tuple(x % scheme.M for x in x0)
        pv = face_of(x0, lifted.hyperplanes)
        if (r, pv) not in found:
            found[(r, pv)] = Guess(r, pv, x0)
    faces = {pv for _, pv in found}
    return [found[k] for k in sorted(found, key=lambda k: (k[0], tuple(int(p) for p in k[1])))], len(faces)


def guesses_from_faces(inst, scheme, lifted, opts, box=None):
    domain = []
    if box:
        for j, (lo, hi) in enumerate(box):
            e = tuple(1 if k == j else 0 for k in range(inst.s))
            if lo is not None:
                domain.append((tuple(-a for a in e), -lo))
            if hi is not None:
                domain.append((e, hi))
    arr = enumerate_faces(lifted.hyperplanes, inst.s, domain, opts.face_cap)
    out = []
    for r in itertools.product(range(scheme.M), repeat=inst.s):
        for pv, w in arr.faces:
            out.append(Guess(r, pv, w))
    return out, len(arr.faces)


# ------------------------------------------------------------ configuration ILP

class _Tables:
    """Per-matrix caches of nonnegative Graver elements and base solutions."""

    def __init__(self):
        self.graver = {}
        self.base = {}

    def graver_nonneg(self, D, t):
        if D not in self.graver:
            self.graver[D] = tuple(graver.nonneg_graver(D, t=t))
        return self.graver[D]

    def base_solutions(self, D, t, rhs):
        key = (D, rhs)
        if key not in self.base:
            res = graver.base_solutions(D, rhs, t=t, graver_nonneg=self.graver_nonneg(D, t))
            self.base[key] = res.solutions
        return self.base[key]


def prepare_bricks(inst, scheme, lifted, guess, tables):
    """Per-brick maps for one guess; None if some brick domain is empty."""
    bricks = []
    count = len(scheme.hyperplanes)
    for i in range(inst.n):
        C, b, D = inst.C_list[i], inst.b_list[i], inst.D_list[i]
        w = tuple(normalize(as_rational(bk) - dot(row, guess.witness)) for bk, row in zip(b, C))
        ri = tuple((bk - dot(row, guess.r)) % scheme.M for bk, row in zip(b, C))
        pos = brick_position(lifted, guess.pv, i, count)
        amap = build_affine_map(scheme, ri, w, pos)
        if amap is None:
            return None
        rows = aggregated_rows(amap)
        bd = BrickData(i, tables.graver_nonneg(D, inst.t), ri, pos, amap, rows, {})
        for bp in rows:
            bd.tables[bp] = tables.base_solutions(D, inst.t, bp)
        bricks.append(bd)
    return bricks


def build_config_ilp(inst, scheme, bricks, guess, lifted=None, box=None, p_kind=CONTINUOUS,
                     q_mode="vector"):
    """The configuration program for one (r, F) guess.

    With ``q_mode="vector"`` there is one integer count per base solution x'
    and per Graver element g.  With ``q_mode="image"`` counts are merged by
    their image under B, which is all the coupling rows can see; the
    continuous block keeps one aggregation row and at most one decomposition
    row per column, so it stays totally unimodular.
    Returns None when the face rows contradict the v-box.
    """
    B = inst.B_list[0]

    def key_of(vec):
        return matvec(B, vec) if q_mode == "image" else vec

    M, r, s = scheme.M, guess.r, inst.s
    lp = LinearProgram()
    v_index = []
    for j in range(s):
        lo, hi = (0, None) if box is None else box[j]
        vlo = max(0, -((r[j] - lo) // M))  # ceil((lo - r) / M)
        vhi = None if hi is None else (hi - r[j]) // M
        if vhi is not None and vhi < vlo:
            return None
        v_index.append(lp.add_var(f"v{j}", INTEGER, vlo, vhi, cost=M * inst.c0[j]))
    constant = dot(inst.c0, r)

    q_index, g_index = {}, {}
    for bd in bricks:
        for bp, sols in bd.tables.items():
            for x in sols:
                k = key_of(x)
                if k not in q_index:
                    q_index[k] = lp.add_var(f"q{k}", INTEGER)
        for g in bd.graver_nonneg:
            k = key_of(g)
            target = q_index if q_mode == "image" else g_index
            if k not in target:
                target[k] = lp.add_var(f"qg{k}", INTEGER)

    p_index, pg_index = {}, {}
    for bd in bricks:
        c = inst.c_list[bd.index]
        for bp, sols in bd.tables.items():
            for x in sols:
                p_index[(bd.index, bp, x)] = lp.add_var(f"p{bd.index}{bp}{x}", p_kind, cost=dot(c, x))
        for g in bd.graver_nonneg:
            pg_index[(bd.index, g)] = lp.add_var(f"pg{bd.index}{g}", p_kind, cost=dot(c, g))

    # (2) coupling rows
    for row in range(inst.m):
        coefs = {}
        for j in range(s):
            coefs[v_index[j]] = M * inst.A[row][j]
        for x, k in q_index.items():
            coefs[k] = x[row] if q_mode == "image" else dot(B[row], x)
        for g, k in g_index.items():
            coefs[k] = dot(B[row], g)
        lp.add_eq(coefs, inst.b0[row] - dot(inst.A[row], r))
    prog = ConfigurationProgram(lp, r, M, v_index, q_index, g_index, p_index, pg_index, constant=constant)
    # (3) q_x' = sum of p  (in image mode the Graver p's join the row of their image)
    members3 = {k: [] for k in q_index}
    for (i, bp, x), pk in p_index.items():
        members3[key_of(x)].append(pk)
    members4 = {k: [] for k in g_index}
    for (i, g), pk in pg_index.items():
        (members3 if q_mode == "image" else members4)[key_of(g)].append(pk)
    for k, qk in q_index.items():
        coefs = {qk: 1}
        coefs.update({pk: -1 for pk in members3[k]})
        prog.rows3[k] = len(lp.eq_rows)
        lp.add_eq(coefs, 0)
    # (4) q_g = sum of p_g
    for k, qk in g_index.items():
        coefs = {qk: 1}
        coefs.update({pk: -1 for pk in members4[k]})
        prog.rows4[k] = len(lp.eq_rows)
        lp.add_eq(coefs, 0)
    # (5) sum_x' p = Lambda (b_i - C_i (r + M v)) + mu
    for bd in bricks:
        C, b = inst.C_list[bd.index], inst.b_list[bd.index]
        base_rhs = tuple(bk - dot(row, r) for bk, row in zip(b, C))
        for bp, (lam, mu) in bd.rows.items():
            coefs = {p_index[(bd.index, bp, x)]: 1 for x in bd.tables[bp]}
            for j in range(s):
                coef = M * sum(as_rational(lam[k]) * C[k][j] for k in range(inst.d))
                if coef:
                    coefs[v_index[j]] = normalize(coef)
            rhs = normalize(sum(as_rational(lam[k]) * base_rhs[k] for k in range(inst.d)) + as_rational(mu))
            prog.rows5[(bd.index, bp)] = len(lp.eq_rows)
            lp.add_eq(coefs, rhs)
    # face rows: a.(r + M v) relation beta, integer data
    if lifted is not None and s:
        bounds = lp.bounds()
        for h, p in zip(lifted.hyperplanes, guess.pv):
            coefs = {v_index[j]: M * h.a[j] for j in range(s) if h.a[j]}
            rhs = h.beta - dot(h.a, r)
            if p == Pos.EQ:
                lp.add_eq(coefs, rhs)
                continue
            if p == Pos.GT:
                coefs = {k: -a for k, a in coefs.items()}
                rhs = -rhs
            rhs -= 1
            lo, hi = _row_range(coefs, bounds)
            if hi is not None and hi <= rhs:
                continue  # implied by the v-box
            if lo is not None and lo > rhs:
                return None
            lp.add_le(coefs, rhs)
    return prog


def _row_range(coefs, bounds):
    lo = hi = 0
    for k, a in coefs.items():
        vl, vu = bounds[k]
        if a > 0:
            lo = None if lo is None or vl is None else lo + a * vl
            hi = None if hi is None or vu is None else hi + a * vu
        else:
            lo = None if lo is None or vu is None else lo + a * vu
            hi = None if hi is None or vl is None else hi + a * vl
    return lo, hi


def reconstruct(inst, prog, result):
    """Turn an optimal MILP assignment into a verified 4-block solution."""
    integer_vars = [k for k, v in enumerate(prog.lp.variables) if v.kind == INTEGER]
    fixed = {k: int(as_rational(result.assignment[k])) for k in integer_vars}
    restored = integral_vertex_restore(prog.lp, fixed)
    x = restored.assignment
    x0 = tuple(prog.r[j] + prog.M * int(x[prog.v_index[j]]) for j in range(inst.s))
    xs = [[0] * inst.t for _ in range(inst.n)]
    for (i, bp, xp), k in prog.p_index.items():
        mult = int(x[k])
        if mult:
            for j in range(inst.t):
                xs[i][j] += mult * xp[j]
    for (i, g), k in prog.pg_index.items():
        mult = int(x[k])
        if mult:
            for j in range(inst.t):
                xs[i][j] += mult * g[j]
    sol = make_solution(inst, x0, xs)
    ok, report = check_solution(inst, sol)
    if not ok:
        raise ReconstructionMismatch(report)
    expected = normalize(as_rational(restored.value) + prog.constant)
    if sol.objective != expected:
        raise ReconstructionMismatch(f"objective {sol.objective} != program value {expected}")
    return sol


# ------------------------------------------------------------ driver

def _pad_local_rows(inst):
    """Give instances with d = 0 a trivial local row so the scheme exists."""
    if inst.d > 0:
        return inst
    return FourBlockInstance(
        s=inst.s, t=inst.t, d=1, m=inst.m, n=inst.n, A=inst.A, B_list=inst.B_list,
        C_list=tuple(((0,) * inst.s,) for _ in range(inst.n)),
        D_list=tuple(((0,) * inst.t,) for _ in range(inst.n)),
        b0=inst.b0, b_list=tuple((0,) for _ in range(inst.n)), c0=inst.c0, c_list=inst.c_list,
    )


def solve(inst, options=None):
    opts = options or SolveOptions()
    start = time.perf_counter()
    if not inst.b_uniform:
        reduced, back = reduce_to_b_uniform(inst)
        status = solve(reduced, opts)
        status.stats["reduced"] = True
        if status.solution is not None:
            status.solution = lift_solution(inst, back, status.solution)
            ok, report = check_solution(inst, status.solution)
            if not ok:
                raise ReconstructionMismatch(report)
        status.stats["wall_time"] = time.perf_counter() - start
        return status

    work = _pad_local_rows(inst)
    delta = max(work.delta, 1)
    scheme = build_scheme(work.d, delta, opts.t_dec, opts.modulus)
    lifted = lift_hyperplanes(work, scheme)
    stats = {"scheme_hyperplanes": len(scheme.hyperplanes), "lifted_hyperplanes": len(lifted.hyperplanes),
             "modulus": scheme.M, "t_dec": scheme.t_dec, "faces": 0, "guesses": 0,
             "guesses_solved": 0, "milp_nodes": 0}

    box = x0_box(work)
    if box is None:
        stats["wall_time"] = time.perf_counter() - start
        stats["presolve"] = "relaxation infeasible"
        return SolveStatus("INFEASIBLE", None, stats)
    finite = all(hi is not None for _, hi in box)
    npoints = math.prod(hi - lo + 1 for lo, hi in box) if finite else None
    if opts.domain_box and finite and npoints <= opts.box_point_cap:
        if npoints <= 0:
            stats["wall_time"] = time.perf_counter() - start
            return SolveStatus("INFEASIBLE", None, stats)
        guesses, nfaces = guesses_from_box(work, scheme, lifted, box)
        stats["guess_mode"] = "box"
    else:
        guesses, nfaces = guesses_from_faces(work, scheme, lifted, opts, box if opts.domain_box else None)
        stats["guess_mode"] = "faces"
    stats["faces"] = nfaces
    stats["guesses"] = len(guesses)
    v_box = box if opts.domain_box else None

    tables = _Tables()

    def run(guess):
        bricks = prepare_bricks(work, scheme, lifted, guess, tables)
        if bricks is None:
            return None
        prog = build_config_ilp(work, scheme, bricks, guess, lifted, v_box, opts.p_kind, opts.q_mode)
        if prog is None:
            return None
        res = solve_milp(prog.lp, opts.node_cap)
        return prog, res

    if opts.threads > 1:
        with ThreadPoolExecutor(opts.threads) as ex:
            outcomes = list(ex.map(run, guesses))
    else:
        outcomes = []
        for g in guesses:
            out = run(g)
            outcomes.append(out)
            if out is not None and out[1].status == UNBOUNDED:
                break

    best = None
    unbounded = False
    for out in outcomes:
        if out is None:
            continue
        prog, res = out
        stats["guesses_solved"] += 1
        stats["milp_nodes"] += res.nodes
        if res.status == UNBOUNDED:
            unbounded = True
            break
        if res.status == OPTIMAL:
            value = normalize(as_rational(res.value) + prog.constant)
            if best is None or value < best[0]:
                best = (value, prog, res)
    stats["wall_time"] = time.perf_counter() - start
    if unbounded:
        return SolveStatus("UNBOUNDED", None, stats)
    if best is None:
        return SolveStatus("INFEASIBLE", None, stats)
    sol = reconstruct(work, best[1], best[2])
    if work is not inst:
        sol = make_solution(inst, sol.x0, sol.x_bricks)
    stats["wall_time"] = time.perf_counter() - start
    return SolveStatus("OPTIMAL", sol, stats)
