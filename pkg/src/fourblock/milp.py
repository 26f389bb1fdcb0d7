"""Exact rational simplex (Bland's rule) and best-first branch-and-bound.

Arithmetic runs on ``gmpy2.mpq`` internally; everything that leaves the
module is an ``int`` or :class:`fractions.Fraction`.
"""

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpq

from .errors import NodeBudgetExceeded, NotIntegral
from .exactmath import as_rational, normalize

INTEGER = "INTEGER"
CONTINUOUS = "CONTINUOUS"

OPTIMAL = "OPTIMAL"
INFEASIBLE = "INFEASIBLE"
UNBOUNDED = "UNBOUNDED"

_ZERO = mpq(0)


def _q(x):
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _frac(x):
    return normalize(Fraction(int(x.numerator), int(x.denominator)))


@dataclass
class Variable:
    name: str
    kind: str = CONTINUOUS
    lb: object = 0      # None means -infinity
    ub: object = None   # None means +infinity


@dataclass
class LinearProgram:
    """min c.x  s.t.  eq rows (=), le rows (<=), variable bounds.

    Rows are sparse ``({var_index: coef}, rhs)`` pairs.
    """

    variables: list = field(default_factory=list)
    eq_rows: list = field(default_factory=list)
    le_rows: list = field(default_factory=list)
    objective: list = field(default_factory=list)

    def add_var(self, name, kind=CONTINUOUS, lb=0, ub=None, cost=0):
        self.variables.append(Variable(name, kind, lb, ub))
        self.objective.append(cost)
        return len(self.variables) - 1

    def add_eq(self, coefs, rhs):
        self.eq_rows.append(({j: a for j, a in coefs.items() if a}, rhs))

    def add_le(self, coefs, rhs):
        self.le_rows.append(({j: a for j, a in coefs.items() if a}, rhs))

    @property
    def num_vars(self):
        return len(self.variables)

    def bounds(self):
        return [(v.lb, v.ub) for v in self.variables]

    def value(self, x):
        return normalize(sum(as_rational(c) * as_rational(xj) for c, xj in zip(self.objective, x)))

    def is_feasible(self, x, bounds=None):
        """Exact check of every row, bound and integrality requirement."""
        bounds = bounds or self.bounds()
        for v, (lb, ub), xj in zip(self.variables, bounds, x):
            xj = as_rational(xj)
            if lb is not None and xj < lb:
                return False
            if ub is not None and xj > ub:
                return False
            if v.kind == INTEGER and xj.denominator != 1:
                return False
        for coefs, rhs in self.eq_rows:
            if sum(a * as_rational(x[j]) for j, a in coefs.items()) != rhs:
                return False
        for coefs, rhs in self.le_rows:
            if sum(a * as_rational(x[j]) for j, a in coefs.items()) > rhs:
                return False
        return True

    def with_kinds(self, kinds):
        """Copy with some variable kinds replaced (``{index: kind}``)."""
        vs = [Variable(v.name, kinds.get(j, v.kind), v.lb, v.ub) for j, v in enumerate(self.variables)]
        return LinearProgram(vs, list(self.eq_rows), list(self.le_rows), list(self.objective))

    def with_objective(self, objective):
        return LinearProgram(list(self.variables), list(self.eq_rows), list(self.le_rows), list(objective))


@dataclass
class MilpResult:
    status: str
    assignment: tuple = None
    value: object = None
    ray: tuple = None
    nodes: int = 0
    pivots: int = 0


# ------------------------------------------------------------------ simplex

class _Tableau:
    """Dense tableau over mpq for  min c.y, A y = b, y >= 0."""

    def __init__(self, rows, rhs, costs, slack_basis):
        # rows: list of dense mpq lists; rhs: list; slack_basis: per row a
        # column index usable as initial basic variable, or None
        self.ncols = len(costs)
        self.T = []
        self.basis = []
        self.art_start = self.ncols
        n_art = 0
        for row, b, sb in zip(rows, rhs, slack_basis):
            if b < 0:
                row = [-a for a in row]
                b = -b
                sb = None
            self.T.append(row + [b])
            if sb is None:
                self.basis.append(self.ncols + n_art)
                n_art += 1
            else:
                self.basis.append(sb)
        width = self.ncols + n_art
        art = 0
        for i, row in enumerate(self.T):
            b = row.pop()
            row.extend([_ZERO] * n_art)
            if self.basis[i] >= self.ncols:
                row[self.ncols + art] = mpq(1)
                art += 1
            row.append(b)
        self.width = width
        self.costs = list(costs) + [_ZERO] * n_art
        self.pivots = 0

    def _reduced(self, costs):
        d = list(costs) + [_ZERO]
        for i, row in enumerate(self.T):
            cb = costs[self.basis[i]]
            if cb:
                for j, a in enumerate(row):
                    if a:
                        d[j] -= cb * a
        return d

    def _pivot(self, r, c, objs):
        pr = self.T[r]
        piv = pr[c]
        if piv != 1:
            pr = [a / piv for a in pr]
            self.T[r] = pr
        nz = [j for j, a in enumerate(pr) if a]
        for i, row in enumerate(self.T):
            if i != r:
                f = row[c]
                if f:
                    for j in nz:
                        row[j] -= f * pr[j]
        for d in objs:
            f = d[c]
            if f:
                for j in nz:
                    d[j] -= f * pr[j]
        self.basis[r] = c
        self.pivots += 1

    def _run(self, d, allowed, objs):
        """Bland's rule.  Returns None at optimum, else the unbounded column."""
        while True:
            c = next((j for j in range(self.width) if allowed[j] and d[j] < 0), None)
            if c is None:
                return None
            best, r = None, None
            for i, row in enumerate(self.T):
                a = row[c]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[r]):
                        best, r = ratio, i
            if r is None:
                return c
            self._pivot(r, c, objs)

    def solve(self):
        """Returns (status, y, ray)."""
        n_art = self.width - self.ncols
        d2 = self._reduced(self.costs)
        if n_art:
            c1 = [_ZERO] * self.ncols + [mpq(1)] * n_art
            d1 = self._reduced(c1)
            allowed = [True] * self.width
            self._run(d1, allowed, [d1, d2])
            if -d1[-1] != 0:
                return INFEASIBLE, None, None
            # drive zero-level artificials out of the basis
            i = 0
            while i < len(self.T):
                if self.basis[i] >= self.ncols:
                    row = self.T[i]
                    c = next((j for j in range(self.ncols) if row[j] != 0), None)
                    if c is None:
                        del self.T[i]
                        del self.basis[i]
                        continue
                    self._pivot(i, c, [d2])
                i += 1
        allowed = [j < self.ncols for j in range(self.width)]
        c = self._run(d2, allowed, [d2])
        y = [_ZERO] * self.ncols
        for i, bv in enumerate(self.basis):
            if bv < self.ncols:
                y[bv] = self.T[i][-1]
        if c is not None:
            ray = [_ZERO] * self.ncols
            ray[c] = mpq(1)
            for i, bv in enumerate(self.basis):
                if bv < self.ncols:
                    ray[bv] = -self.T[i][c]
            return UNBOUNDED, y, ray
        return OPTIMAL, y, None


def solve_lp_exact(lp, ignore_integrality=True, bounds=None):
    """Solve the continuous relaxation exactly.

    ``bounds`` optionally overrides the per-variable (lb, ub) pairs.  Fixed
    variables (lb == ub) are substituted out before the simplex runs.
    """
    bounds = bounds if bounds is not None else lp.bounds()
    n = lp.num_vars
    # map x_j = const_j + sum(sign * y_k)
    const = [_ZERO] * n
    terms = [[] for _ in range(n)]
    ncols = 0
    bound_rows = []  # (y index, upper)
    for j, (lb, ub) in enumerate(bounds):
        if lb is not None and ub is not None:
            if lb > ub:
                return MilpResult(INFEASIBLE)
            if lb == ub:
                const[j] = _q(lb)
                continue
        if lb is not None:
            const[j] = _q(lb)
            terms[j].append((ncols, 1))
            if ub is not None:
                bound_rows.append((ncols, _q(ub) - _q(lb)))
            ncols += 1
        elif ub is not None:
            const[j] = _q(ub)
            terms[j].append((ncols, -1))
            ncols += 1
        else:
            terms[j].append((ncols, 1))
            terms[j].append((ncols + 1, -1))
            ncols += 2
    n_struct = ncols
    n_slack = len(lp.le_rows) + len(bound_rows)
    total = n_struct + n_slack

    rows, rhs, slack_basis = [], [], []

    def expand(coefs, b):
        row = [_ZERO] * total
        b = _q(b)
        for j, a in coefs.items():
            a = _q(a)
            b -= a * const[j]
            for k, sign in terms[j]:
                row[k] += a if sign > 0 else -a
        return row, b

    for coefs, b in lp.eq_rows:
        row, b = expand(coefs, b)
        if not any(row):
            if b != 0:
                return MilpResult(INFEASIBLE)
            continue
        rows.append(row)
        rhs.append(b)
        slack_basis.append(None)
    s = n_struct
    for coefs, b in lp.le_rows:
        row, b = expand(coefs, b)
        row[s] = mpq(1)
        rows.append(row)
        rhs.append(b)
        slack_basis.append(s)
        s += 1
    for k, u in bound_rows:
        row = [_ZERO] * total
        row[k] = mpq(1)
        row[s] = mpq(1)
        rows.append(row)
        rhs.append(u)
        slack_basis.append(s)
        s += 1

    costs = [_ZERO] * total
    offset = _ZERO
    for j, c in enumerate(lp.objective):
        c = _q(c)
        if c:
            offset += c * const[j]
            for k, sign in terms[j]:
                costs[k] += c if sign > 0 else -c

    tab = _Tableau(rows, rhs, costs, slack_basis)
    status, y, ray_y = tab.solve()
    if status == INFEASIBLE:
        return MilpResult(INFEASIBLE, pivots=tab.pivots)

    def back(vec, with_const):
        out = []
        for j in range(n):
            v = const[j] if with_const else _ZERO
            for k, sign in terms[j]:
                v += vec[k] if sign > 0 else -vec[k]
            out.append(_frac(v))
        return tuple(out)

    x = back(y, True)
    if status == UNBOUNDED:
        return MilpResult(UNBOUNDED, assignment=x, ray=back(ray_y, False), pivots=tab.pivots)
    return MilpResult(OPTIMAL, assignment=x, value=lp.value(x), pivots=tab.pivots)


# ---------------------------------------------------------- branch and bound

def _integer_bounds(lp, bounds):
    out = []
    for v, (lb, ub) in zip(lp.variables, bounds):
        if v.kind == INTEGER:
            lb = None if lb is None else math.ceil(as_rational(lb))
            ub = None if ub is None else math.floor(as_rational(ub))
        out.append((lb, ub))
    return out


def _most_fractional(lp, x):
    best, best_j = None, None
    for j, v in enumerate(lp.variables):
        if v.kind == INTEGER:
            f = as_rational(x[j])
            frac = f - math.floor(f)
            if frac:
                score = abs(frac - Fraction(1, 2))
                if best is None or score < best:
                    best, best_j = score, j
    return best_j


def _gcd_infeasible(lp, bounds):
    # an equality over integer variables with integer coefficients needs
    # gcd(coefs) | rhs - fixed part
    for coefs, rhs in lp.eq_rows:
        g, rest = 0, as_rational(rhs)
        for j, a in coefs.items():
            a = as_rational(a)
            lb, ub = bounds[j]
            if lp.variables[j].kind != INTEGER or a.denominator != 1:
                break
            if lb is not None and lb == ub:
                rest -= a * lb
            else:
                g = math.gcd(g, a.numerator)
        else:
            if rest.denominator != 1 or (g == 0 and rest != 0) or (g and rest.numerator % g):
                return True
    return False


def solve_milp(lp, node_cap=100000, bounds=None):
    """Exact optimum over assignments integral on INTEGER variables."""
    bounds = _integer_bounds(lp, bounds if bounds is not None else lp.bounds())
    if _gcd_infeasible(lp, bounds):
        return MilpResult(INFEASIBLE)
    root = solve_lp_exact(lp, bounds=bounds)
    pivots = root.pivots
    if root.status == INFEASIBLE:
        return MilpResult(INFEASIBLE, nodes=1, pivots=pivots)
    if root.status == UNBOUNDED:
        # rational data: the MILP is unbounded iff it has a feasible point
        probe = solve_milp(lp.with_objective([0] * lp.num_vars), node_cap, bounds)
        if probe.status == OPTIMAL:
            return MilpResult(UNBOUNDED, assignment=probe.assignment, ray=root.ray,
                              nodes=probe.nodes + 1, pivots=pivots + probe.pivots)
        return MilpResult(INFEASIBLE, nodes=probe.nodes + 1, pivots=pivots + probe.pivots)

    counter = itertools.count()
    heap = [(root.value, next(counter), bounds, root)]
    nodes = 0
    while heap:
        _, _, bnds, res = heapq.heappop(heap)
        nodes += 1
        if nodes > node_cap:
            raise NodeBudgetExceeded(f"branch-and-bound exceeded {node_cap} nodes")
        j = _most_fractional(lp, res.assignment)
        if j is None:
            return MilpResult(OPTIMAL, res.assignment, res.value, nodes=nodes, pivots=pivots)
        xj = as_rational(res.assignment[j])
        lb, ub = bnds[j]
        for new in ((lb, math.floor(xj)), (math.ceil(xj), ub)):
            child = list(bnds)
            child[j] = new
            if _gcd_infeasible(lp, child):
                continue
            sub = solve_lp_exact(lp, bounds=child)
            pivots += sub.pivots
            if sub.status == OPTIMAL:
                heapq.heappush(heap, (sub.value, next(counter), child, sub))
    return MilpResult(INFEASIBLE, nodes=nodes, pivots=pivots)


def integral_vertex_restore(lp, fixed):
    """Fix the integer variables and return a basic optimum of the rest.

    ``fixed`` maps variable index to its integer value.  Raises
    :class:`NotIntegral` if the continuous part of the vertex is fractional,
    which can only happen when the continuous columns are not TU or the
    residual right-hand side is fractional.
    """
    bounds = lp.bounds()
    for j, val in fixed.items():
        bounds[j] = (val, val)
    res = solve_lp_exact(lp, bounds=bounds)
    if res.status != OPTIMAL:
        raise NotIntegral(f"restricted LP is {res.status}")
    for j, xj in enumerate(res.assignment):
        if as_rational(xj).denominator != 1:
            raise NotIntegral(f"variable {lp.variables[j].name} = {xj}")
    return res
