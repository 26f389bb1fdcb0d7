"""Graver bases, nonnegative Graver elements and minimal (base) solutions.

All three reduce to minimal nonnegative solutions of linear Diophantine
systems, computed with the Contejean-Devie completion procedure: grow a
vector one unit at a time, only along columns that point back towards zero
(<D x - b, D e_j> < 0), and never grow past an already found solution.
"""

from collections import Counter
from dataclasses import dataclass

from .errors import BoundTooSmall, ParamsTooLarge
from .exactmath import matvec, norm_inf, vsub

DEFAULT_NODE_CAP = 2_000_000


@dataclass(frozen=True)
class GraverBasis:
    D: tuple
    elements: tuple


@dataclass(frozen=True)
class BaseSolutionSet:
    D: tuple
    rhs: tuple
    solutions: tuple


def _columns(D, t):
    return [tuple(row[j] for row in D) for j in range(t)]


def _dominates(x, y):
    return all(a >= b for a, b in zip(x, y))


def _dead(residual, sign_rows):
    # residual row r can never return to zero if no column moves it back
    for r, val in enumerate(residual):
        has_neg, has_pos = sign_rows[r]
        if (val > 0 and not has_neg) or (val < 0 and not has_pos):
            return True
    return False


def _cd_search(D, t, rhs, start_nodes, prune_with=(), bound=None, node_cap=DEFAULT_NODE_CAP):
    """Minimal x >= 0 with D x = rhs reachable from ``start_nodes``.

    ``prune_with`` lists vectors no answer can dominate.  ``bound`` caps the
    infinity norm of explored vectors; hitting it raises BoundTooSmall.
    """
    cols = _columns(D, t)
    rows = len(D)
    sign_rows = [(any(a < 0 for a in row), any(a > 0 for a in row)) for row in D]
    found = []
    blockers = list(prune_with)
    frontier = {}
    for x in start_nodes:
        frontier[x] = tuple(a - b for a, b in zip(matvec(D, x), rhs)) if rows else ()
    explored = 0
    while frontier:
        new_solutions = [x for x, res in frontier.items() if not any(res)]
        for x in sorted(new_solutions):
            found.append(x)
            blockers.append(x)
        nxt = {}
        for x, res in frontier.items():
            if not any(res):
                continue
            if _dead(res, sign_rows):
                continue
            for j, col in enumerate(cols):
                if sum(a * b for a, b in zip(res, col)) >= 0:
                    continue
                y = x[:j] + (x[j] + 1,) + x[j + 1:]
                if y in nxt:
                    continue
                if any(_dominates(y, z) for z in blockers):
                    continue
                if bound is not None and y[j] > bound:
                    raise BoundTooSmall(f"search passed the cutoff {bound}")
                nxt[y] = tuple(a + b for a, b in zip(res, col))
                explored += 1
                if explored > node_cap:
                    raise ParamsTooLarge(f"Diophantine search exceeded {node_cap} nodes")
        frontier = nxt
    return found


def _hilbert_basis(D, t, node_cap=DEFAULT_NODE_CAP):
    """Minimal nonzero x >= 0 with D x = 0."""
    rows = len(D)
    units = [tuple(1 if k == j else 0 for k in range(t)) for j in range(t)]
    return _cd_search(D, t, (0,) * rows, units, node_cap=node_cap)


def _width(D):
    return len(D[0]) if D else 0


def graver_basis(D, delta=None, t=None, node_cap=DEFAULT_NODE_CAP):
    """Conformally minimal nonzero integer kernel elements of D.

    Uses the correspondence between the Graver basis of D and the Hilbert
    basis of ker [D | -D] minus the trivial pairs (e_j, e_j).
    """
    t = _width(D) if t is None else t
    D2 = tuple(tuple(row) + tuple(-a for a in row) for row in D)
    elems = []
    for uv in _hilbert_basis(D2, 2 * t, node_cap):
        u, v = uv[:t], uv[t:]
        if any(a and b for a, b in zip(u, v)):
            continue
        elems.append(vsub(u, v))
    return GraverBasis(tuple(tuple(r) for r in D), tuple(sorted(elems)))


def nonneg_graver(D, delta=None, t=None, node_cap=DEFAULT_NODE_CAP):
    """Graver elements lying in the nonnegative orthant.

    These are exactly the minimal nonzero nonnegative kernel vectors, so they
    are computed directly rather than by filtering the full basis.
    """
    t = _width(D) if t is None else t
    return sorted(_hilbert_basis(D, t, node_cap))


def base_bound(D, rhs, delta=None):
    d = max(len(D), 1)
    delta = max((abs(a) for row in D for a in row), default=0) if delta is None else delta
    return (2 * d * (delta + norm_inf(rhs))) ** (d + 1)


def base_solutions(D, rhs, delta=None, t=None, graver_nonneg=None, bound=None,
                   node_cap=DEFAULT_NODE_CAP):
    """All componentwise-minimal x >= 0 with D x = rhs."""
    t = _width(D) if t is None else t
    rhs = tuple(rhs)
    if graver_nonneg is None:
        graver_nonneg = nonneg_graver(D, t=t, node_cap=node_cap)
    if bound is None:
        bound = max(base_bound(D, rhs, delta), 1)
    sols = _cd_search(D, t, rhs, [(0,) * t], prune_with=graver_nonneg,
                      bound=bound, node_cap=node_cap)
    return BaseSolutionSet(tuple(tuple(r) for r in D), rhs, tuple(sorted(sols)))


def decompose_solution(D, x, rhs=None, delta=None, graver_nonneg=None):
    """Split x into a base solution plus nonnegative Graver elements."""
    t = len(x)
    if graver_nonneg is None:
        graver_nonneg = nonneg_graver(D, t=t)
    x = tuple(x)
    mult = Counter()
    changed = True
    while changed:
        changed = False
        for g in graver_nonneg:
            if _dominates(x, g):
                x = vsub(x, g)
                mult[tuple(g)] += 1
                changed = True
                break
    return x, dict(mult)
