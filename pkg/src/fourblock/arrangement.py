"""Exact hyperplane arrangements.

A face is described by a position vector: one symbol in {LT, EQ, GT} per
hyperplane.  Feasibility of a (partially open) face is an LP that maximises a
common slack on the strict relations.
"""

import itertools
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction

from .errors import FaceBudgetExceeded
from .exactmath import as_rational, dot, matvec, normalize, transpose
from .milp import OPTIMAL, UNBOUNDED, LinearProgram, solve_lp_exact

DEFAULT_FACE_CAP = 200000


class Pos(IntEnum):
    LT = -1
    EQ = 0
    GT = 1

    def __str__(self):
        return {-1: "<", 0: "=", 1: ">"}[int(self)]


@dataclass(frozen=True)
class Hyperplane:
    a: tuple
    beta: object

    @property
    def degenerate(self):
        return not any(self.a)


@dataclass
class Arrangement:
    hyperplanes: list
    dim: int
    faces: list  # (position vector, witness)

    def position_vectors(self):
        return [pv for pv, _ in self.faces]


def position_of(x, h):
    val = dot(h.a, x) - h.beta
    return Pos.LT if val < 0 else Pos.GT if val > 0 else Pos.EQ


def face_of(x, H):
    return tuple(position_of(x, h) for h in H)


def face_feasible(pv, H, dim, domain=()):
    """A point realising ``pv`` on ``H`` (and a.x <= beta for each domain row).

    Returns the witness as a tuple of exact rationals, or None.
    """
    lp = LinearProgram()
    xs = [lp.add_var(f"x{k}", lb=None) for k in range(dim)]
    strict = any(p != Pos.EQ for p in pv)
    eps = lp.add_var("eps", lb=0, ub=1, cost=-1) if strict else None
    for p, h in zip(pv, H):
        coefs = {xs[k]: a for k, a in enumerate(h.a) if a}
        if p == Pos.EQ:
            lp.add_eq(coefs, h.beta)
        elif p == Pos.LT:
            coefs[eps] = 1
            lp.add_le(coefs, h.beta)
        else:
            coefs = {j: -a for j, a in coefs.items()}
            coefs[eps] = 1
            lp.add_le(coefs, -h.beta)
    for a, beta in domain:
        lp.add_le({xs[k]: c for k, c in enumerate(a) if c}, beta)
    res = solve_lp_exact(lp)
    if res.status not in (OPTIMAL, UNBOUNDED):
        return None
    if strict and res.status == OPTIMAL and res.assignment[eps] <= 0:
        return None
    w = tuple(normalize(v) for v in res.assignment[:dim])
    if face_of(w, H) != tuple(pv):
        # unbounded status returns a feasible point which might sit at eps=0
        return None
    return w


def _in_domain(x, domain):
    return all(dot(a, x) <= beta for a, beta in domain)


def _faces_1d(H, domain, face_cap):
    pts = set()
    for h in H:
        if not h.degenerate:
            pts.add(Fraction(as_rational(h.beta)) / as_rational(h.a[0]))
    for a, beta in domain:
        if a[0]:
            pts.add(Fraction(as_rational(beta)) / as_rational(a[0]))
    pts = sorted(pts)
    if not pts:
        cands = [Fraction(0)]
    else:
        cands = [pts[0] - 1]
        for lo, hi in zip(pts, pts[1:]):
            cands += [lo, (lo + hi) / 2]
        cands += [pts[-1], pts[-1] + 1]
    faces, seen = [], set()
    for c in cands:
        x = (normalize(c),)
        if not _in_domain(x, domain):
            continue
        pv = face_of(x, H)
        if pv not in seen:
            seen.add(pv)
            faces.append((pv, x))
            if len(faces) > face_cap:
                raise FaceBudgetExceeded(f"more than {face_cap} faces")
    return faces


def enumerate_faces(H, dim, domain=(), face_cap=DEFAULT_FACE_CAP, method="auto"):
    """All nonempty faces of the arrangement, intersected with ``domain``.

    ``domain`` is a list of closed half-spaces ``(a, beta)`` meaning
    a.x <= beta.  The generic method inserts hyperplanes one at a time; a
    face keeps the symbol its witness already has and the other two symbols
    are tested by LP.  For dim == 1 the faces are read off the sorted
    breakpoints directly.
    """
    H = list(H)
    domain = list(domain)
    if dim == 1 and method == "auto":
        return Arrangement(H, dim, _faces_1d(H, domain, face_cap))
    start = face_feasible((), [], dim, domain)
    if start is None:
        return Arrangement(H, dim, [])
    faces = [((), start)]
    for k, h in enumerate(H):
        prefix = H[:k + 1]
        nxt = []
        for pv, w in faces:
            here = position_of(w, h)
            nxt.append((pv + (here,), w))
            for p in Pos:
                if p == here:
                    continue
                cand = pv + (p,)
                wit = face_feasible(cand, prefix, dim, domain)
                if wit is not None:
                    nxt.append((cand, wit))
            if len(nxt) > face_cap:
                raise FaceBudgetExceeded(f"more than {face_cap} faces")
        faces = nxt
    faces.sort(key=lambda f: tuple(int(p) for p in f[0]))
    return Arrangement(H, dim, faces)


def exhaustive_faces(H, dim, domain=()):
    """Reference enumeration: test every one of the 3^|H| position vectors."""
    out = []
    for pv in itertools.product(list(Pos), repeat=len(H)):
        if face_feasible(pv, H, dim, domain) is not None:
            out.append(pv)
    return out


def preimage_hyperplane(h, C, b):
    """Pull h back through x0 -> b - C x0: (-C^T a, beta - a.b)."""
    s = len(C[0]) if C else 0
    Ct = transpose(C, s) if C else ()
    a_new = tuple(normalize(-v) for v in matvec(Ct, h.a)) if s else ()
    return Hyperplane(a_new, normalize(as_rational(h.beta) - dot(h.a, b)))


def induced_brick_position(pv, provenance, brick, count):
    """Brick-space position vector read off the lifted position vector.

    ``provenance[(brick, k)]`` is the lifted index of the k-th brick
    hyperplane; ``count`` is the number of brick hyperplanes.
    """
    return tuple(pv[provenance[(brick, k)]] for k in range(count))
