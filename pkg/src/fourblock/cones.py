"""Simplicial cones spanned by small integer bases and their intersections."""

import itertools
from dataclasses import dataclass

from .errors import NotInCone, ParamsTooLarge, SingularMatrix
from .exactmath import (adjugate, as_rational, cross, det, from_columns, identity,
                        inverse, lcm_all, matvec, norm_inf, primitive, rank, solve_unique)

DEFAULT_BASIS_CAP = 10 ** 6


@dataclass(frozen=True)
class BasisSet:
    d: int
    bound: int
    bases: tuple  # d x d matrices; the columns are the basis vectors


@dataclass(frozen=True)
class GeneratorSet:
    generators: tuple


def enumerate_bases(d, delta, cap=DEFAULT_BASIS_CAP):
    """All invertible d x d matrices with entries in [-delta, delta]."""
    if d < 1 or delta < 1:
        raise ValueError("need d >= 1 and delta >= 1")
    total = (2 * delta + 1) ** (d * d)
    if total > cap:
        raise ParamsTooLarge(f"(2*{delta}+1)^{d * d} = {total} matrices exceed the cap {cap}")
    rng = range(-delta, delta + 1)
    bases = []
    for entries in itertools.product(rng, repeat=d * d):
        M = tuple(tuple(entries[i * d:(i + 1) * d]) for i in range(d))
        if det(M) != 0:
            bases.append(M)
    return BasisSet(d, delta, tuple(bases))


def compute_psi(basis_set):
    return lcm_all(abs(det(U)) for U in basis_set.bases)


def _normal_rows(U):
    """Facet normals of cone(U): rows of adj(U) oriented so U^-1 >= 0 inside."""
    adj = adjugate(U)
    sign = 1 if det(U) > 0 else -1
    return [tuple(sign * a for a in row) for row in adj]


def _spanning_directions(normals, d):
    """Primitive vectors orthogonal to d-1 linearly independent normals."""
    out = set()
    for combo in itertools.combinations(normals, d - 1):
        v = cross(list(combo))
        if any(v):
            out.add(primitive(v))
    return out


def compute_phi(d, delta, basis_set=None):
    """Largest infinity norm any intersection generator can have."""
    if d == 1:
        return delta
    basis_set = basis_set or enumerate_bases(d, delta)
    normals = set()
    for U in basis_set.bases:
        for row in adjugate(U):
            if any(row):
                normals.add(primitive(row))
    normals = sorted(normals)
    phi = delta
    for v in _spanning_directions(normals, d):
        phi = max(phi, norm_inf(v))
    return phi


def in_cone(U, x):
    """x in cone(columns of U)?"""
    return all(a >= 0 for a in matvec(inverse(U), x))


def generating_bases(witness, basis_set):
    return tuple(U for U in basis_set.bases if in_cone(U, witness))


def intersection_generators(bases_u):
    """Primitive generators of the intersection of cone(U) over U in bases_u."""
    if not bases_u:
        raise ValueError("need at least one basis")
    d = len(bases_u[0])
    normals = sorted({primitive(n) for U in bases_u for n in _normal_rows(U) if any(n)})

    def inside(v):
        return all(sum(a * b for a, b in zip(n, v)) >= 0 for n in normals)

    if d == 1:
        gens = [g for g in ((1,), (-1,)) if inside(g)]
        return GeneratorSet(tuple(gens))
    gens = set()
    for v in _spanning_directions(normals, d):
        for cand in (v, tuple(-a for a in v)):
            if inside(cand):
                gens.add(cand)
    # keep only extreme rays: a ray is extreme iff it is tight on d-1
    # linearly independent normals
    extreme = []
    for g in sorted(gens):
        tight = [n for n in normals if sum(a * b for a, b in zip(n, g)) == 0]
        if rank(tight) == d - 1:
            extreme.append(g)
    return GeneratorSet(tuple(extreme))


def caratheodory_select(generators, witness):
    """Linearly independent V from P with witness = sum mu_i v_i, mu > 0."""
    P = list(generators.generators if isinstance(generators, GeneratorSet) else generators)
    witness = tuple(as_rational(a) for a in witness)
    d = len(witness)
    if not any(witness):
        return (), ()
    for size in range(1, d + 1):
        for subset in itertools.combinations(P, size):
            A = from_columns(subset, d)
            try:
                mu = solve_unique(A, witness)
            except SingularMatrix:
                continue
            if mu is not None and all(m > 0 for m in mu):
                return tuple(subset), tuple(mu)
    raise NotInCone(f"{witness} is not in the cone of the generators")


def extend_to_basis(V, d, phi=1):
    """Append unit vectors to V until it spans R^d; returns the square matrix."""
    cols = list(V)
    for e in identity(d):
        if len(cols) == d:
            break
        if rank(from_columns(cols + [e], d)) == len(cols) + 1:
            cols.append(e)
    return from_columns(cols, d)
