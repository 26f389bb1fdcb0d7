"""Affine faithful decompositions of right-hand sides.

A scheme fixes (d, Delta, t_dec) and yields a family of hyperplanes plus a
modulus M.  Inside one domain (r + M Z^d) ∩ F, with F a face of that
family, every b splits as

    b = q + sum_{i not in S} z_i w_i,     z = (W^-1 b)_i - gamma_i,

where q, the w_i, S and gamma depend only on (r, F).
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import cones
from .arrangement import Hyperplane, Pos, face_of, position_of
from .errors import DomainViolation
from .exactmath import (as_rational, det, from_columns, gcd_all, inverse, lcm_all,
                        matvec, norm_inf, normalize, vscale)

ZERO, PLUS = "ZERO", "PLUS"


def canonical_hyperplane(a, beta):
    """Scale (a, beta) to a primitive integer vector with a leading positive a.

    Returns (Hyperplane, orientation) where orientation is -1 if the scaling
    factor was negative (so LT and GT swap).
    """
    vals = [as_rational(x) for x in a] + [as_rational(beta)]
    den = lcm_all(v.denominator for v in vals)
    ints = [int(v * den) for v in vals]
    g = gcd_all(ints) or 1
    ints = [v // g for v in ints]
    lead = next((v for v in ints[:-1] if v), ints[-1])
    sign = -1 if lead < 0 else 1
    ints = [sign * v for v in ints]
    return Hyperplane(tuple(ints[:-1]), ints[-1]), sign


def default_tdec(d, delta):
    """Column count of the standard matrix with all columns in [-Delta, Delta]^d."""
    return (2 * delta + 1) ** d


@dataclass
class DecompositionScheme:
    d: int
    delta: int
    t_dec: int
    psi: int
    phi: int
    M: int
    hyperplanes: list
    provenance: dict  # (basis, row, kind) -> (hyperplane index, orientation)
    basis_list: tuple  # bases of [-Phi, Phi]^d
    delta_bases: object  # BasisSet of [-Delta, Delta]^d
    uniform_M: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    def classify(self, b):
        """(residue, position vector) of b."""
        r = tuple(x % self.M for x in b)
        return r, face_of(b, self.hyperplanes)


def build_scheme(d, delta, t_dec=None, modulus=None, basis_cap=cones.DEFAULT_BASIS_CAP):
    t_dec = default_tdec(d, delta) if t_dec is None else t_dec
    if d < 1 or delta < 1 or t_dec < 1:
        raise ValueError("need d >= 1, delta >= 1, t_dec >= 1")
    delta_bases = cones.enumerate_bases(d, delta, basis_cap)
    psi = cones.compute_psi(delta_bases)
    phi = cones.compute_phi(d, delta, delta_bases)
    phi_bases = delta_bases if phi == delta else cones.enumerate_bases(d, phi, basis_cap)
    uniform_M = t_dec * psi * lcm_all(abs(det(V)) for V in phi_bases.bases)
    hyperplanes, index, provenance = [], {}, {}
    for V in phi_bases.bases:
        Vinv = inverse(V)
        for i in range(d):
            for kind, beta in ((ZERO, 0), (PLUS, t_dec * psi)):
                h, orient = canonical_hyperplane(Vinv[i], beta)
                if h not in index:
                    index[h] = len(hyperplanes)
                    hyperplanes.append(h)
                provenance[(V, i, kind)] = (index[h], orient)
    return DecompositionScheme(
        d=d, delta=delta, t_dec=t_dec, psi=psi, phi=phi,
        M=uniform_M if modulus is None else modulus,
        hyperplanes=hyperplanes, provenance=provenance,
        basis_list=phi_bases.bases, delta_bases=delta_bases, uniform_M=uniform_M,
    )


@dataclass(frozen=True)
class AffineDecomposition:
    support: tuple      # q first, then w_i for i not in S
    Lam: tuple          # one row per support vector
    mu: tuple
    S: tuple
    W: tuple            # scaled basis W = Psi * V_bar (columns)
    alpha: tuple
    gamma: tuple        # gamma_i for i not in S (None for i in S)
    V: tuple
    r: tuple
    pv: tuple
    M: int

    @property
    def q(self):
        return self.support[0]


def _positions_on(scheme, V, i, kind, x):
    idx, orient = scheme.provenance[(V, i, kind)]
    p = position_of(x, scheme.hyperplanes[idx])
    return Pos(orient * int(p))


def build_affine_map(scheme, r, witness, pv=None):
    """The map D_{r,F} for the face F containing ``witness``.

    Returns None (not applicable) when the domain (r + M Z^d) ∩ F cannot
    contain a point, which is detected from the residues alpha.
    """
    d, t, psi = scheme.d, scheme.t_dec, scheme.psi
    witness = tuple(normalize(x) for x in witness)
    r = tuple(r)
    if pv is None:
        pv = face_of(witness, scheme.hyperplanes)
    key = (r, pv)
    if key in scheme._cache:
        return scheme._cache[key]

    U = cones.generating_bases(witness, scheme.delta_bases)
    P = cones.intersection_generators(U)
    V, _ = cones.caratheodory_select(P, witness)
    ell = len(V)
    Vbar = cones.extend_to_basis(V, d, scheme.phi)
    W = tuple(tuple(psi * a for a in row) for row in Vbar)
    Winv = inverse(W)
    MW = [[scheme.M * as_rational(a) for a in row] for row in Winv]
    if any((x / t).denominator != 1 for row in MW for x in row):
        raise ValueError(f"modulus {scheme.M} does not make M*W^-1 a multiple of {t}")
    Wr = matvec(Winv, r)
    alpha = tuple(normalize(as_rational(x) % t) for x in Wr[:ell])
    w = [tuple(W[k][i] for k in range(d)) for i in range(ell)]

    S, gamma = [], []
    q = [Fraction(0)] * d
    for i in range(ell):
        p = _positions_on(scheme, Vbar, i, PLUS, witness)
        if p == Pos.LT:
            if alpha[i] == 0:
                result = None
                scheme._cache[key] = result
                return result
            S.append(i)
            gamma.append(None)
            coef = alpha[i]
        else:
            if p == Pos.EQ and alpha[i] != 0:
                scheme._cache[key] = None
                return None
            g = t + alpha[i]
            gamma.append(normalize(g))
            coef = g
        q = [qk + as_rational(coef) * wk for qk, wk in zip(q, w[i])]
    q = tuple(normalize(x) for x in q)
    if any(isinstance(x, Fraction) for x in q):
        # cannot happen when b = q + sum z_i w_i is integral with z integral
        scheme._cache[key] = None
        return None

    support = [q]
    Lam = [(0,) * d]
    mu = [1]
    for i in range(ell):
        if i in S:
            continue
        support.append(w[i])
        Lam.append(tuple(Winv[i]))
        mu.append(-gamma[i])
    result = AffineDecomposition(
        support=tuple(support), Lam=tuple(Lam), mu=tuple(mu), S=tuple(S), W=W,
        alpha=alpha, gamma=tuple(gamma), V=tuple(V), r=r, pv=pv, M=scheme.M,
    )
    scheme._cache[key] = result
    return result


def multiplicities(amap, b):
    """Lambda b + mu without domain checks."""
    return tuple(normalize(as_rational(sum(as_rational(a) * x for a, x in zip(row, b))) + as_rational(m))
                 for row, m in zip(amap.Lam, amap.mu))


def in_domain(scheme, amap, b):
    r, pv = scheme.classify(b)
    return r == amap.r and pv == amap.pv


def evaluate(amap, b, scheme=None):
    """Multiplicities of the support vectors for b.

    With a scheme the domain (residue and face) is checked as well.
    """
    if scheme is not None and not in_domain(scheme, amap, b):
        raise DomainViolation(f"{tuple(b)} is outside the domain of this map")
    mult = multiplicities(amap, b)
    if any(isinstance(m, Fraction) or m < 0 for m in mult):
        raise DomainViolation(f"multiplicities {mult} are not nonnegative integers")
    total = [0] * len(b)
    for m, v in zip(mult, amap.support):
        total = [x + m * y for x, y in zip(total, v)]
    if tuple(total) != tuple(b):
        raise DomainViolation("parts do not sum to b")
    return mult


def as_multiset(amap, mult):
    """Merge equal support vectors: {vector: multiplicity}."""
    out = {}
    for v, m in zip(amap.support, mult):
        out[v] = out.get(v, 0) + m
    return out


def aggregated_rows(amap):
    """{support vector: (Lambda row, mu)} with duplicate vectors merged."""
    out = {}
    for v, row, m in zip(amap.support, amap.Lam, amap.mu):
        if v in out:
            r0, m0 = out[v]
            out[v] = (tuple(normalize(as_rational(a) + as_rational(b)) for a, b in zip(r0, row)),
                      normalize(as_rational(m0) + as_rational(m)))
        else:
            out[v] = (tuple(row), m)
    return out


def decomposition_order(amap):
    return max((norm_inf(v) for v in amap.support), default=0)


def decompose(scheme, b):
    """Classify b and evaluate the map of its domain."""
    r, pv = scheme.classify(b)
    amap = build_affine_map(scheme, r, b, pv)
    if amap is None:
        raise DomainViolation("classified domain is empty, which contradicts b lying in it")
    return amap, evaluate(amap, b)
