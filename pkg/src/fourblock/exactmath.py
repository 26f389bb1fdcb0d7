"""Exact scalars, vectors and small dense matrices.

Vectors are tuples, matrices are tuples of row tuples.  Entries are ``int``
or :class:`fractions.Fraction`; nothing in here ever produces a float.
"""

from fractions import Fraction
from functools import reduce
from math import gcd, lcm

from .errors import SingularMatrix, ZeroVector

Rational = Fraction


def as_rational(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or not isinstance(x, int):
        # accept exact rationals from other libraries (e.g. gmpy2.mpq)
        return Fraction(int(x.numerator), int(x.denominator))
    return Fraction(x)


def normalize(x):
    """Return ``x`` as an int when it is integral, otherwise as a Fraction."""
    x = as_rational(x)
    return x.numerator if x.denominator == 1 else x


def format_rational(x):
    x = as_rational(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text):
    text = text.strip()
    if "/" in text:
        p, q = text.split("/")
        return Fraction(int(p), int(q))
    return Fraction(int(text))


def zeros(rows, cols):
    return tuple((0,) * cols for _ in range(rows))


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(M, cols=None):
    if not M:
        return zeros(cols or 0, 0)
    return tuple(zip(*M))


def columns(M):
    return transpose(M)


def from_columns(cols, dim):
    if not cols:
        return zeros(dim, 0)
    return tuple(tuple(c[i] for c in cols) for i in range(dim))


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def matvec(M, v):
    return tuple(dot(row, v) for row in M)


def matmul(A, B):
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v):
    return tuple(c * a for a in v)


def norm_inf(v):
    return max((abs(a) for a in v), default=0)


def gcd_all(xs):
    return reduce(gcd, (abs(int(x)) for x in xs), 0)


def lcm_all(xs):
    """Least common multiple of positive integers; the empty list gives 1."""
    return reduce(lcm, (int(x) for x in xs), 1)


def primitive(v):
    """Divide an integer vector by the gcd of its entries, keeping direction."""
    g = gcd_all(v)
    if g == 0:
        raise ZeroVector("primitive() of the zero vector")
    return tuple(int(a) // g for a in v)


def integer_multiple(v):
    """Smallest positive integer multiple of a rational vector, made primitive."""
    den = lcm_all(as_rational(a).denominator for a in v)
    w = tuple(int(as_rational(a) * den) for a in v)
    if not any(w):
        return w
    return primitive(w)


def _integer_rows(M):
    """Scale rows of a rational matrix to integers; return (rows, scale product)."""
    rows, scale = [], 1
    for row in M:
        den = lcm_all(as_rational(a).denominator for a in row)
        rows.append([int(as_rational(a) * den) for a in row])
        scale *= den
    return rows, scale


def _bareiss_det_int(a):
    n = len(a)
    if n == 0:
        return 1
    a = [row[:] for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (akk * row_i[j] - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det(M):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("det() needs a square matrix")
    rows, scale = _integer_rows(M)
    return normalize(Fraction(_bareiss_det_int(rows), scale))


def inverse(M):
    """Exact inverse; raises :class:`SingularMatrix` when det(M) == 0."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("inverse() needs a square matrix")
    if n == 0:
        return ()
    rows, _ = _integer_rows(M)
    row_scales = []
    for row in M:
        row_scales.append(lcm_all(as_rational(a).denominator for a in row))
    # (S M)^-1 = M^-1 S^-1, so M^-1 = (S M)^-1 S
    return tuple(
        tuple(normalize(x * row_scales[j]) for j, x in enumerate(row))
        for row in _int_inverse(rows)
    )


def _int_inverse(rows):
    # Bareiss forward elimination on [A | I], then exact back-substitution.
    n = len(rows)
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    prev = 1
    for k in range(n):
        if aug[k][k] == 0:
            for i in range(k + 1, n):
                if aug[i][k] != 0:
                    aug[k], aug[i] = aug[i], aug[k]
                    break
            else:
                raise SingularMatrix("matrix is singular")
        akk = aug[k][k]
        for i in range(k + 1, n):
            aik = aug[i][k]
            row_i, row_k = aug[i], aug[k]
            for j in range(k, 2 * n):
                row_i[j] = (akk * row_i[j] - aik * row_k[j]) // prev
        prev = akk
    # aug is now upper triangular with integer entries; back-substitute exactly
    inv_cols = []
    for c in range(n):
        x = [Fraction(0)] * n
        for i in range(n - 1, -1, -1):
            s = Fraction(aug[i][n + c]) - sum(aug[i][j] * x[j] for j in range(i + 1, n))
            x[i] = s / aug[i][i]
        inv_cols.append(x)
    return tuple(tuple(inv_cols[c][i] for c in range(n)) for i in range(n))


def adjugate(M):
    """Integer-valued adjugate of an integer matrix, adj(M) = det(M) * M^-1."""
    n = len(M)
    if n == 1:
        return ((1,),)
    d = det(M)
    if d != 0:
        return tuple(tuple(normalize(d * x) for x in row) for row in inverse(M))
    # singular: cofactor expansion (only small matrices reach this branch)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            # adj[i][j] is the (j, i) cofactor
            minor = [r[:i] + r[i + 1:] for k, r in enumerate(M) if k != j]
            row.append(normalize((-1) ** (i + j) * det(minor)))
        out.append(tuple(row))
    return tuple(out)


def rank(M):
    rows = [[as_rational(a) for a in row] for row in M]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def solve_unique(A, b):
    """Solve A x = b for a full-column-rank A (rows >= cols).

    Returns the unique solution, or ``None`` when the system is inconsistent.
    Raises :class:`SingularMatrix` when the columns are dependent.
    """
    nrows = len(A)
    ncols = len(A[0]) if A else 0
    aug = [[as_rational(a) for a in row] + [as_rational(bi)] for row, bi in zip(A, b)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if aug[i][c] != 0), None)
        if piv is None:
            raise SingularMatrix("columns are linearly dependent")
        aug[r], aug[piv] = aug[piv], aug[r]
        pr = aug[r]
        inv = 1 / pr[c]
        aug[r] = pr = [a * inv for a in pr]
        for i in range(nrows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * p for a, p in zip(aug[i], pr)]
        pivots.append(c)
        r += 1
    if any(aug[i][ncols] != 0 for i in range(r, nrows)):
        return None
    return tuple(normalize(aug[i][ncols]) for i in range(ncols))


def cross(rows):
    """Generalised cross product of d-1 vectors in R^d (cofactor expansion).

    The result is orthogonal to every input row and is zero iff the rows are
    linearly dependent.
    """
    d = len(rows) + 1
    out = []
    for j in range(d):
        minor = [row[:j] + row[j + 1:] for row in rows]
        out.append(normalize((-1) ** j * det(minor)) if minor else 1)
    return tuple(out)


def is_integral(v):
    return all(as_rational(a).denominator == 1 for a in v)
