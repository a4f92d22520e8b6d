"""Exact linear algebra over Q and Z.

Vectors and matrices are plain tuples/lists of ints or Fractions. Nothing here
ever touches floating point.
"""
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp


def as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.replace("−", "-"))
    return Fraction(x)


def lcm(a, b):
    return abs(a * b) // gcd(a, b) if a and b else abs(a or b)


def primitive(v):
    """Primitive integer vector on the ray through the rational vector `v`."""
    v = [as_fraction(x) for x in v]
    den = reduce(lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, ints, 0)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(x // g for x in ints)


def lattice_length(v):
    """Lattice length of a rational vector: v = length * primitive(v)."""
    p = primitive(v)
    i = next(j for j, x in enumerate(p) if x)
    return as_fraction(v[i]) / p[i]


def is_primitive(v):
    return reduce(gcd, (int(x) for x in v), 0) == 1


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vscale(c, a):
    return tuple(c * x for x in a)


def matvec(M, v):
    return tuple(dot(row, v) for row in M)


def transpose(M):
    return [list(col) for col in zip(*M)]


def matmul(A, B):
    Bt = transpose(B)
    return [[dot(r, c) for c in Bt] for r in A]


def rref(M):
    """Reduced row echelon form. Returns (rows, pivot_columns)."""
    A = [[as_fraction(x) for x in row] for row in M]
    if not A:
        return [], []
    ncols = len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        pv = A[r][c]
        A[r] = [x / pv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank(M):
    return len(rref(M)[1]) if M else 0


def nullspace(M, ncols=None):
    """Basis of {x : M x = 0} as a list of Fraction tuples."""
    if not M:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    R, piv = rref(M)
    n = len(M[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, pc in zip(R, piv):
            x[pc] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(A, b):
    """One solution of A x = b, or None if inconsistent."""
    if not A:
        return None if any(as_fraction(x) != 0 for x in b) else ()
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, pc in zip(R, piv):
        x[pc] = row[n]
    return tuple(x)


def det(M):
    M = [[as_fraction(x) for x in row] for row in M]
    n = len(M)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return d


def inverse(M):
    n = len(M)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in R]


def independent_subset(vectors):
    """Indices of a maximal linearly independent subfamily (greedy)."""
    chosen = []
    for i, v in enumerate(vectors):
        if rank([vectors[j] for j in chosen] + [v]) > len(chosen):
            chosen.append(i)
    return chosen


def span_contains(vectors, v):
    if not vectors:
        return all(x == 0 for x in v)
    return rank(list(vectors) + [v]) == rank(list(vectors))


def snf(M):
    """Smith normal form S = U M V with unimodular U, V (integer lists)."""
    A = Matrix(M)
    S, U, V = smith_normal_decomp(A)
    conv = lambda X: [[int(x) for x in X.row(i)] for i in range(X.rows)]
    return conv(S), conv(U), conv(V)


def integer_kernel(M, ncols):
    """Z-basis of {c in Z^ncols : M c = 0} for an integer matrix M."""
    M = [list(map(int, r)) for r in M if any(r)]
    if not M:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    S, _, V = snf(M)
    r = sum(1 for i in range(min(len(S), ncols)) if S[i][i] != 0)
    return [tuple(V[i][j] for i in range(ncols)) for j in range(r, ncols)]


def saturation(vectors, k):
    """Split Z^k along the saturated span of integer `vectors`.

    Returns (basis, complement, quotient, invariants): `basis` is a Z-basis of
    span(vectors) ∩ Z^k, `complement` extends it to a basis of Z^k, `quotient`
    is the k x (k - r) integer matrix whose columns give coordinates on
    Z^k / (saturated span), and `invariants` are the nonzero invariant factors
    of the lattice generated by `vectors` inside its saturation.
    """
    vectors = [list(map(int, v)) for v in vectors if any(v)]
    if not vectors:
        ident = [[int(i == j) for j in range(k)] for i in range(k)]
        return [], [tuple(r) for r in ident], ident, []
    S, U, V = snf(vectors)
    r = sum(1 for i in range(min(len(S), k)) if S[i][i] != 0)
    Vinv = [[int(x) for x in row] for row in Matrix(V).inv().tolist()]
    basis = [tuple(Vinv[i]) for i in range(r)]
    complement = [tuple(Vinv[i]) for i in range(r, k)]
    quotient = transpose(row_hnf(transpose([row[r:] for row in V]))) if r < k else \
        [[] for _ in range(k)]
    invariants = [abs(S[i][i]) for i in range(r)]
    return basis, complement, quotient, invariants


def row_hnf(M):
    """Integer row-style Hermite normal form (positive pivots, reduced above)."""
    A = [list(map(int, row)) for row in M]
    if not A:
        return A
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            done = True
            for i in range(r + 1, m):
                q = A[i][c] // A[r][c]
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                if A[i][c] != 0:
                    done = False
            if done:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            A[i] = [x - q * y for x, y in zip(A[i], A[r])]
        r += 1
    return A


def coordinates(basis, v):
    """Coordinates of v in the (independent) rational `basis`, or None."""
    if not basis:
        return () if all(x == 0 for x in v) else None
    return solve(transpose(basis), v)


def lattice_index(generators, ambient_basis):
    """Index of the lattice spanned by `generators` in the lattice with Z-basis
    `ambient_basis`; 0 if the generators do not have full rank there."""
    coords = [coordinates(ambient_basis, g) for g in generators]
    if any(c is None for c in coords):
        raise ValueError("generators do not lie in the ambient lattice span")
    if any(x.denominator != 1 for c in coords for x in c):
        raise ValueError("generators are not integral in the ambient basis")
    r = len(ambient_basis)
    if r == 0:
        return 1
    ints = [[int(x) for x in c] for c in coords if any(c)]
    if rank(ints) < r:
        return 0
    S, _, _ = snf(ints)
    out = 1
    for i in range(r):
        out *= abs(S[i][i])
    return out


def hyperplane_normal(vectors, ambient_rank, avoid=()):
    """A rational functional vanishing on `vectors` but not on all of `avoid`."""
    for n in nullspace([list(v) for v in vectors], ambient_rank) if vectors else \
            nullspace([], ambient_rank):
        if not avoid or any(dot(n, a) != 0 for a in avoid):
            return n
    return None


def subsets(seq, k):
    return combinations(seq, k)
