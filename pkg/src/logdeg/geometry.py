"""Exact facet/face computations for rational cones and polyhedra."""
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm

from .lattice import (as_fraction, dot, hyperplane_normal, independent_subset,
                      nullspace, rank)


class ConeGeometry:
    """H-description and face lattice of cone(gens) in Q^k."""

    def __init__(self, gens, k):
        self.k = k
        self.gens = tuple(tuple(as_fraction(x) for x in g) for g in gens)
        basis_idx = independent_subset(self.gens)
        self.dim = len(basis_idx)
        self.span_basis = [self.gens[i] for i in basis_idx]
        self.equations = nullspace([list(g) for g in self.span_basis], k) \
            if self.span_basis else nullspace([], k)
        self.facets = self._facets()
        self.pointed = rank([list(e) for e in self.equations] +
                            [list(n) for n, _ in self.facets]) == k if k else True
        # integer copies for the membership tests
        self._eq_int = [_clear(e) for e in self.equations]
        self._facet_int = [_clear(n) for n, _ in self.facets]

    def _facets(self):
        d = self.dim
        if d == 0:
            return []
        seen = {}
        for combo in combinations(range(len(self.gens)), d - 1):
            vecs = [self.gens[i] for i in combo]
            if d > 1 and rank(vecs) < d - 1:
                continue
            n = hyperplane_normal(vecs, self.k, avoid=self.span_basis)
            if n is None:
                continue
            vals = [dot(n, g) for g in self.gens]
            if all(v <= 0 for v in vals):
                n = tuple(-x for x in n)
                vals = [-v for v in vals]
            elif any(v < 0 for v in vals):
                continue
            zero = frozenset(i for i, v in enumerate(vals) if v == 0)
            if len(zero) == len(self.gens):
                continue
            seen.setdefault(zero, n)
        return [(n, z) for z, n in seen.items()]

    def contains(self, x):
        x = _clear(x)
        if any(_idot(e, x) for e in self._eq_int):
            return False
        return all(_idot(n, x) >= 0 for n in self._facet_int)

    def in_relint(self, x):
        return self.in_relint_cleared(_clear(x))

    def in_relint_cleared(self, x):
        """in_relint for an integer vector produced by `cleared`."""
        if any(_idot(e, x) for e in self._eq_int):
            return False
        return all(_idot(n, x) > 0 for n in self._facet_int)

    def faces(self):
        """All faces as frozensets of generator indices (pointed cones)."""
        full = frozenset(range(len(self.gens)))
        out = {full}
        frontier = [full]
        while frontier:
            nxt = []
            for F in frontier:
                for _, z in self.facets:
                    G = F & z
                    if G not in out:
                        out.add(G)
                        nxt.append(G)
            frontier = nxt
        return out

    def face_of(self, idx):
        """Smallest face containing the generators with indices `idx`."""
        F = frozenset(range(len(self.gens)))
        for _, z in self.facets:
            if set(idx) <= z:
                F &= z
        return F

    def extremal(self):
        """Indices of generators spanning 1-dimensional faces."""
        out = []
        for i in range(len(self.gens)):
            F = self.face_of([i])
            if rank([self.gens[j] for j in F]) == 1:
                out.append(i)
        return out


def _clear(v):
    """Integer vector equal to a positive multiple of v."""
    if not all(hasattr(x, "denominator") for x in v):
        v = [as_fraction(x) for x in v]
    m = lcm(*(x.denominator for x in v)) if v else 1
    if m == 1:
        return [x.numerator for x in v]
    return [x.numerator * (m // x.denominator) for x in v]


cleared = _clear


def _idot(a, b):
    return sum(x * y for x, y in zip(a, b))


@lru_cache(maxsize=20000)
def cone_geometry(gens, k):
    return ConeGeometry(gens, k)


def geometry_of(gens, k):
    return cone_geometry(tuple(tuple(as_fraction(x) for x in g) for g in gens), k)


def homogenize(points, rays):
    """Generators of the cone over conv(points) + cone(rays)."""
    return tuple(tuple(p) + (Fraction(1),) for p in points) + \
        tuple(tuple(r) + (Fraction(0),) for r in rays)


class PolyhedronGeometry:
    """conv(points) + cone(rays) via the homogenizing cone."""

    def __init__(self, points, rays, k):
        self.k = k
        self.points = tuple(tuple(as_fraction(x) for x in p) for p in points)
        self.rays = tuple(tuple(as_fraction(x) for x in r) for r in rays)
        self.cone = geometry_of(homogenize(self.points, self.rays), k + 1)
        self.dim = self.cone.dim - 1

    def contains(self, x):
        return self.cone.contains(tuple(x) + (1,))

    def in_relint(self, x):
        return self.cone.in_relint(tuple(x) + (1,))

    def inequalities(self):
        """List of (a, b) meaning a.x + b >= 0 for the facets of the polyhedron."""
        return [(tuple(n[:-1]), n[-1]) for n, _ in self.cone.facets]


@lru_cache(maxsize=20000)
def _polyhedron(points, rays, k):
    return PolyhedronGeometry(points, rays, k)


def polyhedron_geometry(points, rays, k):
    f = lambda vs: tuple(tuple(as_fraction(x) for x in v) for v in vs)
    return _polyhedron(f(points), f(rays), k)
