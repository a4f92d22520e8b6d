"""Rigid plane tropical curves through points, by dynamic programming over
subtrees whose position the points already pin down.

Scope: rational curves with weight-one ends. Root the curve at one end. A
subtree is *fixed* when its outgoing edge lies on a determined line. That
happens in two ways. Either a marked point sits on the outgoing edge and the
part below the point is a chain with exactly one free end, or two fixed
subtrees meet at a vertex. A rational curve through E - 1 generic points is
rigid exactly when the whole curve minus its root end is fixed.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd

from .degeneration import DegenerationComplex, RigidComplexRecord
from .moduli import parameter_cone, type_of
from .one_complexes import (ComplexError, TropicalMap, check_balancing,
                            chow_of_tropical_map, subdivide, validate_one_complex)
from .lattice import as_fraction, primitive, vadd, vscale, vsub
from .polyhedra import PolyhedralComplex


class NonGenericPoints(ComplexError):
    pass


P2_DIRECTIONS = ((-1, -1), (1, 0), (0, 1))


def p2_slice():
    """The fan of P^2 read as a polyhedral complex with one vertex."""
    x, y, z = P2_DIRECTIONS[1], P2_DIRECTIONS[2], P2_DIRECTIONS[0]
    p = PolyhedralComplex.build([(0, 0)], {"xy": ([0], [x, y]), "yz": ([0], [y, z]),
                                          "zx": ([0], [z, x])}, ["o"])
    return DegenerationComplex.from_slice(p, directions=P2_DIRECTIONS, name="P2")


def _det(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _weight(w):
    return abs(gcd(int(w[0]), int(w[1])))


@dataclass(frozen=True)
class _Fixed:
    """A fixed subtree: the points it uses, its ends (counts per direction),
    a point on its outgoing line, the outgoing vector (weighted, toward the
    root) and the geometry below its top vertex (None for a bare end)."""
    Q: frozenset
    D: tuple
    anchor: tuple
    w: tuple
    top: tuple
    edges: tuple
    rays: tuple
    mult: int
    vmults: tuple
    degenerate: tuple = ()


def _meet(x, w, a, v):
    """Parameters (t, s) with x - t*w = a + s*v, or None when parallel."""
    det = _det(w, v)
    if det == 0:
        return None
    r = vsub(a, x)
    # -t*w - s*v = r
    t = Fraction(-(r[0] * v[1] - r[1] * v[0]), det)
    s = Fraction(-(w[0] * r[1] - w[1] * r[0]), det)
    return t, s


def _show(x):
    return "(" + ", ".join(str(c) for c in x) + ")"


def _hang(v, child):
    """Edges/rays joining vertex v to a child subtree (plus the child's own)."""
    if child.top is None:
        rays = ((v, primitive(tuple(-c for c in child.w)), 1),) + child.rays
        return child.edges, rays
    return ((v, child.top, _weight(child.w)),) + child.edges, child.rays


def _join(v, a, b):
    ea, ra = _hang(v, a)
    eb, rb = _hang(v, b)
    m = abs(_det(a.w, b.w))
    return ea + eb, ra + rb, m * a.mult * b.mult, ((v, m),) + a.vmults + b.vmults


def _sub(D, E):
    return tuple(x - y for x, y in zip(D, E))


def _leq(D, E):
    return all(x <= y for x, y in zip(D, E))


class _Enumerator:
    def __init__(self, directions, degree, points):
        self.dirs = [tuple(int(c) for c in r) for r in directions]
        self.degree = tuple(int(n) for n in degree)
        self.points = [tuple(as_fraction(c) for c in p) for p in points]
        self.by_size = {}

    def flow(self, D):
        return tuple(-sum(n * r[j] for n, r in zip(D, self.dirs)) for j in range(2))

    def fixed(self, n):
        return self.by_size.get(n, [])

    def chain(self, x, w, D, used, budget):
        """All ways to continue downward from x along -w with ends D, using
        fixed subtrees disjoint from `used` with |Q| summing to `budget`."""
        if sum(D) == 1 and budget == 0:
            i = D.index(1)
            if tuple(-c for c in w) == self.dirs[i]:
                yield None, (), (), 1, (), frozenset(), ()
            return
        for size in range(1, budget + 1):
            for A in self.fixed(size):
                if A.Q & used or not _leq(A.D, D) or A.D == D:
                    continue
                hit = _meet(x, w, A.anchor, A.w)
                if hit is None:
                    continue
                t, s = hit
                if t < 0 or s < 0:
                    continue
                bad = A.degenerate
                if t == 0 or s == 0:
                    bad += (f"a vertex lands on {_show(x if t == 0 else A.anchor)}",)
                v = tuple(x[j] - t * w[j] for j in range(2))
                rest_w = _sub(w, A.w)
                rest_D = _sub(D, A.D)
                for below in self.chain(v, rest_w, rest_D, used | A.Q, budget - size):
                    top, edges, rays, mult, vm, q, bad2 = below
                    B = _Fixed(q, rest_D, v, rest_w, top, edges, rays, mult, vm)
                    e, r, m, vms = _join(v, A, B)
                    yield v, e, r, m, vms, q | A.Q, bad + bad2

    def build(self):
        N = len(self.points)
        full = self.degree
        seen = set()
        for n in range(1, N + 1):
            level = []
            # point type: a marked point on the outgoing edge
            for p_idx, p in enumerate(self.points):
                for D in _multisets(full, n):
                    w = self.flow(D)
                    if not any(w):
                        continue
                    for top, edges, rays, mult, vm, q, bad in self.chain(
                            p, w, D, frozenset([p_idx]), n - 1):
                        level.append(_Fixed(q | {p_idx}, D, p, w, top, edges, rays, mult, vm,
                                            bad))
            # merge type: two fixed subtrees meeting at a vertex
            for na in range(1, n):
                nb = n - na
                if na > nb:
                    break
                for i, A in enumerate(self.fixed(na)):
                    pool = self.fixed(nb)[i + 1:] if na == nb else self.fixed(nb)
                    for B in pool:
                        if A.Q & B.Q:
                            continue
                        D = tuple(a + b for a, b in zip(A.D, B.D))
                        if not _leq(D, full):
                            continue
                        hit = _meet(A.anchor, tuple(-c for c in A.w), B.anchor, B.w)
                        if hit is None:
                            continue
                        s, t = hit
                        if s < 0 or t < 0:
                            continue
                        bad = A.degenerate + B.degenerate
                        if s == 0 or t == 0:
                            bad += (f"subtrees meet at {_show(A.anchor if s == 0 else B.anchor)}",)
                        v = tuple(B.anchor[j] + t * B.w[j] for j in range(2))
                        w = tuple(a + b for a, b in zip(A.w, B.w))
                        if not any(w):
                            continue
                        e, r, m, vms = _join(v, A, B)
                        level.append(_Fixed(A.Q | B.Q, D, v, w, v, e, r, m, vms, bad))
            unique = []
            for F in level:
                key = (F.Q, F.D, F.top, frozenset(F.edges), frozenset(F.rays))
                if key not in seen:
                    seen.add(key)
                    unique.append(F)
            self.by_size[n] = unique
        return self.by_size.get(N, [])


def _multisets(full, n):
    """Vectors D <= full with |D| = n."""
    out = []

    def rec(i, left, acc):
        if i == len(full):
            if left == 0:
                out.append(tuple(acc))
            return
        for c in range(min(full[i], left) + 1):
            rec(i + 1, left - c, acc + [c])

    rec(0, n, [])
    return out


def check_points(points, directions):
    """Degeneracies that make a point configuration non-generic."""
    pts = [tuple(as_fraction(c) for c in p) for p in points]
    problems = []
    for i, j in combinations(range(len(pts)), 2):
        diff = vsub(pts[j], pts[i])
        if not any(diff):
            problems.append(f"points {i} and {j} coincide")
        elif any(_det(diff, r) == 0 for r in directions):
            problems.append(f"points {i} and {j} lie on a line parallel to an end direction")
    return problems


def _tropical_map(F, root_dir, ambient):
    verts = {}

    def vid(x):
        return verts.setdefault(x, len(verts))

    edges = [(vid(a), vid(b), m) for a, b, m in F.edges]
    legs = [(vid(a), d, m) for a, d, m in F.rays]
    legs.append((vid(F.top), root_dir, 1))
    pos = sorted(verts, key=verts.get)
    return TropicalMap.build(pos, edges, legs, ambient=ambient)


def _wall_points(g, ambient):
    """Where cells of g cross 1-dimensional cells of the ambient slice."""
    walls = []
    for c in ambient.cells:
        if len(c.vertices) == 1 and len(c.rays) == 1:
            walls.append((ambient.vertices[c.vertices[0]], c.rays[0]))
        elif len(c.vertices) == 2 and not c.rays:
            a, b = (ambient.vertices[i] for i in c.vertices)
            walls.append((a, vsub(b, a), 1))
    out = set(ambient.vertices)
    segs = [(g.positions[u], vscale(ell, d), 1) for u, _, d, ell in g.edges] + \
        [(g.positions[v], d, None) for v, d in g.rays]
    for p, d, top in segs:
        for wall in walls:
            q, e = wall[0], wall[1]
            wtop = wall[2] if len(wall) == 3 else None
            det = _det(d, e)
            if det == 0:
                continue
            r = vsub(q, p)
            s = Fraction(_det(r, e), det)
            u = Fraction(_det(r, d), det)
            if s >= 0 and (top is None or s <= top) and u >= 0 and (wtop is None or u <= wtop):
                out.add(vadd(p, vscale(s, d)))
    return out


def enumerate_rigid(d, degree, points, require_balanced=True):
    """Rigid rational plane tropical curves of the given end degree through
    the points, as RigidComplexRecords sorted by their image."""
    if d.k != 2:
        raise ComplexError("rigid enumeration is implemented for 2-dimensional slices only")
    dirs = d.directions
    if len(degree) != len(dirs):
        raise ComplexError(f"degree has {len(degree)} entries for {len(dirs)} end directions")
    total = [sum(n * r[j] for n, r in zip(degree, dirs)) for j in range(2)]
    if any(total):
        raise ComplexError("end directions weighted by the degree do not sum to zero")
    problems = check_points(points, dirs)
    if problems:
        raise NonGenericPoints("; ".join(problems))
    ends = sum(degree)
    if len(points) != ends - 1:
        return []
    root = next(i for i, n in enumerate(degree) if n > 0)
    rest = tuple(n - (i == root) for i, n in enumerate(degree))
    enum = _Enumerator(dirs, rest, points)
    records, seen = [], set()
    for F in enum.build():
        if F.D != rest or F.top is None:
            continue
        if F.degenerate:
            raise NonGenericPoints("; ".join(F.degenerate))
        tmap = _tropical_map(F, dirs[root], d.slice)
        balanced = not check_balancing(tmap)
        if require_balanced and not balanced:
            continue
        g, deco = chow_of_tropical_map(tmap)
        key = _image_key(g, deco)
        if key in seen:
            continue
        seen.add(key)
        g, deco = subdivide(g, deco, sorted(_wall_points(g, d.slice)))
        problems = validate_one_complex(g)
        if problems:
            raise NonGenericPoints("; ".join(problems))
        pc = parameter_cone(type_of(g, points, d.slice))
        records.append(RigidComplexRecord(
            g, deco, {"dimension": pc.dimension, "variables": len(pc.names)},
            {"multiplicity": F.mult,
             "vertex_multiplicities": [(list(map(str, v)), m) for v, m in F.vmults],
             "balanced": balanced, "tropical_map": tmap}))
    records.sort(key=lambda r: sorted(map(repr, _image_key(r.gamma, r.decoration))))
    return records


def _image_key(g, deco):
    out = set()
    for i, (u, v, _, _) in enumerate(g.edges):
        out.add(("e",) + tuple(sorted([g.positions[u], g.positions[v]])) +
                (deco.label(("e", i)),))
    for i, (v, dvec) in enumerate(g.rays):
        out.add(("r", g.positions[v], dvec, deco.label(("r", i))))
    return frozenset(out)
