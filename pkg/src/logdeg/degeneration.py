"""Vertical 1-complexes in a degeneration: cutting into vertex stars and gluing back.

A degeneration is described by its height-1 slice Δ (a polyhedral complex in
Q^k); the total cone complex Σ_Y is the cone over Δ with π the last
coordinate. The slice at height t is tΔ. For a vertex v of Δ the star of the
vertical ray through (v, 1) is identified with the tangent fan of Δ at v via
(y, h) -> y - h v, which is a lattice isomorphism because slice vertices are
required to be integral.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .cones import ConeComplex, ConeError, ConeMorphism
from .lattice import as_fraction, primitive, vadd, vscale, vsub
from .moduli import ZeroComplex, evaluate_along_ray, parameter_cone, type_of
from .one_complexes import (ChowDecoration, ComplexError, OneComplex, _int_seg, _meet, _ray_in_cell,
                           _same_closed_cell, validate_one_complex)
from .polyhedra import PolyhedralComplex, cone_over, height_map


class GlueError(ValueError):
    pass


@dataclass
class DegenerationComplex:
    slice: PolyhedralComplex
    total: ConeComplex
    pi: ConeMorphism
    directions: tuple = ()
    meta: dict = field(default_factory=dict)
    _fans: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @classmethod
    def from_slice(cls, p, directions=None, **meta):
        total, _ = cone_over(p)
        dirs = tuple(directions) if directions is not None else \
            tuple(sorted({tuple(r) for c in p.cells for r in c.rays}))
        return cls(p, total, height_map(total), tuple(tuple(d) for d in dirs), dict(meta))

    @property
    def k(self):
        return self.slice.ambient_dim

    @property
    def vertical_rays(self):
        """Ray ids of Σ_Y not contracted by π (one per slice vertex)."""
        return tuple(self.slice.vertex_names)

    def slice_at(self, t):
        return self.slice.dilate(t)

    def vertex(self, name):
        return self.slice.vertex_names.index(name)

    def tangent_fan(self, v):
        """Star of the vertical ray over vertex v, as a fan in Q^k with cone ids
        equal to the ids of the slice cells containing v."""
        if v not in self._fans:
            self._fans[v] = self._tangent_fan(v)
        return self._fans[v]

    def _tangent_fan(self, v):
        p = self.slice
        x = p.vertices[v]
        if any(c.denominator != 1 for c in x):
            raise ConeError("cutting needs integral slice vertices")
        rays, maximal, ids = [], [], {}

        def add(r):
            r = primitive(r)
            if r not in rays:
                rays.append(r)
            return rays.index(r)

        for c in p.cells:
            if v not in c.vertices:
                continue
            gens = [add(vsub(p.vertices[u], x)) for u in c.vertices if u != v]
            gens += [add(r) for r in c.rays]
            s = frozenset(gens)
            ids[s] = c.id
            maximal.append(sorted(s))
        if not rays:
            return ConeComplex.from_fan([], [], ids={frozenset(): p.vertex_names[v]})
        return ConeComplex.from_fan([tuple(int(a) for a in r) for r in rays], maximal,
                                    ids=ids)

    def edge_between(self, v, w):
        """Primitive direction from vertex v to vertex w (they must share an edge)."""
        for c in self.slice.cells:
            if sorted(c.vertices) == sorted((v, w)) and not c.rays:
                return primitive(vsub(self.slice.vertices[w], self.slice.vertices[v]))
        raise ConeError(f"vertices {v} and {w} do not span an edge of the slice")


@dataclass
class RigidComplexRecord:
    gamma: OneComplex
    decoration: ChowDecoration
    certificate: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)


def record_on_slice(d, gamma, deco=None):
    """A rigid record for a 1-complex built on slice vertices and edges."""
    gamma = OneComplex.build(gamma.positions, [(u, v) for u, v, _, _ in gamma.edges],
                             gamma.rays, d.slice)
    problems = validate_one_complex(gamma)
    index = {x: i for i, x in enumerate(d.slice.vertices)}
    for i, x in enumerate(gamma.positions):
        if x not in index:
            problems.append(f"vertex {i} is not a slice vertex")
    for i, (u, v, _, _) in enumerate(gamma.edges):
        a, b = index.get(gamma.positions[u]), index.get(gamma.positions[v])
        if a is None or b is None:
            continue
        try:
            d.edge_between(a, b)
        except (ConeError, ValueError):
            problems.append(f"edge {i} does not run along a slice edge")
    if problems:
        raise ComplexError("; ".join(problems))
    pc = parameter_cone(type_of(gamma, ambient=d.slice))
    return RigidComplexRecord(gamma, deco or ChowDecoration({}),
                              {"dimension": pc.dimension, "variables": len(pc.names)})


# -- cutting -----------------------------------------------------------------------

@dataclass(frozen=True)
class Part:
    """A 1-complex in the star of one vertex of γ, with its labels."""
    complex: OneComplex
    labels: tuple

    def key(self):
        g = self.complex
        lab = dict(self.labels)
        edges = sorted((tuple(sorted((g.positions[u], g.positions[v]))), lab.get(("e", i), 1))
                       for i, (u, v, _, _) in enumerate(g.edges))
        rays = sorted((g.positions[v], d, lab.get(("r", i), 1))
                      for i, (v, d) in enumerate(g.rays))
        return (tuple(sorted(g.positions)), tuple(edges), tuple(rays))


@dataclass
class CutResult:
    parts: dict
    evaluations: dict
    meta: dict = field(default_factory=dict)

    def key(self):
        return (tuple(sorted((v, p.key()) for v, p in self.parts.items())),
                tuple(sorted((e, a.points, b.points) for e, (a, b) in self.evaluations.items())))


def _gamma_index(d, record):
    index = {x: i for i, x in enumerate(d.slice.vertices)}
    return [index[x] for x in record.gamma.positions]


def assign_vertices(d, record, g, t):
    """Map each vertex of g to the γ-vertex whose dilate t v is nearest."""
    t = as_fraction(t)
    centers = [vscale(t, x) for x in record.gamma.positions]
    out = []
    for i, x in enumerate(g.positions):
        dist = [max(abs(a - b) for a, b in zip(x, c)) if x else 0 for c in centers]
        j = min(range(len(centers)), key=lambda j: dist[j])
        if dist[j] * 4 >= t and len(centers) > 1:
            raise ComplexError(f"vertex {i} of g is not near any vertex of γ")
        out.append(j)
    return out


def cut(d, record, g, t, deco=None):
    """Split a vertical 1-complex at height t into per-vertex star complexes."""
    gamma = record.gamma
    t = as_fraction(t)
    labels = deco.edge_labels if deco is not None else {}
    owner = assign_vertices(d, record, g, t)
    sv = _gamma_index(d, record)
    gamma_edges = {}
    for i, (u, v, _, _) in enumerate(gamma.edges):
        gamma_edges[(u, v)] = (i, 1)
        gamma_edges[(v, u)] = (i, -1)
    local = {}
    for a in range(len(gamma.positions)):
        local[a] = {"pos": [], "index": {}, "edges": [], "rays": [], "labels": {}}
    for i, x in enumerate(g.positions):
        a = owner[i]
        loc = local[a]
        loc["index"][i] = len(loc["pos"])
        loc["pos"].append(vsub(x, vscale(t, gamma.positions[a])))
    for i, (u, v, dvec, _) in enumerate(g.edges):
        a, b = owner[u], owner[v]
        m = labels.get(("e", i), 1)
        if a == b:
            loc = local[a]
            loc["labels"][("e", len(loc["edges"]))] = m
            loc["edges"].append((loc["index"][u], loc["index"][v]))
            continue
        if (a, b) not in gamma_edges:
            raise ComplexError(f"edge {i} of g joins vertices of γ that span no edge of γ")
        want = d.edge_between(sv[a], sv[b])
        if tuple(dvec) != tuple(want):
            raise ComplexError(f"edge {i} of g is not parallel to its edge of γ")
        for end, other, direction in ((a, u, want), (b, v, tuple(-x for x in want))):
            loc = local[end]
            loc["labels"][("r", len(loc["rays"]))] = m
            loc["rays"].append((loc["index"][other], direction))
    for i, (v, dvec) in enumerate(g.rays):
        loc = local[owner[v]]
        loc["labels"][("r", len(loc["rays"]))] = labels.get(("r", i), 1)
        loc["rays"].append((loc["index"][v], dvec))
    parts = {}
    for a, loc in local.items():
        fan = d.tangent_fan(sv[a])
        h = OneComplex.build(loc["pos"], loc["edges"], loc["rays"], fan)
        parts[a] = Part(h, tuple(sorted(loc["labels"].items())))
    evaluations = {}
    for i, (u, v, _, _) in enumerate(gamma.edges):
        delta = d.edge_between(sv[u], sv[v])
        evaluations[i] = (_evaluate(parts[u], delta), _evaluate(parts[v], tuple(-x for x in delta)))
    return CutResult(parts, evaluations, {"height": t})


def _evaluate(part, delta):
    deco = ChowDecoration(dict(part.labels))
    return evaluate_along_ray(part.complex, delta, deco)


# -- gluing ------------------------------------------------------------------------

def _radius(parts):
    r = Fraction(1)
    for p in parts.values():
        for x in p.complex.positions:
            for c in x:
                r = max(r, abs(c))
    return r


def _diameter_factor(d):
    """Largest lattice length of a slice edge (at least 1)."""
    best = Fraction(1)
    for c in d.slice.cells:
        if len(c.vertices) == 2 and not c.rays:
            a, b = (d.slice.vertices[i] for i in c.vertices)
            diff = vsub(b, a)
            p = primitive(diff)
            best = max(best, next(x / y for x, y in zip(diff, p) if y))
    return best


def glue(d, record, parts, max_doublings=12):
    """Reassemble a vertical 1-complex from per-vertex parts (GlueError on a
    diagonal mismatch). Returns (g, labels, t)."""
    gamma = record.gamma
    sv = _gamma_index(d, record)
    for i, (u, v, _, _) in enumerate(gamma.edges):
        delta = d.edge_between(sv[u], sv[v])
        left = _evaluate(parts[u], delta)
        right = _evaluate(parts[v], tuple(-x for x in delta))
        if left != right:
            raise GlueError(f"edge {i}: evaluations differ: {_show(left)} vs {_show(right)}")
    t = 2 * _radius(parts) * _diameter_factor(d)
    for _ in range(max_doublings):
        if _in_stars(d, record, parts, t):
            g, labels = _assemble_at(d, record, parts, t)
            if g is not None and _separated(d, record, parts, g, labels, t):
                return g, labels, t
        t *= 2
    raise GlueError("no height separates the parts")


def _show(z):
    return "{" + ", ".join(f"{list(map(str, p))}x{m}" for p, m in z.points) + "}"


def _assemble_at(d, record, parts, t):
    gamma = record.gamma
    sv = _gamma_index(d, record)
    pos, edges, rays, labels = [], [], [], {}
    offset = {}
    for a, part in parts.items():
        offset[a] = len(pos)
        base = vscale(t, gamma.positions[a])
        pos.extend(vadd(base, x) for x in part.complex.positions)
    dangling = {}
    for a, part in parts.items():
        lab = dict(part.labels)
        h = part.complex
        for i, (u, v, _, _) in enumerate(h.edges):
            labels[("e", len(edges))] = lab.get(("e", i), 1)
            edges.append((offset[a] + u, offset[a] + v))
        for i, (v, dvec) in enumerate(h.rays):
            dangling.setdefault((a, tuple(dvec)), []).append(
                (offset[a] + v, lab.get(("r", i), 1)))
    for i, (u, v, _, _) in enumerate(gamma.edges):
        delta = d.edge_between(sv[u], sv[v])
        back = tuple(-x for x in delta)
        left = dangling.pop((u, tuple(delta)), [])
        right = dangling.pop((v, back), [])
        used = set()
        for x, m in left:
            match = None
            for j, (y, n) in enumerate(right):
                if j in used or n != m:
                    continue
                diff = vsub(pos[y], pos[x])
                if any(diff) and primitive(diff) == tuple(delta):
                    match = j
                    break
            if match is None:
                return None, None
            used.add(match)
            labels[("e", len(edges))] = m
            edges.append((x, right[match][0]))
        if len(used) != len(right):
            return None, None
    for (a, dvec), items in sorted(dangling.items()):
        for x, m in items:
            labels[("r", len(rays))] = m
            rays.append((x, dvec))
    g = OneComplex.build(pos, edges, rays, d.slice_at(t))
    return g, labels


def _in_stars(d, record, parts, t):
    sl = d.slice_at(t)
    sv = _gamma_index(d, record)
    for a, part in parts.items():
        base = vscale(t, record.gamma.positions[a])
        for x in part.complex.positions:
            if not sl.in_open_star(vadd(base, x), sv[a]):
                return False
    return True


def _separated(d, record, parts, g, labels, t):
    """The glued complex is embedded and cutting it returns the parts (the
    caller has checked that each part lies in its open star)."""
    if validate_one_complex(g):
        return False
    try:
        back = cut(d, record, g, t, ChowDecoration(labels))
    except ComplexError:
        return False
    return {a: p.key() for a, p in back.parts.items()} == \
        {a: p.key() for a, p in parts.items()}


def vertical_type_key(d, record, g, t, labels=None):
    """Combinatorial type of a vertical 1-complex with vertices named by their
    γ-vertex and local position (equal keys imply equal combinatorial types)."""
    t = as_fraction(t)
    labels = labels or {}
    owner = assign_vertices(d, record, g, t)
    tp = type_of(g, ambient=d.slice_at(t))
    name = [(owner[i], vsub(x, vscale(t, record.gamma.positions[owner[i]])))
            for i, x in enumerate(g.positions)]
    verts = sorted((name[i], tp.vertex_faces[i]) for i in range(len(name)))
    edges = sorted((tuple(sorted((name[u], name[v]))), tp.edge_faces[i],
                    labels.get(("e", i), 1)) for i, (u, v, _) in enumerate(tp.edges))
    rays = sorted((name[v], dvec, tp.ray_faces[i], labels.get(("r", i), 1))
                  for i, (v, dvec) in enumerate(tp.rays))
    return (tuple(verts), tuple(edges), tuple(rays))


# -- sampling ----------------------------------------------------------------------

def _compositions(n, rng):
    parts = []
    while n:
        k = rng.randint(1, n)
        parts.append(k)
        n -= k
    return parts


def sample_vertical(d, record, rng, radius=2, deco=None, tries=200):
    """A random vertical 1-complex over the overstar of γ, built directly.

    Each γ-vertex gets one or two hubs near it; every edge and ray of γ is
    replaced by parallel strands (a random composition of its label) that start
    next to a hub and are tied to it. Returns (g, labels, t)."""
    sv = _gamma_index(d, record)
    lab = deco.edge_labels if deco is not None else {}
    t = 8 * (radius + 3) * _diameter_factor(d)
    sl = d.slice_at(t)
    for _ in range(tries):
        built = _build_sample(d, record, sv, lab, rng, radius, t)
        if built is None:
            continue
        g, labels = built
        if validate_one_complex(g):
            continue
        try:
            near = assign_vertices(d, record, g, t)
        except ComplexError:
            continue
        if all(sl.in_open_star(x, sv[a]) for x, a in zip(g.positions, near)):
            return g, labels, t
    raise ComplexError("sampler could not produce an embedded complex")


def _tangent_cone(d, a, cell):
    """Generators of the tangent cone at slice vertex a of a cell containing it."""
    p = d.slice
    x = p.vertices[a]
    return [vsub(p.vertices[u], x) for u in cell.vertices if u != a] + list(cell.rays)


def _cone_points(gens, k, rng, radius):
    geo_pts = []
    for _ in range(6):
        coeffs = [Fraction(rng.randint(0, radius), rng.randint(1, 2)) for _ in gens]
        x = tuple(sum(c * g[j] for c, g in zip(coeffs, gens)) for j in range(k))
        if all(v.denominator == 1 for v in x):
            geo_pts.append(x)
    return geo_pts


def _build_sample(d, record, sv, lab, rng, radius, t, attempts=8):
    gamma = record.gamma
    k = d.k
    amb = d.slice_at(t)
    index, pos = {}, []
    edges, rays, labels = [], [], {}
    placed = []
    zero = tuple(Fraction(0) for _ in range(k))

    def vertex(x):
        if x not in index:
            index[x] = len(pos)
            pos.append(x)
            placed.append(_int_seg((x, None, 0)))
        return index[x]

    def near(a, x):
        return vadd(vscale(t, gamma.positions[a]), x)

    def cells_with(a, need):
        return [c for c in d.slice.cells if sv[a] in c.vertices and need(c)]

    def fits(new_pts, segs, ray=None):
        """Can these fresh points, segments (p, q) and ray (p, dir) be added?"""
        if any(x in index for x in new_pts) or len(set(new_pts)) < len(new_pts):
            return False
        cand = [(a, vsub(b, a), 1) for a, b in segs if a != b]
        if ray is not None:
            cand.append((ray[0], ray[1], None))
        for a, b in segs:
            if a != b and not _same_closed_cell(amb, [a, b], vadd(a, vscale(Fraction(1, 2),
                                                                           vsub(b, a)))):
                return False
        if ray is not None and not _ray_in_cell(amb, *ray):
            return False
        cand = [_int_seg(c) for c in cand]
        pts = [_int_seg((x, None, 0)) for x in new_pts]
        for i, c in enumerate(cand):
            if any(_meet(c, o) for o in placed + pts + cand[i + 1:]):
                return False
        return not any(_meet(p, o) for p in pts for o in placed)

    def commit(new_pts, segs, ray=None, m=1, strand=None):
        for x in new_pts:
            vertex(x)
        for a, b in segs:
            if a == b:
                continue
            labels[("e", len(edges))] = m if (a, b) == strand else 1
            edges.append((index[a], index[b]))
            placed.append(_int_seg((a, vsub(b, a), 1)))
        if ray is not None:
            labels[("r", len(rays))] = m
            rays.append((index[ray[0]], ray[1]))
            placed.append(_int_seg((ray[0], ray[1], None)))

    # hubs: the vertex itself and possibly one point inside a cell around it
    hubs = {}
    for a in range(len(gamma.positions)):
        hubs[a] = [(near(a, zero), None)]
        vertex(near(a, zero))
    for a in range(len(gamma.positions)):
        if rng.random() < 0.5:
            c = rng.choice(cells_with(a, lambda c: True))
            pts = [near(a, x) for x in _cone_points(_tangent_cone(d, sv[a], c), k, rng, radius)
                   if any(x)]
            if pts and fits([pts[0]], [(hubs[a][0][0], pts[0])]):
                commit([pts[0]], [(hubs[a][0][0], pts[0])])
                hubs[a].append((pts[0], c))

    def hub_for(a, cell):
        return rng.choice([h for h, c in hubs[a] if c is None or c.id == cell.id])

    for i, (u, v, _, _) in enumerate(gamma.edges):
        delta = d.edge_between(sv[u], sv[v])
        pair = {sv[u], sv[v]}
        j = next(n for n, c in enumerate(delta) if c)
        for m in _compositions(lab.get(("e", i), 1), rng):
            for _ in range(attempts):
                cell = rng.choice(cells_with(u, lambda c: pair <= set(c.vertices)))
                starts = _cone_points(_tangent_cone(d, sv[u], cell), k, rng, radius)
                if not starts:
                    continue
                xu = starts[0]
                back = vsub(near(u, xu), vscale(t, gamma.positions[v]))
                base = Fraction(int(-back[j] / delta[j]))
                lam = base + rng.randint(-2, 2)
                xv = vadd(back, vscale(lam, delta))
                a, b = near(u, xu), near(v, xv)
                ha, hb = hub_for(u, cell), hub_for(v, cell)
                fresh = [x for x in (a, b) if x not in (ha, hb)]
                segs = [(ha, a), (a, b), (b, hb)]
                if fits(fresh, segs):
                    commit(fresh, segs, m=m, strand=(a, b))
                    break
            else:
                return None
    for i, (a, dvec) in enumerate(gamma.rays):
        for m in _compositions(lab.get(("r", i), 1), rng):
            for _ in range(attempts):
                cell = rng.choice(cells_with(a, lambda c: tuple(dvec) in c.rays))
                starts = _cone_points(_tangent_cone(d, sv[a], cell), k, rng, radius)
                if not starts:
                    continue
                x, h = near(a, starts[0]), hub_for(a, cell)
                fresh = [x] if x != h else []
                if x == h and any(r == (index[h], dvec) for r in rays):
                    continue
                if fits(fresh, [(h, x)], (x, dvec)):
                    commit(fresh, [(h, x)], (x, dvec), m=m)
                    break
            else:
                return None
    try:
        g = OneComplex.build(pos, edges, rays, amb)
    except (ComplexError, ValueError, ZeroDivisionError):
        return None
    return g, labels


def _in_cone(gens, x, k):
    from .geometry import geometry_of
    return geometry_of([primitive(g) for g in gens if any(g)], k).contains(x)


# -- decorations -------------------------------------------------------------------

def split_decorations(record, beta, chi=None, bounds=None):
    """All distributions of the class vector beta (and Euler characteristic chi)
    over the vertices of γ. `bounds` maps a vertex to an inclusive (lo, hi) range
    for its χ (or genus); required when chi is given."""
    n = len(record.gamma.positions)
    beta = tuple(int(b) for b in beta)
    if any(b < 0 for b in beta):
        raise ValueError("inconsistent totals: negative class")
    per_coord = []
    for b in beta:
        per_coord.append([c for c in _splits(b, n)])
    classes = []
    for combo in product(*per_coord):
        classes.append([tuple(combo[j][v] for j in range(len(beta))) for v in range(n)])
    if chi is None:
        return [{"classes": c} for c in classes]
    if bounds is None:
        raise ValueError("χ distributions need per-vertex bounds")
    ranges = [range(bounds[v][0], bounds[v][1] + 1) for v in range(n)]
    out = []
    for c in classes:
        for chis in product(*ranges):
            if sum(chis) == chi:
                out.append({"classes": c, "chi": list(chis)})
    if not out:
        raise ValueError("inconsistent totals: no distribution within the bounds")
    return out


def _splits(b, n):
    if n == 1:
        yield (b,)
        return
    for first in range(b + 1):
        for rest in _splits(b - first, n - 1):
            yield (first,) + rest


# -- fixtures ----------------------------------------------------------------------

def segment_fixture():
    """Two components meeting along one divisor: the slice is [0, 1]."""
    p = PolyhedralComplex.build([(0,), (1,)], {"s": ([0, 1], [])}, ["a", "b"])
    d = DegenerationComplex.from_slice(p, name="segment")
    gamma = OneComplex.build([(0,), (1,)], [(0, 1)])
    return d, record_on_slice(d, gamma, ChowDecoration({("e", 0): 2}))


def triangle_fixture():
    """Slice dual to the subdivision of the cubic Newton triangle at (1,1)."""
    verts = [(0, -1), (-1, 0), (1, 1)]
    cells = {
        "T": ([0, 1, 2], []),
        "L": ([1, 0], [(-1, 0), (0, -1)]),
        "U": ([1, 2], [(-1, 0), (1, 1)]),
        "R": ([0, 2], [(0, -1), (1, 1)]),
    }
    p = PolyhedralComplex.build(verts, cells, ["a", "b", "c"])
    d = DegenerationComplex.from_slice(p, directions=[(-1, 0), (0, -1), (1, 1)], name="triangle")
    gamma = OneComplex.build(verts, [(0, 1), (1, 2), (2, 0)],
                             [(1, (-1, 0)), (0, (0, -1)), (2, (1, 1))])
    deco = ChowDecoration({("r", 0): 3, ("r", 1): 3, ("r", 2): 3})
    return d, record_on_slice(d, gamma, deco)


def chain_fixture():
    """Three components in a row: the half-strip [0,2] x R>=0 cut at x = 1."""
    verts = [(0, 0), (1, 0), (2, 0)]
    cells = {"A": ([0, 1], [(0, 1)]), "B": ([1, 2], [(0, 1)])}
    p = PolyhedralComplex.build(verts, cells, ["a", "b", "c"])
    d = DegenerationComplex.from_slice(p, directions=[(0, 1)], name="chain")
    gamma = OneComplex.build(verts, [(0, 1), (1, 2)], [(1, (0, 1))])
    deco = ChowDecoration({("e", 0): 2, ("e", 1): 1, ("r", 0): 1})
    return d, record_on_slice(d, gamma, deco)


FIXTURES = {"segment": segment_fixture, "triangle": triangle_fixture, "chain": chain_fixture}


def empty_evaluation():
    return ZeroComplex.of([])
