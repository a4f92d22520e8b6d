"""Embedded 0- and 1-complexes, their decorations, purity and balancing."""
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .cones import ConeComplex, ConeError
from .lattice import (as_fraction, lattice_length, primitive, rank, solve, transpose,
                      vadd, vscale, vsub)
from .polyhedra import PolyhedralComplex


class ComplexError(ValueError):
    pass


def _vec(v):
    return tuple(as_fraction(x) for x in v)


@dataclass(frozen=True)
class OneComplex:
    """Vertices, bounded edges (u, v, direction, length) and rays (v, direction)."""
    ambient: object
    positions: tuple
    edges: tuple = ()
    rays: tuple = ()
    faces: tuple = ()

    @classmethod
    def build(cls, positions, edges=(), rays=(), ambient=None):
        """`edges` are vertex pairs, `rays` are (vertex, direction)."""
        pos = tuple(_vec(p) for p in positions)
        es = []
        for u, v in edges:
            d = vsub(pos[v], pos[u])
            if not any(d):
                raise ComplexError(f"edge {u}-{v} has length zero")
            es.append((u, v, primitive(d), lattice_length(d)))
        rs = [(v, primitive(d)) for v, d in rays]
        g = cls(ambient, pos, tuple(es), tuple(rs))
        return g.with_faces()

    def with_faces(self):
        if self.ambient is None:
            return replace(self, faces=tuple(None for _ in self.positions))
        return replace(self, faces=tuple(_containing(self.ambient, p)
                                         for p in self.positions))

    @property
    def dim(self):
        return len(self.positions[0]) if self.positions else 0

    @property
    def is_zero_complex(self):
        return not self.edges and not self.rays

    def incident(self, v):
        """Outgoing (kind, index, direction) flags at vertex v."""
        out = []
        for i, (a, b, d, _) in enumerate(self.edges):
            if a == v:
                out.append(("e", i, d))
            if b == v:
                out.append(("e", i, tuple(-x for x in d)))
        for i, (a, d) in enumerate(self.rays):
            if a == v:
                out.append(("r", i, d))
        return out

    def valence(self, v):
        return len(self.incident(v))

    def cells(self):
        return [("v", i) for i in range(len(self.positions))] + \
            [("e", i) for i in range(len(self.edges))] + \
            [("r", i) for i in range(len(self.rays))]

    def segment(self, cell):
        """(base point, direction vector, upper parameter or None)."""
        kind, i = cell
        if kind == "v":
            return self.positions[i], None, 0
        if kind == "e":
            u, _, d, length = self.edges[i]
            return self.positions[u], d, length
        v, d = self.rays[i]
        return self.positions[v], d, None

    def dilate(self, t):
        t = as_fraction(t)
        pos = tuple(vscale(t, p) for p in self.positions)
        es = tuple((u, v, d, t * ell) for u, v, d, ell in self.edges)
        return replace(self, positions=pos, edges=es)

    def translate(self, shift):
        pos = tuple(vadd(p, _vec(shift)) for p in self.positions)
        return replace(self, positions=pos, ambient=None).with_faces()

    def point_set_key(self):
        """Canonical description of the realized point set (no free vertices)."""
        pieces = set()
        for i in range(len(self.edges)):
            p, d, ell = self.segment(("e", i))
            q = vadd(p, vscale(ell, d))
            pieces.add(("seg",) + tuple(sorted([p, q])))
        for v, d in self.rays:
            pieces.add(("ray", self.positions[v], d))
        return pieces


def _containing(ambient, x):
    if isinstance(ambient, ConeComplex):
        c = ambient.minimal_cone_containing(x)
        return c.id if c is not None else None
    if isinstance(ambient, PolyhedralComplex):
        c = ambient.containing_cell(x)
        return c.id if c is not None else None
    return None


@dataclass(frozen=True)
class ChowDecoration:
    """Edge labels keyed by ("e", i) / ("r", i) and integer vertex classes."""
    edge_labels: dict
    vertex_classes: dict = field(default_factory=dict)

    def label(self, cell):
        return self.edge_labels.get(cell, 1)

    def vclass(self, v, width=1):
        return tuple(self.vertex_classes.get(v, (0,) * width))


@dataclass(frozen=True)
class HilbertDecoration(ChowDecoration):
    vertex_euler: dict = field(default_factory=dict)
    total_chi: int = 0


def validate_decoration(g, deco):
    problems = []
    for cell, n in deco.edge_labels.items():
        kind, i = cell
        pool = g.edges if kind == "e" else g.rays
        if kind not in ("e", "r") or not 0 <= i < len(pool):
            problems.append(f"label on unknown cell {cell}")
        elif not (isinstance(n, int) and n > 0):
            problems.append(f"label {n} on {cell} is not a positive integer")
    for v, beta in deco.vertex_classes.items():
        if not 0 <= v < len(g.positions):
            problems.append(f"class on unknown vertex {v}")
        elif any(b < 0 for b in beta):
            problems.append(f"class {beta} at vertex {v} is not effective")
    if isinstance(deco, HilbertDecoration):
        if sum(deco.vertex_euler.values()) != deco.total_chi:
            problems.append("vertex Euler characteristics do not sum to the total")
    return problems


# -- embeddedness ----------------------------------------------------------------

def _int_seg(seg):
    """The same cell with integral coordinates stored as ints (faster)."""
    p, d, top = seg
    def f(v):
        if v is None or not all(getattr(x, "denominator", 2) == 1 for x in v):
            return v
        return tuple(int(x) for x in v)
    return f(p), f(d), top


def _meet(a, b):
    """Do the relative interiors of two cells intersect?"""
    pa, da, ta = a
    pb, db, tb = b
    if da is None and db is None:
        return pa == pb
    if da is None:
        return _on_open(pa, b)
    if db is None:
        return _on_open(pb, a)
    if _parallel(da, db):
        if not _parallel(da, vsub(pb, pa)):
            return False
        # collinear: compare open parameter intervals along da (None = infinite)
        sc = next(x / y for x, y in zip(db, da) if y)
        off = next((x / y for x, y in zip(vsub(pb, pa), da) if y), Fraction(0))
        far = None if tb is None else off + sc * tb
        lo_b, hi_b = (off, far) if sc > 0 else (far, off)
        lo = Fraction(0) if lo_b is None else max(Fraction(0), lo_b)
        his = [h for h in (ta, hi_b) if h is not None]
        return not his or lo < min(his)
    w = vsub(pb, pa)
    # s*da - t*db = w; Cramer on a pair of rows with nonzero minor, then verify
    n = len(da)
    i, j = next((i, j) for i in range(n) for j in range(i + 1, n)
                if da[i] * db[j] != da[j] * db[i])
    m = -da[i] * db[j] + da[j] * db[i]
    s = Fraction(-w[i] * db[j] + w[j] * db[i], m)
    t = Fraction(da[i] * w[j] - da[j] * w[i], m)
    if any(s * x - t * y != z for x, y, z in zip(da, db, w)):
        return False
    return 0 < s and (ta is None or s < ta) and 0 < t and (tb is None or t < tb)


def _parallel(a, b):
    n = len(a)
    return all(a[i] * b[j] == a[j] * b[i] for i in range(n) for j in range(i + 1, n))


def _box(seg):
    """Coordinatewise bounds of a closed cell, None for unbounded."""
    p, d, top = seg
    if d is None:
        return [(x, x) for x in p]
    if top is None:
        return [(x, None) if c > 0 else (None, x) if c < 0 else (x, x) for x, c in zip(p, d)]
    q = vadd(p, vscale(top, d))
    return [(min(a, b), max(a, b)) for a, b in zip(p, q)]


def _boxes_meet(a, b):
    for (lo1, hi1), (lo2, hi2) in zip(a, b):
        if lo1 is not None and hi2 is not None and hi2 < lo1:
            return False
        if lo2 is not None and hi1 is not None and hi1 < lo2:
            return False
    return True


def _on_open(x, seg):
    p, d, top = seg
    w = vsub(x, p)
    if not _parallel(d, w):
        return False
    s = next(a / b for a, b in zip(w, d) if b) if any(w) else Fraction(0)
    return 0 < s and (top is None or s < top)


def validate_one_complex(g):
    """List of problems with the embedded 1-complex g."""
    problems = []
    n = len(g.positions)
    if len(set(g.positions)) != n:
        problems.append("two vertices share a position")
    for i, (u, v, d, ell) in enumerate(g.edges):
        if not (0 <= u < n and 0 <= v < n):
            problems.append(f"edge {i} references an unknown vertex")
            continue
        if ell <= 0:
            problems.append(f"edge {i} has nonpositive length")
        if vsub(g.positions[v], g.positions[u]) != vscale(ell, d):
            problems.append(f"edge {i}: endpoints do not differ by length x direction")
        if primitive(d) != tuple(d):
            problems.append(f"edge {i}: direction is not primitive")
    for i, (v, d) in enumerate(g.rays):
        if not 0 <= v < n:
            problems.append(f"ray {i} references an unknown vertex")
        elif primitive(d) != tuple(d):
            problems.append(f"ray {i}: direction is not primitive")
    if problems:
        return problems
    if g.ambient is not None:
        problems += _ambient_problems(g)
    cells = g.cells()
    segs = [_int_seg(g.segment(c)) for c in cells]
    boxes = [_box(sg) for sg in segs]
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            if _boxes_meet(boxes[i], boxes[j]) and _meet(segs[i], segs[j]):
                problems.append(f"cells {cells[i]} and {cells[j]} intersect")
    return problems


def _ambient_problems(g):
    amb = g.ambient
    out = []
    for i, p in enumerate(g.positions):
        if _containing(amb, p) is None:
            out.append(f"vertex {i} lies outside the ambient support")
    for i, (u, v, d, ell) in enumerate(g.edges):
        mid = vadd(g.positions[u], vscale(ell / 2, d))
        if not _same_closed_cell(amb, [g.positions[u], g.positions[v]], mid):
            out.append(f"edge {i} is not inside a single ambient face")
    for i, (v, d) in enumerate(g.rays):
        if not _ray_in_cell(amb, g.positions[v], d):
            out.append(f"ray {i} is not inside a single ambient face")
    return out


def _same_closed_cell(amb, pts, mid):
    cid = _containing(amb, mid)
    if cid is None:
        return False
    if isinstance(amb, ConeComplex):
        geo = amb.cone(cid).geometry
        return all(geo.contains(p) for p in pts)
    geo = amb.geometry(cid)
    return all(geo.contains(p) for p in pts)


def _ray_in_cell(amb, x, d):
    probe = vadd(x, d)
    cid = _containing(amb, probe)
    if cid is None:
        return False
    if isinstance(amb, ConeComplex):
        geo = amb.cone(cid).geometry
        return geo.contains(x) and geo.contains(d)
    geo = amb.geometry(cid)
    return geo.contains(x) and geo.cone.contains(tuple(d) + (0,))


# -- purity and retraction -------------------------------------------------------

def _common_face(g, v, flags):
    """Do the cells of `flags` at v lie in one closed ambient face?"""
    if g.ambient is None:
        return True
    pts = [g.positions[v]]
    for kind, i, d in flags:
        if kind == "e":
            a, b, _, _ = g.edges[i]
            pts.append(g.positions[b if a == v else a])
        else:
            pts.append(vadd(g.positions[v], d))
    centre = tuple(sum(c) / len(pts) for c in zip(*pts))
    return _same_closed_cell(g.ambient, pts, centre)


def _is_linear(g, v):
    flags = g.incident(v)
    if len(flags) != 2:
        return False
    (_, _, d1), (_, _, d2) = flags
    return tuple(d1) == tuple(-x for x in d2) and _common_face(g, v, flags)


def is_pure(g):
    return all(g.valence(v) > 0 and not _is_linear(g, v)
               for v in range(len(g.positions)))


def _marked(deco, v):
    if deco is None:
        return False
    if any(deco.vertex_classes.get(v, ())):
        return True
    return isinstance(deco, HilbertDecoration) and deco.vertex_euler.get(v, 0) != 0


def retract_to_pure(g, deco=None):
    """Erase free and linear 2-valent vertices.

    Vertices carrying a nonzero decoration are kept, as is the vertex of a
    complete line (two opposite rays), which has no vertex-free description.
    Returns the retracted complex, or (complex, decoration) when `deco` is given.
    """
    labels = dict(deco.edge_labels) if deco else {}
    changed = True
    while changed:
        changed = False
        for v in range(len(g.positions)):
            if _marked(deco, v):
                continue
            flags = g.incident(v)
            if not flags:
                g, labels, deco = _drop_vertex(g, v, labels, deco)
                changed = True
                break
            if not _is_linear(g, v):
                continue
            kinds = sorted(k for k, _, _ in flags)
            if kinds == ["r", "r"]:
                continue
            n1, n2 = (labels.get((k, i), 1) for k, i, _ in flags)
            if deco is not None and n1 != n2:
                continue
            g, labels = _splice(g, v, flags, labels, n1)
            g, labels, deco = _drop_vertex(g, v, labels, deco)
            changed = True
            break
    if deco is None:
        return g
    return g, replace(deco, edge_labels=labels)


def _splice(g, v, flags, labels, n):
    (k1, i1, d1), (k2, i2, d2) = sorted(flags)
    edges = list(g.edges)
    rays = list(g.rays)
    other = lambda i: edges[i][0] if edges[i][1] == v else edges[i][1]
    if k2 == "r":
        a = other(i1)
        rays[i2] = (a, tuple(d2))
        edges[i1] = None
        new_labels = {("r", i2): n}
        drop = [("e", i1)]
    else:
        a, b = other(i1), other(i2)
        # keep orientation a -> b
        d = tuple(-x for x in d1)
        edges[i1] = (a, b, d, edges[i1][3] + edges[i2][3])
        edges[i2] = None
        new_labels = {("e", i1): n}
        drop = [("e", i2)]
    labels = {c: m for c, m in labels.items() if c not in drop}
    labels.update(new_labels)
    return _compact(g, edges, rays, labels)


def _compact(g, edges, rays, labels):
    emap = {}
    es = []
    for i, e in enumerate(edges):
        if e is not None:
            emap[i] = len(es)
            es.append(e)
    new_labels = {}
    for (k, i), m in labels.items():
        if k == "e" and i in emap:
            new_labels[("e", emap[i])] = m
        elif k == "r":
            new_labels[("r", i)] = m
    return replace(g, edges=tuple(es), rays=tuple(rays)), new_labels


def _drop_vertex(g, v, labels, deco):
    remap = lambda i: i - (i > v)
    pos = g.positions[:v] + g.positions[v + 1:]
    faces = g.faces[:v] + g.faces[v + 1:] if g.faces else ()
    es = tuple((remap(a), remap(b), d, ell) for a, b, d, ell in g.edges)
    rs = tuple((remap(a), d) for a, d in g.rays)
    g = replace(g, positions=pos, edges=es, rays=rs, faces=faces)
    if deco is not None:
        cls_ = {remap(i): c for i, c in deco.vertex_classes.items() if i != v}
        kw = {"vertex_classes": cls_, "edge_labels": labels}
        if isinstance(deco, HilbertDecoration):
            kw["vertex_euler"] = {remap(i): c for i, c in deco.vertex_euler.items()
                                  if i != v}
        deco = replace(deco, **kw)
    return g, labels, deco


def total_class(g, deco, width):
    out = [0] * width
    for v in range(len(g.positions)):
        for j, b in enumerate(deco.vclass(v, width)):
            out[j] += b
    return tuple(out)


def specialize(g, deco, groups, positions=None):
    """Merge each group of vertices into one; labels, classes and χ add.

    `positions` optionally gives the new position of each group (default: the
    position of its first member). Edges inside a group disappear; parallel
    cells that become equal are merged.
    """
    owner = {}
    for j, grp in enumerate(groups):
        for v in grp:
            owner[v] = j
    for v in range(len(g.positions)):
        if v not in owner:
            owner[v] = len(groups)
            groups = list(groups) + [[v]]
    pos = [(_vec(positions[j]) if positions and j < len(positions) and positions[j]
            is not None else g.positions[grp[0]]) for j, grp in enumerate(groups)]
    width = max((len(c) for c in deco.vertex_classes.values()), default=1)
    classes = {}
    euler = {}
    for v, j in owner.items():
        c = deco.vclass(v, width)
        classes[j] = tuple(a + b for a, b in zip(classes.get(j, (0,) * width), c))
        if isinstance(deco, HilbertDecoration):
            euler[j] = euler.get(j, 0) + deco.vertex_euler.get(v, 0)
    cells = {}
    for i, (u, v, _, _) in enumerate(g.edges):
        a, b = owner[u], owner[v]
        if a == b:
            continue
        d = vsub(pos[b], pos[a])
        key = ("e",) + ((a, b, primitive(d)) if a < b else
                        (b, a, primitive(tuple(-x for x in d))))
        cells[key] = cells.get(key, 0) + deco.label(("e", i))
    for i, (v, d) in enumerate(g.rays):
        key = ("r", owner[v], tuple(d))
        cells[key] = cells.get(key, 0) + deco.label(("r", i))
    edges, rays, labels = [], [], {}
    for key, n in sorted(cells.items()):
        if key[0] == "e":
            labels[("e", len(edges))] = n
            edges.append((key[1], key[2]))
        else:
            labels[("r", len(rays))] = n
            rays.append((key[1], key[2]))
    out = OneComplex.build(pos, edges, rays, g.ambient)
    kw = {"edge_labels": labels, "vertex_classes": classes}
    if isinstance(deco, HilbertDecoration):
        kw["vertex_euler"] = euler
    return out, replace(deco, **kw)


# -- tropical stable maps ----------------------------------------------------------

@dataclass(frozen=True)
class TropicalMap:
    """Graph with vertex images, bounded edges (u, v, dilation) and marked legs
    (v, primitive direction or zero, dilation)."""
    positions: tuple
    edges: tuple = ()
    legs: tuple = ()
    vertex_genus: tuple = ()
    vertex_classes: tuple = ()
    ambient: object = None

    @classmethod
    def build(cls, positions, edges=(), legs=(), genus=None, classes=None, ambient=None):
        pos = tuple(_vec(p) for p in positions)
        n = len(pos)
        return cls(pos, tuple((u, v, int(m)) for u, v, m in edges),
                   tuple((v, tuple(int(x) for x in d), int(m)) for v, d, m in legs),
                   tuple(genus or (0,) * n), tuple(tuple(c) for c in (classes or [(0,)] * n)),
                   ambient)

    def flags(self, v):
        out = []
        for u, w, m in self.edges:
            if u == w:
                continue
            if u == v:
                out.append((m, primitive(vsub(self.positions[w], self.positions[u]))))
            if w == v:
                out.append((m, primitive(vsub(self.positions[u], self.positions[w]))))
        for a, d, m in self.legs:
            if a == v and any(d):
                out.append((m, primitive(d)))
        return out


def _ambient_rays(amb):
    if isinstance(amb, ConeComplex):
        return [tuple(c.ray_generators[0]) for c in amb.rays()]
    if isinstance(amb, PolyhedralComplex):
        return sorted({tuple(r) for c in amb.cells for r in c.rays})
    return None


def validate_tropical_map(t):
    problems = []
    for i, (u, v, m) in enumerate(t.edges):
        if t.positions[u] == t.positions[v]:
            problems.append(f"bounded edge {i} is contracted")
        elif m < 1:
            problems.append(f"bounded edge {i} has dilation {m} < 1")
    rays = _ambient_rays(t.ambient)
    for i, (v, d, m) in enumerate(t.legs):
        if not any(d):
            continue
        if m < 1:
            problems.append(f"leg {i + 1} has dilation {m} < 1")
        if rays is not None and primitive(d) not in rays:
            problems.append(f"leg {i + 1} is not parallel to a ray of the ambient complex")
    return problems


def _interior_of_maximal(amb, x):
    if amb is None:
        return True
    if isinstance(amb, ConeComplex):
        c = amb.minimal_cone_containing(x)
        return c is not None and c.id in amb.maximal_cones()
    c = amb.containing_cell(x)
    if c is None:
        return False
    return not any(c.id != o.id and amb.is_face(c, o) for o in amb.cells)


def check_balancing(t):
    """Vertices inside maximal cells whose weighted direction sum is nonzero."""
    bad = []
    k = len(t.positions[0]) if t.positions else 0
    for v in range(len(t.positions)):
        if not _interior_of_maximal(t.ambient, t.positions[v]):
            continue
        total = [0] * k
        for m, d in t.flags(v):
            total = [a + m * b for a, b in zip(total, d)]
        if any(total):
            bad.append(v)
    return bad


def _breakpoints(segs):
    """Split parameter sets: for each piece the sorted parameters of all points
    of other pieces (and crossings) lying on it."""
    cuts = [set() for _ in segs]
    for i, (p, d, top) in enumerate(segs):
        cuts[i].add(Fraction(0))
        if top is not None:
            cuts[i].add(top)
    for i, a in enumerate(segs):
        for j, b in enumerate(segs):
            if i == j:
                continue
            pb, db, tb = b
            ends = [pb] + ([vadd(pb, vscale(tb, db))] if tb is not None else [])
            for x in ends:
                s = _param_on(x, a)
                if s is not None:
                    cuts[i].add(s)
            pa, da, ta = a
            if rank([list(da), list(db)]) == 2:
                sol = solve(transpose([list(da), [-x for x in db]]), vsub(pb, pa))
                if sol is not None:
                    s, t = sol
                    if 0 <= s and (ta is None or s <= ta) and 0 <= t and \
                            (tb is None or t <= tb):
                        cuts[i].add(s)
    return [sorted(c) for c in cuts]


def _param_on(x, seg):
    p, d, top = seg
    w = vsub(x, p)
    if any(w) and rank([list(d), list(w)]) > 1:
        return None
    s = next((a / b for a, b in zip(w, d) if b), Fraction(0))
    if s < 0 or (top is not None and s > top):
        return None
    return s


def chow_of_tropical_map(t):
    """Image 1-complex with summed dilations and vertex classes.

    Crossings and overlaps of image cells become vertices; a vertex with no
    graph vertex over it carries class 0.
    """
    segs, weights = [], []
    for u, w, m in t.edges:
        d = vsub(t.positions[w], t.positions[u])
        segs.append((t.positions[u], primitive(d), lattice_length(d)))
        weights.append(m)
    for v, d, m in t.legs:
        if any(d):
            segs.append((t.positions[v], primitive(d), None))
            weights.append(m)
    cuts = _breakpoints(segs)
    points = {}

    def vid(x):
        if x not in points:
            points[x] = len(points)
        return points[x]

    for p in t.positions:
        vid(p)
    pieces = {}
    for (p, d, top), cs, m in zip(segs, cuts, weights):
        for a, b in zip(cs, cs[1:]):
            x, y = vid(vadd(p, vscale(a, d))), vid(vadd(p, vscale(b, d)))
            key = ("e", min(x, y), max(x, y))
            pieces[key] = pieces.get(key, 0) + m
        if top is None:
            key = ("r", vid(vadd(p, vscale(cs[-1], d))), tuple(d))
            pieces[key] = pieces.get(key, 0) + m
    pos = sorted(points, key=points.get)
    width = len(t.vertex_classes[0]) if t.vertex_classes else 1
    classes = {}
    for v, p in enumerate(t.positions):
        j = points[p]
        c = t.vertex_classes[v] if v < len(t.vertex_classes) else (0,) * width
        classes[j] = tuple(a + b for a, b in zip(classes.get(j, (0,) * width), c))
    for j in range(len(pos)):
        classes.setdefault(j, (0,) * width)
    edges, rays, labels = [], [], {}
    for key, m in sorted(pieces.items()):
        if key[0] == "e":
            labels[("e", len(edges))] = m
            edges.append((key[1], key[2]))
        else:
            labels[("r", len(rays))] = m
            rays.append((key[1], key[2]))
    g = OneComplex.build(pos, edges, rays, t.ambient)
    return g, ChowDecoration(labels, classes)


def subdivide(g, deco, points):
    """Insert a vertex (class 0) at each given point lying in the relative
    interior of an edge or ray; labels are inherited by both halves."""
    segs, labels = [], []
    for i, (u, v, d, ell) in enumerate(g.edges):
        segs.append((g.positions[u], d, ell))
        labels.append(deco.label(("e", i)) if deco else 1)
    for i, (v, d) in enumerate(g.rays):
        segs.append((g.positions[v], d, None))
        labels.append(deco.label(("r", i)) if deco else 1)
    pos = list(g.positions)
    index = {p: i for i, p in enumerate(pos)}
    for x in points:
        x = _vec(x)
        if x not in index and any(_param_on(x, s) is not None for s in segs):
            index[x] = len(pos)
            pos.append(x)
    edges, rays, out = [], [], {}
    for (p, d, top), m in zip(segs, labels):
        cuts = sorted({Fraction(0)} | ({top} if top is not None else set()) |
                      {s for s in (_param_on(x, (p, d, top)) for x in pos) if s is not None})
        for a, b in zip(cuts, cuts[1:]):
            out[("e", len(edges))] = m
            edges.append((index[vadd(p, vscale(a, d))], index[vadd(p, vscale(b, d))]))
        if top is None:
            out[("r", len(rays))] = m
            rays.append((index[vadd(p, vscale(cuts[-1], d))], d))
    h = OneComplex.build(pos, edges, rays, g.ambient)
    if deco is None:
        return h, None
    width = len(next(iter(deco.vertex_classes.values()), (0,)))
    classes = {v: deco.vclass(v, width) for v in range(len(g.positions))}
    classes.update({v: (0,) * width for v in range(len(g.positions), len(pos))})
    if isinstance(deco, HilbertDecoration):
        euler = dict(deco.vertex_euler)
        euler.update({v: 0 for v in range(len(g.positions), len(pos))})
        return h, HilbertDecoration(out, classes, euler, deco.total_chi)
    return h, ChowDecoration(out, classes)


def first_betti(g):
    """b1 of the underlying graph (rays do not contribute)."""
    parent = list(range(len(g.positions)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    cycles = 0
    for u, v, _, _ in g.edges:
        a, b = find(u), find(v)
        if a == b:
            cycles += 1
        else:
            parent[a] = b
    return cycles


def ensure_ambient(amb):
    if amb is not None and not isinstance(amb, (ConeComplex, PolyhedralComplex)):
        raise ConeError("ambient must be a cone complex or a polyhedral complex")
    return amb
