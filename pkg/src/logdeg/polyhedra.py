"""Polyhedral complexes (height slices of cone complexes) and the cone over one."""
from dataclasses import dataclass, field
from fractions import Fraction

from .cones import ConeComplex, ConeError, ConeMorphism, ray_complex
from .geometry import cleared, polyhedron_geometry
from .lattice import as_fraction, primitive


@dataclass(frozen=True)
class Cell:
    id: str
    vertices: tuple
    rays: tuple = ()


@dataclass(frozen=True)
class PolyhedralComplex:
    ambient_dim: int
    vertices: tuple
    cells: tuple
    vertex_names: tuple = ()
    meta: dict = field(default_factory=dict, compare=False, hash=False)
    _geo: dict = field(default_factory=dict, init=False, compare=False, hash=False, repr=False)

    @classmethod
    def build(cls, vertices, cells, vertex_names=None, add_faces=True):
        """`cells` maps id -> (vertex indices, recession directions)."""
        verts = tuple(tuple(as_fraction(x) for x in v) for v in vertices)
        k = len(verts[0]) if verts else 0
        out = []
        for cid, (vs, rs) in cells.items():
            out.append(Cell(cid, tuple(sorted(vs)),
                            tuple(sorted(primitive(r) for r in rs))))
        pc = cls(k, verts, tuple(out), tuple(vertex_names or
                                            [f"v{i}" for i in range(len(verts))]))
        return pc.with_all_faces() if add_faces else pc

    def cell(self, cid):
        for c in self.cells:
            if c.id == cid:
                return c
        raise ConeError(f"unknown cell {cid!r}")

    def geometry(self, cell):
        if isinstance(cell, str):
            cell = self.cell(cell)
        key = (cell.vertices, cell.rays)
        if key not in self._geo:
            self._geo[key] = polyhedron_geometry(
                [self.vertices[i] for i in cell.vertices], cell.rays, self.ambient_dim)
        return self._geo[key]

    def dimension(self, cell):
        return self.geometry(cell).dim

    def is_face(self, a, b):
        """Is cell a a face of cell b?"""
        a, b = (self.cell(x) if isinstance(x, str) else x for x in (a, b))
        if not set(a.vertices) <= set(b.vertices) or not set(a.rays) <= set(b.rays):
            return False
        g = self.geometry(b)
        idx = [b.vertices.index(v) for v in a.vertices] + \
            [len(b.vertices) + b.rays.index(r) for r in a.rays]
        face = g.cone.face_of(idx)
        return set(face) == set(idx)

    def with_all_faces(self):
        """Add every face of every cell as a cell (named by its generators)."""
        known = {(c.vertices, c.rays): c for c in self.cells}
        todo = list(self.cells)
        while todo:
            c = todo.pop()
            g = self.geometry(c)
            nv = len(c.vertices)
            for face in g.cone.faces():
                vs = tuple(sorted(c.vertices[i] for i in face if i < nv))
                rs = tuple(sorted(c.rays[i - nv] for i in face if i >= nv))
                if not vs or (vs, rs) in known:
                    continue
                name = "|".join([self.vertex_names[i] for i in vs] +
                                ["~" + ",".join(map(str, r)) for r in rs])
                new = Cell(name, vs, rs)
                known[(vs, rs)] = new
                todo.append(new)
        cells = sorted(known.values(), key=lambda c: (self._dim_of(c), c.id))
        return PolyhedralComplex(self.ambient_dim, self.vertices, tuple(cells),
                                 self.vertex_names, dict(self.meta))

    def _dim_of(self, c):
        return self.geometry(c).dim

    def vertex_cell(self, i):
        for c in self.cells:
            if c.vertices == (i,) and not c.rays:
                return c
        raise ConeError(f"vertex {i} has no cell")

    def _top_first(self):
        # relative interiors are disjoint; generic points usually hit a top cell
        if "top first" not in self._geo:
            self._geo["top first"] = sorted(self.cells, key=lambda c: -self._dim_of(c))
        return self._geo["top first"]

    def containing_cell(self, x):
        """Cell whose relative interior contains x (None outside the support)."""
        h = cleared(tuple(x) + (1,))
        for c in self._top_first():
            if self.geometry(c).cone.in_relint_cleared(h):
                return c
        return None

    def cells_containing_vertex(self, i):
        return [c for c in self.cells if i in c.vertices]

    def in_open_star(self, x, i):
        """x lies in the union of relative interiors of cells containing vertex i."""
        c = self.containing_cell(x)
        return c is not None and i in c.vertices

    def edges(self):
        return [c for c in self.cells if self._dim_of(c) == 1]

    def dilate(self, t):
        t = as_fraction(t)
        verts = tuple(tuple(t * x for x in v) for v in self.vertices)
        out = PolyhedralComplex(self.ambient_dim, verts, self.cells, self.vertex_names,
                                dict(self.meta))
        if t > 0:
            out._geo["top first"] = self._top_first()
        return out

    def same_combinatorics(self, other):
        return [(c.id, c.vertices, c.rays) for c in self.cells] == \
            [(c.id, c.vertices, c.rays) for c in other.cells]


def _functional(pi):
    if isinstance(pi, ConeMorphism):
        if pi.target.ambient_rank != 1:
            raise ConeError("π must target the one-ray complex R>=0")
        return tuple(pi.matrix[0])
    pi = tuple(pi)
    if pi and isinstance(pi[0], (tuple, list)):
        if len(pi) != 1:
            raise ConeError("π must target the one-ray complex R>=0")
        pi = tuple(pi[0])
    return pi


def slice_complex(c, pi, height):
    """The polyhedral complex π^{-1}(height) ∩ |c|, in the coordinates of c."""
    h = as_fraction(height)
    if h <= 0:
        raise ConeError("height must be positive")
    f = _functional(pi)
    rays, sets = c.fan_view()
    vals = [sum(a * b for a, b in zip(f, r)) for r in rays]
    if any(v < 0 for v in vals):
        raise ConeError("π is negative on a ray of the complex")
    vertex_rays = [i for i, v in enumerate(vals) if v > 0]
    vindex = {r: j for j, r in enumerate(vertex_rays)}
    names = []
    ray_ids = {}
    for cid, s in sets.items():
        if len(s) == 1:
            ray_ids[next(iter(s))] = cid
    verts = []
    for i in vertex_rays:
        verts.append(tuple(h * as_fraction(x) / vals[i] for x in rays[i]))
        names.append(ray_ids.get(i, f"v{i}"))
    cells = []
    for cid, s in sets.items():
        vs = tuple(sorted(vindex[i] for i in s if vals[i] > 0))
        if not vs:
            continue
        rs = tuple(sorted(tuple(rays[i]) for i in s if vals[i] == 0))
        cells.append(Cell(cid, vs, rs))
    k = c.ambient_rank
    out = PolyhedralComplex(k, tuple(verts), tuple(cells), tuple(names))
    object.__setattr__(out, "meta", {"height": h, "pi": f})
    return out


def cone_over(p, names=None):
    """The cone complex over a polyhedral complex placed at height 1 in R^{k+1}.

    Returns (complex, {cell id: cone id}); the projection to the last
    coordinate is the height map.
    """
    rays = []
    index = {}

    def add(v):
        v = primitive(v)
        if v not in index:
            index[v] = len(rays)
            rays.append(v)
        return index[v]

    vray = [add(tuple(x for x in v) + (Fraction(1),)) for v in p.vertices]
    maximal = []
    ids = {}
    for c in p.cells:
        s = frozenset([vray[i] for i in c.vertices] +
                      [add(tuple(r) + (0,)) for r in c.rays])
        ids[s] = c.id
        maximal.append(sorted(s))
    rnames = list(names) if names else [None] * len(rays)
    for i, v in enumerate(p.vertices):
        rnames[vray[i]] = p.vertex_names[i] if p.vertex_names else f"v{i}"
    for r, i in index.items():
        if rnames[i] is None:
            rnames[i] = "~" + ",".join(map(str, r[:-1]))
    for i, v in enumerate(p.vertices):
        ids[frozenset([vray[i]])] = rnames[vray[i]]
    fan = ConeComplex.from_fan(rays, maximal, names=rnames, ids=ids)
    return fan, {c.id: c.id for c in p.cells}


def height_map(c):
    k = c.ambient_rank
    return ConeMorphism(c, ray_complex(), (tuple(int(i == k - 1) for i in range(k)),))


def drop_last(p):
    """Forget the (constant) last coordinate of a slice of a cone over."""
    verts = tuple(v[:-1] for v in p.vertices)
    cells = tuple(Cell(c.id, c.vertices, tuple(r[:-1] for r in c.rays)) for c in p.cells)
    out = PolyhedralComplex(p.ambient_dim - 1, verts, cells, p.vertex_names)
    object.__setattr__(out, "meta", dict(p.meta))
    return out
