"""Parameter cones of combinatorial types, tropical evaluation and flattening."""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm

from .cones import Cone, ConeComplex, ConeError, ConeMorphism, has_reduced_fibers, \
    is_combinatorially_flat
from .geometry import geometry_of
from .lattice import (as_fraction, coordinates, dot, integer_kernel, lattice_index, matvec,
                      nullspace, primitive, rank, row_hnf, saturation, solve, transpose, vadd, vscale)
from .lp import Infeasible, Unbounded, maximize, strictly_feasible_point
from .one_complexes import ChowDecoration, OneComplex
from .polyhedra import PolyhedralComplex


@dataclass(frozen=True)
class CombinatorialType:
    """Graph, containing faces, directions and incidence conditions of a 1-complex.

    `incidences` are (point index, cell) with cell ("v"|"e"|"r", index). Face ids
    may be None, meaning "unconstrained" (ambient None is all of Q^k).
    """
    k: int
    n_vertices: int
    edges: tuple = ()
    rays: tuple = ()
    vertex_faces: tuple = ()
    edge_faces: tuple = ()
    ray_faces: tuple = ()
    points: tuple = ()
    incidences: tuple = ()
    ambient: object = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((u, v, tuple(int(x) for x in d))
                                                for u, v, d in self.edges))
        object.__setattr__(self, "rays", tuple((v, tuple(int(x) for x in d))
                                               for v, d in self.rays))
        object.__setattr__(self, "points", tuple(tuple(as_fraction(x) for x in p)
                                                 for p in self.points))
        for name, n in (("vertex_faces", self.n_vertices), ("edge_faces", len(self.edges)),
                        ("ray_faces", len(self.rays))):
            if not getattr(self, name):
                object.__setattr__(self, name, (None,) * n)

    def key(self):
        return (self.n_vertices, self.edges, self.rays, self.vertex_faces,
                self.edge_faces, self.ray_faces, tuple(sorted(self.incidences)))


def _face_geometry(ambient, fid):
    """(equations, strict inequalities) as lists of (a, b): a.x + b (=0 / >0),
    plus the recession cone geometry."""
    if isinstance(ambient, ConeComplex):
        geo = ambient.cone(fid).geometry
        eqs = [(e, Fraction(0)) for e in geo.equations]
        ineq = [(n, Fraction(0)) for n, _ in geo.facets]
        return eqs, ineq, geo
    if isinstance(ambient, PolyhedralComplex):
        pg = ambient.geometry(fid)
        eqs = [(tuple(e[:-1]), e[-1]) for e in pg.cone.equations]
        ineq = pg.inequalities()
        cell = ambient.cell(fid)
        rec = geometry_of(cell.rays, ambient.ambient_dim) if cell.rays else \
            geometry_of([], ambient.ambient_dim)
        return eqs, ineq, rec
    raise ConeError("unknown ambient type")


@dataclass
class ParameterCone:
    """Relatively open polyhedron of realizations of a combinatorial type.

    Variables: vertex coordinates, then edge lengths, then one parameter per
    incidence on an edge or ray. Rows are (coefficients, constant) meaning
    a.z + c = 0 (eq), > 0 (strict) or >= 0 (weak).
    """
    names: list
    eq: list
    strict: list
    weak: list = field(default_factory=list)
    dimension: int = -1
    point: tuple = None
    directions: tuple = ()

    @property
    def empty(self):
        return self.dimension < 0

    def is_conical(self):
        return all(c == 0 for _, c in self.eq + self.strict + self.weak)


def _system(t):
    k = t.k
    n = t.n_vertices
    ne = len(t.edges)
    inc_params = [i for i, (_, cell) in enumerate(t.incidences) if cell[0] in ("e", "r")]
    nvar = k * n + ne + len(inc_params)
    names = [f"x{v}_{j}" for v in range(n) for j in range(k)] + \
        [f"len{e}" for e in range(ne)] + [f"lam{i}" for i in inc_params]
    lam = {i: k * n + ne + j for j, i in enumerate(inc_params)}
    X = lambda v, j: k * v + j
    L = lambda e: k * n + e
    eq, strict, weak = [], [], []

    def row():
        return [Fraction(0)] * nvar

    def vertex_affine(v, a, b, rows):
        r = row()
        for j in range(k):
            r[X(v, j)] += a[j]
        rows.append((r, b))

    for e, (u, v, d) in enumerate(t.edges):
        for j in range(k):
            r = row()
            r[X(v, j)] += 1
            r[X(u, j)] -= 1
            r[L(e)] -= d[j]
            eq.append((r, Fraction(0)))
        r = row()
        r[L(e)] = Fraction(1)
        strict.append((r, Fraction(0)))
    amb = t.ambient
    if amb is not None:
        for v, fid in enumerate(t.vertex_faces):
            if fid is None:
                continue
            eqs, ineq, _ = _face_geometry(amb, fid)
            for a, b in eqs:
                vertex_affine(v, a, b, eq)
            for a, b in ineq:
                vertex_affine(v, a, b, strict)
        for e, (u, v, d) in enumerate(t.edges):
            fid = t.edge_faces[e]
            if fid is None:
                continue
            eqs, ineq, _ = _face_geometry(amb, fid)
            for rows, lst in ((eqs, eq), (ineq, strict)):
                for a, b in rows:
                    r = row()
                    for j in range(k):
                        r[X(u, j)] += a[j] / 2
                        r[X(v, j)] += a[j] / 2
                    lst.append((r, b))
            for a, b in ineq:
                vertex_affine(u, a, b, weak)
                vertex_affine(v, a, b, weak)
        for i, (v, d) in enumerate(t.rays):
            fid = t.ray_faces[i]
            if fid is None:
                continue
            eqs, ineq, rec = _face_geometry(amb, fid)
            if not rec.contains(d):
                return names, None
            for a, b in eqs:
                vertex_affine(v, a, b, eq)
            # the open ray lies in the relative interior: facets the ray direction
            # moves away from are automatic, the others must be strict at x_v
            for a, b in ineq:
                vertex_affine(v, a, b, weak if dot(a, d) > 0 else strict)
    for i, (p, cell) in enumerate(t.incidences):
        pt = t.points[p]
        kind, c = cell
        if kind == "v":
            for j in range(k):
                r = row()
                r[X(c, j)] = Fraction(1)
                eq.append((r, -pt[j]))
            continue
        if kind == "e":
            base, d = t.edges[c][0], t.edges[c][2]
        else:
            base, d = t.rays[c]
        for j in range(k):
            r = row()
            r[X(base, j)] = Fraction(1)
            r[lam[i]] = Fraction(d[j])
            eq.append((r, -pt[j]))
        r = row()
        r[lam[i]] = Fraction(1)
        strict.append((r, Fraction(0)))
        if kind == "e":
            r = row()
            r[L(c)] = Fraction(1)
            r[lam[i]] = Fraction(-1)
            strict.append((r, Fraction(0)))
    return names, (eq, strict, weak)


def parameter_cone(t):
    names, system = _system(t)
    if system is None:
        return ParameterCone(names, [], [], [], -1, None)
    eq, strict, weak = system
    n = len(names)
    A_eq = [r for r, _ in eq]
    z0 = solve(A_eq, [-c for _, c in eq]) if eq else (Fraction(0),) * n
    if z0 is None:
        return ParameterCone(names, eq, strict, weak, -1, None)
    # work on the solution space of the equalities: z = z0 + N y
    N = nullspace(A_eq, n) if eq else nullspace([], n)
    f = len(N)

    def reduce(rows):
        out = []
        for r, c in rows:
            out.append((tuple(sum(r[j] * b[j] for j in range(n)) for b in N), dot(r, z0) + c))
        return out

    rs, rw = reduce(strict), reduce(weak)
    if any(not any(a) and c <= 0 for a, c in rs) or any(not any(a) and c < 0 for a, c in rw):
        return ParameterCone(names, eq, strict, weak, -1, None)
    rs = [(a, c) for a, c in rs if any(a)]
    rw = [(a, c) for a, c in rw if any(a)]
    if f == 0:
        return ParameterCone(names, eq, strict, weak, 0, tuple(z0), ())
    y = strictly_feasible_point([], [], [a for a, _ in rs], [-c for _, c in rs],
                                [a for a, _ in rw], [-c for _, c in rw]) if rs or rw \
        else (Fraction(0),) * f
    if y is None:
        return ParameterCone(names, eq, strict, weak, -1, None)
    implicit = [a for a, c in rw if dot(a, y) + c == 0 and _forced(a, c, rs + rw)]
    free = nullspace([list(a) for a in implicit], f) if implicit else nullspace([], f)
    dirs = tuple(tuple(sum(c[i] * N[i][j] for i in range(f)) for j in range(n)) for c in free)
    point = tuple(z0[j] + sum(y[i] * N[i][j] for i in range(f)) for j in range(n))
    return ParameterCone(names, eq, strict, weak, len(free), point, dirs)


def _forced(r, c, rows):
    """Is the row r.y + c >= 0 tight on the whole closed region `rows` >= 0?"""
    try:
        val, _ = maximize(r, [[-x for x in a] for a, _ in rows], [b for _, b in rows])
    except Unbounded:
        return False
    except Infeasible:
        return True
    return val + c <= 0


def random_interior_point(pc, rng, spread=4):
    """A random point of the relative interior (None for an empty cone)."""
    if pc.empty:
        return None
    if not pc.directions:
        return pc.point
    coeffs = [Fraction(rng.randint(-spread * 8, spread * 8), 8) for _ in pc.directions]
    step = Fraction(1)
    for _ in range(64):
        z = tuple(p + step * sum(c * d[j] for c, d in zip(coeffs, pc.directions))
                  for j, p in enumerate(pc.point))
        if all(dot(r, z) + c > 0 for r, c in pc.strict) and \
                all(dot(r, z) + c >= 0 for r, c in pc.weak):
            return z
        step /= 2
    return pc.point


def is_rigid(t):
    return parameter_cone(t).dimension == 0


def realize(t, z):
    """The 1-complex with parameters z (a point of the parameter cone)."""
    k = t.k
    pos = [tuple(as_fraction(z[k * v + j]) for j in range(k)) for v in range(t.n_vertices)]
    return OneComplex.build(pos, [(u, v) for u, v, _ in t.edges],
                            [(v, d) for v, d in t.rays], t.ambient)


def _cell_face(ambient, mid):
    if ambient is None:
        return None
    if isinstance(ambient, ConeComplex):
        c = ambient.minimal_cone_containing(mid)
        return c.id if c is not None else None
    c = ambient.containing_cell(mid)
    return c.id if c is not None else None


def type_of(g, points=(), ambient=None):
    """Combinatorial type of an embedded 1-complex, incidences found by location."""
    amb = ambient if ambient is not None else g.ambient
    k = g.dim
    vf = tuple(_cell_face(amb, p) for p in g.positions)
    ef = []
    for u, v, d, ell in g.edges:
        ef.append(_cell_face(amb, vadd(g.positions[u], vscale(ell / 2, d))))
    rf = tuple(_cell_face(amb, vadd(g.positions[v], d)) for v, d in g.rays)
    inc = []
    for i, p in enumerate(points):
        p = tuple(as_fraction(x) for x in p)
        cell = locate(g, p)
        if cell is not None:
            inc.append((i, cell))
    return CombinatorialType(k, len(g.positions), tuple((u, v, d) for u, v, d, _ in g.edges),
                             tuple(g.rays), vf, tuple(ef), rf, tuple(points), tuple(inc), amb)


def locate(g, p):
    """The cell of g whose relative interior contains p, or None."""
    for i, q in enumerate(g.positions):
        if q == p:
            return ("v", i)
    for i, (u, v, d, ell) in enumerate(g.edges):
        s = _along(g.positions[u], d, p)
        if s is not None and 0 < s < ell:
            return ("e", i)
    for i, (v, d) in enumerate(g.rays):
        s = _along(g.positions[v], d, p)
        if s is not None and s > 0:
            return ("r", i)
    return None


def _along(base, d, p):
    w = tuple(a - b for a, b in zip(p, base))
    if rank([list(d), list(w)]) > 1:
        return None
    return next((a / b for a, b in zip(w, d) if b), Fraction(0))


# -- evaluation ------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroComplex:
    """A 0-complex: points (quotient coordinates) with multiplicities."""
    points: tuple
    ambient: object = None

    @classmethod
    def of(cls, pts, ambient=None):
        agg = {}
        for p, m in pts:
            p = tuple(as_fraction(x) for x in p)
            agg[p] = agg.get(p, 0) + m
        return cls(tuple(sorted(agg.items())), ambient)

    def __eq__(self, other):
        return isinstance(other, ZeroComplex) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    @property
    def empty(self):
        return not self.points

    def faces(self):
        if self.ambient is None:
            return None
        return [self.ambient.minimal_cone_containing(p).id for p, _ in self.points]

    def dilate(self, t):
        t = as_fraction(t)
        return ZeroComplex.of([(vscale(t, p), m) for p, m in self.points], self.ambient)


def quotient_matrix(direction, k):
    """Rows of Z^k -> Z^k / saturated span(direction), in canonical form."""
    return [list(r) for r in _quotient(tuple(int(x) for x in direction), k)]


@lru_cache(maxsize=4096)
def _quotient(direction, k):
    _, _, Q, _ = saturation([direction], k)
    return tuple(map(tuple, transpose(Q))) if Q and Q[0] else ()


def _ambient_ray_dirs(amb):
    if isinstance(amb, ConeComplex):
        return {tuple(c.ray_generators[0]): c.id for c in amb.rays()}
    if isinstance(amb, PolyhedralComplex):
        return {tuple(r): "~" + ",".join(map(str, r)) for c in amb.cells for r in c.rays}
    return None


def ray_direction(amb, delta):
    dirs = _ambient_ray_dirs(amb)
    if isinstance(delta, str):
        for d, cid in (dirs or {}).items():
            if cid == delta:
                return d
        raise ConeError(f"unknown ray {delta!r}")
    return primitive(delta)


def evaluate_along_ray(g, delta, deco=None, ambient=None, star_complex=None):
    """The 0-complex cut out by the rays of g parallel to delta."""
    amb = ambient if ambient is not None else g.ambient
    d = ray_direction(amb, delta)
    dirs = _ambient_ray_dirs(amb)
    if dirs is not None:
        for i, (_, r) in enumerate(g.rays):
            if tuple(r) not in dirs:
                raise ConeError(f"ray {i} of the 1-complex is not parallel to an ambient ray")
    Q = quotient_matrix(d, g.dim)
    pts = []
    for i, (v, r) in enumerate(g.rays):
        if tuple(r) == tuple(d):
            m = deco.label(("r", i)) if deco is not None else 1
            pts.append((matvec(Q, g.positions[v]), m))
    return ZeroComplex.of(pts, star_complex)


def evaluation_matrix(t, delta):
    """Linear map from parameters to the stacked quotient positions of the
    delta-parallel rays (in ray order). Returns (matrix, ray indices)."""
    d = primitive(delta)
    Q = quotient_matrix(d, t.k)
    names, _ = _system(t)
    rows = []
    which = []
    for i, (v, r) in enumerate(t.rays):
        if tuple(r) != tuple(d):
            continue
        which.append(i)
        for q in Q:
            row = [0] * len(names)
            for j in range(t.k):
                row[t.k * v + j] = q[j]
            rows.append(row)
    return rows, which


def cone_rays(pc):
    """Extremal rays of the closure of a conical parameter cone."""
    if pc.empty:
        raise ConeError("empty parameter cone")
    if not pc.is_conical():
        raise ConeError("parameter set is not a cone (point conditions or a slice)")
    n = len(pc.names)
    N = nullspace([r for r, _ in pc.eq], n) if pc.eq else nullspace([], n)
    d = len(N)
    ineq = [tuple(dot(r, b) for b in N) for r, _ in pc.strict + pc.weak]
    ineq = [a for a in ineq if any(a)]
    if d == 0:
        return []
    if d == 1:
        cands = [(Fraction(1),), (Fraction(-1),)]
    else:
        cands = []
        for combo in combinations(ineq, d - 1):
            if rank([list(a) for a in combo]) != d - 1:
                continue
            ns = nullspace([list(a) for a in combo], d)
            cands += [ns[0], tuple(-x for x in ns[0])]
    out = []
    for y in cands:
        if all(dot(a, y) >= 0 for a in ineq):
            z = primitive(tuple(sum(c * b[j] for c, b in zip(y, N)) for j in range(n)))
            if z not in out:
                out.append(z)
    geo = geometry_of(out, n)
    if not geo.pointed:
        raise ConeError("parameter cone has a lineality space")
    return [out[i] for i in sorted(geo.extremal())]


# -- flattening --------------------------------------------------------------------

@dataclass
class EvaluationFamily:
    """Source cones (name -> rays in their own lattice) with linear maps into
    the lattice of a target fan."""
    sources: dict
    maps: dict
    target: ConeComplex


def family_from_types(types, delta, target):
    sources, maps = {}, {}
    for name, t in types.items():
        pc = parameter_cone(t)
        sources[name] = cone_rays(pc)
        maps[name] = evaluation_matrix(t, delta)[0]
    return EvaluationFamily(sources, maps, target)


def split_cone(rays, h):
    """(part with h >= 0, part with h <= 0) as extremal ray lists (None if empty)."""
    vals = [dot(h, r) for r in rays]
    k = len(rays[0])

    def side(sign):
        keep = [r for r, v in zip(rays, vals) if sign * v >= 0]
        for r, a in zip(rays, vals):
            for s, b in zip(rays, vals):
                if sign * a > 0 and sign * b < 0:
                    keep.append(primitive(tuple(abs(a) * y + abs(b) * x for x, y in zip(r, s))))
        keep = sorted(set(tuple(x) for x in keep if any(x)))
        if not keep:
            return []
        geo = geometry_of(keep, k)
        return [keep[i] for i in sorted(geo.extremal())]

    return side(1), side(-1)


def _cut(rays, normals, equations):
    """cone(rays) ∩ {n >= 0} ∩ {e = 0}."""
    cur = list(rays)
    for n in normals:
        if not cur:
            return []
        cur = split_cone(cur, n)[0]
    for e in equations:
        if not cur:
            return []
        cur = split_cone(split_cone(cur, e)[0], e)[1]
    return cur


def _hyperplanes(geo):
    out = [tuple(n) for n, _ in geo.facets] + [tuple(e) for e in geo.equations]
    return out


@dataclass
class FlattenResult:
    source: dict
    target: ConeComplex
    morphisms: dict
    meta: dict


def flatten_evaluation(family, max_cones=5000):
    """Subdivide source and target so every source cone surjects onto a target
    cone, then refine target lattices (and, on conflicts, source lattices) so
    fibers are reduced. Lattices are refined last."""
    tgt_rays, tgt_sets = family.target.fan_view()
    m = family.target.ambient_rank
    hyper = set()
    for name, rays in family.sources.items():
        M = family.maps[name]
        imgs = [matvec(M, r) for r in rays]
        imgs = [primitive(v) for v in imgs if any(v)]
        geo = geometry_of(sorted(set(imgs)), m)
        for hp in _hyperplanes(geo):
            if any(hp):
                p = primitive(hp)
                hyper.add(max(p, tuple(-x for x in p)))
    pieces = []
    for cid in family.target.maximal_cones():
        cur = [[tgt_rays[i] for i in sorted(tgt_sets[cid])]]
        for h in sorted(hyper):
            nxt = []
            for c in cur:
                a, b = split_cone(c, h)
                for part in (a, b):
                    if part and geometry_of(part, m).dim == geometry_of(c, m).dim:
                        nxt.append(part)
            cur = nxt or cur
            if len(cur) > max_cones:
                raise ConeError("input collection too large to flatten")
        pieces.extend(cur)
    refined = _fan_from_pieces(pieces, m)
    changed_target = len(refined.cones) != len(family.target.cones)
    source_out, morphisms = {}, {}
    changed_source = {}
    for name, rays in family.sources.items():
        M = family.maps[name]
        k = len(rays[0]) if rays else len(M[0])
        full = geometry_of(rays, k).dim
        parts = []
        for cid in refined.maximal_cones():
            geo = refined.cone(cid).geometry
            normals = [tuple(primitive(tuple(dot(n, col) for col in transpose(M))))
                       if any(dot(n, col) for col in transpose(M)) else None
                       for n, _ in geo.facets]
            eqs = [tuple(dot(e, col) for col in transpose(M)) for e in geo.equations]
            part = _cut(rays, [n for n in normals if n is not None],
                        [primitive(e) for e in eqs if any(e)])
            if part and geometry_of(part, k).dim == full:
                parts.append(tuple(sorted(part)))
        parts = sorted(set(parts))
        changed_source[name] = parts != [tuple(sorted(rays))]
        fan = _fan_from_pieces([list(p) for p in parts], k)
        source_out[name] = fan
        morphisms[name] = ConeMorphism(fan, refined, tuple(tuple(r) for r in M))
    for name, f in morphisms.items():
        if not is_combinatorially_flat(f):
            raise ConeError(f"flattening failed for {name}")
    target, target_notes = _refine_target_lattices(refined, morphisms)
    source_notes = {}
    for name, f in morphisms.items():
        src, notes = _refine_source_lattices(ConeMorphism(f.source, target, f.matrix))
        source_out[name] = src
        morphisms[name] = ConeMorphism(src, target, f.matrix)
        if notes:
            source_notes[name] = notes
    meta = {"order": ["subdivide target by image hyperplanes",
                      "pull back to source", "refine target lattices",
                      "refine source lattices"],
            "target_subdivided": changed_target,
            "source_subdivided": changed_source,
            "lattices": target_notes,
            "source_lattices": source_notes,
            "reduced_fibers": all(has_reduced_fibers(f) for f in morphisms.values())}
    return FlattenResult(source_out, target, morphisms, meta)


def _fan_from_pieces(pieces, k):
    rays = sorted({tuple(r) for p in pieces for r in p})
    index = {r: i for i, r in enumerate(rays)}
    return ConeComplex.from_fan(rays, [[index[tuple(r)] for r in p] for p in pieces])


def _hnf_basis(vectors):
    return [tuple(r) for r in row_hnf([list(v) for v in vectors]) if any(r)]


def _intersect_lattices(A, B, k):
    """Z-basis of lattice(A) ∩ lattice(B), both given by Z-bases of one subspace."""
    if not A or not B:
        return []
    M = transpose([list(a) for a in A] + [[-x for x in b] for b in B])
    out = []
    for c in integer_kernel(M, len(A) + len(B)):
        v = tuple(sum(c[i] * A[i][j] for i in range(len(A))) for j in range(k))
        if any(v):
            out.append(v)
    return _hnf_basis(out)


def _with_lattices(c, lattices):
    cones = tuple(Cone(x.id, x.ambient_rank, x.ray_generators, lattices[x.id])
                  if x.id in lattices else x for x in c.cones)
    out = ConeComplex(cones, c.face_maps)
    object.__setattr__(out, "meta", dict(c.meta))
    return out


def _refine_target_lattices(target, morphisms):
    """Each target cone gets the intersection of the images of the lattices of
    the source cones mapping onto it."""
    m = target.ambient_rank
    images = {}
    for name, f in morphisms.items():
        for sid, tid in f.cone_assignment().items():
            img = [v for v in (matvec(f.matrix, b) for b in f.source.cone(sid).lattice_basis())
                   if any(v)]
            if img and target.cone(tid).ray_generators:
                images.setdefault(tid, []).append((name, sid, _hnf_basis(img)))
    notes, lattices = {}, {}
    for c in target.cones:
        entries = images.get(c.id)
        if not entries:
            continue
        L = entries[0][2]
        for _, _, img in entries[1:]:
            L = _intersect_lattices(L, img, m)
        idx = lattice_index(L, c.lattice_basis())
        if idx > 1:
            lattices[c.id] = tuple(L)
            notes[c.id] = {"index": idx, "basis": [list(map(int, v)) for v in L],
                           "sources": sorted({f"{n}:{s}" for n, s, _ in entries})}
    return _with_lattices(target, lattices), notes


def _refine_source_lattices(f):
    """Shrink each source lattice to the preimage of its target cone's lattice."""
    lattices, notes = {}, {}
    assign = f.cone_assignment()
    for c in f.source.cones:
        t = f.target.cone(assign[c.id])
        B = c.lattice_basis()
        LT = t.lattice_basis()
        if not B or not LT:
            continue
        cols = [coordinates(LT, matvec(f.matrix, b)) for b in B]
        D = lcm(*[x.denominator for col in cols for x in col])
        if D == 1:
            continue
        r = len(LT)
        # c in Z^d with (D*C) c in D*Z^r
        M = [[int(D * cols[j][i]) for j in range(len(B))] + [-D * int(i == q) for q in range(r)]
             for i in range(r)]
        ker = integer_kernel(M, len(B) + r)
        gens = [tuple(sum(v[j] * B[j][a] for j in range(len(B))) for a in range(c.ambient_rank))
                for v in ker]
        L = _hnf_basis([g for g in gens if any(g)])
        lattices[c.id] = tuple(L)
        notes[c.id] = {"index": lattice_index(L, B), "basis": [list(map(int, v)) for v in L]}
    return _with_lattices(f.source, lattices), notes


def fixture_non_flat_evaluation():
    """The single-divisor non-flat evaluation family.

    Surface fan with rays (1,0), (-1,1), (-1,-1); a 1-complex with vertices
    A = (a,0), B = A + s(-1,1), C = A + s(-1,-1), a wall vertex D = (a-s, 0),
    three rays parallel to (1,0) and the balancing rays of weight 2. Evaluating
    along (1,0) records the heights (0, s, -s) of the three parallel rays, so
    the 2-dimensional parameter cone lands on a line through the interior of
    the 2-dimensional target cone {p_A = 0, p_B >= 0, p_C <= 0}.
    """
    fan = ConeComplex.from_fan([(1, 0), (-1, 1), (-1, -1)], [[0, 1], [1, 2], [2, 0]],
                               names=["r1", "r2", "r3"])
    t = CombinatorialType(
        2, 4,
        edges=((0, 1, (-1, 1)), (0, 2, (-1, -1)), (1, 3, (0, -1)), (3, 2, (0, -1))),
        rays=((0, (1, 0)), (1, (1, 0)), (1, (-1, 1)), (2, (1, 0)), (2, (-1, -1))),
        vertex_faces=("r1", "r1+r2", "r1+r3", "r1"),
        edge_faces=("r1+r2", "r1+r3", "r1+r2", "r1+r3"),
        ray_faces=("r1", "r1+r2", "r1+r2", "r1+r3", "r1+r3"),
        ambient=fan)
    target = ConeComplex.from_fan([(0, 1, 0), (0, 0, -1)], [[0, 1]], names=["pB", "pC"])
    labels = {("r", 0): 2, ("r", 1): 1, ("r", 2): 2, ("r", 3): 1, ("r", 4): 2}
    return t, target, ChowDecoration(labels)


def reduced_after(result):
    return result.meta["reduced_fibers"]
