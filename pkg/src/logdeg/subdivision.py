"""Relative barycentric subdivision of a flat map between two single cones."""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from .cones import ConeComplex, ConeError
from .geometry import geometry_of
from .lattice import (as_fraction, det, dot, matvec, nullspace,
                      primitive, rank, solve, transpose)


@dataclass(frozen=True)
class ConeMap:
    """A linear map sending cone(source_rays) into cone(target_rays)."""
    source_rays: tuple
    target_rays: tuple
    matrix: tuple

    def __post_init__(self):
        for name in ("source_rays", "target_rays", "matrix"):
            object.__setattr__(self, name, tuple(tuple(int(x) for x in v)
                                                 for v in getattr(self, name)))

    @property
    def source_rank(self):
        return len(self.source_rays[0]) if self.source_rays else len(self.matrix[0])

    @property
    def target_rank(self):
        return len(self.matrix)

    def apply(self, v):
        return matvec(self.matrix, v)

    @property
    def source(self):
        return geometry_of(self.source_rays, self.source_rank)

    @property
    def target(self):
        return geometry_of(self.target_rays, self.target_rank)


@dataclass
class Subdivision:
    """Maximal cones of a subdivision, each a tuple of primitive generators."""
    ambient_rank: int
    pieces: list
    meta: dict = field(default_factory=dict)

    def rays(self):
        return sorted({r for p in self.pieces for r in p})

    def as_complex(self):
        rays = self.rays()
        index = {r: i for i, r in enumerate(rays)}
        return ConeComplex.from_fan(rays, [[index[r] for r in p] for p in self.pieces])


def _smallest_face(tau, vecs):
    """Generator indices of the smallest face of tau containing `vecs`."""
    face = frozenset(range(len(tau.gens)))
    for n, z in tau.facets:
        if all(dot(n, v) == 0 for v in vecs):
            face &= z
    return face


def image_face(f, gens):
    """The face of the target onto which cone(gens) maps, or None if the image
    is not a whole face (the map is not flat there)."""
    tau = f.target
    imgs = [f.apply(g) for g in gens]
    if not all(tau.contains(v) for v in imgs):
        raise ConeError("map does not send the source cone into the target cone")
    nonzero = [v for v in imgs if any(v)]
    face = _smallest_face(tau, nonzero)
    if not nonzero:
        return face if rank([tau.gens[i] for i in face]) == 0 else None
    img = geometry_of(nonzero, f.target_rank)
    if all(img.contains(tau.gens[i]) for i in face):
        return face
    return None


def is_flat_cone_map(f):
    sigma = f.source
    for face in sigma.faces():
        if image_face(f, [sigma.gens[i] for i in face]) is None:
            return False
    return True


def triangulate(gens, k, idx=None):
    """Pulling triangulation of cone(gens) using only its own generators."""
    geo = geometry_of(gens, k)
    idx = sorted(geo.extremal()) if idx is None else sorted(idx)
    sub = geometry_of([gens[i] for i in idx], k)
    if sub.dim == len(idx):
        return [tuple(idx)]
    apex = idx[0]
    out = []
    for _, zero in sub.facets:
        facet = [idx[j] for j in zero]
        if apex in facet:
            continue
        for simplex in triangulate(gens, k, facet):
            out.append((apex,) + simplex)
    return out


def _face_flags(geo, face):
    """Maximal chains of nonempty faces ending at `face` (top first)."""
    d = rank([geo.gens[i] for i in face])
    if d == 1:
        return [[face]]
    out = []
    for g in geo.faces():
        if g < face and g and rank([geo.gens[i] for i in g]) == d - 1:
            for chain in _face_flags(geo, g):
                out.append([face] + chain)
    return out


def relative_barycentric_subdivide(f):
    """Subdivide the source cone of a flat map so every cone surjects onto a face.

    When the image is at most a ray, the pieces are cones over the barycentric
    subdivision of the fiber polytope. For higher-dimensional images the fiber
    over y is the Minkowski sum of the fibers over the target rays, and the
    pieces are products of their barycentric subdivisions.
    """
    if not is_flat_cone_map(f):
        raise ConeError("map is not combinatorially flat on the source cone")
    sigma = f.source
    k = f.source_rank
    ext = sorted(sigma.extremal())
    gens = [sigma.gens[i] for i in ext]
    imgs = [f.apply(g) for g in gens]
    if any(not any(v) for v in imgs):
        raise ConeError("rays contracted by the map are not supported")
    if sigma.dim == 0:
        return Subdivision(k, [()], {"image_dim": 0})
    image_dim = rank(imgs)
    # normalized rays: r / c with f(r) = c * (primitive image ray)
    target_ray = [primitive(v) for v in imgs]
    scale = [next(a / b for a, b in zip(v, p) if b) for v, p in zip(imgs, target_ray)]
    norm = [tuple(as_fraction(x) / c for x in g) for g, c in zip(gens, scale)]

    def bary(indices):
        pts = [norm[i] for i in indices]
        return primitive(tuple(sum(c) for c in zip(*pts)))

    pieces = set()
    if image_dim == 1:
        geo = geometry_of(gens, k)
        full = frozenset(range(len(gens)))
        for chain in _face_flags(geo, full):
            pieces.add(tuple(sorted(bary(sorted(F)) for F in chain)))
    else:
        for simplex in triangulate(gens, k):
            groups = {}
            for i in simplex:
                groups.setdefault(target_ray[i], []).append(i)
            parts = [[]]
            for members in groups.values():
                chains = []
                for perm in permutations(members):
                    chains.append([bary(perm[:j]) for j in range(1, len(perm) + 1)])
                parts = [p + c for p in parts for c in chains]
            for p in parts:
                pieces.add(tuple(sorted(p)))
    return Subdivision(k, sorted(pieces), {"image_dim": image_dim,
                                          "fiberwise": "barycentric" if image_dim == 1
                                          else "product of barycentric"})


# -- postcondition -----------------------------------------------------------

def _span_coords(geo):
    basis = geo.span_basis
    return lambda v: solve(transpose(basis), v)


def _height(geo):
    h = [Fraction(0)] * geo.k
    for n, _ in geo.facets:
        h = [a + b for a, b in zip(h, n)]
    if not geo.facets:
        h = list(geo.gens[0])
    return h


def _volume(gens, coords, h):
    """Volume (up to a constant) of cone(gens) ∩ {h <= 1}, gens a basis."""
    pts = [tuple(x / dot(h, g) for x in coords(g)) for g in gens]
    return abs(det(pts))


def check_subdivision(f, sub, rng=None, samples=60):
    """Return a list of problems; empty means the postcondition holds.

    Checks containment, equal total volume, that random interior points of the
    source land in the interior of exactly one piece, and that every face of
    every piece surjects onto a face of the target.
    """
    problems = []
    sigma = f.source
    d = sigma.dim
    if d == 0:
        return problems
    coords = _span_coords(sigma)
    h = _height(sigma)
    total = Fraction(0)
    geos = []
    for p in sub.pieces:
        if not all(sigma.contains(r) for r in p):
            problems.append(f"piece {p} leaves the source cone")
            continue
        g = geometry_of(p, f.source_rank)
        geos.append(g)
        if g.dim != d:
            problems.append(f"piece {p} is not full-dimensional")
            continue
        for simplex in triangulate(list(p), f.source_rank):
            total += _volume([p[i] for i in simplex], coords, h)
        for r in range(1, len(p) + 1):
            for face in combinations(p, r):
                if image_face(f, face) is None:
                    problems.append(f"face {face} does not surject onto a face")
    ext = sorted(sigma.extremal())
    whole = sum(_volume([sigma.gens[ext[i]] for i in s], coords, h)
                for s in triangulate([sigma.gens[i] for i in ext], f.source_rank))
    if total != whole:
        problems.append(f"volumes differ: pieces {total} vs cone {whole}")
    if rng is not None:
        for _ in range(samples):
            w = [rng.randint(1, 50) for _ in ext]
            x = tuple(sum(c * sigma.gens[i][j] for c, i in zip(w, ext))
                      for j in range(f.source_rank))
            inside = sum(1 for g in geos if g.in_relint(x))
            covered = sum(1 for g in geos if g.contains(x))
            if inside > 1 or covered == 0:
                problems.append(f"point {x} lies in {inside} open pieces, {covered} closed")
    return problems


# -- random flat maps ----------------------------------------------------------

def _integral(v):
    return primitive(v) if any(v) else tuple(0 for _ in v)


def random_flat_map(rng, max_rank=3):
    """A random flat map from a pointed cone in Z^k onto R^m_{>=0}, k <= max_rank."""
    while True:
        k = rng.randint(1, max_rank)
        m = rng.randint(1, k)
        M = [[rng.randint(-2, 2) for _ in range(k)] for _ in range(m)]
        if rank(M) < m:
            continue
        ker = nullspace(M, k)
        rays = []
        for j in range(m):
            e = [int(i == j) for i in range(m)]
            base = solve(M, e)
            for _ in range(rng.randint(1, 3 if ker else 1)):
                v = list(base)
                for b in ker:
                    c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
                    v = [x + c * y for x, y in zip(v, b)]
                rays.append(_integral(v))
        rays = sorted(set(rays))
        geo = geometry_of(rays, k)
        if not geo.pointed:
            continue
        rays = [rays[i] for i in sorted(geo.extremal())]
        target = [tuple(int(i == j) for i in range(m)) for j in range(m)]
        f = ConeMap(rays, target, M)
        if is_flat_cone_map(f):
            return f
