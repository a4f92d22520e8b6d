"""Rational polyhedral cones, cone complexes and the morphisms between them."""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from .geometry import geometry_of
from .lattice import (as_fraction, coordinates, det, inverse, is_primitive, lattice_index,
                      matvec, primitive, rank, saturation, transpose)


class ConeError(ValueError):
    pass


@dataclass(frozen=True)
class Cone:
    id: str
    ambient_rank: int
    ray_generators: tuple
    # optional Z-basis of a finite-index sublattice of span ∩ Z^k
    lattice: tuple = None

    @property
    def dimension(self):
        return rank([list(r) for r in self.ray_generators]) if self.ray_generators else 0

    @property
    def geometry(self):
        return geometry_of(self.ray_generators, self.ambient_rank)

    def contains(self, x):
        return self.geometry.contains(x)

    def in_relint(self, x):
        return self.geometry.in_relint(x)

    def lattice_basis(self):
        if self.lattice is not None:
            return [tuple(v) for v in self.lattice]
        return saturation(self.ray_generators, self.ambient_rank)[0]

    def is_simplicial(self):
        return len(self.ray_generators) == self.dimension

    def is_smooth(self):
        if not self.is_simplicial():
            return False
        if not self.ray_generators:
            return True
        return lattice_index(self.ray_generators, self.lattice_basis()) == 1

    def interior_point(self):
        k = self.ambient_rank
        return tuple(sum((Fraction(r[i]) for r in self.ray_generators), Fraction(0))
                     for i in range(k))


@dataclass(frozen=True)
class FaceMap:
    child: str
    parent: str
    matrix: tuple


def identity(k):
    return tuple(tuple(int(i == j) for j in range(k)) for i in range(k))


@dataclass(frozen=True)
class ConeComplex:
    cones: tuple
    face_maps: tuple = ()
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_fan(cls, rays, maximal, names=None, ids=None, lattices=None):
        """Fan in Z^k from ray vectors and maximal cones (lists of ray indices).

        All faces are added automatically; face maps are inclusions (identity
        matrices). Cone ids are ``ids[frozenset]`` when supplied, otherwise the
        '+'-joined ray names, and '0' for the zero cone.
        """
        rays = [tuple(int(x) for x in r) for r in rays]
        k = len(rays[0]) if rays else 0
        names = list(names) if names else [f"r{i}" for i in range(len(rays))]
        ids = dict(ids or {})
        lattices = dict(lattices or {})
        sets = set()
        for m in maximal:
            m = frozenset(m)
            geo = geometry_of([rays[i] for i in sorted(m)], k)
            order = sorted(m)
            for face in geo.faces():
                sets.add(frozenset(order[i] for i in face))
        sets.add(frozenset())
        return cls._assemble(rays, sets, names, ids, lattices, k)

    @classmethod
    def _assemble(cls, rays, sets, names, ids, lattices, k):
        def cid(s):
            if s in ids:
                return ids[s]
            if not s:
                return "0"
            return "+".join(names[i] for i in sorted(s))
        ordered = sorted(sets, key=lambda s: (len(s), sorted(s)))
        cones = tuple(Cone(cid(s), k, tuple(rays[i] for i in sorted(s)),
                           lattices.get(s)) for s in ordered)
        fmaps = []
        I = identity(k)
        for a in ordered:
            for b in ordered:
                if a < b:
                    fmaps.append(FaceMap(cid(a), cid(b), I))
        out = cls(cones, tuple(fmaps))
        object.__setattr__(out, "meta", {"ambient_rank": k})
        return out

    # -- lookups ------------------------------------------------------------

    def cone(self, cid):
        for c in self.cones:
            if c.id == cid:
                return c
        raise ConeError(f"unknown cone id {cid!r}")

    def ids(self):
        return [c.id for c in self.cones]

    @property
    def ambient_rank(self):
        if "ambient_rank" in self.meta:
            return self.meta["ambient_rank"]
        return self.cones[0].ambient_rank if self.cones else 0

    def is_fan(self):
        k = self.ambient_rank
        return all(c.ambient_rank == k for c in self.cones) and \
            all(fm.matrix == identity(k) for fm in self.face_maps)

    def fan_view(self):
        """(rays, {cone id: frozenset of ray indices}) for fan-realized complexes."""
        if not self.is_fan():
            raise ConeError("operation needs a complex realized in one lattice "
                            "with inclusion face maps")
        rays = []
        index = {}
        for c in self.cones:
            for r in c.ray_generators:
                if r not in index:
                    index[r] = len(rays)
                    rays.append(r)
        return rays, {c.id: frozenset(index[r] for r in c.ray_generators)
                      for c in self.cones}

    def faces_of(self, cid):
        _, sets = self.fan_view()
        s = sets[cid]
        return [c for c, t in sets.items() if t <= s]

    def overstar(self, cid):
        _, sets = self.fan_view()
        s = sets[cid]
        return [c for c, t in sets.items() if s <= t]

    def maximal_cones(self):
        _, sets = self.fan_view()
        return [c for c, s in sets.items() if not any(s < t for t in sets.values())]

    def rays(self):
        return [c for c in self.cones if len(c.ray_generators) == 1]

    def minimal_cone_containing(self, x):
        """Cone whose relative interior contains x, or None."""
        for c in self.cones:
            if c.in_relint(x):
                return c
        return None

    def in_support(self, x):
        return any(c.contains(x) for c in self.cones)


# -- validation ------------------------------------------------------------

def _report(kind, cone=None, **detail):
    out = {"kind": kind}
    if cone is not None:
        out["cone"] = cone
    out.update(detail)
    return out


def validate_complex(c):
    """All invariant violations of a cone complex; [] when it is valid."""
    reports = []
    seen_ids = set()
    bad_rays = {}
    for cone in c.cones:
        if cone.id in seen_ids:
            reports.append(_report("duplicate cone id", cone.id))
        seen_ids.add(cone.id)
        gens = cone.ray_generators
        for r in gens:
            if len(r) != cone.ambient_rank:
                reports.append(_report("wrong ambient rank", cone.id, ray=list(r)))
            elif not any(r):
                reports.append(_report("zero generator", cone.id))
            elif not is_primitive(r):
                bad_rays.setdefault(tuple(r), []).append(cone.id)
        prims = [primitive(r) for r in gens if any(r)]
        if len(set(prims)) < len(prims):
            reports.append(_report("parallel generators", cone.id))
            continue
        if not gens:
            continue
        geo = cone.geometry
        if not geo.pointed:
            reports.append(_report("not strongly convex", cone.id))
            continue
        extremal = set(geo.extremal())
        for i, r in enumerate(gens):
            if i not in extremal:
                reports.append(_report("non-extremal generator", cone.id, ray=list(r)))
    for r, where in bad_rays.items():
        reports.append(_report("non-primitive generator", where[-1], ray=list(r),
                               cones=where))
    if reports:
        return reports
    cones = {x.id: x for x in c.cones}
    pairs = {}
    for fm in c.face_maps:
        if fm.child not in cones or fm.parent not in cones:
            reports.append(_report("face map with unknown cone", None,
                                   child=fm.child, parent=fm.parent))
            continue
        key = (fm.child, fm.parent)
        if key in pairs:
            reports.append(_report("duplicate face morphism", fm.parent, child=fm.child))
            continue
        pairs[key] = fm
        child, parent = cones[fm.child], cones[fm.parent]
        M = fm.matrix
        if any(not isinstance(x, int) for row in M for x in row):
            reports.append(_report("non-integral face map", fm.parent, child=fm.child))
            continue
        images = [tuple(matvec(M, r)) for r in child.ray_generators]
        pgens = set(parent.ray_generators)
        if not all(im in pgens for im in images):
            reports.append(_report("face map does not send rays to rays", fm.parent,
                                   child=fm.child))
            continue
        idx = [parent.ray_generators.index(im) for im in images]
        face = parent.geometry.face_of(idx)
        if set(face) != set(idx) or len(idx) != len(child.ray_generators):
            reports.append(_report("face map image is not a face", fm.parent,
                                   child=fm.child))
    # every face of every cone must be the image of exactly one face map
    for parent in c.cones:
        if not parent.ray_generators:
            continue
        gens = parent.ray_generators
        for face in parent.geometry.faces():
            if len(face) == len(gens):
                continue
            face_rays = {gens[i] for i in face}
            hits = [k for k, fm in pairs.items() if k[1] == parent.id and
                    {tuple(matvec(fm.matrix, r)) for r in cones[k[0]].ray_generators}
                    == face_rays]
            if not hits:
                reports.append(_report("missing face", parent.id,
                                       face=[list(gens[i]) for i in sorted(face)]))
            elif len(hits) > 1:
                reports.append(_report("face covered by several face maps", parent.id,
                                       children=sorted(h[0] for h in hits)))
    parents = {}
    for (a, b) in pairs:
        parents.setdefault(a, []).append(b)
    for (a, b) in pairs:
        for cc in parents.get(b, []):
            if (a, cc) not in pairs and a != cc:
                reports.append(_report("face maps not closed under composition", cc,
                                       child=a, via=b))
    return reports


# -- stars -------------------------------------------------------------------

def star(c, sigma):
    """The star complex Σ(σ): cones containing σ modulo the span of σ."""
    rays, sets = c.fan_view()
    if sigma not in sets:
        raise ConeError(f"unknown cone id {sigma!r}")
    k = c.ambient_rank
    s = sets[sigma]
    # quotient by the saturated span, so the quotient lattice is torsion free
    basis, _, Q, _ = saturation([rays[i] for i in s], k)
    m = k - len(basis)

    def project(v):
        return tuple(sum(Q[j][i] * v[j] for j in range(k)) for i in range(m))

    new_rays = []
    index = {}
    new_sets = {}
    for cid, t in sets.items():
        if not s <= t:
            continue
        imgs = []
        for i in sorted(t - s):
            v = project(rays[i])
            if not any(v):
                continue
            p = primitive(v)
            if p not in imgs:
                imgs.append(p)
        if imgs:
            geo = geometry_of(imgs, m)
            imgs = [imgs[i] for i in geo.extremal()]
        for p in imgs:
            if p not in index:
                index[p] = len(new_rays)
                new_rays.append(p)
        new_sets[cid] = frozenset(index[p] for p in imgs)
    names = [f"q{i}" for i in range(len(new_rays))]
    ids = {v: cid for cid, v in new_sets.items()}
    lattices = {}
    for cid in new_sets:
        L = c.cone(cid).lattice
        if L is not None:
            lattices[new_sets[cid]] = tuple(project(v) for v in L if any(project(v)))
    out = ConeComplex._assemble(new_rays, set(new_sets.values()), names, ids,
                                lattices, m)
    object.__setattr__(out, "meta", {"ambient_rank": m, "quotient": Q,
                                     "star_of": sigma})
    return out


def quotient_map(c, sigma):
    """Integer matrix (as rows) of Z^k -> Z^k / saturated span(σ)."""
    rays, sets = c.fan_view()
    _, _, Q, _ = saturation([rays[i] for i in sets[sigma]], c.ambient_rank)
    return transpose(Q) if Q and Q[0] else []


# -- morphisms --------------------------------------------------------------

@dataclass(frozen=True)
class ConeMorphism:
    source: ConeComplex
    target: ConeComplex
    matrix: tuple

    def apply(self, v):
        return matvec(self.matrix, v)

    def cone_assignment(self):
        """Source cone id -> smallest target cone containing its image."""
        out = {}
        for cone in self.source.cones:
            p = self.apply(cone.interior_point()) if cone.ray_generators else \
                tuple(0 for _ in range(self.target.ambient_rank))
            tgt = self.target.minimal_cone_containing(p)
            if tgt is None or not all(tgt.contains(self.apply(r))
                                      for r in cone.ray_generators):
                raise ConeError(f"cone {cone.id} does not map into a target cone")
            out[cone.id] = tgt.id
        return out

    def linear_parts(self):
        return {cid: self.matrix for cid in self.cone_assignment()}


def is_valid_morphism(f):
    try:
        f.cone_assignment()
        return True
    except ConeError:
        return False


def surjects(f, cone, target_cone):
    images = [f.apply(r) for r in cone.ray_generators if any(f.apply(r))]
    if not target_cone.ray_generators:
        return True
    if not images:
        return False
    geo = geometry_of(images, f.target.ambient_rank)
    return all(geo.contains(r) for r in target_cone.ray_generators)


def is_combinatorially_flat(f):
    assign = f.cone_assignment()
    return all(surjects(f, f.source.cone(s), f.target.cone(t)) for s, t in assign.items())


def lattice_image_index(f, cone, target_cone):
    gens = [f.apply(v) for v in cone.lattice_basis()]
    gens = [g for g in gens if any(g)]
    tb = target_cone.lattice_basis()
    if not tb:
        return 1
    return lattice_index(gens, tb) if gens else 0


def has_reduced_fibers(f, faces=False):
    """Flat, and each maximal source cone's lattice generates its target
    cone's lattice. With faces=True every source cone is examined."""
    if not is_combinatorially_flat(f):
        return False
    assign = f.cone_assignment()
    keep = set(f.source.maximal_cones()) if not faces else set(assign)
    return all(lattice_image_index(f, f.source.cone(s), f.target.cone(t)) == 1
               for s, t in assign.items() if s in keep)


def compose(f, g):
    """g ∘ f."""
    if f.target is not g.source and f.target != g.source:
        raise ConeError("morphisms are not composable")
    M = [[sum(g.matrix[i][k] * f.matrix[k][j] for k in range(len(f.matrix)))
          for j in range(len(f.matrix[0]))] for i in range(len(g.matrix))]
    return ConeMorphism(f.source, g.target, tuple(tuple(r) for r in M))


def identity_morphism(c):
    return ConeMorphism(c, c, identity(c.ambient_rank))


def ray_complex():
    """The one-ray complex R_{>=0}."""
    return ConeComplex.from_fan([(1,)], [[0]], names=["t"])


def orthant(k):
    rays = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    return ConeComplex.from_fan(rays, [list(range(k))], names=[f"e{i+1}" for i in range(k)])


# -- isomorphism -------------------------------------------------------------

def _intrinsic(c):
    """Rays in coordinates of the saturated span of the support, plus cone sets."""
    rays, sets = c.fan_view()
    basis = saturation(rays, c.ambient_rank)[0] if rays else []
    coords = [tuple(int(x) for x in coordinates(basis, r)) for r in rays]
    return coords, sets, len(basis)


def isomorphic(a, b):
    """Structural isomorphism of fan-realized complexes with integral structure."""
    ra, sa, da = _intrinsic(a)
    rb, sb, db = _intrinsic(b)
    if da != db or len(ra) != len(rb) or len(sa) != len(sb):
        return False
    if sorted(len(s) for s in sa.values()) != sorted(len(s) for s in sb.values()):
        return False
    if da == 0:
        return True
    cones_b = set(sb.values())
    basis_idx = []
    for i in range(len(ra)):
        if rank([ra[j] for j in basis_idx + [i]]) > len(basis_idx):
            basis_idx.append(i)
    A = [list(ra[i]) for i in basis_idx]
    Ainv = inverse(transpose(A))
    for choice in permutations(range(len(rb)), da):
        B = [rb[j] for j in choice]
        # T with T a_i = b_i for the chosen basis rays
        T = [[sum(as_fraction(B[m][row]) * Ainv[m][col] for m in range(da))
              for col in range(da)] for row in range(da)]
        if any(x.denominator != 1 for row in T for x in row):
            continue
        Ti = [[int(x) for x in row] for row in T]
        if abs(det(Ti)) != 1:
            continue
        image = {}
        ok = True
        for i, r in enumerate(ra):
            v = tuple(sum(Ti[row][col] * r[col] for col in range(da)) for row in range(da))
            if v not in rb:
                ok = False
                break
            image[i] = rb.index(v)
        if not ok or len(set(image.values())) != len(rb):
            continue
        if {frozenset(image[i] for i in s) for s in sa.values()} == cones_b:
            return True
    return False


def random_fan(rng, k, steps=3, keep=1.0):
    """Random simplicial fan in Z^k by stellar subdivisions of the orthant or the
    complete fan of projective space, optionally dropping maximal cones."""
    if rng.random() < 0.5:
        rays = [tuple(int(i == j) for j in range(k)) for i in range(k)]
        maximal = [frozenset(range(k))]
    else:
        rays = [tuple(int(i == j) for j in range(k)) for i in range(k)]
        rays.append(tuple(-1 for _ in range(k)))
        maximal = [frozenset(s) for s in _drop_one(k + 1)]
    for _ in range(steps):
        faces = set()
        for m in maximal:
            faces |= {frozenset(x) for x in _subsets(m) if x}
        tau = rng.choice(sorted(faces, key=sorted))
        weights = [rng.randint(1, 3) for _ in tau]
        v = primitive([sum(w * rays[i][j] for w, i in zip(weights, sorted(tau)))
                       for j in range(k)])
        if v in rays:
            continue
        rays.append(v)
        vi = len(rays) - 1
        new = []
        for m in maximal:
            if tau <= m:
                new.extend(frozenset(m - {t} | {vi}) for t in tau)
            else:
                new.append(m)
        maximal = new
    if keep < 1.0 and len(maximal) > 1:
        kept = [m for m in maximal if rng.random() < keep] or [maximal[0]]
        maximal = kept
    used = sorted(set().union(*maximal))
    remap = {old: new for new, old in enumerate(used)}
    rays = [rays[i] for i in used]
    maximal = [[remap[i] for i in m] for m in maximal]
    return ConeComplex.from_fan(rays, maximal)


def _subsets(s):
    s = sorted(s)
    for mask in range(1 << len(s)):
        yield [s[i] for i in range(len(s)) if mask >> i & 1]


def _drop_one(n):
    return [[j for j in range(n) if j != i] for i in range(n)]
