import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from logdeg.cones import (Cone, ConeComplex, ConeError, ConeMorphism, FaceMap, compose,
                          has_reduced_fibers, identity, identity_morphism,
                          is_combinatorially_flat, isomorphic, orthant, random_fan,
                          ray_complex, star, validate_complex)
from logdeg.lattice import snf
from logdeg.polyhedra import slice_complex


def p2():
    return ConeComplex.from_fan([(1, 0), (0, 1), (-1, -1)], [[0, 1], [1, 2], [2, 0]],
                                names=["r0", "r1", "r2"])


def test_p2_fan_is_valid():
    assert validate_complex(p2()) == []


def test_non_primitive_generator_reported_once():
    c = ConeComplex.from_fan([(1, 0), (2, 2)], [[0, 1]])
    kinds = [r["kind"] for r in validate_complex(c)]
    assert kinds == ["non-primitive generator"]


def test_duplicate_face_map_reported():
    c = p2()
    dup = ConeComplex(c.cones, c.face_maps + (c.face_maps[0],))
    kinds = [r["kind"] for r in validate_complex(dup)]
    assert kinds == ["duplicate face morphism"]


def test_line_is_not_strongly_convex():
    c = ConeComplex((Cone("l", 1, ((1,), (-1,))),), ())
    assert [r["kind"] for r in validate_complex(c)] == ["not strongly convex"]


def test_missing_face_reported():
    c = orthant(2)
    pruned = ConeComplex(tuple(x for x in c.cones if x.id != "e1"),
                         tuple(f for f in c.face_maps if "e1" not in (f.child,)))
    kinds = {r["kind"] for r in validate_complex(pruned)}
    assert "missing face" in kinds


def test_star_of_ray_is_p1():
    s = star(p2(), "r0")
    assert validate_complex(s) == []
    assert s.ambient_rank == 1
    assert sorted(c.ray_generators for c in s.cones) == [(), ((-1,),), ((1,),)]


def test_star_of_zero_cone_is_identity():
    c = p2()
    assert isomorphic(star(c, "0"), c)


def test_star_unknown_cone():
    with pytest.raises(ConeError):
        star(p2(), "nope")


def test_star_of_maximal_cone_is_a_point():
    s = star(p2(), "r0+r1")
    assert s.ambient_rank == 0 and len(s.cones) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_star_of_star(seed, k):
    rng = random.Random(seed)
    c = random_fan(rng, k, steps=rng.randint(0, 3))
    rays, sets = c.fan_view()
    sigma = rng.choice(sorted(sets, key=lambda x: (len(sets[x]), x)))
    over = [t for t in c.overstar(sigma)]
    tau = rng.choice(sorted(over))
    inner = star(c, sigma)
    # the image of τ in star(c, σ) carries τ's id
    assert isomorphic(star(inner, tau), star(c, tau))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_toolkit_outputs_validate(seed, k):
    rng = random.Random(seed)
    c = random_fan(rng, k, steps=rng.randint(0, 4), keep=rng.choice([1.0, 0.6]))
    assert validate_complex(c) == []
    for cid in c.ids():
        assert validate_complex(star(c, cid)) == []


def test_snf_of_diagonal():
    D = snf([[2, 0], [0, 3]])[0]
    diag = [D[i][i] for i in range(2)]
    assert sorted(abs(x) for x in diag) == [1, 6]


def test_slice_segment():
    p = slice_complex(orthant(2), (1, 1), 1)
    assert sorted(p.vertices) == [(0, 1), (1, 0)]
    bounded = [c for c in p.cells if len(c.vertices) == 2 and not c.rays]
    assert len(bounded) == 1


def test_slice_first_coordinate():
    p = slice_complex(orthant(2), (1, 0), 1)
    assert p.vertices == ((1, 0),)
    unbounded = [c for c in p.cells if c.rays]
    assert [c.rays for c in unbounded] == [((0, 1),)]


def test_slice_needs_ray_target():
    f = ConeMorphism(orthant(2), orthant(2), identity(2))
    with pytest.raises(ConeError):
        slice_complex(orthant(2), f, 1)
    with pytest.raises(ConeError):
        slice_complex(orthant(2), (1, 1), 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(1, 5), st.integers(1, 5))
def test_slice_dilation(a, b, n1, n2):
    c = random_fan(random.Random(a * 100 + b), 3, steps=2, keep=1.0)
    # a functional positive on all rays of the positive orthant fans only
    if any(min(r) < 0 for r in c.fan_view()[0]):
        c = orthant(3)
    pi = (a, b, 1)
    t1, t2 = Fraction(n1), Fraction(n2, 3)
    s1, s2 = slice_complex(c, pi, t1), slice_complex(c, pi, t2)
    assert [x.id for x in s1.cells] == [x.id for x in s2.cells]
    assert [tuple(x * t2 / t1 for x in v) for v in s1.vertices] == list(s2.vertices)


def test_identity_is_flat_with_reduced_fibers():
    f = identity_morphism(p2())
    assert is_combinatorially_flat(f) and has_reduced_fibers(f)


def test_interior_ray_is_not_flat():
    src = ConeComplex.from_fan([(1, 1)], [[0]])
    f = ConeMorphism(src, orthant(2), identity(2))
    assert not is_combinatorially_flat(f)


def test_reduced_fibers_depend_on_lattice_image():
    f = ConeMorphism(orthant(2), ray_complex(), ((1, 2),))
    assert is_combinatorially_flat(f) and has_reduced_fibers(f)
    g = ConeMorphism(orthant(2), ray_complex(), ((2, 2),))
    assert is_combinatorially_flat(g) and not has_reduced_fibers(g)


def test_flatness_stable_under_composition():
    f = ConeMorphism(orthant(3), orthant(2), ((1, 1, 0), (0, 0, 1)))
    g = ConeMorphism(orthant(2), ray_complex(), ((1, 1),))
    assert is_combinatorially_flat(f) and is_combinatorially_flat(g)
    assert is_combinatorially_flat(compose(f, g))


def test_face_map_matrix_must_send_rays_to_rays():
    c = orthant(2)
    bad = tuple(FaceMap(f.child, f.parent, ((0, 1), (1, 0))) if f.child == "e1" and
                f.parent == "e1+e2" else f for f in c.face_maps)
    kinds = {r["kind"] for r in validate_complex(ConeComplex(c.cones, bad))}
    assert "face map does not send rays to rays" in kinds or "missing face" in kinds


def test_reduced_fibers_on_all_faces_is_stricter():
    f = ConeMorphism(orthant(2), ray_complex(), ((1, 2),))
    assert not has_reduced_fibers(f, faces=True)
