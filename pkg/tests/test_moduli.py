import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from logdeg.cones import (ConeComplex, ConeError, ConeMorphism, is_combinatorially_flat,
                          orthant, ray_complex)
from logdeg.moduli import (CombinatorialType, EvaluationFamily, ZeroComplex,
                           evaluate_along_ray, family_from_types, fixture_non_flat_evaluation,
                           flatten_evaluation, is_rigid, parameter_cone,
                           random_interior_point, realize, type_of)
from logdeg.one_complexes import ChowDecoration, OneComplex
from logdeg.subdivision import (ConeMap, check_subdivision, is_flat_cone_map,
                                random_flat_map, relative_barycentric_subdivide)

LINE = dict(k=2, n_vertices=1, rays=((0, (1, 0)), (0, (0, 1)), (0, (-1, -1))))


def test_free_line_has_two_parameters():
    pc = parameter_cone(CombinatorialType(**LINE))
    assert pc.dimension == 2
    assert not is_rigid(CombinatorialType(**LINE))


def test_line_through_two_points_is_rigid():
    t = CombinatorialType(**LINE, points=((3, 1), (0, 5)),
                          incidences=((0, ("r", 0)), (1, ("r", 1))))
    pc = parameter_cone(t)
    assert pc.dimension == 0 and is_rigid(t)
    assert realize(t, pc.point).positions == ((0, 1),)


def test_line_through_three_points_is_empty():
    t = CombinatorialType(**LINE, points=((3, 1), (0, 5), (-7, -3)),
                          incidences=((0, ("r", 0)), (1, ("r", 1)), (2, ("r", 2))))
    assert parameter_cone(t).empty


def test_segment_lengths_must_be_positive():
    # vertex 1 = vertex 0 + s(1,0) with s > 0, pinned on both sides of 0
    t = CombinatorialType(2, 2, edges=((0, 1, (1, 0)),), points=((0, 0), (-1, 0)),
                          incidences=((0, ("v", 0)), (1, ("v", 1))))
    assert parameter_cone(t).empty


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_interior_points_realize_the_type(seed):
    rng = random.Random(seed)
    a, b = rng.randint(-3, 3), rng.randint(-3, 3)
    g = OneComplex.build([(a, b), (a + 2, b)], [(0, 1)],
                         [(0, (0, 1)), (0, (-1, -1)), (1, (0, 1)), (1, (1, -1))])
    r = rng.randint(0, 3)
    vertex, d = g.rays[r]
    s = rng.randint(1, 4)
    point = tuple(g.positions[vertex][j] + s * d[j] for j in range(2))
    t = type_of(g, [point])
    pc = parameter_cone(t)
    assert pc.dimension == 2
    z = random_interior_point(pc, rng)
    assert type_of(realize(t, z), [point]).key() == t.key()


def test_evaluation_reads_off_quotient_coordinates():
    g = OneComplex.build([(0, 1), (0, 3)], (), [(0, (1, 0)), (1, (1, 0))])
    z = evaluate_along_ray(g, "e1", ambient=orthant(2))
    assert sorted(abs(p[0]) for p, _ in z.points) == [1, 3]
    assert all(m == 1 for _, m in z.points)


def test_evaluation_without_parallel_rays_is_empty():
    g = OneComplex.build([(1, 1)], (), [(0, (0, 1))])
    assert evaluate_along_ray(g, "e1", ambient=orthant(2)).empty


def test_evaluation_carries_labels():
    g = OneComplex.build([(0, 2)], (), [(0, (1, 0))])
    z = evaluate_along_ray(g, "e1", ChowDecoration({("r", 0): 2}), ambient=orthant(2))
    assert [m for _, m in z.points] == [2]


def test_evaluation_rejects_non_ambient_rays():
    g = OneComplex.build([(0, 2)], (), [(0, (1, 1))])
    with pytest.raises(ConeError):
        evaluate_along_ray(g, "e1", ambient=orthant(2))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 9), st.integers(1, 3)), min_size=1, max_size=4,
                unique_by=lambda x: x[0]), st.fractions(Fraction(1, 4), Fraction(9)))
def test_evaluation_commutes_with_dilation(rays, t):
    g = OneComplex.build([(0, h) for h, _ in rays], (), [(i, (1, 0)) for i in range(len(rays))])
    deco = ChowDecoration({("r", i): m for i, (_, m) in enumerate(rays)})
    z = evaluate_along_ray(g, "e1", deco, ambient=orthant(2))
    zt = evaluate_along_ray(g.dilate(t), "e1", deco, ambient=orthant(2))
    assert zt == z.dilate(t)


def test_zero_complex_aggregates():
    z = ZeroComplex.of([((1,), 1), ((1,), 2), ((0,), 1)])
    assert z.points == (((0,), 1), ((1,), 3))


# -- relative barycentric subdivision


def test_sum_map_on_quadrant_adds_the_diagonal():
    f = ConeMap([(1, 0), (0, 1)], [(1,)], [(1, 1)])
    sub = relative_barycentric_subdivide(f)
    assert len(sub.pieces) == 2
    assert (1, 1) in sub.rays()
    assert check_subdivision(f, sub) == []


def test_identity_subdivision_is_trivial():
    f = ConeMap([(1, 0), (0, 1)], [(1, 0), (0, 1)], [(1, 0), (0, 1)])
    sub = relative_barycentric_subdivide(f)
    assert [sorted(p) for p in sub.pieces] == [[(0, 1), (1, 0)]]


def test_sum_map_on_octant_gives_six_cones():
    f = ConeMap([(1, 0, 0), (0, 1, 0), (0, 0, 1)], [(1,)], [(1, 1, 1)])
    sub = relative_barycentric_subdivide(f)
    assert len(sub.pieces) == 6
    assert check_subdivision(f, sub, random.Random(0)) == []


def test_non_flat_map_is_rejected():
    f = ConeMap([(1, 0), (1, 1)], [(1, 0), (0, 1)], [(1, 0), (0, 1)])
    assert not is_flat_cone_map(f)
    with pytest.raises(ConeError):
        relative_barycentric_subdivide(f)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_subdivisions_satisfy_postcondition(seed):
    rng = random.Random(seed)
    f = random_flat_map(rng)
    sub = relative_barycentric_subdivide(f)
    assert check_subdivision(f, sub, rng, samples=20) == []


# -- flattening


def _as_morphism(rays, matrix, target):
    src = ConeComplex.from_fan(rays, [list(range(len(rays)))])
    return ConeMorphism(src, target, tuple(tuple(r) for r in matrix))


def test_non_flat_evaluation_fixture_is_flattened():
    t, target, _ = fixture_non_flat_evaluation()
    fam = family_from_types({"sigma": t}, (1, 0), target)
    before = _as_morphism(fam.sources["sigma"], fam.maps["sigma"], target)
    assert not is_combinatorially_flat(before)
    r = flatten_evaluation(fam)
    assert all(is_combinatorially_flat(f) for f in r.morphisms.values())
    assert r.meta["reduced_fibers"]
    assert r.meta["order"][-1] == "refine source lattices"


def test_flat_family_is_unchanged():
    fam = EvaluationFamily({"a": [(1, 0), (0, 1)]}, {"a": [(1, 1)]}, ray_complex())
    r = flatten_evaluation(fam)
    assert not r.meta["target_subdivided"]
    assert not any(r.meta["source_subdivided"].values())
    assert is_combinatorially_flat(r.morphisms["a"])


def test_product_of_flat_maps_needs_no_refinement():
    fam = EvaluationFamily({"p": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]},
                           {"p": [(1, 1, 0, 0), (0, 0, 1, 1)]}, orthant(2))
    r = flatten_evaluation(fam)
    assert not any(r.meta["source_subdivided"].values())
    assert is_combinatorially_flat(r.morphisms["p"])
