import random

import pytest
from hypothesis import given, settings, strategies as st

from logdeg.degeneration import (FIXTURES, GlueError, Part, cut, glue, record_on_slice,
                                 sample_vertical, split_decorations, vertical_type_key)
from logdeg.one_complexes import ChowDecoration, ComplexError, OneComplex


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_cut_of_gamma_gives_star_parts(name):
    d, rec = FIXTURES[name]()
    c = cut(d, rec, rec.gamma, 1, rec.decoration)
    assert sorted(c.parts) == list(range(len(rec.gamma.positions)))
    for a, part in c.parts.items():
        # one vertex at the origin of the star, one ray per edge or end of γ
        assert [tuple(x) for x in part.complex.positions] == [(0,) * d.k]
        assert len(part.complex.rays) == rec.gamma.valence(a)
    for left, right in c.evaluations.values():
        assert left == right and not left.empty


def test_segment_cut_and_glue():
    d, rec = FIXTURES["segment"]()
    c = cut(d, rec, rec.gamma, 1, rec.decoration)
    assert [dict(p.labels) for p in c.parts.values()] == [{("r", 0): 2}, {("r", 0): 2}]
    g, labels, t = glue(d, rec, c.parts)
    assert labels == {("e", 0): 2}
    assert g.positions == ((0,), (t,))


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_glue_inverts_cut_on_gamma(name):
    d, rec = FIXTURES[name]()
    labels = rec.decoration.edge_labels
    c = cut(d, rec, rec.gamma, 1, rec.decoration)
    g, lab, t = glue(d, rec, c.parts)
    assert vertical_type_key(d, rec, g, t, lab) == \
        vertical_type_key(d, rec, rec.gamma, 1, labels)


def test_mismatched_labels_do_not_glue():
    d, rec = FIXTURES["segment"]()
    c = cut(d, rec, rec.gamma, 1, rec.decoration)
    parts = dict(c.parts)
    p = parts[1]
    parts[1] = Part(p.complex, ((("r", 0), 3),))
    with pytest.raises(GlueError):
        glue(d, rec, parts)


def test_mismatched_positions_do_not_glue():
    d, rec = FIXTURES["chain"]()
    c = cut(d, rec, rec.gamma, 1, rec.decoration)
    parts = dict(c.parts)
    p = parts[0]
    moved = OneComplex.build([(0, 1)], (), p.complex.rays, p.complex.ambient)
    parts[0] = Part(moved, p.labels)
    with pytest.raises(GlueError):
        glue(d, rec, parts)


def test_cut_rejects_edges_off_gamma():
    d, rec = FIXTURES["chain"]()
    # an edge from the first to the third vertex skips the middle one
    g = OneComplex.build([(0, 0), (4, 0)], [(0, 1)])
    with pytest.raises(ComplexError):
        cut(d, rec, g, 2)


def test_record_must_sit_on_the_slice():
    d, _ = FIXTURES["chain"]()
    with pytest.raises(ComplexError):
        record_on_slice(d, OneComplex.build([(0, 0), (3, 0)], [(0, 1)]))


@pytest.mark.parametrize("name", sorted(FIXTURES))
@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_cut_glue_round_trip(name, seed):
    d, rec = FIXTURES[name]()
    rng = random.Random(seed)
    g, labels, t = sample_vertical(d, rec, rng, deco=rec.decoration)
    c = cut(d, rec, g, t, ChowDecoration(labels))
    g2, lab2, t2 = glue(d, rec, c.parts)
    assert vertical_type_key(d, rec, g2, t2, lab2) == vertical_type_key(d, rec, g, t, labels)
    assert cut(d, rec, g2, t2, ChowDecoration(lab2)).key() == c.key()


def test_split_classes_over_two_vertices():
    _, rec = FIXTURES["segment"]()
    got = split_decorations(rec, (2,))
    assert [x["classes"] for x in got] == [[(0,), (2,)], [(1,), (1,)], [(2,), (0,)]]


def test_split_with_euler_characteristic():
    _, rec = FIXTURES["segment"]()
    got = split_decorations(rec, (1,), chi=0, bounds={0: (-1, 1), 1: (-1, 1)})
    assert len(got) == 6
    assert all(sum(x["chi"]) == 0 for x in got)


def test_split_counts_are_stars_and_bars():
    _, rec = FIXTURES["triangle"]()
    assert len(split_decorations(rec, (2, 1))) == 6 * 3


def test_split_rejects_inconsistent_totals():
    _, rec = FIXTURES["segment"]()
    with pytest.raises(ValueError):
        split_decorations(rec, (-1,))
    with pytest.raises(ValueError):
        split_decorations(rec, (1,), chi=5, bounds={0: (0, 1), 1: (0, 1)})
    with pytest.raises(ValueError):
        split_decorations(rec, (1,), chi=0)
