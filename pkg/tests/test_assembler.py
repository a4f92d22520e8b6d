import random
from fractions import Fraction
from math import factorial, prod

import pytest
from hypothesis import given, settings, strategies as st
from sympy.utilities.iterables import partitions

from logdeg.assembler import (AssemblyError, GluingGraph, GluingJob, InsertionLabel,
                              MissingEntry, TruncationUnderflow, VertexTable, assemble,
                              collapse_check, consistency_check, degree_zero_job, fill_table,
                              fixed_point_solve, job_from_json, job_to_json, trivalent_jobs)
from logdeg.series import LaurentSeries, macmahon, series_from_ints


def random_series(rng, order, lo=0):
    return LaurentSeries([rng.randint(-3, 3) for _ in range(order - lo + 1)], lo, order)


def test_degree_zero_job_is_a_square():
    f = macmahon(10)
    assert assemble(degree_zero_job(f, 10)) == (f * f).truncate(10)


@pytest.mark.parametrize("k", [2, 3])
def test_fixed_point_forces_one(k):
    assert fixed_point_solve(f"F = F^{k}", 30) == LaurentSeries.constant(1, 30)


def test_fixed_point_rejects_bad_relations():
    with pytest.raises(AssemblyError, match="underdetermined"):
        fixed_point_solve("F = F", 5)
    with pytest.raises(AssemblyError):
        fixed_point_solve("G = G^2", 5)


def single_edge_job(rng, order=6, theory="PT"):
    g = GluingGraph("g", ("a", "b"), (("e", "a", "b", 1),))
    tables = {v: fill_table(g, v, lambda b, s=random_series(rng, order + 2): s)
              for v in g.vertices}
    return GluingJob(theory, [g], tables, order)


def test_label_one_edge_collapses():
    rng = random.Random(0)
    for _ in range(100):
        job = single_edge_job(rng)
        assert assemble(job) == collapse_check(job)


def _oracle(sizes, tables_fn, order):
    """Sum over partitions of each edge of sign * m / Aut * q^-|mu| * product of
    vertex values, with partitions listed by sympy."""
    total = LaurentSeries([], order + 1, order)
    per_edge = [[tuple(sorted((k for k, c in p.items() for _ in range(c)), reverse=True))
                 for p in partitions(n)] for n in sizes]
    stack = [[]]
    for choices in per_edge:
        stack = [s + [c] for s in stack for c in choices]
    for mu in stack:
        parts = [p for e in mu for p in e]
        sign = (-1) ** (sum(parts) - len(parts))
        aut = prod(factorial(e.count(x)) for e in mu for x in set(e))
        coeff = Fraction(sign * prod(parts), aut)
        total = total + (tables_fn(mu).shift(-sum(parts)) * coeff).truncate(order)
    return total


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_coefficients_match_direct_sum(seed):
    rng = random.Random(seed)
    sizes = [rng.randint(1, 3) for _ in range(rng.randint(1, 2))]
    verts = tuple(f"v{i}" for i in range(len(sizes) + 1))
    edges = tuple((f"e{i}", verts[i], verts[i + 1], n) for i, n in enumerate(sizes))
    g = GluingGraph("chain", verts, edges)
    order = 4
    values = {}

    def value(v):
        def f(b):
            key = (v, b)
            if key not in values:
                values[key] = random_series(rng, order + 8)
            return values[key]
        return f

    tables = {v: fill_table(g, v, value(v)) for v in verts}
    job = GluingJob("PT", [g], tables, order)

    def at(mu):
        out = LaurentSeries.constant(1, order + 8)
        for v in verts:
            b = []
            for (eid, l, r, _), part in zip(edges, mu):
                if v == l:
                    b.append((eid, part, "point"))
                elif v == r:
                    b.append((eid, part, "unit"))
            out = out * tables[v].lookup(b, [])
        return out

    assert assemble(job) == _oracle(sizes, at, order)


def test_vertex_order_does_not_matter():
    rng = random.Random(2)
    job = single_edge_job(rng)
    g = job.graphs[0]
    flipped = GluingJob(job.theory, [GluingGraph("g", tuple(reversed(g.vertices)), g.edges)],
                        job.tables, job.order)
    assert assemble(flipped) == assemble(job)


def test_insertions_are_distributed_over_vertices():
    g = GluingGraph("g", ("a", "b"), ())
    ins = (InsertionLabel("p"),)
    ta = VertexTable("a").set([], [], series_from_ints([1], 5)).set([], ["p"],
                                                                  series_from_ints([2], 5))
    tb = VertexTable("b").set([], [], series_from_ints([3], 5)).set([], ["p"],
                                                                  series_from_ints([5], 5))
    job = GluingJob("PT", [g], {"a": ta, "b": tb}, 5, insertions=ins)
    assert assemble(job) == series_from_ints([2 * 3 + 1 * 5], 5)


def test_truncation_is_sound():
    rng = random.Random(7)
    job = single_edge_job(rng, order=6)
    low = GluingJob(job.theory, job.graphs, job.tables, 3)
    assert assemble(low) == assemble(job).truncate(3)


def test_gw_weights_by_length():
    g = GluingGraph("g", ("a", "b"), (("e", "a", "b", 2),))
    one = LaurentSeries.constant(1, 8, "u")
    tables = {v: fill_table(g, v, lambda b: one) for v in g.vertices}
    got = assemble(GluingJob("GW", [g], tables, 6))
    assert got.terms() == {2: -2 * one[0], 4: one[0] / 2}


def test_missing_entry_names_the_boundary():
    g = GluingGraph("g", ("a", "b"), (("e", "a", "b", 2),))
    tables = {"a": fill_table(g, "a", lambda b: series_from_ints([1], 8)),
              "b": VertexTable("b").set([("e", (2,), "unit")], [], series_from_ints([1], 8))}
    with pytest.raises(MissingEntry, match=r"e:\(1,1\)\[unit\]"):
        assemble(GluingJob("PT", [g], tables, 4))
    with pytest.raises(MissingEntry, match="no vertex table"):
        assemble(GluingJob("PT", [g], {"a": tables["a"]}, 4))


def test_short_tables_underflow():
    rng = random.Random(1)
    job = single_edge_job(rng, order=6)
    high = GluingJob(job.theory, job.graphs, job.tables, 12)
    with pytest.raises(TruncationUnderflow):
        assemble(high)


def test_job_validation():
    g = GluingGraph("g", ("a",), ())
    with pytest.raises(AssemblyError):
        GluingJob("XX", [g], {}, 3)
    with pytest.raises(AssemblyError):
        GluingJob("PT", [g, GluingGraph("h", ("a",), ())], {}, 3)
    with pytest.raises(AssemblyError):
        GluingJob("PT", [g], {}, 3, insertions=(InsertionLabel("p"), InsertionLabel("p")))


def test_identical_jobs_are_consistent():
    a, _ = trivalent_jobs("maximal", 6)
    assert consistency_check(a, a).equal


def test_trivalent_variants():
    a, b = trivalent_jobs("maximal", 8)
    assert consistency_check(a, b).equal
    r = consistency_check(*trivalent_jobs("maximal", 8, perturb=3))
    assert not r.equal and r.exponent == 1
    r = consistency_check(*trivalent_jobs("full", 8))
    assert not r.equal and r.exponent == -2


def test_job_json_round_trip():
    a, _ = trivalent_jobs("full", 5)
    again = job_from_json(job_to_json(a))
    assert assemble(again) == assemble(a)
