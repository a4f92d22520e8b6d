"""End-to-end example suites over the bundled fixtures.

Each suite returns a JSON-ready result and raises SuiteFailure with a diff
when an expected outcome does not hold.
"""
import json
import random
from importlib import resources

from .assembler import (assemble, conic_job, consistency_check, degree_zero_job,
                        fixed_point_solve, job_from_json, trivalent_jobs)
from .degeneration import (FIXTURES, ChowDecoration, cut, glue, sample_vertical,
                           vertical_type_key)
from .io import fan_from_json, points_from_json, unwrap
from .plane_curves import enumerate_rigid, p2_slice
from .series import LaurentSeries, macmahon


class SuiteFailure(AssertionError):
    def __init__(self, message, diff=None):
        super().__init__(message)
        self.diff = diff or {}


def fixture(name):
    """Payload of a bundled fixture file (envelope checked)."""
    text = resources.files("logdeg").joinpath("fixtures").joinpath(name).read_text()
    return unwrap(json.loads(text), where=name)[1]


def fixture_meta(name):
    text = resources.files("logdeg").joinpath("fixtures").joinpath(name).read_text()
    return json.loads(text).get("provenance", {})


def _expect(cond, message, **diff):
    if not cond:
        raise SuiteFailure(message, {k: str(v) for k, v in diff.items()})


def degree0():
    f = fixed_point_solve("F = F^2", 50)
    _expect(f == LaurentSeries.constant(1, 50), "F = F^2 did not force F = 1", got=f)
    g = macmahon(12)
    sq = assemble(degree_zero_job(g, 12))
    _expect(sq == (g * g).truncate(12), "two-vertex degree-zero job is not F^2",
            got=sq, expected=g * g)
    return {"fixed_point": str(f), "two_vertex_job": "F^2", "order": 50}


def conics():
    d = p2_slice()
    pts5 = points_from_json(fixture("p2_points5.json"))
    pts2 = points_from_json(fixture("p2_points2.json"))
    recs = enumerate_rigid(d, (2, 2, 2), pts5)
    _expect(len(recs) == 1, "conics through 5 points: expected 1 rigid record",
            got=len(recs))
    lines = enumerate_rigid(d, (1, 1, 1), pts2)
    _expect(len(lines) == 1, "lines through 2 points: expected 1 rigid record",
            got=len(lines))
    line = LaurentSeries.from_json(fixture("line_series.json"))
    job, graph, marked = conic_job(recs[0], pts5, line, order=4)
    got = assemble(job)
    n = len(graph.edges)
    expected = (line ** 4).shift(-n).truncate(job.order)
    _expect(got == expected, "conic job is not q^-|mu| times the fourth power of the line",
            got=got, expected=expected)
    return {"records": 1, "lines": 1, "bounded_edges": n, "marked_vertices": len(marked),
            "trivalent_vertices": len(graph.vertices) - len(marked),
            "assembled": got.to_json()}


def trivalent():
    out = {}
    a, b = (job_from_json(fixture(f"trivalent_{s}_maximal.json")) for s in "AB")
    r = consistency_check(a, b)
    _expect(r.equal, "maximal-tangency variant: the two degenerations disagree", **r.report())
    out["maximal"] = r.report()
    a, b = trivalent_jobs("maximal", a.order, perturb=3)
    r = consistency_check(a, b)
    _expect(not r.equal and r.exponent == 1,
            "perturbing N22 at q^3 should surface at q^1 (gluing prefactor q^-2)", **r.report())
    out["perturbed"] = r.report()
    a, b = (job_from_json(fixture(f"trivalent_{s}_full.json")) for s in "AB")
    r = consistency_check(a, b)
    diff = assemble(a) - assemble(b)
    _expect(not r.equal and r.exponent == -2,
            "without the vanishing assumption the (1,1) gluing term should show at q^-2",
            **r.report())
    out["full"] = {**r.report(), "difference": diff.to_json()}
    return out


def splitting(samples=500, seed=0, fixtures=None):
    out = {}
    for name in fixtures or sorted(FIXTURES):
        d, rec = FIXTURES[name]()
        rng = random.Random(seed)
        fails, seen = [], {}
        for i in range(samples):
            g, labels, t = sample_vertical(d, rec, rng, deco=rec.decoration)
            c = cut(d, rec, g, t, ChowDecoration(labels))
            g2, lab2, t2 = glue(d, rec, c.parts)
            k1 = vertical_type_key(d, rec, g, t, labels)
            k2 = vertical_type_key(d, rec, g2, t2, lab2)
            c2 = cut(d, rec, g2, t2, ChowDecoration(lab2))
            if k1 != k2 or c2.key() != c.key():
                fails.append(i)
            seen.setdefault(c.key(), set()).add(k1)
        injective = all(len(v) == 1 for v in seen.values())
        out[name] = {"samples": samples, "failures": len(fails), "injective": injective,
                     "distinct_cuts": len(seen)}
        _expect(not fails and injective, f"splitting round trips failed on {name}",
                failed_samples=fails[:10], injective=injective)
    return out


SUITES = {"degree0": degree0, "conics": conics, "trivalent": trivalent, "splitting": splitting}


def run_example_suite(name, **kw):
    if name not in SUITES:
        raise KeyError(f"unknown example suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](**kw)


def p2_fan():
    return fan_from_json(fixture("p2_fan.json"))
