"""Numerical degeneration formula: glue per-vertex partition functions along
the bounded edges of rigid 1-complexes.

For one rigid complex with bounded edges e (labels n_e) the contribution is

    Σ_μ Σ_j Σ_{S -> V}  (-1)^μ m_μ / Aut(μ) · c_j · P(μ) · Π_v T_v(μ_v(δ_v^j), S_v)

with P(μ) = q^{-|μ|} for DT/PT and u^{2ℓ(μ)} for GW. The μ- and j-sums are
read off `diagonal_decomposition`, whose coefficients are (-1)^μ/(Aut(μ) m_μ);
each basis class on either side of an edge carries a further factor m_μ, so
the weight applied here is that coefficient times m_μ². This is the only place
the two conventions meet.
"""
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd

from .one_complexes import chow_of_tropical_map, subdivide
from .partitions import (FormalVector, PairingTable, Partition, PartitionTuple,
                         WeightedPartitionTuple, diagonal_decomposition, m_of,
                         partitions_of)
from .series import (LaurentSeries, RationalFunction, SeriesError, TruncationError,
                     expand_rational, format_scalar)


class AssemblyError(ValueError):
    pass


class MissingEntry(AssemblyError):
    pass


class TruncationUnderflow(AssemblyError):
    pass


THEORIES = ("DT", "PT", "GW")


@dataclass(frozen=True)
class InsertionLabel:
    id: str
    level: int = 0
    cls: str = "point"


@dataclass(frozen=True)
class GluingGraph:
    """A rigid complex as the assembler sees it: vertex ids and bounded edges
    (edge id, left vertex, right vertex, label)."""
    name: str
    vertices: tuple
    edges: tuple
    dilations: tuple = ()

    def cycle_factors(self):
        """Π_e m_e and ℓ = lcm of the dilation factors; audit only."""
        ms = self.dilations or tuple(e[3] for e in self.edges)
        prod_m = 1
        for m in ms:
            prod_m *= m
        ell = reduce(lambda a, b: a * b // gcd(a, b), ms, 1)
        return {"product_of_labels": prod_m, "lcm_of_dilations": ell}

    def incident(self, v):
        return [e for e in self.edges if v in (e[1], e[2])]


def graph_of_record(record, name="g", prefix=None):
    """GluingGraph of a RigidComplexRecord: vertex i becomes '<prefix>v<i>'."""
    prefix = f"{name}:" if prefix is None else prefix
    g, deco = record.gamma, record.decoration
    vertices = tuple(f"{prefix}v{i}" for i in range(len(g.positions)))
    edges = tuple((f"{prefix}e{i}", vertices[u], vertices[v], deco.label(("e", i)))
                  for i, (u, v, _, _) in enumerate(g.edges))
    dil = ()
    tmap = record.meta.get("tropical_map") if isinstance(record.meta, dict) else None
    if tmap is not None:
        dil = tuple(m for *_, m in tmap.edges)
    return GluingGraph(name, vertices, edges, dil)


def boundary_key(items):
    """Canonical boundary condition: sorted (edge id, partition parts, label)."""
    out = []
    for eid, mu, label in items:
        parts = mu.parts if isinstance(mu, Partition) else tuple(sorted(mu, reverse=True))
        out.append((str(eid), tuple(int(p) for p in parts), str(label)))
    return tuple(sorted(out))


@dataclass
class VertexTable:
    vertex: str
    entries: dict = field(default_factory=dict)

    def set(self, boundary, insertions, series):
        self.entries[(boundary_key(boundary), frozenset(insertions))] = series
        return self

    def lookup(self, boundary, insertions):
        key = (boundary_key(boundary), frozenset(insertions))
        try:
            return self.entries[key]
        except KeyError:
            raise MissingEntry(f"vertex table {self.vertex!r} has no entry for boundary "
                               f"{_show_boundary(key[0])} with insertions "
                               f"{sorted(key[1])}") from None

    def to_json(self):
        rows = []
        for (b, s), ser in sorted(self.entries.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1]))):
            rows.append({"boundary": [{"edge": e, "partition": list(p), "label": lab}
                                      for e, p, lab in b],
                         "insertions": sorted(s), "series": ser.to_json()})
        return {"vertex": self.vertex, "entries": rows}

    @classmethod
    def from_json(cls, obj, var="q"):
        try:
            t = cls(obj["vertex"])
            for i, row in enumerate(obj["entries"]):
                b = [(x["edge"], x["partition"], x.get("label", "point"))
                     for x in row.get("boundary", [])]
                t.set(b, row.get("insertions", []), LaurentSeries.from_json(row["series"], var))
        except (KeyError, TypeError, SeriesError) as exc:
            raise AssemblyError(f"malformed vertex table: {exc}") from exc
        return t


def _show_boundary(b):
    if not b:
        return "(none)"
    return ", ".join(f"{e}:({','.join(map(str, p))})[{lab}]" for e, p, lab in b)


@dataclass
class GluingJob:
    theory: str
    graphs: list
    tables: dict
    order: int
    pairings: dict = field(default_factory=dict)
    insertions: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.theory not in THEORIES:
            raise AssemblyError(f"unknown theory {self.theory!r}; expected one of {THEORIES}")
        ids = [s.id for s in self.insertions]
        if len(set(ids)) != len(ids):
            raise AssemblyError("insertion ids must be unique")
        seen = set()
        for g in self.graphs:
            for v in g.vertices:
                if v in seen:
                    raise AssemblyError(f"vertex id {v!r} is used twice in the job")
                seen.add(v)

    @property
    def var(self):
        return "u" if self.theory == "GW" else "q"

    def pairing_for(self, eid):
        return self.pairings.get(eid) or PairingTable.default(eid)


@dataclass(frozen=True)
class Term:
    graph: str
    mu: PartitionTuple
    left: tuple
    right: tuple
    distribution: tuple
    coefficient: Fraction
    prefactor: int
    series: LaurentSeries

    def describe(self, edges):
        mus = ", ".join(f"{e[0]}:{m}[{a}|{b}]" for e, m, a, b in
                        zip(edges, self.mu.entries, self.left, self.right))
        dist = ", ".join(f"{i}->{v}" for i, v in self.distribution)
        return (f"{self.graph}: mu=({mus or 'no edges'}) S=({dist or 'empty'}) "
                f"coeff={self.coefficient} prefactor^{self.prefactor}")


def _edge_terms(g, job):
    sizes = [e[3] for e in g.edges]
    if not sizes:
        return FormalVector({(WeightedPartitionTuple(PartitionTuple(()), ()),
                              WeightedPartitionTuple(PartitionTuple(()), ())): 1})
    return diagonal_decomposition(sizes, [job.pairing_for(e[0]) for e in g.edges])


def terms(job):
    """Every summand of the formula, with its weight and assembled series."""
    var = job.var
    for g in job.graphs:
        for (left, right), c in _edge_terms(g, job).items():
            mu = left.tuple
            weight = c * m_of(mu) ** 2
            power = -mu.size if job.theory != "GW" else 2 * mu.length
            bound = {v: [] for v in g.vertices}
            for e, part, a, b in zip(g.edges, mu.entries, left.labels, right.labels):
                bound[e[1]].append((e[0], part, a))
                bound[e[2]].append((e[0], part, b))
            for choice in product(g.vertices, repeat=len(job.insertions)):
                blocks = {v: [] for v in g.vertices}
                for ins, v in zip(job.insertions, choice):
                    blocks[v].append(ins.id)
                series = None
                for v in g.vertices:
                    table = job.tables.get(v)
                    if table is None:
                        raise MissingEntry(f"no vertex table for vertex {v!r}")
                    s = table.lookup(bound[v], blocks[v])
                    if s.var != var:
                        raise AssemblyError(f"table {v!r} is a series in {s.var}, "
                                            f"the {job.theory} formula needs {var}")
                    series = s if series is None else series * s
                if series is None:
                    series = LaurentSeries.constant(1, job.order - power, var)
                series = series.shift(power) * weight
                yield Term(g.name, mu, left.labels, right.labels,
                           tuple((i.id, v) for i, v in zip(job.insertions, choice)),
                           weight, power, series)


def assemble(job, with_terms=False):
    total = LaurentSeries([], job.order + 1, job.order, job.var)
    kept = []
    edges = {g.name: g.edges for g in job.graphs}
    for t in terms(job):
        if t.series.trunc < job.order:
            raise TruncationUnderflow(
                f"term {t.describe(edges[t.graph])} is known only through "
                f"{job.var}^{t.series.trunc}; output order {job.order} needs more terms "
                f"in its vertex tables")
        total = total + t.series.truncate(job.order)
        if with_terms:
            kept.append(t)
    return (total, kept) if with_terms else total


@dataclass
class Residual:
    equal: bool
    order: int
    exponent: object = None
    left: object = None
    right: object = None

    def report(self):
        out = {"equal": self.equal, "order": self.order}
        if not self.equal:
            out["first_mismatch"] = {"exponent": self.exponent,
                                     "left": format_scalar(self.left),
                                     "right": format_scalar(self.right)}
        return out


def consistency_check(job_a, job_b):
    a, b = assemble(job_a), assemble(job_b)
    if a.var != b.var:
        raise AssemblyError("jobs assemble to series in different variables")
    order = min(a.trunc, b.trunc)
    k = a.first_mismatch(b, order)
    if k is None:
        return Residual(True, order)
    return Residual(False, order, k, a[k], b[k])


_RELATION = re.compile(r"^\s*F\s*=\s*F\s*(?:(?:\^|\*\*)\s*(\d+))?\s*$")


def fixed_point_solve(relation, order, var="q"):
    """Solve F = F^k for F = 1 + O(q), coefficient by coefficient."""
    m = _RELATION.match(relation.replace("²", "^2").replace("³", "^3"))
    if not m:
        raise AssemblyError(f"cannot read relation {relation!r}; expected 'F = F^k'")
    k = int(m.group(1) or 1)
    if k == 1:
        raise AssemblyError("underdetermined: F = F holds for every series")
    if k == 0:
        raise AssemblyError("F = 1 is not a fixed-point relation")
    coeffs = [Fraction(1)]
    for n in range(1, order + 1):
        # coefficient n of F^k with a_n = 0; the a_n term enters as k*a_n
        c = LaurentSeries(coeffs + [0], 0, n, var) ** k
        rest = Fraction(c[n].x.numerator, c[n].x.denominator)
        coeffs.append(-rest / (k - 1))
    return LaurentSeries(coeffs, 0, order, var)


# -- job files


def load_job(path):
    """Read a job file; table and pairing references are relative to it."""
    from pathlib import Path
    base = Path(path).parent
    obj = json.loads(Path(path).read_text())
    return job_from_json(obj, base)


def _maybe_file(x, base):
    if isinstance(x, str):
        return json.loads((base / x).read_text())
    return x


def job_from_json(obj, base=None):
    from pathlib import Path
    base = Path(base or ".")
    try:
        theory = obj["theory"]
        var = "u" if theory == "GW" else "q"
        graphs = []
        for i, g in enumerate(obj["rigid"]):
            g = _maybe_file(g, base)
            graphs.append(GluingGraph(g.get("name", f"g{i}"), tuple(g["vertices"]),
                                      tuple((e["id"], e["ends"][0], e["ends"][1], int(e["label"]))
                                            for e in g.get("edges", [])),
                                      tuple(g.get("dilations", ()))))
        tables = {}
        for t in obj["tables"]:
            t = VertexTable.from_json(_maybe_file(t, base), var)
            tables[t.vertex] = t
        pairings = {eid: PairingTable.from_json(_maybe_file(p, base))
                    for eid, p in obj.get("pairings", {}).items()}
        ins = tuple(InsertionLabel(x["id"], int(x.get("level", 0)), x.get("class", "point"))
                    for x in obj.get("insertions", []))
        return GluingJob(theory, graphs, tables, int(obj["order"]), pairings, ins,
                         obj.get("name", ""))
    except (KeyError, TypeError, IndexError) as exc:
        raise AssemblyError(f"malformed job: missing or bad field {exc}") from exc


def job_to_json(job):
    return {"name": job.name, "theory": job.theory, "order": job.order,
            "rigid": [{"name": g.name, "vertices": list(g.vertices),
                       "edges": [{"id": e, "ends": [a, b], "label": n} for e, a, b, n in g.edges],
                       **({"dilations": list(g.dilations)} if g.dilations else {})}
                      for g in job.graphs],
            "tables": [job.tables[v].to_json() for g in job.graphs for v in g.vertices],
            "pairings": {e: p.to_json() for e, p in job.pairings.items()},
            "insertions": [{"id": i.id, "level": i.level, "class": i.cls}
                           for i in job.insertions]}


# -- bundled jobs


def fill_table(job_or_graph, vertex, value, labels=None, insertions=((),)):
    """A table for `vertex` with an entry for every boundary condition the
    default diagonal touches; value(boundary) gives the series."""
    g = job_or_graph
    table = VertexTable(vertex)
    inc = g.incident(vertex)
    choices = []
    for e in inc:
        side = "point" if e[1] == vertex else "unit"
        if labels and e[0] in labels:
            side = labels[e[0]]
        choices.append([(e[0], p, side) for p in partitions_of(e[3])])
    for b in product(*choices):
        for s in insertions:
            table.set(list(b), s, value(boundary_key(b)))
    return table


def degree_zero_job(f, order=10):
    """Two vertices, no edges, both tables F: assembles to F²."""
    g = GluingGraph("deg0", ("a", "b"), ())
    tables = {v: VertexTable(v).set([], [], f) for v in g.vertices}
    return GluingJob("PT", [g], tables, order, name="degree zero")


def _synthetic(text, order):
    return expand_rational(RationalFunction.parse(text), 0, order)


TRIVALENT_SERIES = {
    "N22": "(1+q)/(1-q)**2",
    "N21": "1/(1-q-q**2)",
    "X11": "1+q",
    "Y11": "1-2*q",
}


def trivalent_jobs(variant="maximal", order=8, perturb=None, slack=6):
    """The two degenerations of the S_(2,3) invariant.

    Job A cuts along an edge of weight 2 between vertices of types (2,2) and
    (2,1); job B along an edge of weight 1 between (2,1) and (4,1). The vertex
    series are synthetic: N41 := N22. The weight-2 gluing carries -2q^-2 and
    the weight-1 gluing q^-1, so B's (4,1) table stores -2q^-1 N41 and the
    relation N22·N21 = N21·N41 becomes A = B.

    variant "maximal": the (1,1) gluing entries vanish.
    variant "full": they are the nonzero series X11 and Y11, and A - B equals
    their contribution (1/2) q^-2 X11 Y11.
    `perturb` = exponent k adds q^k to N22 in job A only.
    """
    if variant not in ("maximal", "full"):
        raise AssemblyError(f"unknown variant {variant!r}")
    t = order + slack
    s = {k: _synthetic(v, t) for k, v in TRIVALENT_SERIES.items()}
    n22 = s["N22"]
    if perturb is not None:
        n22 = n22 + LaurentSeries.monomial(perturb, t)
    n41 = s["N22"]
    zero = LaurentSeries([], t + 1, t)
    ga = GluingGraph("A", ("A22", "A21"), (("eA", "A22", "A21", 2),))
    gb = GluingGraph("B", ("B21", "B41"), (("eB", "B21", "B41", 1),))

    def side(full, other):
        return lambda b: full if b[0][1] == (2,) else (other if variant == "full" else zero)

    ta = {"A22": fill_table(ga, "A22", side(n22, s["X11"])),
          "A21": fill_table(ga, "A21", side(s["N21"], s["Y11"]))}
    tb = {"B21": fill_table(gb, "B21", lambda b: s["N21"]),
          "B41": fill_table(gb, "B41", lambda b: n41.shift(-1) * -2)}
    return (GluingJob("PT", [ga], ta, order, name=f"trivalent A ({variant})"),
            GluingJob("PT", [gb], tb, order, name=f"trivalent B ({variant})"))


def conic_graph(record, points, name="conic"):
    """The conic's Chow 1-complex cut at the marked points: trivalent vertices
    and 2-valent point vertices, all bounded edges of label 1 here."""
    tmap = record.meta["tropical_map"]
    g, deco = chow_of_tropical_map(tmap)
    pts = [tuple(Fraction(c) for c in p) for p in points]
    g, deco = subdivide(g, deco, pts)
    sub = type(record)(g, deco, record.certificate, {})
    graph = graph_of_record(sub, name)
    marked = {graph.vertices[i] for i, x in enumerate(g.positions) if x in set(pts)}
    return graph, marked


def conic_job(record, points, line, order=4, point_series=None):
    """Each trivalent vertex gets the line series, each marked point 1."""
    graph, marked = conic_graph(record, points)
    t = line.trunc
    one = point_series or LaurentSeries.constant(1, t)
    tables = {}
    for v in graph.vertices:
        series = one if v in marked else line
        tables[v] = fill_table(graph, v, lambda b, s=series: s)
    return GluingJob("PT", [graph], tables, order, name="conic"), graph, marked


def collapse_check(job):
    """For all-label-one jobs: q^-#edges Π_v T_v, computed directly."""
    total = LaurentSeries([], job.order + 1, job.order, job.var)
    for g in job.graphs:
        if any(e[3] != 1 for e in g.edges):
            raise AssemblyError("collapse applies to label-one edges only")
        prod_s = LaurentSeries.constant(1, job.order + len(g.edges), job.var)
        for v in g.vertices:
            b = [(e[0], (1,), "point" if e[1] == v else "unit") for e in g.incident(v)]
            prod_s = prod_s * job.tables[v].lookup(b, [])
        shift = -len(g.edges) if job.theory != "GW" else 2 * len(g.edges)
        total = total + prod_s.shift(shift).truncate(job.order)
    return total


__all__ = ["AssemblyError", "MissingEntry", "TruncationUnderflow", "TruncationError",
           "InsertionLabel", "GluingGraph", "VertexTable", "GluingJob", "Term", "Residual",
           "assemble", "terms", "consistency_check", "fixed_point_solve", "graph_of_record",
           "boundary_key", "load_job", "job_from_json", "job_to_json", "fill_table",
           "degree_zero_job", "trivalent_jobs", "conic_graph", "conic_job", "collapse_check"]
