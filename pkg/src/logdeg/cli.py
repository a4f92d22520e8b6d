"""The `logdeg` command line.

Exit status: 0 success, 1 invalid input or a failed validation, 2 a
computation error. With --json a single JSON report goes to stdout.
"""
import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .assembler import (AssemblyError, MissingEntry, assemble, consistency_check,
                        job_from_json)
from .cones import ConeError, is_combinatorially_flat, star, validate_complex
from .degeneration import FIXTURES, glue, sample_vertical
from .degeneration import cut as cut_complex
from .examples import SuiteFailure, run_example_suite
from .io import (FormatError, canonical, complex_to_json, degeneration_from_json,
                 degeneration_to_json, digest, family_from_json, fan_from_json, fan_to_json,
                 one_complex_from_json, one_complex_to_json, parts_from_json,
                 parts_to_json, points_from_json, read_json, record_from_json,
                 record_to_json, records_to_json, tropical_map_from_json, type_from_json,
                 unwrap, wrap)
from .moduli import fixture_non_flat_evaluation, family_from_types, flatten_evaluation, \
    is_rigid, parameter_cone
from .one_complexes import (ChowDecoration, ComplexError, check_balancing, chow_of_tropical_map,
                            retract_to_pure, validate_decoration, validate_one_complex)
from .partitions import (PartitionError, diagonal_decomposition, gamma_inverse_check,
                         load_pairing_tables, partition_count)
from .plane_curves import enumerate_rigid, p2_slice
from .polyhedra import slice_complex
from .series import (LaurentSeries, RationalFunction, SeriesError, expand_rational,
                     gw_dt_compare, macmahon, macmahon_power, pade_reconstruct)


class UsageError(Exception):
    pass


class ValidationFailed(Exception):
    """Inputs were read fine but do not satisfy the checked property."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


INPUT_ERRORS = (FormatError, UsageError, PartitionError, MissingEntry, json.JSONDecodeError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _ints(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _fraction(text):
    try:
        return Fraction(text.replace("−", "-"))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"expected an exact number, got {text!r}") from None


class Context:
    def __init__(self):
        self.inputs = {}
        self.seed = None

    def read(self, path):
        obj = read_json(path)
        self.inputs[str(path)] = digest(canonical(obj))
        return obj

    def load(self, path, expect=None):
        return unwrap(self.read(path), expect, str(path))[1]


# -- fan ------------------------------------------------------------------------------------


def cmd_fan(a, ctx):
    c = fan_from_json(ctx.load(a.file, "fan"), a.file)
    if a.action == "validate":
        problems = validate_complex(c)
        res = {"valid": not problems, "cones": len(c.cones),
               "problems": [str(p) for p in problems]}
        if problems:
            raise ValidationFailed(f"{len(problems)} problem(s)", res)
        return res, f"valid fan: {len(c.cones)} cones"
    if a.action == "star":
        if not a.cone:
            raise UsageError("fan star needs --cone")
        s = star(c, a.cone)
        return fan_to_json(s), _fan_text(s)
    if a.action == "slice":
        if a.height is None:
            raise UsageError("fan slice needs --height")
        pi = _ints(a.pi) if a.pi else c.meta.get("pi")
        if pi is None:
            raise UsageError("fan slice needs --pi or a 'pi' field in the fan file")
        p = slice_complex(c, pi, _fraction(a.height))
        return complex_to_json(p), f"slice: {len(p.vertices)} vertices, {len(p.cells)} cells"
    raise UsageError(f"unknown fan action {a.action!r}")


def _fan_text(c):
    lines = [f"lattice rank {c.meta.get('ambient_rank', '?')}"]
    for cone in c.cones:
        lines.append(f"  {cone.id}: {[list(r) for r in cone.ray_generators]}")
    return "\n".join(lines)


# -- 1-complexes ------------------------------------------------------------------------------


def cmd_oc(a, ctx):
    if a.action == "balance":
        t = tropical_map_from_json(ctx.load(a.file, "tropical-map"), a.file)
        bad = check_balancing(t)
        res = {"balanced": not bad, "unbalanced_vertices": bad}
        if not bad:
            g, deco = chow_of_tropical_map(t)
            res["chow_complex"] = one_complex_to_json(g, deco)
        if bad:
            raise ValidationFailed(f"unbalanced at vertices {bad}", res)
        return res, "balanced"
    g, deco = one_complex_from_json(ctx.load(a.file, "one-complex"), a.file)
    if a.action == "validate":
        problems = validate_one_complex(g) + validate_decoration(g, deco)
        res = {"valid": not problems, "problems": problems}
        if problems:
            raise ValidationFailed("; ".join(problems), res)
        return res, f"valid 1-complex: {len(g.positions)} vertices, {len(g.edges)} edges, " \
                    f"{len(g.rays)} rays"
    if a.action == "retract":
        h, d2 = retract_to_pure(g, deco)
        return one_complex_to_json(h, d2), f"pure complex: {len(h.positions)} vertices"
    raise UsageError(f"unknown oc action {a.action!r}")


# -- moduli ---------------------------------------------------------------------------------------


def cmd_moduli(a, ctx):
    if a.action == "flatten":
        if a.fixture:
            t, target, _ = fixture_non_flat_evaluation()
            fam = family_from_types({"sigma": t}, (1, 0), target)
        elif a.file:
            fam = family_from_json(ctx.load(a.file, "family"), a.file)
        else:
            raise UsageError("moduli flatten needs a family file or --fixture")
        r = flatten_evaluation(fam)
        res = {"source_cones": {n: len(c.cones) for n, c in r.source.items()},
               "target_cones": len(r.target.cones),
               "combinatorially_flat": all(is_combinatorially_flat(f)
                                           for f in r.morphisms.values()),
               "reduced_fibers": r.meta["reduced_fibers"],
               "target_subdivided": r.meta["target_subdivided"],
               "source_subdivided": r.meta["source_subdivided"],
               "steps": r.meta["order"],
               "target": fan_to_json(r.target)}
        return res, (f"flattened: {sum(res['source_cones'].values())} source cones, "
                     f"{res['target_cones']} target cones, reduced fibers "
                     f"{res['reduced_fibers']}")
    if not a.file:
        raise UsageError(f"moduli {a.action} needs a type file")
    t = type_from_json(ctx.load(a.file, ("type", "one-complex")), a.file)
    pc = parameter_cone(t)
    if a.action == "dim":
        return {"dimension": pc.dimension, "empty": pc.empty}, f"dimension {pc.dimension}"
    if a.action == "rigid":
        r = is_rigid(t)
        return {"rigid": r, "dimension": pc.dimension}, "rigid" if r else "not rigid"
    raise UsageError(f"unknown moduli action {a.action!r}")


# -- degenerations ---------------------------------------------------------------------------------


def _degeneration(a, ctx):
    if getattr(a, "degeneration", None):
        return degeneration_from_json(ctx.load(a.degeneration, "degeneration"), a.degeneration)
    return p2_slice()


def _record(path, ctx, index):
    obj = ctx.load(path, "records")
    if isinstance(obj, list):
        if not 0 <= index < len(obj):
            raise UsageError(f"{path}: no record with index {index}")
        obj = obj[index]
    return record_from_json(obj, path)


def cmd_deg(a, ctx):
    if a.action == "rigid":
        if not a.degree or not a.points:
            raise UsageError("deg rigid needs --degree and --points")
        d = _degeneration(a, ctx)
        pts = points_from_json(ctx.load(a.points, "points"), a.points)
        recs = enumerate_rigid(d, _ints(a.degree), pts, require_balanced=a.balanced)
        res = {"count": len(recs), "multiplicity_sum": sum(r.meta["multiplicity"] for r in recs),
               "records": records_to_json(recs)}
        return res, f"{len(recs)} rigid record(s), multiplicity sum {res['multiplicity_sum']}"
    if a.action == "fixture":
        if a.name not in FIXTURES:
            raise UsageError(f"unknown fixture {a.name!r}; choose from {sorted(FIXTURES)}")
        d, rec = FIXTURES[a.name]()
        g, labels, t = sample_vertical(d, rec, random.Random(a.seed), deco=rec.decoration)
        ctx.seed = a.seed
        res = {"degeneration": degeneration_to_json(d), "records": [record_to_json(rec)],
               "sample": {"height": str(t),
                          "complex": one_complex_to_json(g, ChowDecoration(labels))}}
        if a.write:
            out = Path(a.write)
            out.mkdir(parents=True, exist_ok=True)
            for name, kind, payload in (("degeneration.json", "degeneration",
                                         res["degeneration"]),
                                        ("records.json", "records", res["records"]),
                                        ("complex.json", "one-complex",
                                         res["sample"]["complex"])):
                (out / name).write_text(json.dumps(wrap(kind, payload), indent=1) + "\n")
            res["written"] = sorted(str(out / n) for n in
                                    ("degeneration.json", "records.json", "complex.json"))
        return res, f"{a.name}: sample vertical complex at height {t}"
    if len(a.files) != 3:
        raise UsageError(f"deg {a.action} needs <degeneration> <record> "
                         f"<{'complex' if a.action == 'cut' else 'parts'}>")
    dpath, rpath, xpath = a.files
    d = degeneration_from_json(ctx.load(dpath, "degeneration"), dpath)
    rec = _record(rpath, ctx, a.index)
    if a.action == "cut":
        if a.height is None:
            raise UsageError("deg cut needs --height")
        g, deco = one_complex_from_json(ctx.load(xpath, "one-complex"), xpath,
                                        d.slice_at(_fraction(a.height)))
        c = cut_complex(d, rec, g, _fraction(a.height), deco)
        return parts_to_json(c), f"{len(c.parts)} parts"
    if a.action == "glue":
        parts = parts_from_json(ctx.load(xpath, "parts"), d, rec, xpath)
        g, labels, t = glue(d, rec, parts.parts)
        return {"height": str(t), "complex": one_complex_to_json(g, ChowDecoration(labels))}, \
            f"glued at height {t}: {len(g.positions)} vertices"
    raise UsageError(f"unknown deg action {a.action!r}")


# -- Nakajima coefficients -----------------------------------------------------------------------------


def cmd_nak(a, ctx):
    sizes = _ints(a.sizes)
    if any(n < 0 for n in sizes):
        raise UsageError("sizes must be non-negative")
    if a.action == "diag":
        tables = None
        if a.pairing:
            tables = load_pairing_tables(json.dumps(ctx.load(a.pairing, "pairing")))
            if len(tables) == 1:
                tables = tables[0]
        v = diagonal_decomposition(sizes, tables)
        terms = [{"left": str(l), "right": str(r), "coefficient": str(c)}
                 for (l, r), c in v.items()]
        return {"sizes": list(sizes), "terms": terms, "formula": str(v)}, str(v)
    if a.action == "invcheck":
        ok = gamma_inverse_check(sizes)
        basis = 1
        for n in sizes:
            basis *= partition_count(n)
        res = {"sizes": list(sizes), "basis_size": basis, "identity": ok}
        if not ok:
            raise ValidationFailed("inverse check failed", res)
        return res, f"identity on {basis} basis elements"
    raise UsageError(f"unknown nak action {a.action!r}")


# -- series ---------------------------------------------------------------------------------------


def _rational(path, ctx):
    obj = ctx.load(path, ("rational", "series"))
    return RationalFunction.from_json(obj)


def cmd_series(a, ctx):
    if a.action == "macmahon":
        if a.order is None:
            raise UsageError("series macmahon needs --order")
        s = macmahon(a.order) if a.power is None else macmahon_power(a.power, a.order)
        res = {"coefficients": [str(c) for c in s.exact_coefficients(0)], "series": s.to_json()}
        return res, str(s)
    if a.action == "gwdt-check":
        if not (a.pt and a.gw) or a.order is None:
            raise UsageError("series gwdt-check needs --pt, --gw and --order")
        f = _rational(a.pt, ctx)
        z = LaurentSeries.from_json(ctx.load(a.gw, "series"), "u")
        r = gw_dt_compare(f, z, a.dbeta, a.excess, a.order)
        rep = r.report()
        rep["note"] = "insertion degrees are not checked; that is the caller's responsibility"
        if not r.equal:
            raise ValidationFailed(f"series differ at u^{r.mismatch}", rep)
        return rep, f"equal through u^{a.order}"
    if a.action == "pade":
        if not a.file or a.max_degree is None:
            raise UsageError("series pade needs a series file and --max-degree")
        s = LaurentSeries.from_json(ctx.load(a.file, "series"))
        f = pade_reconstruct(s, a.max_degree)
        if f is None:
            res = {"rational": None, "note": f"no rational function with degrees <= "
                   f"{a.max_degree} matches through q^{s.trunc}; higher degrees were not probed"}
            return res, res["note"]
        return {"rational": f.to_json(), "expression": str(f)}, str(f)
    if a.action == "expand":
        if not a.rational or a.order is None:
            raise UsageError("series expand needs --rational and --order")
        f = RationalFunction.parse(a.rational)
        s = expand_rational(f, a.start, a.order)
        return s.to_json(), str(s)
    raise UsageError(f"unknown series action {a.action!r}")


# -- assembly -------------------------------------------------------------------------------------


def _job(path, ctx):
    return job_from_json(ctx.load(path, "job"), Path(path).parent)


def cmd_assemble(a, ctx):
    job = _job(a.job, ctx)
    s, terms = assemble(job, with_terms=True)
    res = {"theory": job.theory, "series": s.to_json(), "terms": len(terms)}
    text = [str(s)]
    if a.terms:
        edges = {g.name: g.edges for g in job.graphs}
        res["term_report"] = [t.describe(edges[t.graph]) for t in terms]
        text += res["term_report"]
    if a.show_cycle_factors:
        res["cycle_factors"] = {g.name: g.cycle_factors() for g in job.graphs}
        text += [f"{n}: prod m_e = {f['product_of_labels']}, lcm = {f['lcm_of_dilations']}"
                 for n, f in res["cycle_factors"].items()]
    return res, "\n".join(text)


def cmd_check(a, ctx):
    if len(a.jobs) != 2:
        raise UsageError("check needs --jobs A B")
    ja, jb = (_job(p, ctx) for p in a.jobs)
    r = consistency_check(ja, jb)
    rep = r.report()
    if not r.equal:
        raise ValidationFailed(f"jobs differ first at exponent {r.exponent}", rep)
    return rep, f"consistent through order {r.order}"


def cmd_examples(a, ctx):
    kw = {}
    if a.name == "splitting":
        kw = {"samples": a.samples, "seed": a.seed}
        ctx.seed = a.seed
    res = run_example_suite(a.name, **kw)
    return res, f"{a.name}: ok"


# -- dispatch -------------------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="logdeg", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--json", action="store_true", help="print a JSON report")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock time (reports are otherwise byte-stable)")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    f = sub.add_parser("fan", help="cone complexes: validate, star, slice")
    f.add_argument("action", choices=["validate", "star", "slice"])
    f.add_argument("file")
    f.add_argument("--cone")
    f.add_argument("--height")
    f.add_argument("--pi", help="height functional, comma separated")
    f.set_defaults(run=cmd_fan)

    o = sub.add_parser("oc", help="embedded 1-complexes")
    o.add_argument("action", choices=["validate", "retract", "balance"])
    o.add_argument("file")
    o.set_defaults(run=cmd_oc)

    m = sub.add_parser("moduli", help="parameter cones and flattening")
    m.add_argument("action", choices=["dim", "rigid", "flatten"])
    m.add_argument("file", nargs="?")
    m.add_argument("--fixture", action="store_true",
                   help="flatten the bundled non-flat evaluation family")
    m.set_defaults(run=cmd_moduli)

    d = sub.add_parser("deg", help="rigid complexes, cutting and gluing")
    d.add_argument("action", choices=["rigid", "cut", "glue", "fixture"])
    d.add_argument("files", nargs="*")
    d.add_argument("--degree")
    d.add_argument("--points")
    d.add_argument("--balanced", action="store_true")
    d.add_argument("--degeneration", help="degeneration file (default: the P^2 fan slice)")
    d.add_argument("--height")
    d.add_argument("--index", type=int, default=0, help="record index in a records file")
    d.add_argument("--name", default="segment", help="fixture name for 'deg fixture'")
    d.add_argument("--seed", type=int, default=0, help="sampling seed for 'deg fixture'")
    d.add_argument("--write", metavar="DIR",
                   help="'deg fixture': write degeneration, records and sample complex files")
    d.set_defaults(run=cmd_deg)

    n = sub.add_parser("nak", help="Nakajima basis coefficients")
    n.add_argument("action", choices=["diag", "invcheck"])
    n.add_argument("--sizes", required=True)
    n.add_argument("--pairing", help="pairing table file (one table or one per factor)")
    n.set_defaults(run=cmd_nak)

    s = sub.add_parser("series", help="MacMahon, rational functions, GW/DT comparison",
                       epilog="gwdt-check does not enforce insertion degrees.")
    s.add_argument("action", choices=["macmahon", "gwdt-check", "pade", "expand"])
    s.add_argument("file", nargs="?")
    s.add_argument("--order", type=int)
    s.add_argument("--power", type=int)
    s.add_argument("--pt")
    s.add_argument("--gw")
    s.add_argument("--dbeta", type=int, default=0)
    s.add_argument("--excess", type=int, default=0)
    s.add_argument("--max-degree", type=int)
    s.add_argument("--rational")
    s.add_argument("--from", dest="start", type=int, default=0)
    s.set_defaults(run=cmd_series)

    a = sub.add_parser("assemble", help="evaluate a gluing job")
    a.add_argument("job")
    a.add_argument("--show-cycle-factors", action="store_true")
    a.add_argument("--terms", action="store_true", help="list every summand")
    a.set_defaults(run=cmd_assemble)

    c = sub.add_parser("check", help="compare two gluing jobs")
    c.add_argument("--jobs", nargs="+", required=True)
    c.set_defaults(run=cmd_check)

    e = sub.add_parser("examples", help="run a bundled end-to-end suite")
    e.add_argument("name", choices=["degree0", "conics", "trivalent", "splitting"])
    e.add_argument("--samples", type=int, default=500)
    e.add_argument("--seed", type=int, default=0)
    e.set_defaults(run=cmd_examples)
    return p


def threads():
    raw = os.environ.get("LOGDEG_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"LOGDEG_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"LOGDEG_THREADS must be a positive integer, got {raw!r}")
    return n


def dispatch(argv):
    """(exit status, report dict, text)."""
    ctx = Context()
    report = {"command": list(argv)}
    start = time.perf_counter()
    timing = "--timing" in argv
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("logdeg: a subcommand is required")
        report["threads"] = threads()
        result, text = args.run(args, ctx)
        status = 0
        report["result"] = result
    except ValidationFailed as exc:
        status, text = 1, f"validation failed: {exc}"
        report["error"] = {"kind": "validation", "message": str(exc)}
        if exc.result is not None:
            report["result"] = exc.result
    except INPUT_ERRORS as exc:
        status, text = 1, f"error: {exc}"
        report["error"] = {"kind": "input", "message": str(exc)}
    except SuiteFailure as exc:
        status, text = 2, f"example failed: {exc}\n" + json.dumps(exc.diff, indent=1)
        report["error"] = {"kind": "computation", "message": str(exc), "diff": exc.diff}
    except (AssemblyError, SeriesError, ComplexError, ConeError, ValueError,
            ArithmeticError) as exc:
        status, text = 2, f"computation error: {exc}"
        report["error"] = {"kind": "computation", "message": str(exc)}
    report["inputs"] = dict(sorted(ctx.inputs.items()))
    if ctx.seed is not None:
        report["seed"] = ctx.seed
    if timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    return status, report, text


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if "-h" in argv or "--help" in argv or "--version" in argv:
        try:
            build_parser().parse_args(argv)
        except SystemExit as exc:
            return exc.code or 0
    status, report, text = dispatch(argv)
    if "--json" in argv:
        sys.stdout.write(json.dumps(report, indent=1, sort_keys=True, ensure_ascii=False, default=str) + "\n")
    else:
        stream = sys.stdout if status == 0 else sys.stderr
        stream.write(text + "\n")
        if status and "result" in report:
            sys.stdout.write(json.dumps(report["result"], indent=1, ensure_ascii=False, default=str) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
