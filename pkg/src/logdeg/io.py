"""JSON codecs for every object the command line reads or writes, and the
checksummed envelope around them.

Exact scalars are written as strings ("-13/240", "3i/2"). A file is either a
bare payload or an envelope

    {"logdeg": 1, "kind": ..., "checksum": "sha256:...", "payload": ...}

whose checksum covers the canonical dump of the payload.
"""
import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cones import Cone, ConeComplex, FaceMap
from .degeneration import CutResult, DegenerationComplex, Part, RigidComplexRecord
from .lattice import as_fraction
from .moduli import CombinatorialType, EvaluationFamily, ZeroComplex
from .one_complexes import ChowDecoration, HilbertDecoration, OneComplex, TropicalMap
from .polyhedra import PolyhedralComplex

FORMAT_VERSION = 1
KINDS = ("fan", "complex", "degeneration", "one-complex", "tropical-map", "type", "family",
         "records", "parts", "points", "series", "rational", "pairing", "vertex-table", "job",
         "report")


class FormatError(ValueError):
    """A malformed file; the message names the offending field."""


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(text):
    if isinstance(text, str):
        text = text.encode()
    return "sha256:" + hashlib.sha256(text).hexdigest()


@dataclass(frozen=True)
class Manifest:
    version: int
    kind: str
    checksum: str


def wrap(kind, payload):
    if kind not in KINDS:
        raise FormatError(f"kind: unknown object kind {kind!r}")
    return {"logdeg": FORMAT_VERSION, "kind": kind, "checksum": digest(canonical(payload)),
            "payload": payload}


def unwrap(obj, expect=None, where="file"):
    """(Manifest or None, payload). Bare payloads are accepted as they are."""
    if isinstance(obj, dict) and "logdeg" in obj:
        for key in ("kind", "checksum", "payload"):
            if key not in obj:
                raise FormatError(f"{where}: envelope field {key!r} is missing")
        if obj["logdeg"] != FORMAT_VERSION:
            raise FormatError(f"{where}: logdeg: format version {obj['logdeg']!r} "
                              f"is not recognized (expected {FORMAT_VERSION})")
        if obj["kind"] not in KINDS:
            raise FormatError(f"{where}: kind: unknown object kind {obj['kind']!r}")
        if expect and obj["kind"] not in ((expect,) if isinstance(expect, str) else expect):
            raise FormatError(f"{where}: kind: expected {expect}, found {obj['kind']!r}")
        if digest(canonical(obj["payload"])) != obj["checksum"]:
            raise FormatError(f"{where}: checksum: does not match the payload")
        return Manifest(obj["logdeg"], obj["kind"], obj["checksum"]), obj["payload"]
    return None, obj


def read_json(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load(path, expect=None):
    return unwrap(read_json(path), expect, str(path))[1]


def _field(obj, key, where):
    try:
        return obj[key]
    except (KeyError, TypeError):
        raise FormatError(f"{where}: field {key!r} is missing") from None


def _num(x):
    return str(x) if isinstance(x, Fraction) and x.denominator != 1 else int(x)


def _vec_out(v):
    return [_num(as_fraction(x)) for x in v]


def _vec_in(v, where):
    try:
        return tuple(as_fraction(x) for x in v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise FormatError(f"{where}: {v!r} is not a vector of exact numbers") from None


def _ivec_in(v, where):
    out = _vec_in(v, where)
    if any(x.denominator != 1 for x in out):
        raise FormatError(f"{where}: {v!r} must be an integer vector")
    return tuple(int(x) for x in out)


# -- fans -----------------------------------------------------------------------------


def fan_to_json(c):
    fmaps = [f for f in c.face_maps]
    k = c.ambient_rank
    ident = tuple(tuple(int(i == j) for j in range(k)) for i in range(k))
    out = {"lattice_rank": k, "cones": []}
    for cone in c.cones:
        rec = {"id": cone.id, "rays": [_vec_out(r) for r in cone.ray_generators],
               "faces": sorted(f.child for f in fmaps if f.parent == cone.id)}
        if cone.lattice is not None:
            rec["lattice"] = [_vec_out(v) for v in cone.lattice]
        out["cones"].append(rec)
    if any(tuple(map(tuple, f.matrix)) != ident for f in fmaps):
        out["morphisms"] = [{"child": f.child, "parent": f.parent,
                             "matrix": [list(map(int, row)) for row in f.matrix]}
                            for f in fmaps]
    if "pi" in c.meta:
        out["pi"] = list(map(int, c.meta["pi"]))
    return out


def fan_from_json(obj, where="fan"):
    k = int(_field(obj, "lattice_rank", where))
    cones_in = _field(obj, "cones", where)
    if not isinstance(cones_in, list):
        raise FormatError(f"{where}: cones: expected a list")
    if "morphisms" in obj:
        cones = []
        for i, c in enumerate(cones_in):
            w = f"{where}: cones[{i}]"
            rays = tuple(_ivec_in(r, w + ".rays") for r in _field(c, "rays", w))
            lat = tuple(_ivec_in(v, w + ".lattice") for v in c["lattice"]) \
                if "lattice" in c else None
            cones.append(Cone(str(_field(c, "id", w)), k, rays, lat))
        fmaps = tuple(FaceMap(m["child"], m["parent"], tuple(tuple(r) for r in m["matrix"]))
                      for m in obj["morphisms"])
        out = ConeComplex(tuple(cones), fmaps)
        object.__setattr__(out, "meta", {"ambient_rank": k})
    else:
        rays, index, maximal, ids, lattices = [], {}, [], {}, {}
        for i, c in enumerate(cones_in):
            w = f"{where}: cones[{i}]"
            s = []
            for r in _field(c, "rays", w):
                r = _ivec_in(r, w + ".rays")
                if len(r) != k:
                    raise FormatError(f"{w}.rays: {list(r)} has length {len(r)}, "
                                      f"lattice_rank is {k}")
                if r not in index:
                    index[r] = len(rays)
                    rays.append(r)
                s.append(index[r])
            ids[frozenset(s)] = str(_field(c, "id", w))
            if "lattice" in c:
                lattices[frozenset(s)] = tuple(_ivec_in(v, w + ".lattice") for v in c["lattice"])
            maximal.append(s)
        names = [None] * len(rays)
        for s, cid in ids.items():
            if len(s) == 1:
                names[next(iter(s))] = cid
        names = [n or f"r{i}" for i, n in enumerate(names)]
        maximal = [m for m in maximal if m]
        try:
            out = ConeComplex.from_fan(rays, maximal, names=names, ids=ids, lattices=lattices)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"{where}: cones: {exc}") from exc
        if not rays:
            object.__setattr__(out, "meta", {"ambient_rank": k})
        known = set(out.ids())
        for i, c in enumerate(cones_in):
            for f in c.get("faces", []):
                if f not in known:
                    raise FormatError(f"{where}: cones[{i}].faces: unknown cone id {f!r}")
    if "pi" in obj:
        pi = obj["pi"]
        meta = dict(out.meta)
        meta["pi"] = _ivec_in(pi, where + ": pi")
        object.__setattr__(out, "meta", meta)
    return out


# -- polyhedral complexes and degenerations ----------------------------------------------


def complex_to_json(p):
    return {"ambient_dim": p.ambient_dim,
            "vertices": [_vec_out(v) for v in p.vertices],
            "vertex_names": list(p.vertex_names),
            "cells": [{"id": c.id, "vertices": list(c.vertices),
                       "rays": [_vec_out(r) for r in c.rays]} for c in p.cells]}


def complex_from_json(obj, where="complex"):
    verts = [_vec_in(v, f"{where}: vertices[{i}]")
             for i, v in enumerate(_field(obj, "vertices", where))]
    cells = {}
    for i, c in enumerate(_field(obj, "cells", where)):
        w = f"{where}: cells[{i}]"
        vs = [int(x) for x in _field(c, "vertices", w)]
        if any(not 0 <= x < len(verts) for x in vs):
            raise FormatError(f"{w}.vertices: index out of range")
        cells[str(_field(c, "id", w))] = (vs, [_ivec_in(r, w + ".rays") for r in c.get("rays", [])])
    try:
        return PolyhedralComplex.build(verts, cells, obj.get("vertex_names"))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"{where}: {exc}") from exc


def degeneration_to_json(d):
    out = {"slice": complex_to_json(d.slice), "directions": [list(x) for x in d.directions]}
    if d.meta.get("name"):
        out["name"] = d.meta["name"]
    return out


def degeneration_from_json(obj, where="degeneration"):
    p = complex_from_json(_field(obj, "slice", where), where + ": slice")
    dirs = obj.get("directions")
    dirs = [_ivec_in(x, f"{where}: directions") for x in dirs] if dirs is not None else None
    return DegenerationComplex.from_slice(p, directions=dirs, name=obj.get("name", ""))


def ambient_to_json(amb):
    if amb is None:
        return None
    if isinstance(amb, ConeComplex):
        return {"fan": fan_to_json(amb)}
    return {"complex": complex_to_json(amb)}


def ambient_from_json(obj, where):
    if obj is None:
        return None
    if "fan" in obj:
        return fan_from_json(obj["fan"], where + ".fan")
    if "complex" in obj:
        return complex_from_json(obj["complex"], where + ".complex")
    raise FormatError(f"{where}: expected a 'fan' or 'complex' block")


# -- 1-complexes ------------------------------------------------------------------------


def _cell_name(cell):
    return f"{cell[0]}{cell[1]}"


def _cell_parse(s, where):
    if not isinstance(s, str) or s[:1] not in ("e", "r") or not s[1:].isdigit():
        raise FormatError(f"{where}: {s!r} is not an edge ('e<i>') or ray ('r<i>') name")
    return (s[0], int(s[1:]))


def decoration_to_json(deco):
    out = {"edge_labels": {_cell_name(c): n for c, n in sorted(deco.edge_labels.items())}}
    if deco.vertex_classes:
        out["vertex_classes"] = {str(v): list(c) for v, c in sorted(deco.vertex_classes.items())}
    if isinstance(deco, HilbertDecoration):
        out["vertex_euler"] = {str(v): x for v, x in sorted(deco.vertex_euler.items())}
        out["total_chi"] = deco.total_chi
    return out


def decoration_from_json(obj, where="decoration"):
    if obj is None:
        return ChowDecoration({})
    labels = {_cell_parse(k, f"{where}.edge_labels"): v
              for k, v in obj.get("edge_labels", {}).items()}
    classes = {int(k): tuple(v) for k, v in obj.get("vertex_classes", {}).items()}
    if "vertex_euler" in obj or "total_chi" in obj:
        return HilbertDecoration(labels, classes,
                                 {int(k): int(v) for k, v in obj.get("vertex_euler", {}).items()},
                                 int(obj.get("total_chi", 0)))
    return ChowDecoration(labels, classes)


def one_complex_to_json(g, deco=None):
    out = {"vertices": [_vec_out(x) for x in g.positions],
           "edges": [[u, v] for u, v, _, _ in g.edges],
           "rays": [[v, list(d)] for v, d in g.rays]}
    if g.ambient is not None:
        out["ambient"] = ambient_to_json(g.ambient)
    if deco is not None:
        out["decoration"] = decoration_to_json(deco)
    return out


def one_complex_from_json(obj, where="one-complex", ambient=None):
    pos = [_vec_in(x, f"{where}: vertices[{i}]") for i, x in enumerate(_field(obj, "vertices", where))]
    n = len(pos)
    edges = []
    for i, e in enumerate(obj.get("edges", [])):
        if len(e) != 2 or not all(isinstance(x, int) and 0 <= x < n for x in e):
            raise FormatError(f"{where}: edges[{i}]: expected two vertex indices below {n}")
        edges.append((e[0], e[1]))
    rays = []
    for i, r in enumerate(obj.get("rays", [])):
        if len(r) != 2 or not isinstance(r[0], int) or not 0 <= r[0] < n:
            raise FormatError(f"{where}: rays[{i}]: expected [vertex, direction]")
        rays.append((r[0], _ivec_in(r[1], f"{where}: rays[{i}]")))
    amb = ambient if ambient is not None else ambient_from_json(obj.get("ambient"),
                                                                  where + ": ambient")
    try:
        g = OneComplex.build(pos, edges, rays, amb)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc
    return g, decoration_from_json(obj.get("decoration"), where + ": decoration")


def tropical_map_to_json(t):
    out = {"positions": [_vec_out(x) for x in t.positions],
           "edges": [[u, v, m] for u, v, m in t.edges],
           "legs": [[v, list(d), m] for v, d, m in t.legs],
           "genus": list(t.vertex_genus), "classes": [list(c) for c in t.vertex_classes]}
    if t.ambient is not None:
        out["ambient"] = ambient_to_json(t.ambient)
    return out


def tropical_map_from_json(obj, where="tropical-map"):
    pos = [_vec_in(x, f"{where}: positions[{i}]")
           for i, x in enumerate(_field(obj, "positions", where))]
    try:
        return TropicalMap.build(pos, [tuple(e) for e in obj.get("edges", [])],
                                 [(v, d, m) for v, d, m in obj.get("legs", [])],
                                 obj.get("genus"), obj.get("classes"),
                                 ambient_from_json(obj.get("ambient"), where + ": ambient"))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: {exc}") from exc


# -- types and families --------------------------------------------------------------------


def type_to_json(t):
    return {"k": t.k, "n_vertices": t.n_vertices,
            "edges": [[u, v, list(d)] for u, v, d in t.edges],
            "rays": [[v, list(d)] for v, d in t.rays],
            "vertex_faces": list(t.vertex_faces), "edge_faces": list(t.edge_faces),
            "ray_faces": list(t.ray_faces),
            "points": [_vec_out(p) for p in t.points],
            "incidences": [[i, _cell_name(c) if c[0] != "v" else f"v{c[1]}"]
                           for i, c in t.incidences],
            "ambient": ambient_to_json(t.ambient)}


def type_from_json(obj, where="type"):
    if "vertices" in obj:
        # a 1-complex with marked points: read off its type
        from .moduli import type_of
        g, _ = one_complex_from_json(obj, where)
        pts = [_vec_in(p, f"{where}: points") for p in obj.get("points", [])]
        return type_of(g, pts)
    inc = []
    for i, (j, c) in enumerate(obj.get("incidences", [])):
        if not isinstance(c, str) or c[:1] not in ("v", "e", "r") or not c[1:].isdigit():
            raise FormatError(f"{where}: incidences[{i}]: bad cell name {c!r}")
        inc.append((int(j), (c[0], int(c[1:]))))
    try:
        return CombinatorialType(
            int(_field(obj, "k", where)), int(_field(obj, "n_vertices", where)),
            tuple((u, v, tuple(d)) for u, v, d in obj.get("edges", [])),
            tuple((v, tuple(d)) for v, d in obj.get("rays", [])),
            tuple(obj.get("vertex_faces", ())), tuple(obj.get("edge_faces", ())),
            tuple(obj.get("ray_faces", ())),
            tuple(_vec_in(p, f"{where}: points") for p in obj.get("points", [])),
            tuple(inc), ambient_from_json(obj.get("ambient"), where + ": ambient"))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: {exc}") from exc


def family_to_json(f):
    return {"sources": {n: [list(map(int, r)) for r in rays] for n, rays in f.sources.items()},
            "maps": {n: [list(map(int, row)) for row in m] for n, m in f.maps.items()},
            "target": fan_to_json(f.target)}


def family_from_json(obj, where="family"):
    sources = {n: [_ivec_in(r, f"{where}: sources.{n}") for r in rays]
               for n, rays in _field(obj, "sources", where).items()}
    maps = {n: [tuple(as_fraction(x) for x in row) for row in m]
            for n, m in _field(obj, "maps", where).items()}
    missing = set(sources) ^ set(maps)
    if missing:
        raise FormatError(f"{where}: maps: sources and maps name different cones {sorted(missing)}")
    return EvaluationFamily(sources, maps, fan_from_json(_field(obj, "target", where),
                                                         where + ": target"))


# -- records, parts, points ---------------------------------------------------------------


def _meta_out(meta):
    out = {}
    for k, v in meta.items():
        if isinstance(v, TropicalMap):
            out[k] = tropical_map_to_json(v)
        else:
            out[k] = v
    return out


def record_to_json(r):
    return {"gamma": one_complex_to_json(r.gamma, r.decoration),
            "certificate": dict(r.certificate), "meta": _meta_out(r.meta)}


def record_from_json(obj, where="record", ambient=None):
    g, deco = one_complex_from_json(_field(obj, "gamma", where), where + ": gamma", ambient)
    meta = dict(obj.get("meta", {}))
    if isinstance(meta.get("tropical_map"), dict):
        meta["tropical_map"] = tropical_map_from_json(meta["tropical_map"],
                                                      where + ": meta.tropical_map")
    return RigidComplexRecord(g, deco, dict(obj.get("certificate", {})), meta)


def records_to_json(records):
    return [record_to_json(r) for r in records]


def zero_complex_to_json(z):
    return [[_vec_out(p), m] for p, m in z.points]


def parts_to_json(c):
    return {"height": _num(c.meta.get("height", 0)),
            "parts": {str(v): {**one_complex_to_json(p.complex),
                               "labels": {_cell_name(k): n for k, n in p.labels}}
                      for v, p in sorted(c.parts.items())},
            "evaluations": {str(e): [zero_complex_to_json(a), zero_complex_to_json(b)]
                            for e, (a, b) in sorted(c.evaluations.items())}}


def parts_from_json(obj, d, record, where="parts"):
    from .degeneration import _gamma_index
    sv = _gamma_index(d, record)
    parts = {}
    for key, body in _field(obj, "parts", where).items():
        a = int(key)
        g, _ = one_complex_from_json(body, f"{where}: parts.{key}", d.tangent_fan(sv[a]))
        labels = tuple(sorted((_cell_parse(k, f"{where}: parts.{key}.labels"), int(n))
                              for k, n in body.get("labels", {}).items()))
        parts[a] = Part(g, labels)
    evals = {}
    for e, (a, b) in obj.get("evaluations", {}).items():
        evals[int(e)] = (ZeroComplex.of([(_vec_in(p, where), int(m)) for p, m in a]),
                         ZeroComplex.of([(_vec_in(p, where), int(m)) for p, m in b]))
    return CutResult(parts, evals, {"height": as_fraction(obj.get("height", 0))})


def points_from_json(obj, where="points"):
    if isinstance(obj, dict):
        obj = _field(obj, "points", where)
    return [_vec_in(p, f"{where}[{i}]") for i, p in enumerate(obj)]
