import importlib.util
import json
from pathlib import Path

import pytest

from logdeg import io
from logdeg.cones import isomorphic
from logdeg.degeneration import FIXTURES, cut
from logdeg.examples import fixture
from logdeg.io import FormatError, canonical, unwrap, wrap
from logdeg.moduli import family_from_types, fixture_non_flat_evaluation
from logdeg.one_complexes import TropicalMap
from logdeg.plane_curves import enumerate_rigid, p2_slice

ROOT = Path(__file__).resolve().parent.parent


def again(to, frm, x, **kw):
    text = json.dumps(to(x))
    return frm(json.loads(text), **kw)


def test_fan_round_trip():
    fan = io.fan_from_json(fixture("p2_fan.json"))
    assert isomorphic(again(io.fan_to_json, io.fan_from_json, fan), fan)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_degeneration_record_and_parts_round_trip(name):
    d, rec = FIXTURES[name]()
    d2 = again(io.degeneration_to_json, io.degeneration_from_json, d)
    assert d2.slice == d.slice and d2.directions == d.directions
    r2 = io.record_from_json(json.loads(json.dumps(io.record_to_json(rec))), ambient=d.slice)
    assert r2.gamma == rec.gamma and r2.decoration == rec.decoration
    c = cut(d, rec, rec.gamma, 1, rec.decoration)
    parts = io.parts_from_json(json.loads(json.dumps(io.parts_to_json(c))), d, rec)
    assert parts.key() == c.key()


def test_one_complex_and_tropical_map_round_trip():
    rec = enumerate_rigid(p2_slice(), (2, 2, 2), io.points_from_json(fixture("p2_points5.json")))[0]
    obj = json.loads(json.dumps(io.one_complex_to_json(rec.gamma, rec.decoration)))
    g, deco = io.one_complex_from_json(obj, ambient=rec.gamma.ambient)
    assert g == rec.gamma and deco == rec.decoration
    t = rec.meta["tropical_map"]
    t2 = again(io.tropical_map_to_json, io.tropical_map_from_json, t)
    assert isinstance(t2, TropicalMap) and t2.positions == t.positions and t2.legs == t.legs


def test_type_and_family_round_trip():
    t, target, _ = fixture_non_flat_evaluation()
    assert again(io.type_to_json, io.type_from_json, t).key() == t.key()
    fam = family_from_types({"sigma": t}, (1, 0), target)
    f2 = again(io.family_to_json, io.family_from_json, fam)
    assert f2.sources == fam.sources
    assert {n: [list(r) for r in m] for n, m in f2.maps.items()} == \
        {n: [list(r) for r in m] for n, m in fam.maps.items()}


def test_envelope_round_trip_and_bare_payload():
    doc = wrap("points", {"points": [[1, 2]]})
    manifest, payload = unwrap(json.loads(json.dumps(doc)), "points")
    assert manifest.kind == "points" and payload == {"points": [[1, 2]]}
    assert unwrap({"points": [[1, 2]]}) == (None, {"points": [[1, 2]]})


@pytest.mark.parametrize("field,value,needle", [
    ("checksum", "sha256:00", "checksum"),
    ("logdeg", 99, "logdeg"),
    ("kind", "spaceship", "kind"),
])
def test_envelope_errors_name_the_field(field, value, needle):
    doc = wrap("points", {"points": []})
    doc[field] = value
    with pytest.raises(FormatError, match=needle):
        unwrap(doc)


def test_wrong_kind_and_missing_field():
    doc = wrap("points", {"points": []})
    with pytest.raises(FormatError, match="expected fan"):
        unwrap(doc, "fan")
    del doc["payload"]
    with pytest.raises(FormatError, match="payload"):
        unwrap(doc)


def test_malformed_payloads_name_the_field():
    with pytest.raises(FormatError, match="lattice_rank"):
        io.fan_from_json({"cones": []})
    with pytest.raises(FormatError, match="cones"):
        io.fan_from_json({"lattice_rank": 2, "cones": 3})
    with pytest.raises(FormatError, match="edges"):
        io.one_complex_from_json({"vertices": [[0, 0]], "edges": [[0, 5]], "rays": []})


def test_syntax_errors_report_line_and_column(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "a": 1,\n  oops\n}\n')
    with pytest.raises(FormatError, match="line 3 column 3"):
        io.load(p)
    with pytest.raises(FormatError):
        io.load(tmp_path / "absent.json")


def test_canonical_form_is_stable():
    assert canonical({"b": 1, "a": [1, "x"]}) == '{"a":[1,"x"],"b":1}'


def test_fixtures_regenerate_identically(tmp_path, monkeypatch):
    spec = importlib.util.spec_from_file_location("make_fixtures",
                                                  ROOT / "scripts" / "make_fixtures.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    monkeypatch.setattr(mod, "OUT", tmp_path)
    mod.main()
    bundled = ROOT / "src" / "logdeg" / "fixtures"
    made = sorted(p.name for p in tmp_path.iterdir())
    assert made == sorted(p.name for p in bundled.glob("*.json"))
    for name in made:
        assert (tmp_path / name).read_text() == (bundled / name).read_text(), name
