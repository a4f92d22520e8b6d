"""Regenerate the bundled fixture files under src/logdeg/fixtures."""
import json
from pathlib import Path

from logdeg.assembler import degree_zero_job, job_to_json, trivalent_jobs
from logdeg.cones import ConeComplex
from logdeg.io import fan_to_json, wrap
from logdeg.series import RationalFunction, expand_rational, macmahon

OUT = Path(__file__).resolve().parent.parent / "src" / "logdeg" / "fixtures"

P2_POINTS5 = [[-7, 3], [2, 11], [13, -5], [-3, -9], [6, 1]]
P2_POINTS2 = [[0, 0], [5, 3]]
P2_POINTS8 = [[-31, 7], [-18, -22], [-4, 29], [3, -13], [12, 17], [19, -37], [27, 4], [38, 23]]
LINE = "(1+q)/(1-q)**3"


def write(name, kind, payload, tag, note):
    doc = wrap(kind, payload)
    doc["provenance"] = {"tag": tag, "note": note}
    (OUT / name).write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n")


def main():
    fan = ConeComplex.from_fan([(1, 0), (0, 1), (-1, -1)], [[0, 1], [1, 2], [2, 0]],
                               names=["r0", "r1", "r2"])
    write("p2_fan.json", "fan", fan_to_json(fan), "DERIVED", "fan of P^2")
    total = ConeComplex.from_fan([(1, 0, 0), (0, 1, 0), (-1, -1, 0), (0, 0, 1)],
                                 [[0, 1, 3], [1, 2, 3], [2, 0, 3]],
                                 names=["r0", "r1", "r2", "t"])
    payload = fan_to_json(total)
    payload["pi"] = [0, 0, 1]
    write("p2_total_fan.json", "fan", payload, "DERIVED",
          "trivial degeneration of P^2: fan of P^2 times a vertical ray, height (0,0,1)")
    write("p2_points5.json", "points", {"points": P2_POINTS5}, "DERIVED",
          "generic integer points; one rigid conic passes through them")
    write("p2_points2.json", "points", {"points": P2_POINTS2}, "DERIVED",
          "two generic points; one tropical line")
    write("p2_points8.json", "points", {"points": P2_POINTS8}, "DERIVED",
          "eight generic points; rigid cubic multiplicities sum to 12")
    line = expand_rational(RationalFunction.parse(LINE), 0, 12)
    write("line_series.json", "series", line.to_json(), "SYNTHETIC",
          f"stand-in line vertex series, expansion of {LINE}")
    for variant in ("maximal", "full"):
        a, b = trivalent_jobs(variant)
        note = ("maximal tangency only: (1,1) gluing entries vanish" if variant == "maximal"
                else "nonzero (1,1) gluing entries; the jobs then differ")
        write(f"trivalent_A_{variant}.json", "job", job_to_json(a), "PAPER",
              "weight-2 cut of the S_(2,3) invariant; synthetic series, " + note)
        write(f"trivalent_B_{variant}.json", "job", job_to_json(b), "PAPER",
              "weight-1 cut of the S_(2,3) invariant; synthetic series, N41 := N22")
    write("degree0_job.json", "job", job_to_json(degree_zero_job(macmahon(10), 10)), "PAPER",
          "two components, no edges, both tables F")


if __name__ == "__main__":
    main()
