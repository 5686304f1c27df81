import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from conesurf import generators as G
from conesurf.cli import main, parse_angle
from conesurf.pipeline import run_voronoi
from conesurf.report import SCHEMA, build_report, dumps, validate_report
from conesurf.scs import write_scs
from conesurf.svg import svg_diagram
from conesurf.validator import is_extra_large

DATA = Path(__file__).parent / "data"
TETRA = str(DATA / "tetra_08pi.scs")


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("text, want", [("0.8pi", 0.8 * math.pi), ("pi", math.pi), ("0.75*pi", 0.75 * math.pi),
                                        ("2.5", 2.5)])
def test_parse_angle(text, want):
    assert parse_angle(text) == pytest.approx(want, abs=1e-15)


def test_gen_then_validate(tmp_path, capsys):
    path = str(tmp_path / "t.scs")
    assert run(["gen", "tetra", "--angle", "0.8pi", "-o", path], capsys)[0] == 0
    assert Path(path).read_text().splitlines()[1] == "scs 1"
    code, out, _ = run(["validate", path], capsys)
    assert code == 0
    rep = json.loads(out)
    validate_report(rep)
    assert rep["verdict"]["status"] == "PASS"


def test_octa_fails_everywhere(tmp_path, capsys):
    path = str(tmp_path / "o.scs")
    run(["gen", "octa-sphere", "-o", path], capsys)
    code, out, _ = run(["validate", path], capsys)
    assert code == 2
    assert json.loads(out)["verdict"]["status"] == "FAIL"
    code, _, err = run(["voronoi", path], capsys)
    assert code == 2
    assert json.loads(err)["error"] == "NOT_VALIDATED"
    code, _, err = run(["delaunay", path, "-o", str(tmp_path / "d.scs")], capsys)
    assert code == 2


def test_voronoi_on_tetra(tmp_path, capsys):
    code, out, _ = run(["voronoi", TETRA, "--samples", "30", "--svg", str(tmp_path / "svg")], capsys)
    assert code == 0
    rep = json.loads(out)
    validate_report(rep)
    cells = rep["voronoi"]["cells"]
    assert len(cells) == 4
    for c in cells:
        assert c["passed"]
        assert min(c["vertex_distance_margin"], c["diameter_margin"], c["angle_margin"]) > 0
    assert sorted(p.name for p in (tmp_path / "svg").iterdir()) == [f"cell_00{i}.svg" for i in range(4)]


def test_delaunay_output(tmp_path, capsys):
    out = tmp_path / "d.scs"
    code, _, _ = run(["delaunay", TETRA, "-o", str(out), "--report", str(tmp_path / "r.json")], capsys)
    assert code == 0
    assert "intrinsic Delaunay" in out.read_text()
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["delaunay"]["flip_count"] == 0
    assert rep["delaunay"]["circumradius_margin"] > 1e-6


def test_flip_limit_exit(tmp_path, capsys):
    from test_delaunay import perturbed_sphere_needing_flips

    S = perturbed_sphere_needing_flips()
    path = str(tmp_path / "r.scs")
    write_scs(S, path)
    code, _, err = run(["delaunay", path, "--force", "--max-flips", "0", "-o", str(tmp_path / "x.scs")], capsys)
    assert code == 4
    assert json.loads(err)["error"] == "FLIP_LIMIT_EXCEEDED"


def test_errors_are_json(tmp_path, capsys):
    bad = tmp_path / "bad.scs"
    bad.write_text("scs 1\ntriangles 1\nT 0 1 1 3.5\n")
    code, _, err = run(["validate", str(bad)], capsys)
    assert code == 1
    e = json.loads(err)
    assert e["error"] == "SCS_LENGTH" and e["details"]["line"] == 3
    code, _, err = run(["validate", str(tmp_path / "missing.scs")], capsys)
    assert code == 1 and json.loads(err)["error"]
    code, _, err = run(["nonsense"], capsys)
    assert code == 1 and json.loads(err)["error"] == "USAGE"


def test_strict_rejects_smooth_vertex(tmp_path, capsys):
    path = str(tmp_path / "o.scs")
    run(["gen", "octa-sphere", "-o", path], capsys)
    code, _, err = run(["validate", path, "--strict"], capsys)
    assert code == 1
    assert json.loads(err)["error"] == "SMOOTH_VERTEX"


def test_waist_and_perturb(tmp_path, capsys):
    w = str(tmp_path / "w.scs")
    run(["gen", "waist", "-o", w], capsys)
    assert run(["validate", w], capsys)[0] == 2
    p = str(tmp_path / "p.scs")
    assert run(["gen", "perturb", TETRA, "--eps", "0.02", "--seed", "1", "-o", p], capsys)[0] == 0
    assert run(["validate", p], capsys)[0] == 0


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "conesurf.cli", "validate", TETRA],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert json.loads(r.stdout)["verdict"]["status"] == "PASS"


def test_schema_is_valid():
    jsonschema.Draft7Validator.check_schema(SCHEMA)


def test_report_rejects_bad_block(big_tetra):
    v = is_extra_large(big_tetra)
    with pytest.raises(jsonschema.ValidationError):
        build_report(big_tetra, v, delaunay={"flip_count": -1})


FAMILIES = {
    "tetra": lambda: G.tetra(0.8 * math.pi),
    "octa": G.octa_sphere,
    "perturbed": lambda: G.perturb(G.tetra(0.8 * math.pi), 0.02, 7),
}


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_byte_identical_outputs(name):
    texts = []
    for _ in range(2):
        res = run_voronoi(FAMILIES[name](), samples=20, force=True)
        svgs = svg_diagram(res.diagram)
        texts.append((dumps(res.report), sorted(svgs.items())))
    assert texts[0] == texts[1]
    validate_report(json.loads(texts[0][0]))
    for _, svg in texts[0][1]:
        assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")
