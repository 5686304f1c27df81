import math

import pytest

from conesurf import generators as G
from conesurf.validator import (
    check_closed_geodesics,
    check_cone_angles,
    check_injectivity_radius,
    is_extra_large,
)

PI = math.pi


def test_cone_angles_tetra(big_tetra):
    r = check_cone_angles(big_tetra)
    assert r.status == "PASS" and r.failing == ()
    assert r.margin == pytest.approx(0.4 * PI, abs=1e-12)


def test_cone_angles_octa(octa):
    r = check_cone_angles(octa)
    assert r.status == "FAIL"
    assert r.failing == tuple(range(6)) and r.boundary == tuple(range(6))


def test_cone_angles_small_tetra():
    S = G.tetra(0.6 * PI)
    r = check_cone_angles(S)
    assert r.status == "FAIL" and len(r.failing) == 4
    assert S.cone_angles[0] == pytest.approx(1.8 * PI, abs=1e-12)


def test_closed_geodesics_octa(octa):
    r = check_closed_geodesics(octa, 200)
    assert r.status == "VIOLATION"
    assert abs(r.length - 2 * PI) < 1e-6
    assert r.boundary
    loop = r.witness
    assert sum(g.piece_length() for g in loop.paths) == pytest.approx(r.length, abs=1e-9)


def test_injectivity_octa(octa):
    ev = check_injectivity_radius(octa, 200)
    assert ev is not None
    assert ev.length == pytest.approx(PI, abs=1e-6)
    a, b = ev.paths
    assert a.crossings != b.crossings or a.via != b.via


def test_tetra_no_violation(big_tetra):
    r = check_closed_geodesics(big_tetra, 1000)
    assert r.status == "NO_VIOLATION_FOUND" and r.resolution == 1000
    assert check_injectivity_radius(big_tetra, 1000) is None


def test_verdicts(big_tetra, octa):
    assert is_extra_large(big_tetra).status == "PASS"
    v = is_extra_large(octa, 200)
    assert v.status == "FAIL"
    assert v.condition1.status == "FAIL" and v.condition2.status == "VIOLATION"


def test_conditions_agree_on_controls(octa, waist):
    for S in (octa, waist):
        loops = check_closed_geodesics(S, 300)
        ev = check_injectivity_radius(S, 300)
        assert (loops.status == "VIOLATION") == (ev is not None)
        if ev is not None:
            assert loops.length == pytest.approx(2 * ev.length, abs=1e-12)


def test_waist_fails(waist):
    v = is_extra_large(waist, 300)
    assert v.status == "FAIL"
    assert v.condition2.status == "VIOLATION"


def test_monotone_in_resolution(octa):
    # basepoint sets are nested, so a violation at one resolution persists
    assert check_closed_geodesics(octa, 50).status == "VIOLATION"
    assert check_closed_geodesics(octa, 400).status == "VIOLATION"


def test_verdict_dict(big_tetra):
    d = is_extra_large(big_tetra).to_dict()
    assert d["status"] == "PASS"
    assert d["condition2"]["status"] == "NO_VIOLATION_FOUND"
    assert d["injectivity_evidence"] is None
    assert d["tolerances"] == {"cone_angle": 1e-9, "loop_length": 1e-9}
