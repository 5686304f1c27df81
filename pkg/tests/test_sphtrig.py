import math

import numpy as np
import pytest

from conesurf import _vec as V
from conesurf.errors import DegenerateError, DomainError
from conesurf.sphtrig import (
    Cap,
    SphTriangleShape,
    angle_from_sides,
    canonical_embed,
    circumdisk,
    clamped_acos,
    in_cap,
    in_cap_array,
    triangle_angles,
    triangle_area,
    validate_sides,
)

PI = math.pi
OCTANT = SphTriangleShape(PI / 2, PI / 2, PI / 2)
# Side of the equilateral triangle with angle 0.8pi, from arccos(cos t / (1 - cos t)) at 30 digits.
SIDE_08 = 2.0344439357957027
# arccos(cos 1 / (1 + cos 1)) at 30 digits.
ANGLE_111 = 1.2123958497745860


def random_shapes(n, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        s = SphTriangleShape(*rng.uniform(1e-3, PI - 1e-3, size=3))
        if validate_sides(s)[0]:
            out.append(s)
    return out


def test_validate_octant():
    assert validate_sides(OCTANT) == (True, [])


def test_validate_degenerate_lune_boundary():
    ok, bad = validate_sides(SphTriangleShape(PI / 2, PI / 4, PI / 4))
    assert not ok
    assert bad == ["a < b + c"]


def test_validate_equilateral_08():
    assert validate_sides(SphTriangleShape(SIDE_08, SIDE_08, SIDE_08))[0]


def test_validate_names_every_failure():
    ok, bad = validate_sides(SphTriangleShape(3.0, 3.0, 3.0))
    assert not ok and bad == ["a + b + c < 2pi"]
    ok, bad = validate_sides(SphTriangleShape(0.0, 1.0, 4.0))
    assert not ok and len(bad) == 2


def test_octant_angles():
    for i in range(3):
        assert angle_from_sides(OCTANT, i) == pytest.approx(PI / 2, abs=1e-15)


def test_equilateral_angle_08():
    s = SphTriangleShape(SIDE_08, SIDE_08, SIDE_08)
    for i in range(3):
        assert abs(angle_from_sides(s, i) - 0.8 * PI) < 1e-12


def test_unit_sides_angle():
    s = SphTriangleShape(1.0, 1.0, 1.0)
    assert angle_from_sides(s, 0) == pytest.approx(ANGLE_111, abs=1e-14)


def test_unit_sides_angle_matches_embedding():
    s = SphTriangleShape(1.0, 1.0, 1.0)
    p, q, r = canonical_embed(s)
    measured = math.atan2(V.dot(V.cross(V.tangent(p, q), V.tangent(p, r)), p),
                          V.dot(V.tangent(p, q), V.tangent(p, r)))
    assert measured == pytest.approx(ANGLE_111, abs=1e-12)


def test_clamped_acos_band():
    assert clamped_acos(1.0 + 5e-10) == 0.0
    with pytest.raises(DomainError):
        clamped_acos(1.0 + 1e-8)


def test_invalid_shape_rejected():
    with pytest.raises(DomainError):
        angle_from_sides(SphTriangleShape(PI / 2, PI / 4, PI / 4), 0)


def test_areas():
    assert triangle_area(OCTANT) == pytest.approx(PI / 2, abs=1e-14)
    s = SphTriangleShape(SIDE_08, SIDE_08, SIDE_08)
    assert triangle_area(s) == pytest.approx(1.4 * PI, abs=1e-12)


def test_sliver_area_small_and_positive():
    a = triangle_area(SphTriangleShape(0.01, 0.01, 0.0199))
    # 30-digit L'Huilier evaluation: 9.9378015109236e-06
    assert 0 < a < 1e-3
    assert a == pytest.approx(9.9378015109236e-06, rel=1e-8)


def test_area_is_angle_excess():
    for s in random_shapes(500, seed=1):
        A, B, C = triangle_angles(s)
        area = triangle_area(s)
        assert abs(A + B + C - PI - area) < 1e-9
        assert 0 < area < 2 * PI


def test_law_of_cosines_round_trip():
    # sides -> angles -> sides through the dual law of cosines
    for s in random_shapes(1000, seed=2):
        A, B, C = triangle_angles(s)
        cos_a = (math.cos(A) + math.cos(B) * math.cos(C)) / (math.sin(B) * math.sin(C))
        assert math.acos(max(-1.0, min(1.0, cos_a))) == pytest.approx(s.a, abs=1e-9)


def test_embed_octant():
    p, q, r = canonical_embed(OCTANT)
    for u, w in ((p, q), (q, r), (r, p)):
        assert abs(V.dot(u, w)) < 1e-15
    assert V.det(p, q, r) == pytest.approx(1.0)


def test_embed_convention():
    p, q, r = canonical_embed(SphTriangleShape(1.0, 1.2, 0.8))
    assert p == (0.0, 0.0, 1.0)
    assert q[0] > 0 and q[1] == 0.0
    assert r[1] > 0
    assert V.det(p, q, r) > 0


def test_embed_round_trip_many():
    rng = np.random.default_rng(3)
    n = 0
    while n < 100000:
        a, b, c = rng.uniform(1e-3, PI - 1e-3, size=3)
        s = SphTriangleShape(a, b, c)
        if not validate_sides(s)[0]:
            continue
        n += 1
        p, q, r = canonical_embed(s)
        assert abs(V.arc(p, q) - c) < 1e-10
        assert abs(V.arc(q, r) - a) < 1e-10
        assert abs(V.arc(r, p) - b) < 1e-10


def test_circumdisk_octant():
    center, radius = circumdisk((1, 0, 0), (0, 1, 0), (0, 0, 1))
    k = 1 / math.sqrt(3)
    assert np.allclose(center, (k, k, k), atol=1e-15)
    # arccos(1/sqrt 3) at 30 digits
    assert radius == pytest.approx(0.9553166181245093, abs=1e-15)
    assert radius < PI / 2


def test_circumdisk_small_triangle():
    eps = 1e-4
    center, radius = circumdisk(*canonical_embed(SphTriangleShape(eps, eps, eps)))
    assert radius == pytest.approx(eps / math.sqrt(3), rel=1e-6)


def test_circumdisk_equidistant():
    for s in random_shapes(300, seed=4):
        pts = canonical_embed(s)
        center, radius = circumdisk(*pts)
        for p in pts:
            assert abs(V.arc(center, p) - radius) < 1e-10


def test_circumdisk_great_circle_rejected():
    with pytest.raises(DegenerateError):
        circumdisk((1, 0, 0), (0, 1, 0), (-1, 0, 0))


def test_in_cap_center_and_antipode():
    p, q, r = (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)
    k = 1 / math.sqrt(3)
    assert in_cap(p, q, r, (k, k, k)) is Cap.INSIDE
    assert in_cap(p, q, r, (-k, -k, -k)) is Cap.OUTSIDE
    assert in_cap(p, q, r, p) is Cap.ON


def test_in_cap_cyclic_and_reflection():
    rng = np.random.default_rng(5)
    for _ in range(2000):
        pts = rng.normal(size=(4, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        p, q, r, s = (tuple(x) for x in pts)
        if V.det(p, q, r) < 0:
            q, r = r, q
        if V.det(p, q, r) < 1e-6:
            continue
        res = in_cap(p, q, r, s)
        assert in_cap(q, r, p, s) is res
        # reflect s through the plane of the circumcircle
        n = np.cross(np.subtract(q, p), np.subtract(r, p))
        n /= np.linalg.norm(n)
        off = np.dot(np.subtract(s, p), n)
        s2 = tuple(np.asarray(s) - 2 * off * n)
        flipped = in_cap(p, q, r, s2)
        if res is Cap.INSIDE:
            assert flipped is Cap.OUTSIDE
        elif res is Cap.OUTSIDE:
            assert flipped is Cap.INSIDE


def test_in_cap_array_matches_scalar():
    rng = np.random.default_rng(6)
    pts = rng.normal(size=(4, 500, 3))
    pts /= np.linalg.norm(pts, axis=2)[..., None]
    p, q, r, s = pts
    flip = np.einsum("ij,ij->i", np.cross(p, q), r) < 0
    q[flip], r[flip] = r[flip].copy(), q[flip].copy()
    arr = in_cap_array(p, q, r, s)
    code = {Cap.INSIDE: 1, Cap.OUTSIDE: -1, Cap.ON: 0}
    for i in range(500):
        assert arr[i] == code[in_cap(tuple(p[i]), tuple(q[i]), tuple(r[i]), tuple(s[i]))]


def test_in_cap_negative_orientation_rejected():
    with pytest.raises(DomainError):
        in_cap((0, 0, 1.0), (0, 1.0, 0), (1.0, 0, 0), (1.0, 0, 0))


def random_quadruples(n, seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(4, n, 3))
    pts /= np.linalg.norm(pts, axis=2)[..., None]
    p, q, r, s = pts
    flip = np.einsum("ij,ij->i", np.cross(p, q), r) < 0
    q[flip], r[flip] = r[flip].copy(), q[flip].copy()
    keep = np.einsum("ij,ij->i", np.cross(p, q), r) > 1e-9
    return p[keep], q[keep], r[keep], s[keep]


def explicit_cap_sign(p, q, r, s):
    """sign(radius - distance to center), with the center on the triangle's side."""
    n = np.cross(q - p, r - p)
    n /= np.linalg.norm(n, axis=1)[:, None]
    side = np.einsum("ij,ij->i", n, p + q + r) < 0
    n[side] *= -1
    radius = np.arccos(np.clip(np.einsum("ij,ij->i", n, p), -1, 1))
    dist = np.arccos(np.clip(np.einsum("ij,ij->i", n, s), -1, 1))
    return np.sign(radius - dist).astype(int)


def test_in_cap_against_circumradius_million():
    p, q, r, s = random_quadruples(1_000_000, seed=7)
    got = in_cap_array(p, q, r, s)
    want = explicit_cap_sign(p, q, r, s)
    outside_band = got != 0
    assert outside_band.sum() > 990_000
    assert np.array_equal(got[outside_band], want[outside_band])
