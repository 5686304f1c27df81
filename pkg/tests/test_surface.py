import math

import numpy as np
import pytest

from conesurf import _vec as V
from conesurf import generators as G
from conesurf.errors import SurfaceError
from conesurf.surface import SurfacePoint, build_surface, cone_points, gauss_bonnet_defect

PI = math.pi


def subdivided_tetra(angle=0.8 * PI):
    """Big tetrahedron with face 0 split at its centroid; the new vertex is flat."""
    side = G.equilateral_side(angle)
    faces = list(G.TETRA_FACES)
    a, b, c = faces.pop(0)
    shapes = [(side, side, side)] * 3
    pts = [(0.0, 0.0, 1.0)]
    S = G.tetra(angle)
    p, q, r = S.charts[0]
    m = V.normalize(V.add(V.add(p, q), r))
    d = V.arc(p, m)
    faces += [(a, b, 4), (b, c, 4), (c, a, 4)]
    shapes += [(side, d, d)] * 3
    return build_surface(shapes, G.gluing_from_faces(faces))


def test_big_tetra_counts(big_tetra):
    S = big_tetra
    assert (S.n_vertices, S.n_edges, S.n_triangles, S.euler_characteristic) == (4, 6, 4, 2)
    for th in S.cone_angles:
        assert th == pytest.approx(2.4 * PI, abs=1e-12)


def test_octa_sphere(octa):
    assert octa.euler_characteristic == 2
    assert octa.n_vertices == 6
    for th in octa.cone_angles:
        assert abs(th - 2 * PI) < 1e-12
    assert octa.total_area == pytest.approx(4 * PI, abs=1e-12)
    assert abs(gauss_bonnet_defect(octa)) < 1e-12


def test_length_mismatch():
    shapes = [(1.0, 1.1, 1.2), (1.2, 1.1, 1.05)]
    faces = ((0, 1, 2), (0, 2, 1))
    with pytest.raises(SurfaceError) as err:
        build_surface(shapes, G.gluing_from_faces(faces))
    assert err.value.code == "LENGTH_MISMATCH"


def test_open_surface():
    with pytest.raises(SurfaceError) as err:
        build_surface([(1.0, 1.0, 1.0)] * 2, [((0, 0), (1, 0))])
    assert err.value.code == "OPEN_SURFACE"


def test_self_twin_rejected():
    with pytest.raises(SurfaceError):
        build_surface([(1.0, 1.0, 1.0)] * 2, [(0, 0, 0, 0)])


def test_double_gluing_rejected():
    with pytest.raises(SurfaceError):
        build_surface([(1.0, 1.0, 1.0)] * 2, [(0, 0, 1, 0), (0, 0, 1, 1), (0, 1, 1, 2), (0, 2, 1, 1)])


def test_disconnected_rejected():
    S = G.tetra(0.8 * PI)
    glue = S.gluing() + [((a + 4, e), (b + 4, f)) for (a, e), (b, f) in S.gluing()]
    with pytest.raises(SurfaceError) as err:
        build_surface(list(S.lengths) * 2, glue)
    assert err.value.code == "DISCONNECTED"


def test_invalid_triangle_rejected():
    with pytest.raises(SurfaceError):
        build_surface([(3.0, 3.0, 3.0)] * 2, [(0, 0, 1, 0), (0, 1, 1, 2), (0, 2, 1, 1)])


def test_self_glued_edges_allowed(waist):
    # the waist shares all three edges between its two triangles
    assert waist.n_vertices == 3 and waist.euler_characteristic == 2
    found = 0
    for seed in range(200):
        lengths, glue = G.random_gluing(2, seed)
        if not any(a[0] == b[0] for a, b in glue):
            continue
        try:
            S = build_surface(lengths, glue)
        except SurfaceError:
            continue
        found += 1
        assert any(h // 3 == S.twin[h] // 3 for h in range(6))
    assert found > 0


def test_cone_points_tetra(big_tetra):
    cps = cone_points(big_tetra)
    assert len(cps) == 4
    for cp in cps:
        assert cp.curvature == pytest.approx(-0.4 * PI, abs=1e-12)
        assert not cp.smooth


def test_cone_points_octa_smooth(octa):
    assert all(cp.smooth for cp in cone_points(octa))


def test_mixed_surface_smooth_flags():
    S = subdivided_tetra()
    cps = cone_points(S)
    assert [cp.smooth for cp in cps].count(True) == 1
    flat = next(cp for cp in cps if cp.smooth)
    assert flat.cone_angle == pytest.approx(2 * PI, abs=1e-12)
    assert abs(S.gauss_bonnet_defect()) < 1e-12
    with pytest.raises(SurfaceError) as err:
        build_surface(S.lengths, S.gluing(), strict=True)
    assert err.value.code == "SMOOTH_VERTEX"


def test_gauss_bonnet_tetra(big_tetra):
    assert abs(big_tetra.gauss_bonnet_defect()) < 1e-12


def test_half_edge_identities(big_tetra):
    S = big_tetra
    for h in range(3 * S.n_triangles):
        assert S.twin[S.twin[h]] == h
        assert S.next(S.next(S.next(h))) == h
    total = sum(S.angles)
    assert sum(S.cone_angles) == pytest.approx(total, abs=1e-12)


def test_unfold_maps_shared_edge(big_tetra):
    S = big_tetra
    for h in range(3 * S.n_triangles):
        t, e = divmod(h, 3)
        t2, e2 = divmod(S.twin[h], 3)
        R = S.unfold[h]
        a2 = V.matvec(R, S.charts[t2][e2])
        b2 = V.matvec(R, S.charts[t2][(e2 + 1) % 3])
        assert V.arc(a2, S.charts[t][(e + 1) % 3]) < 1e-12
        assert V.arc(b2, S.charts[t][e]) < 1e-12


def test_random_gluings_gauss_bonnet():
    accepted = 0
    for seed in range(1000):
        lengths, glue = G.random_gluing(int(np.random.default_rng(seed).integers(1, 7)) * 2, seed)
        try:
            S = build_surface(lengths, glue)
        except SurfaceError:
            continue
        accepted += 1
        assert abs(S.gauss_bonnet_defect()) <= 1e-8
    assert accepted > 300


def test_classify_points(big_tetra):
    S = big_tetra
    assert S.classify(S.vertex_point(0))[0] == "vertex"
    assert S.classify(S.edge_point(0))[0] == "edge"
    assert S.classify(S.centroid(0)) == ("face", 0)
    reps = S.representations(S.edge_point(4))
    assert len(reps) == 2


def test_serialization_rebuild_identical(big_tetra):
    from conesurf.scs import parse_scs, serialize_scs

    S2 = parse_scs(serialize_scs(big_tetra)).build()
    assert S2.twin == big_tetra.twin
    assert np.allclose(S2.lengths, big_tetra.lengths, atol=1e-12, rtol=0)


def test_surface_point_tuple():
    p = SurfacePoint(0, np.array([0.0, 0.0, 1.0]))
    assert p.position == (0.0, 0.0, 1.0) and isinstance(p.position[0], float)
