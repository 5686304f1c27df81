"""Instance families: regular tetrahedral cone spheres, the round octahedral
sphere, doubled-triangle "pillowcase" waists, length perturbations and
round-sphere triangulations from point clouds."""

from __future__ import annotations

import math

import numpy as np

from . import _vec as V
from .errors import SurfaceError
from .sphtrig import SphTriangleShape, validate_sides
from .surface import build_surface


def gluing_from_faces(faces):
    """Pair half-edges of consistently oriented labelled faces.

    Each directed edge ``(u, w)`` must occur once and be matched by ``(w, u)``;
    repeated vertex pairs (multi-edges) are matched in order of appearance.
    """
    pending = {}
    pairs = []
    for t, f in enumerate(faces):
        for e in range(3):
            u, w = f[e], f[(e + 1) % 3]
            key = (w, u)
            if pending.get(key):
                t2, e2 = pending[key].pop(0)
                pairs.append(((t2, e2), (t, e)))
            else:
                pending.setdefault((u, w), []).append((t, e))
    left = [k for k, v in pending.items() if v]
    if left:
        raise SurfaceError(f"unmatched directed edges {left[:3]}", code="OPEN_SURFACE")
    return pairs


def equilateral_side(angle):
    """Side of the equilateral spherical triangle with interior angle ``angle``."""
    c = math.cos(angle)
    return math.acos(c / (1.0 - c))


TETRA_FACES = ((0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3))


def tetra(angle=0.8 * math.pi):
    """Four equilateral triangles with interior angle ``angle`` glued as a tetrahedron.

    Every cone angle is ``3 * angle``; ``angle`` must lie in (pi/3, pi).
    """
    if not math.pi / 3 < angle < math.pi:
        raise ValueError("tetra angle must lie in (pi/3, pi)")
    side = equilateral_side(angle)
    return build_surface([(side, side, side)] * 4, gluing_from_faces(TETRA_FACES))


def sphere_surface(points, faces):
    """Intrinsic surface of a triangulated subset of the round unit sphere."""
    pts = [V.normalize(tuple(float(x) for x in p)) for p in points]
    shapes = []
    for f in faces:
        a, b, c = (pts[i] for i in f)
        shapes.append((V.arc(a, b), V.arc(b, c), V.arc(c, a)))
    return build_surface(shapes, gluing_from_faces(faces))


OCTA_POINTS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


def octa_faces():
    faces = []
    for sx in (0, 1):
        for sy in (2, 3):
            for sz in (4, 5):
                a, b, c = (OCTA_POINTS[i] for i in (sx, sy, sz))
                faces.append((sx, sy, sz) if V.det(a, b, c) > 0 else (sx, sz, sy))
    return faces


def octa_sphere():
    """The round unit sphere cut into eight octants (six smooth vertices)."""
    return sphere_surface(OCTA_POINTS, octa_faces())


def waist(leg=2.2, apex=0.4):
    """Pillowcase: an isosceles triangle doubled along its boundary.

    With legs longer than pi/2, the common perpendicular of the legs at
    distance pi/2 from the apex closes up (through both sheets) into a
    geodesic loop of length ``2 * apex``.
    """
    base = math.acos(math.cos(leg) ** 2 + math.sin(leg) ** 2 * math.cos(apex))
    faces = ((0, 1, 2), (0, 2, 1))
    shapes = [(leg, base, leg), (leg, base, leg)]
    return build_surface(shapes, gluing_from_faces(faces))


def random_sphere(n, seed=0):
    """Convex-hull triangulation of ``n`` random points on the round sphere.

    Returns ``(surface, points, faces)``; every vertex is smooth.
    """
    from scipy.spatial import ConvexHull

    rng = np.random.default_rng(seed)
    while True:
        pts = rng.normal(size=(n, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        hull = ConvexHull(pts)
        # the origin must be inside, or the spherical triangles do not tile the sphere
        if np.all(hull.equations[:, 3] < -1e-9):
            break
    faces = []
    for f, eq in zip(hull.simplices, hull.equations):
        a, b, c = (pts[i] for i in f)
        f = tuple(int(i) for i in f)
        faces.append(f if np.dot(np.cross(b - a, c - a), eq[:3]) > 0 else (f[0], f[2], f[1]))
    return sphere_surface([tuple(p) for p in pts], faces), pts, faces


def perturb(surface, eps=0.02, seed=0, attempts=200):
    """Shift each edge length by an independent uniform draw in ``[-eps, eps]``.

    Draws that break a triangle inequality are rejected and redrawn.
    """
    from .surface import ConeSurface

    rng = np.random.default_rng(seed)
    edges = surface.edges()
    for _ in range(attempts):
        shift = rng.uniform(-eps, eps, size=len(edges))
        lengths = [list(ls) for ls in surface.lengths]
        for h, d in zip(edges, shift):
            for g in (h, surface.twin[h]):
                lengths[g // 3][g % 3] += d
        if all(validate_sides(SphTriangleShape.from_edges(*ls))[0] for ls in lengths):
            return build_surface([tuple(ls) for ls in lengths], surface.gluing())
    raise SurfaceError(f"no valid perturbation found in {attempts} draws", code="INVALID_TRIANGLE")


def random_gluing(n_triangles, seed=0, lo=0.5, hi=0.9):
    """Random perfect matching of half-edges with random edge lengths in ``[lo, hi]``.

    Lengths in [0.5, 0.9] always satisfy the spherical triangle inequalities.
    Returns ``(lengths, gluing)``; the result may be disconnected.
    """
    rng = np.random.default_rng(seed)
    hs = list(rng.permutation(3 * n_triangles))
    lengths = [[0.0, 0.0, 0.0] for _ in range(n_triangles)]
    gluing = []
    for i in range(0, len(hs), 2):
        h, g = int(hs[i]), int(hs[i + 1])
        ell = float(rng.uniform(lo, hi))
        lengths[h // 3][h % 3] = ell
        lengths[g // 3][g % 3] = ell
        gluing.append(((h // 3, h % 3), (g // 3, g % 3)))
    return [tuple(ls) for ls in lengths], gluing
