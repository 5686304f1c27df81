"""Intrinsic spherical cone surfaces as glued spherical triangles.

A surface is stored as flat half-edge arrays. Half-edge ``h = 3 t + e`` runs
from corner ``e`` to corner ``e + 1`` of triangle ``t``; the same integer also
names the corner at its origin. Gluing always reverses orientation, so every
accepted surface is closed and orientable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _vec as V
from .errors import SurfaceError
from .sphtrig import SphTriangleShape, angle_from_sides, canonical_embed, triangle_area, validate_sides

TWO_PI = 2.0 * math.pi
LENGTH_TOL = 1e-9
SMOOTH_TOL = 1e-9
GAUSS_BONNET_TOL = 1e-8
VERTEX_SNAP = 1e-10
EDGE_SNAP = 1e-10


@dataclass(frozen=True)
class SurfacePoint:
    """A point of the surface: a triangle and a unit vector in its canonical chart."""

    triangle: int
    position: tuple

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(x) for x in self.position))


@dataclass(frozen=True)
class ConePoint:
    vertex: int
    cone_angle: float
    curvature: float
    smooth: bool


def _as_lengths(shape):
    if isinstance(shape, SphTriangleShape):
        return tuple(float(x) for x in shape.edges())
    l01, l12, l20 = shape
    return (float(l01), float(l12), float(l20))


def _as_pair(item):
    if len(item) == 4:
        t, e, t2, e2 = item
        return (int(t), int(e)), (int(t2), int(e2))
    (t, e), (t2, e2) = item
    return (int(t), int(e)), (int(t2), int(e2))


class ConeSurface:
    """Closed spherical cone surface; immutable once built.

    Use :func:`build_surface` rather than the constructor.
    """

    def __init__(self, lengths, twin, corner_vertex, n_vertices):
        self.lengths = tuple(lengths)
        self.twin = tuple(twin)
        self.corner_vertex = tuple(corner_vertex)
        self.n_vertices = n_vertices
        nt = len(self.lengths)
        self.shapes = tuple(SphTriangleShape.from_edges(*ls) for ls in self.lengths)
        angles = []
        for shape in self.shapes:
            angles.extend(angle_from_sides(shape, i) for i in range(3))
        self.angles = tuple(angles)
        self.areas = tuple(triangle_area(s) for s in self.shapes)
        self.charts = tuple(canonical_embed(s) for s in self.shapes)

        corners = [[] for _ in range(n_vertices)]
        seen = [False] * (3 * nt)
        for c in range(3 * nt):
            if seen[c]:
                continue
            v = self.corner_vertex[c]
            cur = c
            while not seen[cur]:
                seen[cur] = True
                if self.corner_vertex[cur] != v:
                    raise SurfaceError("corner orbit carries two vertex labels", code="NON_MANIFOLD")
                corners[v].append(cur)
                cur = self.ccw_corner(cur)
            if cur != c:
                raise SurfaceError("corner orbit does not close", code="NON_MANIFOLD")
        for v, cs in enumerate(corners):
            if not cs:
                raise SurfaceError(f"vertex {v} has no corners", code="NON_MANIFOLD")
        self.vertex_corners = tuple(tuple(cs) for cs in corners)
        self.cone_angles = tuple(sum(self.angles[c] for c in cs) for cs in corners)

        unfold = []
        for h in range(3 * nt):
            t, e = divmod(h, 3)
            t2, e2 = divmod(self.twin[h], 3)
            a = self.charts[t2][e2]
            b = self.charts[t2][(e2 + 1) % 3]
            a2 = self.charts[t][(e + 1) % 3]
            b2 = self.charts[t][e]
            unfold.append(V.rotation_between(a, b, a2, b2))
        self.unfold = tuple(unfold)

    # combinatorics -------------------------------------------------------

    @property
    def n_triangles(self):
        return len(self.lengths)

    @property
    def n_edges(self):
        return 3 * len(self.lengths) // 2

    @property
    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_triangles

    @property
    def total_area(self):
        return math.fsum(self.areas)

    def edge_length(self, h):
        t, e = divmod(h, 3)
        return self.lengths[t][e]

    @staticmethod
    def next(h):
        return h - h % 3 + (h % 3 + 1) % 3

    @staticmethod
    def prev(h):
        return h - h % 3 + (h % 3 + 2) % 3

    def ccw_corner(self, c):
        """Corner following ``c`` counterclockwise around its vertex."""
        return self.twin[self.prev(c)]

    def origin(self, h):
        return self.corner_vertex[h]

    def target(self, h):
        return self.corner_vertex[self.next(h)]

    def edges(self):
        """One representative half-edge per edge, in increasing order."""
        return [h for h in range(3 * self.n_triangles) if h < self.twin[h]]

    def gluing(self):
        return [((h // 3, h % 3), (self.twin[h] // 3, self.twin[h] % 3)) for h in self.edges()]

    def corner_image(self, c):
        return self.charts[c // 3][c % 3]

    def is_smooth(self, v, tol=SMOOTH_TOL):
        return abs(self.cone_angles[v] - TWO_PI) <= tol

    def gauss_bonnet_defect(self):
        curv = math.fsum(TWO_PI - th for th in self.cone_angles)
        return self.total_area + curv - TWO_PI * self.euler_characteristic

    # points ------------------------------------------------------------

    def vertex_point(self, v):
        c = self.vertex_corners[v][0]
        return SurfacePoint(c // 3, self.corner_image(c))

    def centroid(self, t):
        v0, v1, v2 = self.charts[t]
        return SurfacePoint(t, V.normalize(V.add(V.add(v0, v1), v2)))

    def edge_point(self, h, s=0.5):
        """Point at fraction ``s`` (by arc length) along half-edge ``h``."""
        t, e = divmod(h, 3)
        ch = self.charts[t]
        return SurfacePoint(t, V.lerp_unit(ch[e], ch[(e + 1) % 3], s))

    def contains(self, t, x, tol=1e-12):
        v0, v1, v2 = self.charts[t]
        return V.det(v0, v1, x) >= -tol and V.det(v1, v2, x) >= -tol and V.det(v2, v0, x) >= -tol

    def classify(self, p):
        """Return ``("vertex", corner)``, ``("edge", half_edge)`` or ``("face", t)``."""
        t, x = p.triangle, p.position
        ch = self.charts[t]
        for i in range(3):
            if V.arc(ch[i], x) <= VERTEX_SNAP:
                return "vertex", 3 * t + i
        for e in range(3):
            a, b = ch[e], ch[(e + 1) % 3]
            n = V.cross(a, b)
            if abs(V.dot(n, x)) <= EDGE_SNAP * V.norm(n):
                if V.dot(V.cross(a, x), n) >= 0.0 and V.dot(V.cross(x, b), n) >= 0.0:
                    return "edge", 3 * t + e
        return "face", t

    def representations(self, p):
        """All ``(triangle, chart position)`` pairs naming ``p``, one per incident triangle."""
        kind, ref = self.classify(p)
        if kind == "face":
            return [(p.triangle, p.position)]
        if kind == "edge":
            h = ref
            h2 = self.twin[h]
            return [(h // 3, p.position), (h2 // 3, V.tmatvec(self.unfold[h], p.position))]
        v = self.corner_vertex[ref]
        return [(c // 3, self.corner_image(c)) for c in self.vertex_corners[v]]

    def vertex_at(self, p):
        kind, ref = self.classify(p)
        return self.corner_vertex[ref] if kind == "vertex" else None


def build_surface(shapes, gluing, *, strict=False, length_tol=LENGTH_TOL):
    """Validate triangles and a gluing, derive vertices and cone angles.

    ``shapes`` holds :class:`SphTriangleShape` objects or ``(l01, l12, l20)``
    tuples. ``gluing`` lists half-edge pairs as ``((t, e), (t2, e2))`` or
    ``(t, e, t2, e2)``, where edge ``e`` joins corners ``e`` and ``e + 1``.
    """
    lengths = [_as_lengths(s) for s in shapes]
    nt = len(lengths)
    if nt == 0:
        raise SurfaceError("no triangles", code="OPEN_SURFACE")
    for t, ls in enumerate(lengths):
        ok, bad = validate_sides(SphTriangleShape.from_edges(*ls))
        if not ok:
            raise SurfaceError(f"triangle {t} is not a valid spherical triangle: {', '.join(bad)}",
                               code="INVALID_TRIANGLE", triangle=t)
    twin = [-1] * (3 * nt)
    for item in gluing:
        (t, e), (t2, e2) = _as_pair(item)
        if not (0 <= t < nt and 0 <= t2 < nt and e in (0, 1, 2) and e2 in (0, 1, 2)):
            raise SurfaceError(f"gluing {item} references a missing half-edge", code="NON_MANIFOLD")
        h, h2 = 3 * t + e, 3 * t2 + e2
        if h == h2:
            raise SurfaceError(f"half-edge ({t}, {e}) cannot be its own twin", code="NON_MANIFOLD")
        if twin[h] != -1 or twin[h2] != -1:
            raise SurfaceError(f"half-edge in {item} is glued twice", code="NON_MANIFOLD")
        if abs(lengths[t][e] - lengths[t2][e2]) > length_tol:
            raise SurfaceError(
                f"glued edges ({t},{e}) and ({t2},{e2}) differ in length "
                f"({lengths[t][e]!r} vs {lengths[t2][e2]!r})",
                code="LENGTH_MISMATCH",
            )
        twin[h], twin[h2] = h2, h
    free = [h for h in range(3 * nt) if twin[h] == -1]
    if free:
        raise SurfaceError(f"{len(free)} half-edges are not glued (first: {divmod(free[0], 3)})",
                           code="OPEN_SURFACE")

    seen = [False] * nt
    stack = [0]
    seen[0] = True
    while stack:
        t = stack.pop()
        for e in range(3):
            t2 = twin[3 * t + e] // 3
            if not seen[t2]:
                seen[t2] = True
                stack.append(t2)
    if not all(seen):
        raise SurfaceError("gluing leaves the surface disconnected", code="DISCONNECTED")

    corner_vertex = [-1] * (3 * nt)
    nv = 0
    for c in range(3 * nt):
        if corner_vertex[c] != -1:
            continue
        cur = c
        while corner_vertex[cur] == -1:
            corner_vertex[cur] = nv
            cur = twin[cur - cur % 3 + (cur % 3 + 2) % 3]
        nv += 1

    surf = ConeSurface(lengths, twin, corner_vertex, nv)
    defect = surf.gauss_bonnet_defect()
    if abs(defect) > GAUSS_BONNET_TOL:
        raise SurfaceError(f"Gauss-Bonnet defect {defect:.3e} exceeds tolerance", code="NON_MANIFOLD")
    if strict:
        smooth = [v for v in range(nv) if surf.is_smooth(v)]
        if smooth:
            raise SurfaceError(f"smooth vertices {smooth} rejected in strict mode",
                               code="SMOOTH_VERTEX", vertices=smooth)
    return surf


def cone_points(surface):
    return [
        ConePoint(v, th, TWO_PI - th, surface.is_smooth(v))
        for v, th in enumerate(surface.cone_angles)
    ]


def gauss_bonnet_defect(surface):
    return surface.gauss_bonnet_defect()
