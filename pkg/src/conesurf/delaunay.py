"""Intrinsic Delaunay triangulation by edge flips.

Each edge is tested by unfolding its two triangles into one chart and asking
whether the far vertex lies in the circumcap of the near triangle. Flips only
ever change the diagonal of a quad, so the vertex set is never touched and
the metric is preserved.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from . import _vec as V
from .errors import ConeSurfError, DegenerateError, FlipError
from .sphtrig import Cap, SphTriangleShape, canonical_embed, circumdisk, in_cap, cap_determinant, validate_sides
from .surface import ConeSurface, SurfacePoint

YES = "YES"
NO = "NO"
COCIRCULAR = "COCIRCULAR"

CONVEX_TOL = 1e-12
DIAGONAL_MARGIN = 1e-9
CENTER_TOL = 1e-8


class _Mesh:
    """Mutable copy of a surface's arrays; vertex labels ride along with corners."""

    def __init__(self, surface):
        self.lengths = [list(ls) for ls in surface.lengths]
        self.twin = list(surface.twin)
        self.cv = list(surface.corner_vertex)
        self.n_vertices = surface.n_vertices
        self._charts = {}

    def chart(self, t):
        ch = self._charts.get(t)
        if ch is None:
            ch = canonical_embed(SphTriangleShape.from_edges(*self.lengths[t]))
            self._charts[t] = ch
        return ch

    def quad(self, h):
        """Images ``a, b, c, d`` in the chart of ``h``'s triangle, where ``h``
        runs a -> b, ``c`` closes its triangle and ``d`` is the far vertex."""
        t, e = divmod(h, 3)
        h2 = self.twin[h]
        t2, e2 = divmod(h2, 3)
        ch = self.chart(t)
        ch2 = self.chart(t2)
        R = V.rotation_between(ch2[e2], ch2[(e2 + 1) % 3], ch[(e + 1) % 3], ch[e])
        a, b, c = ch[e], ch[(e + 1) % 3], ch[(e + 2) % 3]
        d = V.matvec(R, ch2[(e2 + 2) % 3])
        return a, b, c, d

    def status(self, h):
        a, b, c, d = self.quad(h)
        res = in_cap(a, b, c, d)
        if res is Cap.INSIDE:
            return NO
        if res is Cap.ON:
            return COCIRCULAR
        return YES

    def flip_check(self, h):
        """``None`` when ``h`` can be flipped, else the blocking error code."""
        t, t2 = h // 3, self.twin[h] // 3
        if t == t2:
            return "BLOCKED_FLIP"
        a, b, c, d = self.quad(h)
        if V.det(c, a, d) <= CONVEX_TOL or V.det(d, b, c) <= CONVEX_TOL:
            return "BLOCKED_FLIP"
        if V.arc(c, d) >= math.pi - DIAGONAL_MARGIN:
            return "DIAGONAL_TOO_LONG"
        return None

    def flip(self, h):
        """Replace the diagonal of ``h``'s quad; return the new diagonal half-edge
        (the one in ``h``'s triangle, running c -> d)."""
        code = self.flip_check(h)
        if code is not None:
            raise FlipError(f"half-edge {h} cannot be flipped", code=code, halfedge=h)
        t, e = divmod(h, 3)
        h2 = self.twin[h]
        t2, e2 = divmod(h2, 3)
        a, b, c, d = self.quad(h)
        L = self.lengths
        bc, ca = L[t][(e + 1) % 3], L[t][(e + 2) % 3]
        ad, db = L[t2][(e2 + 1) % 3], L[t2][(e2 + 2) % 3]
        cd = V.arc(c, d)
        for ls in ((db, bc, cd), (ca, ad, cd)):
            ok, bad = validate_sides(SphTriangleShape.from_edges(*ls))
            if not ok:
                raise FlipError(f"flip of {h} would create an invalid triangle: {bad}",
                                code="BLOCKED_FLIP", halfedge=h)
        va, vb, vc = self.cv[3 * t + e], self.cv[3 * t + (e + 1) % 3], self.cv[3 * t + (e + 2) % 3]
        vd = self.cv[3 * t2 + (e2 + 2) % 3]

        # t becomes (d, b, c) and t2 becomes (c, a, d), keeping b->c and a->d in place.
        moved = {
            3 * t2 + (e2 + 2) % 3: 3 * t + e,  # d -> b
            3 * t + (e + 2) % 3: 3 * t2 + e2,  # c -> a
            3 * t + (e + 1) % 3: 3 * t + (e + 1) % 3,
            3 * t2 + (e2 + 1) % 3: 3 * t2 + (e2 + 1) % 3,
        }
        old_twin = {g: self.twin[g] for g in moved}
        for g, ng in moved.items():
            o = old_twin[g]
            no = moved.get(o, o)
            self.twin[ng] = no
            self.twin[no] = ng
        dt, dt2 = 3 * t + (e + 2) % 3, 3 * t2 + (e2 + 2) % 3
        self.twin[dt], self.twin[dt2] = dt2, dt

        L[t][e], L[t][(e + 1) % 3], L[t][(e + 2) % 3] = db, bc, cd
        L[t2][e2], L[t2][(e2 + 1) % 3], L[t2][(e2 + 2) % 3] = ca, ad, cd
        self.cv[3 * t + e], self.cv[3 * t + (e + 1) % 3], self.cv[3 * t + (e + 2) % 3] = vd, vb, vc
        self.cv[3 * t2 + e2], self.cv[3 * t2 + (e2 + 1) % 3], self.cv[3 * t2 + (e2 + 2) % 3] = vc, va, vd
        self._charts.pop(t, None)
        self._charts.pop(t2, None)
        return dt

    def surface(self):
        return ConeSurface([tuple(ls) for ls in self.lengths], self.twin, self.cv, self.n_vertices)


def is_edge_delaunay(surface, h):
    """YES, NO or COCIRCULAR for the edge of half-edge ``h``."""
    return _Mesh(surface).status(h)


def flip(surface, h):
    """Flip the edge of ``h``; returns ``(new_surface, new_diagonal_halfedge)``.

    Only the geometric preconditions are enforced (strictly convex quad,
    diagonal shorter than pi), so Delaunay edges may be flipped too.
    """
    m = _Mesh(surface)
    g = m.flip(h)
    return m.surface(), g


@dataclass(frozen=True)
class FlipRecord:
    halfedge: int
    quad: tuple  # vertex labels (a, b, c, d); the new diagonal joins c and d
    determinant: float
    no_edges_before: int
    no_edges_after: int


@dataclass
class DelaunayTriangulation:
    surface: ConeSurface
    circumdata: list
    flip_log: list
    cocircular_classes: list
    edge_status: dict = field(default_factory=dict)

    @property
    def flip_count(self):
        return len(self.flip_log)

    def circumradius_range(self):
        rs = [r for _, r in self.circumdata]
        return min(rs), max(rs)


def _count_no(mesh, edges):
    return sum(1 for h in edges if mesh.status(h) == NO)


def _canonical_edges(mesh):
    return [h for h in range(len(mesh.twin)) if h < mesh.twin[h]]


def delaunay_flip(surface, max_flips=None, force=False, verdict=None, resolution=None):
    """Flip to the intrinsic Delaunay triangulation on the cone points.

    Unless ``force`` is set, the input must validate as extra large (an
    existing ``verdict`` may be passed in to skip the check).
    """
    if not force:
        if verdict is None:
            from .validator import DEFAULT_RESOLUTION, is_extra_large

            verdict = is_extra_large(surface, resolution or DEFAULT_RESOLUTION)
        if verdict.status != "PASS":
            raise ConeSurfError(f"input did not validate (status {verdict.status}); use force mode",
                                code="NOT_VALIDATED")
    nf = surface.n_triangles
    if max_flips is None:
        max_flips = 50 * nf * nf
    mesh = _Mesh(surface)
    edges = _canonical_edges(mesh)
    queue = deque(edges)
    queued = set(edges)
    blocked = {}
    log = []
    while True:
        while queue:
            h = queue.popleft()
            queued.discard(h)
            if mesh.status(h) != NO:
                blocked.pop(h, None)
                continue
            code = mesh.flip_check(h)
            if code is not None:
                blocked[h] = code
                continue
            blocked.pop(h, None)
            if len(log) >= max_flips:
                raise FlipError(f"flip limit {max_flips} exceeded", code="FLIP_LIMIT_EXCEEDED",
                                flips=len(log), log=[r.__dict__ for r in log])
            before = _count_no(mesh, _canonical_edges(mesh))
            a, b, c, d = mesh.quad(h)
            det, _ = cap_determinant(a, b, c, d)
            t, e = divmod(h, 3)
            t2, e2 = divmod(mesh.twin[h], 3)
            labels = (mesh.cv[h], mesh.cv[3 * t + (e + 1) % 3], mesh.cv[3 * t + (e + 2) % 3],
                      mesh.cv[3 * t2 + (e2 + 2) % 3])
            g = mesh.flip(h)
            after = _count_no(mesh, _canonical_edges(mesh))
            log.append(FlipRecord(h, labels, det, before, after))
            for tt in (g // 3, mesh.twin[g] // 3):
                for k in range(3):
                    hh = min(3 * tt + k, mesh.twin[3 * tt + k])
                    if hh not in queued:
                        queue.append(hh)
                        queued.add(hh)
        live = {h: c for h, c in blocked.items() if mesh.status(h) == NO}
        retry = [h for h in live if mesh.flip_check(h) is None]
        if retry:
            for h in sorted(retry):
                queue.append(h)
                queued.add(h)
            continue
        if live:
            raise FlipError("only blocked non-Delaunay edges remain", code=sorted(set(live.values()))[0],
                            edges=sorted(live), flips=len(log))
        break

    out = mesh.surface()
    status = {h: mesh.status(h) for h in _canonical_edges(mesh)}
    cdata = [circumdata(out, t) for t in range(out.n_triangles)]
    classes = cocircular_classes(out, status)
    return DelaunayTriangulation(out, cdata, log, classes, status)


def chart_circumdisk(surface, t):
    return circumdisk(*surface.charts[t])


def circumdata(surface, t):
    """Circumcenter (as a surface point) and circumradius of triangle ``t``."""
    try:
        center, radius = chart_circumdisk(surface, t)
    except DegenerateError:
        raise
    from .geodesic import locate

    return locate(surface, t, center), radius


def cocircular_classes(surface, status=None):
    """Groups of triangles joined through cocircular edges whose circumcenters
    coincide (within 1e-8) after unfolding."""
    nt = surface.n_triangles
    parent = list(range(nt))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    mesh = _Mesh(surface)
    for h in surface.edges():
        st = status.get(h) if status is not None else mesh.status(h)
        if st != COCIRCULAR:
            continue
        t, e = divmod(h, 3)
        t2 = surface.twin[h] // 3
        a, b, c, d = mesh.quad(h)
        c1, _ = circumdisk(a, b, c)
        c2, _ = circumdisk(b, a, d)
        if V.arc(c1, c2) < CENTER_TOL:
            ra, rb = find(t), find(t2)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for t in range(nt):
        groups.setdefault(find(t), []).append(t)
    return [tuple(g) for g in sorted(groups.values())]


@dataclass(frozen=True)
class EmptyDiskViolation:
    triangle: int
    vertex: int
    distance: float
    radius: float


def global_empty_disk_check(dt, tol=1e-8):
    """Sites strictly inside some circumdisk, measured by intrinsic distance
    from the located circumcenter. Returns ``(violations, min_margin)``."""
    from .geodesic import vertex_distances

    sur = dt.surface
    bad = []
    margin = math.inf
    for t, (center, radius) in enumerate(dt.circumdata):
        dist = vertex_distances(sur, center, min(radius + 1e-6, math.pi))
        own = {sur.corner_vertex[3 * t + i] for i in range(3)}
        for v, d in dist.items():
            if v in own and abs(d - radius) <= tol:
                continue
            margin = min(margin, d - radius)
            if d < radius - tol:
                bad.append(EmptyDiskViolation(t, v, d, radius))
    return bad, margin
