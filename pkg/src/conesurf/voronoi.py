"""Voronoi cells of the cone points as the dual of a Delaunay triangulation.

A site's cell is found by rolling the triangles of its star into one chart
around the site and joining consecutive circumcenters. Triangles of one
cocircular class share a single Voronoi vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _vec as V
from .delaunay import chart_circumdisk
from .errors import VoronoiError
from .geodesic import distance_within, trace, vertex_distances
from .surface import SurfacePoint

PI = math.pi
ANGLE_TOL = 1e-8
EQUI_TOL = 1e-8


@dataclass(frozen=True)
class VoronoiVertex:
    index: int
    triangles: tuple
    center: SurfacePoint
    radius: float
    sites: tuple


@dataclass(frozen=True)
class VoronoiEdge:
    index: int
    halfedge: int  # dual Delaunay edge (smaller half-edge id)
    vertices: tuple  # (u, w) Voronoi vertex ids
    sites: tuple  # the two sites it separates
    length: float


@dataclass
class VoronoiCell:
    site: int
    cone_angle: float
    vertices: list  # Voronoi vertex ids, counterclockwise
    edges: list  # edges[j] joins vertices[j] and vertices[j + 1]
    neighbors: list  # site across edges[j]
    angles: list  # interior angle at vertices[j]
    area: float
    images: list  # rolled chart images of vertices[j]
    site_image: tuple
    frames: list  # (corner, rotation) used for vertices[j]
    closing_image: tuple  # images[0] after one full turn around the site
    degenerate: bool = False


@dataclass
class VoronoiDiagram:
    surface: object
    delaunay: object
    cells: list
    vertices: list
    edges: list
    degenerate: bool = False
    notes: list = field(default_factory=list)

    def euler_characteristic(self):
        return len(self.vertices) - len(self.edges) + len(self.cells)


def _signed_area(s, p, q):
    num = V.det(s, p, q)
    den = 1.0 + V.dot(s, p) + V.dot(p, q) + V.dot(q, s)
    return 2.0 * math.atan2(num, den)


def _interior_angle(c, nxt, prv):
    tn = V.tangent(c, nxt)
    tp = V.tangent(c, prv)
    ang = math.atan2(V.dot(c, V.cross(tn, tp)), V.dot(tn, tp))
    return ang % (2.0 * PI)


def dualize(dt):
    """Voronoi diagram dual to Delaunay triangulation ``dt``."""
    sur = dt.surface
    cls_of = {}
    for n, group in enumerate(dt.cocircular_classes):
        for t in group:
            cls_of[t] = n
    vertices = []
    for n, group in enumerate(dt.cocircular_classes):
        t0 = group[0]
        center, radius = dt.circumdata[t0]
        sites = sorted({sur.corner_vertex[3 * t + i] for t in group for i in range(3)})
        vertices.append(VoronoiVertex(n, tuple(group), center, radius, tuple(sites)))

    edges = []
    edge_of = {}
    for h in sur.edges():
        t, t2 = h // 3, sur.twin[h] // 3
        u, w = cls_of[t], cls_of[t2]
        a, b = sur.corner_vertex[h], sur.corner_vertex[sur.twin[h]]
        if u == w and t != t2:
            continue  # internal to a cocircular cell
        ca, _ = chart_circumdisk(sur, t)
        cb, _ = chart_circumdisk(sur, t2)
        length = V.arc(ca, V.matvec(sur.unfold[h], cb))
        edge_of[h] = len(edges)
        edges.append(VoronoiEdge(len(edges), h, (u, w), (a, b), length))

    cells = []
    degenerate = sur.n_vertices < 2
    for v in range(sur.n_vertices):
        cell = _walk_star(dt, v, cls_of, edge_of)
        degenerate = degenerate or cell.degenerate
        cells.append(cell)
    notes = []
    if degenerate:
        notes.append("degenerate dual: a site is adjacent to itself or fewer than two sites exist")
    return VoronoiDiagram(sur, dt, cells, vertices, edges, degenerate, notes)


def _walk_star(dt, v, cls_of, edge_of):
    sur = dt.surface
    corners = sur.vertex_corners[v]
    m = len(corners)
    seq = []  # (corner, rotation) for three windings
    c = corners[0]
    R = V.MAT_ID
    for _ in range(3 * m):
        seq.append((c, R))
        h = sur.prev(c)
        R = V.matmul(R, sur.unfold[h])
        c = sur.twin[h]
    if seq[m][0] != corners[0]:
        raise VoronoiError(f"star of site {v} does not close after {m} corners", site=v)
    site_img = sur.corner_image(corners[0])
    images = [V.matvec(R_, chart_circumdisk(sur, c_ // 3)[0]) for c_, R_ in seq]

    def internal(k):
        # edge between corner k and k + 1 collapses inside a cocircular cell
        c_ = seq[k][0]
        h = sur.prev(c_)
        canon = min(h, sur.twin[h])
        return canon not in edge_of

    if all(internal(k) for k in range(m)):
        raise VoronoiError(f"site {v} sees a single cocircular cell all around", site=v)
    s = next(k for k in range(m) if not internal((k - 1) % m))
    runs = []  # first corner index (within [s, s + m)) of each Voronoi vertex
    for k in range(s, s + m):
        if k == s or not internal(k - 1):
            runs.append(k)
    verts, edges, nbrs, frames, imgs = [], [], [], [], []
    for j, k in enumerate(runs):
        c_ = seq[k][0]
        verts.append(cls_of[c_ // 3])
        frames.append(seq[k + m])
        imgs.append(images[k + m])
        k_end = (runs[j + 1] if j + 1 < len(runs) else runs[0] + m) - 1
        h = sur.prev(seq[k_end][0])
        canon = min(h, sur.twin[h])
        edges.append(edge_of[canon])
        nbrs.append(sur.corner_vertex[h])
    n = len(runs)
    angles = []
    for j, k in enumerate(runs):
        cur = images[k + m]
        nxt = images[runs[j + 1] + m] if j + 1 < n else images[runs[0] + 2 * m]
        prv = images[runs[j - 1] + m] if j > 0 else images[runs[-1]]
        angles.append(_interior_angle(cur, nxt, prv))
    area = 0.0
    ring = [images[k + m] for k in runs] + [images[runs[0] + 2 * m]]
    for j in range(n):
        area += _signed_area(site_img, ring[j], ring[j + 1])
    degenerate = v in nbrs or n < 2
    return VoronoiCell(v, sur.cone_angles[v], verts, edges, nbrs, angles, area, imgs, site_img,
                       frames, images[runs[0] + 2 * m], degenerate)


# ---------------------------------------------------------------------------
# verification


@dataclass
class CellReport:
    site: int
    max_vertex_distance: float  # largest circumradius over the cell's vertices
    vertex_distance_margin: float  # pi/2 - max measured site-to-vertex distance
    diameter: float
    diameter_margin: float  # pi - diameter
    min_angle: float
    max_angle: float
    angle_margin: float  # pi + 1e-8 - max angle
    star_samples: int
    star_contained: int
    area: float

    @property
    def passed(self):
        return (
            self.vertex_distance_margin > 0
            and self.diameter_margin > 0
            and self.angle_margin >= 0
            and self.star_contained == self.star_samples
        )

    def to_dict(self):
        out = dict(self.__dict__)
        out["passed"] = self.passed
        return out


def _boundary_samples(cell, n):
    """``n`` points spread by length along the cell boundary, each with the
    index of the boundary vertex it follows."""
    k = len(cell.images)
    ring = list(cell.images) + [cell.closing_image]
    lens = [V.arc(ring[j], ring[j + 1]) for j in range(k)]
    total = sum(lens)
    if total <= 0:
        return [(0, ring[0])] * n
    out = []
    for i in range(n):
        s = (i + 0.5) * total / n
        j = 0
        while j < k - 1 and s > lens[j]:
            s -= lens[j]
            j += 1
        f = s / lens[j] if lens[j] > 0 else 0.0
        out.append((j, V.lerp_unit(ring[j], ring[j + 1], min(max(f, 0.0), 1.0))))
    return out


def _point_along(sur, cell, j, y, frac):
    """Geodesic from the site toward rolled image ``y`` for ``frac`` of the way.

    The direction is read relative to boundary vertex ``j`` so that it stays
    unambiguous on cones wider than 2pi.
    """
    c, R = cell.frames[j]
    t, i = divmod(c, 3)
    ch = sur.charts[t]
    x = ch[i]
    e1 = V.tangent(x, ch[(i + 1) % 3])
    e2 = V.cross(x, e1)
    cj = V.tmatvec(R, cell.images[j])
    dc = V.tangent(x, cj)
    base = math.atan2(V.dot(dc, e2), V.dot(dc, e1))
    S = cell.site_image
    tc = V.tangent(S, cell.images[j])
    ty = V.tangent(S, y)
    turn = math.atan2(V.dot(S, V.cross(tc, ty)), V.dot(tc, ty))
    dist = V.arc(S, y) * frac
    return trace(sur, SurfacePoint(t, x), base + turn, min(dist, PI), dist)


def verify_cell(cell, diagram, samples=100, fractions=(0.5, 0.95), diameter_samples=24):
    """Numeric margins for the four cell properties.

    Star-shapedness traces segments from the site to boundary samples and
    checks that sampled points on them are no farther from this site than
    from any other (exact intrinsic distances).
    """
    sur = diagram.surface
    verts = [diagram.vertices[u] for u in cell.vertices]
    site_pt = sur.vertex_point(cell.site)
    measured = []
    for vv in verts:
        r = distance_within(sur, site_pt, vv.center, PI)
        measured.append(r[0] if r is not None else math.inf)
    max_r = max(vv.radius for vv in verts)
    max_meas = max(max(measured), max_r)
    # sampled diameter over the site, the vertices and points along the boundary
    pts = [site_pt] + [vv.center for vv in verts]
    for j, y in _boundary_samples(cell, diameter_samples):
        g = _point_along(sur, cell, j, y, 1.0)
        if g.status == "REACHED":
            pts.append(g.end)
    diam = 0.0
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            r = distance_within(sur, pts[a], pts[b], PI)
            diam = max(diam, r[0] if r is not None else math.inf)
    contained = 0
    total = 0
    for j, y in _boundary_samples(cell, samples):
        total += 1
        ok = True
        for f in fractions:
            g = _point_along(sur, cell, j, y, f)
            if g.status != "REACHED":
                ok = False
                break
            d_site = g.length
            ds = vertex_distances(sur, g.end, min(d_site + 1e-6, PI))
            if any(d < d_site - 1e-9 for w, d in ds.items() if w != cell.site):
                ok = False
                break
        contained += ok
    return CellReport(
        site=cell.site,
        max_vertex_distance=max_r,
        vertex_distance_margin=PI / 2 - max_meas,
        diameter=diam,
        diameter_margin=PI - diam,
        min_angle=min(cell.angles),
        max_angle=max(cell.angles),
        angle_margin=PI + ANGLE_TOL - max(cell.angles),
        star_samples=total,
        star_contained=contained,
        area=cell.area,
    )


@dataclass
class ConnectednessReport:
    pairs: dict  # (i, j) -> number of connected boundary pieces seen from i
    shared_edges: dict  # (i, j) -> number of dual edges between i and j

    @property
    def passed(self):
        return all(n == 1 for n in self.pairs.values())

    def failures(self):
        return sorted(p for p, n in self.pairs.items() if n != 1)


def verify_edge_connectedness(diagram):
    """For each adjacent site pair, count the connected pieces of their common
    boundary (maximal runs of consecutive shared edges around each cell)."""
    pieces = {}
    shared = {}
    for cell in diagram.cells:
        nb = cell.neighbors
        n = len(nb)
        for j, w in enumerate(nb):
            key = (cell.site, w)
            shared[key] = shared.get(key, 0) + 1
            if nb[(j - 1) % n] != w or n == 1:
                pieces[key] = pieces.get(key, 0) + 1
        for w in set(nb):
            if all(x == w for x in nb):
                pieces[(cell.site, w)] = 1
    return ConnectednessReport(pieces, shared)


def diagram_site(diagram, p):
    """Site whose cell contains ``p`` according to the dual diagram: the nearest
    of the triangle's corners and of the far corners across its three edges,
    measured in the unfolded chart of ``p``'s triangle."""
    sur = diagram.surface
    t = p.triangle
    x = p.position
    best = None
    ch = sur.charts[t]
    for i in range(3):
        d = V.arc(ch[i], x)
        v = sur.corner_vertex[3 * t + i]
        if best is None or d < best[0] - 1e-15:
            best = (d, v)
    for e in range(3):
        h = 3 * t + e
        h2 = sur.twin[h]
        t2, e2 = divmod(h2, 3)
        far = V.matvec(sur.unfold[h], sur.charts[t2][(e2 + 2) % 3])
        d = V.arc(far, x)
        v = sur.corner_vertex[3 * t2 + (e2 + 2) % 3]
        if d < best[0] - 1e-15:
            best = (d, v)
    return best[1]


@dataclass
class PartitionReport:
    samples: int
    compared: int
    agreed: int
    band: float
    error_estimate: float
    k: int
    mismatches: list

    @property
    def agreement(self):
        return self.agreed / self.compared if self.compared else 1.0


def sample_surface(surface, n, seed=0):
    """``n`` points, uniform with respect to area.

    Each point picks a triangle by area, then is drawn uniformly from the
    smallest centroid-centered cap holding the triangle until it lands inside.
    """
    rng = np.random.default_rng(seed)
    areas = np.array(surface.areas)
    tris = rng.choice(surface.n_triangles, size=n, p=areas / areas.sum())
    out = []
    for t in tris:
        C = np.array(surface.charts[t])
        normals = np.cross(C, np.roll(C, -1, axis=0))
        m = C.sum(axis=0)
        m /= np.linalg.norm(m)
        cos_r = float(np.min(C @ m))
        u = np.cross(m, [1.0, 0.0, 0.0] if abs(m[0]) < 0.9 else [0.0, 1.0, 0.0])
        u /= np.linalg.norm(u)
        w = np.cross(m, u)
        while True:
            ct = rng.uniform(cos_r, 1.0)
            phi = rng.uniform(0.0, 2.0 * PI)
            st = math.sqrt(max(0.0, 1.0 - ct * ct))
            x = ct * m + st * (math.cos(phi) * u + math.sin(phi) * w)
            if np.all(normals @ x >= 0.0):
                break
        out.append(SurfacePoint(int(t), tuple(x)))
    return out


def nearest_site_partition_check(diagram, graph, samples=10000, seed=0, coarse=None, band_factor=10.0):
    """Agreement between dual-diagram cells and oracle nearest sites.

    Points whose two nearest oracle distances differ by no more than the band
    are left out. The band is ``band_factor`` times the oracle's measured
    error: the largest change in any sample's site distances between
    ``graph`` and the half-resolution graph ``coarse``.
    """
    from .oracle import build_graph, multi_source_distances, point_site_distances

    sur = diagram.surface
    if coarse is None:
        coarse = build_graph(sur, max(1, graph.k // 2))
    D, _, _ = multi_source_distances(graph)
    Dc, _, _ = multi_source_distances(coarse)
    pts = sample_surface(sur, samples, seed)
    fine = np.array([point_site_distances(graph, D, p) for p in pts])
    crude = np.array([point_site_distances(coarse, Dc, p) for p in pts])
    err = float(np.max(np.abs(crude - fine)))
    band = band_factor * err
    compared = agreed = 0
    mismatches = []
    for p, row in zip(pts, fine):
        if len(row) > 1:
            order = np.argsort(row, kind="stable")
            if row[order[1]] - row[order[0]] <= band:
                continue
            want = int(order[0])
        else:
            want = 0
        got = diagram_site(diagram, p)
        compared += 1
        if got == want:
            agreed += 1
        else:
            mismatches.append((p, got, want))
    return PartitionReport(len(pts), compared, agreed, band, err, graph.k, mismatches[:20])


def verify_diagram(diagram, samples=100):
    """Every per-cell report, the connectedness report and global checks."""
    sur = diagram.surface
    cells = [verify_cell(c, diagram, samples) for c in diagram.cells]
    conn = verify_edge_connectedness(diagram)
    area_gap = abs(sum(c.area for c in diagram.cells) - sur.total_area)
    cls_of = {t: n for n, g in enumerate(diagram.delaunay.cocircular_classes) for t in g}
    expected = sorted(h for h in sur.edges()
                      if cls_of[h // 3] != cls_of[sur.twin[h] // 3] or h // 3 == sur.twin[h] // 3)
    dual_ok = sorted(e.halfedge for e in diagram.edges) == expected and all(
        e.vertices == (cls_of[e.halfedge // 3], cls_of[sur.twin[e.halfedge] // 3])
        and set(e.sites) == {sur.corner_vertex[e.halfedge], sur.corner_vertex[sur.twin[e.halfedge]]}
        for e in diagram.edges
    )
    return {
        "cells": cells,
        "connectedness": conn,
        "area_gap": area_gap,
        "euler": diagram.euler_characteristic(),
        "surface_euler": sur.euler_characteristic,
        "dual_consistent": dual_ok,
    }
