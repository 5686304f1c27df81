"""SVG figures of Voronoi cells, drawn in the rolled chart around the site.

Points on the unit sphere are projected orthographically onto the tangent
plane at the site. Output is plain SVG 1.1 with fixed number formatting, so
identical input gives identical bytes.
"""

from __future__ import annotations

from . import _vec as V

SIZE = 400
ARC_STEPS = 24


def _fmt(x):
    s = "%.4f" % x
    return "0.0000" if s == "-0.0000" else s


class _Projector:
    def __init__(self, center, toward, extent):
        self.c = center
        self.e1 = V.tangent(center, toward)
        self.e2 = V.cross(center, self.e1)
        self.scale = 0.45 * SIZE / max(extent, 1e-9)

    def __call__(self, x):
        u, w = V.dot(x, self.e1), V.dot(x, self.e2)
        return SIZE / 2 + self.scale * u, SIZE / 2 - self.scale * w


def _arc_points(a, b, n=ARC_STEPS):
    return [V.lerp_unit(a, b, i / n) for i in range(n + 1)]


def _polyline(proj, pts):
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(proj, pts))


def svg_cell(cell, surface, title=None):
    """The cell boundary, its site, and the Delaunay triangles it was read from."""
    S = cell.site_image
    ring = list(cell.images) + [cell.closing_image]
    tris = []
    for c, R in cell.frames:
        t = c // 3
        tris.append([V.matvec(R, p) for p in surface.charts[t]])
    pts = ring + [p for tri in tris for p in tri]
    extent = max(V.norm(V.sub(p, V.scale(S, V.dot(p, S)))) for p in pts)
    proj = _Projector(S, ring[0] if V.arc(S, ring[0]) > 1e-12 else tris[0][1], extent)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{title or f'cell {cell.site}'}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
        '<g fill="none" stroke="#999999" stroke-width="0.8">',
    ]
    for tri in tris:
        pts = _arc_points(tri[0], tri[1]) + _arc_points(tri[1], tri[2])[1:] + _arc_points(tri[2], tri[0])[1:]
        out.append(f'<polygon points="{_polyline(proj, pts)}"/>')
    out.append("</g>")
    boundary = []
    for a, b in zip(ring, ring[1:]):
        boundary.extend(_arc_points(a, b)[:-1])
    out.append(f'<polygon points="{_polyline(proj, boundary)}" fill="#cfe3f5" fill-opacity="0.6" '
               'stroke="#1f4e79" stroke-width="1.6"/>')
    for p in cell.images:
        x, y = proj(p)
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5" fill="#1f4e79"/>')
    x, y = proj(S)
    out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="#b22222"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_diagram(diagram):
    """One document per cell, keyed by file name."""
    return {f"cell_{c.site:03d}.svg": svg_cell(c, diagram.surface) for c in diagram.cells}
