"""Geodesics by isometric unfolding of triangle strips.

Every straight geodesic leaving a point ``p`` is enumerated as an angular
window ("lune") propagated through a strip of triangles unfolded into the
chart of ``p``. A window is clipped by each edge it crosses and dropped once
its nearest point is farther than the length cap. Lengths never exceed pi
here, so arcs in a chart are always minor arcs and unambiguous.

Shortest paths may bend at cone points; they are found as shortest paths in
the small graph whose nodes are the two endpoints and the vertices, weighted
by straight (window) distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _vec as V
from .errors import GeodesicError
from .surface import SurfacePoint

PI = math.pi
LUNE_TOL = 1e-12
LEN_TOL = 1e-9
VERTEX_HIT = 1e-10
MAX_DEPTH = 256

REACHED = "REACHED"
HIT_CONE_POINT = "HIT_CONE_POINT"
EXCEEDED_CAP = "EXCEEDED_CAP"


@dataclass(frozen=True)
class Crossing:
    halfedge: int
    t: float


@dataclass(frozen=True)
class GeodesicPath:
    """A broken geodesic: straight chart pieces, the edges crossed, and the
    cone points (``via``) at which it bends."""

    start: SurfacePoint
    end: SurfacePoint
    length: float
    crossings: tuple = ()
    pieces: tuple = ()  # (triangle, a, b): chart arc from a to b
    status: str = REACHED
    via: tuple = ()

    def piece_length(self):
        return math.fsum(V.arc(a, b) for _, a, b in self.pieces)


def _reverse(path, surface):
    return GeodesicPath(
        start=path.end,
        end=path.start,
        length=path.length,
        crossings=tuple(Crossing(surface.twin[c.halfedge], 1.0 - c.t) for c in reversed(path.crossings)),
        pieces=tuple((t, b, a) for t, a, b in reversed(path.pieces)),
        status=path.status,
        via=tuple(reversed(path.via)),
    )


def _concat(paths):
    first, last = paths[0], paths[-1]
    via = []
    for i, pth in enumerate(paths):
        via.extend(pth.via)
        if i < len(paths) - 1:
            via.append(("vertex", pth.end))
    return GeodesicPath(
        start=first.start,
        end=last.end,
        length=math.fsum(p.length for p in paths),
        crossings=tuple(c for p in paths for c in p.crossings),
        pieces=tuple(pc for p in paths for pc in p.pieces),
        status=REACHED,
        via=tuple(via),
    )


# ---------------------------------------------------------------------------
# strips


class _Strip:
    __slots__ = ("tri", "R", "a", "b", "parent", "entry", "depth", "dmin")

    def __init__(self, tri, R, a, b, parent, entry, depth, dmin=0.0):
        self.tri = tri
        self.R = R
        self.a = a
        self.b = b
        self.parent = parent
        self.entry = entry  # half-edge of ``tri`` the strip came in through
        self.depth = depth
        self.dmin = dmin

    def chain(self):
        out = []
        s = self
        while s is not None:
            out.append(s)
            s = s.parent
        out.reverse()
        return out


def _start_frames(surface, p):
    """``(triangle, rotation into the common chart, window edges)`` for every
    triangle incident to ``p``, plus the image of ``p`` in the common chart."""
    kind, ref = surface.classify(p)
    if kind == "face":
        return p.position, [(p.triangle, V.MAT_ID, (0, 1, 2))]
    if kind == "edge":
        h = ref
        t, e = divmod(h, 3)
        h2 = surface.twin[h]
        t2, e2 = divmod(h2, 3)
        frames = [
            (t, V.MAT_ID, tuple(f for f in range(3) if f != e)),
            (t2, surface.unfold[h], tuple(f for f in range(3) if f != e2)),
        ]
        return p.position, frames
    c0 = ref
    t0, i0 = divmod(c0, 3)
    frames = []
    R = V.MAT_ID
    c = c0
    deg = len(surface.vertex_corners[surface.corner_vertex[c0]])
    for _ in range(deg):
        t, i = divmod(c, 3)
        frames.append((t, R, ((i + 1) % 3,)))
        h = surface.prev(c)
        R = V.matmul(R, surface.unfold[h])
        c = surface.twin[h]
    return surface.charts[t0][i0], frames


def _clip(p0, a, b, u, w):
    """Part of arc ``u -> w`` inside the lune spanned from ``p0`` by ``a`` and ``b``."""
    lo, hi = 0.0, 1.0
    if a is not None:
        for fu, fw in (
            (V.det(p0, a, u), V.det(p0, a, w)),
            (V.det(p0, u, b), V.det(p0, w, b)),
        ):
            if fu < -LUNE_TOL and fw < -LUNE_TOL:
                return None
            if fu < -LUNE_TOL:
                lo = max(lo, fu / (fu - fw))
            elif fw < -LUNE_TOL:
                hi = min(hi, fu / (fu - fw))
        if hi < lo:
            return None
    x0 = u if lo == 0.0 else V.normalize(V.add(V.scale(u, 1.0 - lo), V.scale(w, lo)))
    x1 = w if hi == 1.0 else V.normalize(V.add(V.scale(u, 1.0 - hi), V.scale(w, hi)))
    return x0, x1


def point_arc_distance(p, u, w):
    """Distance from ``p`` to the minor arc ``u -> w``."""
    n = V.cross(u, w)
    nn = V.norm(n)
    if nn > 1e-15:
        n = V.scale(n, 1.0 / nn)
        foot = V.sub(p, V.scale(n, V.dot(p, n)))
        fn = V.norm(foot)
        if fn > 1e-15:
            foot = V.scale(foot, 1.0 / fn)
            if V.dot(V.cross(u, foot), n) >= 0.0 and V.dot(V.cross(foot, w), n) >= 0.0:
                return V.arc(p, foot)
    return min(V.arc(p, u), V.arc(p, w))


class StripSet:
    """All straight geodesics of length at most ``cap`` leaving ``p``."""

    def __init__(self, surface, p, cap):
        self.surface = surface
        self.p = p
        self.cap = cap
        p0, frames = _start_frames(surface, p)
        self.p0 = p0
        self.source_vertex = surface.vertex_at(p)
        self._vreach = None
        self.truncated = False
        strips = []
        stack = []
        for t, R, windows in frames:
            s = _Strip(t, R, None, None, None, None, 0)
            strips.append(s)
            stack.extend((s, f) for f in reversed(windows))
        ch = surface.charts
        twin = surface.twin
        unfold = surface.unfold
        while stack:
            s, f = stack.pop()
            if s.depth >= MAX_DEPTH:
                self.truncated = True
                continue
            tri = s.tri
            cf = ch[tri]
            u = V.matvec(s.R, cf[f])
            w = V.matvec(s.R, cf[(f + 1) % 3])
            seg = _clip(p0, s.a, s.b, u, w)
            if seg is None:
                continue
            x0, x1 = seg
            d = V.det(p0, x0, x1)
            if abs(d) < 1e-15:
                continue
            if d < 0.0:
                x0, x1 = x1, x0
            dmin = point_arc_distance(p0, x0, x1)
            if dmin > cap + LEN_TOL:
                continue
            h = 3 * tri + f
            h2 = twin[h]
            nt = h2 // 3
            child = _Strip(nt, V.matmul(s.R, unfold[h]), x0, x1, s, h2, s.depth + 1, dmin)
            strips.append(child)
            e2 = h2 % 3
            stack.append((child, (e2 + 2) % 3))
            stack.append((child, (e2 + 1) % 3))
        self.strips = strips
        self.by_tri = {}
        for s in strips:
            self.by_tri.setdefault(s.tri, []).append(s)

    # visibility -----------------------------------------------------------

    def visible(self, s, y):
        if s.a is None:
            return True
        p0 = self.p0
        return V.det(p0, s.a, y) >= -LUNE_TOL and V.det(p0, y, s.b) >= -LUNE_TOL

    def reach(self, reps, cap=None):
        """Shortest straight reach of any representation ``(t, x)``: ``(length, strip, image)``."""
        cap = self.cap if cap is None else cap
        best = None
        for t, x in reps:
            for s in self.by_tri.get(t, ()):
                y = V.matvec(s.R, x)
                if not self.visible(s, y):
                    continue
                d = V.arc(self.p0, y)
                if d <= cap + LEN_TOL and (best is None or d < best[0]):
                    best = (d, s, y)
        return best

    def vertex_reach(self):
        """Straight distance to each vertex that is visible within the cap."""
        if self._vreach is not None:
            return self._vreach
        out = {}
        sur = self.surface
        ch = sur.charts
        for s in self.strips:
            for i in range(3):
                v = sur.corner_vertex[3 * s.tri + i]
                y = V.matvec(s.R, ch[s.tri][i])
                if not self.visible(s, y):
                    continue
                d = V.arc(self.p0, y)
                if d > self.cap + LEN_TOL:
                    continue
                if v == self.source_vertex and d < VERTEX_HIT:
                    continue
                if v not in out or d < out[v][0]:
                    out[v] = (d, s, y)
        if self.source_vertex is not None:
            out[self.source_vertex] = (0.0, None, self.p0)
        self._vreach = out
        return out

    # path reconstruction ----------------------------------------------------

    def path_to(self, s, y, end):
        """Geodesic from ``p`` to the image ``y`` reached through strip ``s``."""
        sur = self.surface
        p0 = self.p0
        chain = s.chain() if s is not None else []
        crossings = []
        pieces = []
        cur = p0
        for parent, child in zip(chain, chain[1:]):
            h = sur.twin[child.entry]
            t, e = divmod(h, 3)
            cf = sur.charts[t]
            u = V.matvec(parent.R, cf[e])
            w = V.matvec(parent.R, cf[(e + 1) % 3])
            X = _intersect(p0, y, u, w)
            ln = V.arc(u, w)
            crossings.append(Crossing(h, V.arc(u, X) / ln if ln > 0 else 0.0))
            pieces.append((parent.tri, V.tmatvec(parent.R, cur), V.tmatvec(parent.R, X)))
            cur = X
        if chain:
            last = chain[-1]
            pieces.append((last.tri, V.tmatvec(last.R, cur), V.tmatvec(last.R, y)))
        return GeodesicPath(self.p, end, V.arc(p0, y), tuple(crossings), tuple(pieces), REACHED)


def _intersect(p0, y, u, w):
    """Crossing of the arc ``p0 -> y`` with the great circle through ``u, w``."""
    n1 = V.cross(p0, y)
    n2 = V.cross(u, w)
    X = V.cross(n1, n2)
    nx = V.norm(X)
    if nx < 1e-300:
        return u
    X = V.scale(X, 1.0 / nx)
    mid = V.add(p0, y)
    if V.dot(X, mid) < 0.0:
        X = V.neg(X)
    return X


# ---------------------------------------------------------------------------
# vertex-to-vertex table


def _vertex_table(surface, cap=PI):
    """All-pairs vertex distances (straight legs joined at vertices), the
    successor matrix and the per-vertex strip sets; cached on the surface."""
    cache = surface.__dict__.setdefault("_geodesic_cache", {})
    key = ("vtable", cap)
    if key in cache:
        return cache[key]
    n = surface.n_vertices
    D = np.full((n, n), np.inf)
    nxt = np.full((n, n), -1, dtype=int)
    direct = {}
    sets = []
    for v in range(n):
        ss = StripSet(surface, surface.vertex_point(v), cap)
        sets.append(ss)
        for w, (d, s, y) in ss.vertex_reach().items():
            if w == v:
                continue
            if d < D[v, w]:
                D[v, w] = d
                nxt[v, w] = w
                direct[(v, w)] = (ss, s, y)
        D[v, v] = 0.0
        nxt[v, v] = v
    for k in range(n):
        for i in range(n):
            dik = D[i, k]
            if not np.isfinite(dik):
                continue
            for j in range(n):
                nd = dik + D[k, j]
                if nd < D[i, j] - 1e-15:
                    D[i, j] = nd
                    nxt[i, j] = nxt[i, k]
    out = (D, nxt, direct, sets)
    cache[key] = out
    return out


def distance_from(sp, q, cap=None):
    """Length of the shortest path from the source of strip set ``sp`` to ``q``
    (at most ``cap``), or ``inf``. Cheaper than :func:`distance_within` when
    many targets share one source."""
    surface = sp.surface
    cap = sp.cap if cap is None else cap
    reps = surface.representations(q)
    best = sp.reach(reps, cap)
    out = best[0] if best is not None else math.inf
    D, _, _, sets = _vertex_table(surface, PI)
    dp = sp.vertex_reach()
    for w in range(surface.n_vertices):
        head = min((dv + D[v, w] for v, (dv, _, _) in dp.items()), default=math.inf)
        if head >= min(out, cap + LEN_TOL):
            continue
        tail = sets[w].reach(reps, cap)
        if tail is not None:
            out = min(out, head + tail[0])
    return float(out) if out <= cap + LEN_TOL else math.inf


def _vertex_chain(nxt, v, w):
    seq = [v]
    while v != w:
        v = int(nxt[v, w])
        seq.append(v)
    return seq


def same_point(surface, p, q, tol=1e-12):
    for t, x in surface.representations(q):
        if t == p.triangle and V.arc(x, p.position) <= tol:
            return True
    return False


def distance_within(surface, p, q, cap=PI):
    """Shortest path from ``p`` to ``q`` if its length is at most ``cap``.

    Returns ``(length, GeodesicPath)`` or ``None``. ``cap`` may not exceed pi.
    """
    if cap > PI + 1e-6:
        raise ValueError("distance queries are capped at pi")
    if same_point(surface, p, q):
        return 0.0, GeodesicPath(p, q, 0.0)
    sp = StripSet(surface, p, cap)
    best = sp.reach(surface.representations(q), cap)
    result = None
    if best is not None:
        result = (best[0], ("direct", best))
    sq = StripSet(surface, q, cap)
    dp = sp.vertex_reach()
    dq = sq.vertex_reach()
    D, nxt, direct, _ = _vertex_table(surface, PI)
    for v, (dv, _, _) in dp.items():
        for w, (dw, _, _) in dq.items():
            tot = dv + D[v, w] + dw
            if tot <= cap + LEN_TOL and (result is None or tot < result[0] - 1e-13):
                result = (tot, ("via", v, w))
    if result is None:
        return None
    length, how = result
    length = float(length)
    if how[0] == "direct":
        _, s, y = how[1]
        return length, sp.path_to(s, y, q)
    _, v, w = how
    legs = []
    chain = _vertex_chain(nxt, v, w)
    dv, s, y = dp[v]
    if s is not None or dv > 0:
        legs.append(sp.path_to(s, y, surface.vertex_point(v)))
    for a, b in zip(chain, chain[1:]):
        ss, s2, y2 = direct[(a, b)]
        legs.append(ss.path_to(s2, y2, surface.vertex_point(b)))
    dw, s3, y3 = dq[w]
    if s3 is not None or dw > 0:
        legs.append(_reverse(sq.path_to(s3, y3, surface.vertex_point(w)), surface))
    if not legs:
        return length, GeodesicPath(p, q, 0.0)
    path = _concat(legs)
    path = GeodesicPath(p, q, length, path.crossings, path.pieces, REACHED,
                        tuple(surface.vertex_at(pt) for _, pt in path.via))
    return length, path


def vertex_distances(surface, p, cap=PI):
    """Distance from ``p`` to every vertex within ``cap`` (bending paths included)."""
    sp = StripSet(surface, p, cap)
    dp = sp.vertex_reach()
    D = _vertex_table(surface, PI)[0]
    out = {}
    for v, (dv, _, _) in dp.items():
        for w in range(surface.n_vertices):
            tot = dv + D[v, w]
            if tot <= cap + LEN_TOL and (w not in out or tot < out[w]):
                out[w] = float(tot)
    return out


# ---------------------------------------------------------------------------
# tracing


def _tangent_frame(surface, t, x):
    ch = surface.charts[t]
    for v in ch:
        if V.arc(v, x) > 1e-9:
            e1 = V.tangent(x, v)
            return e1, V.cross(x, e1)
    raise GeodesicError("degenerate chart", code="DEGENERATE")


def _corner_direction(surface, c, theta):
    t, i = divmod(c, 3)
    ch = surface.charts[t]
    x = ch[i]
    e1 = V.tangent(x, ch[(i + 1) % 3])
    e2 = V.cross(x, e1)
    return V.add(V.scale(e1, math.cos(theta)), V.scale(e2, math.sin(theta)))


def _walk_corners(surface, c, theta):
    """Corner around the vertex of ``c`` containing the ray at angle ``theta``
    (counterclockwise from the first edge of ``c``), and the angle within it."""
    v = surface.corner_vertex[c]
    total = surface.cone_angles[v]
    theta = theta % total
    for _ in range(len(surface.vertex_corners[v]) + 1):
        a = surface.angles[c]
        if theta <= a + 1e-15:
            return c, min(theta, a)
        theta -= a
        c = surface.ccw_corner(c)
    return c, 0.0


def _corner_angle_of(surface, c, d):
    """Angle of tangent direction ``d`` at the vertex of corner ``c`` from its first edge."""
    t, i = divmod(c, 3)
    ch = surface.charts[t]
    x = ch[i]
    e1 = V.tangent(x, ch[(i + 1) % 3])
    e2 = V.cross(x, e1)
    ang = math.atan2(V.dot(d, e2), V.dot(d, e1))
    if ang < -1e-12:
        ang += 2 * PI
    return max(ang, 0.0)


def trace(surface, start, direction, cap, length=None):
    """Follow the geodesic from ``start`` at angle ``direction``.

    For a start point inside a triangle or on an edge, ``direction`` is measured
    counterclockwise from the tangent toward the first chart vertex distinct from
    the point. At a vertex it is measured counterclockwise from the first edge of
    the given corner and may run over the full cone angle. The path goes
    straight through smooth vertices and stops at cone points.
    """
    if cap > PI + 1e-6:
        raise ValueError("trace cap must not exceed pi")
    target = cap if length is None else min(length, cap)
    status_end = EXCEEDED_CAP if length is not None and length > cap else REACHED
    if target <= 0.0:
        return GeodesicPath(start, start, 0.0, status=REACHED)

    kind, ref = surface.classify(start)
    if kind == "vertex":
        c, th = _walk_corners(surface, ref, direction)
        t = c // 3
        x = surface.corner_image(c)
        d = _corner_direction(surface, c, th)
    else:
        t = start.triangle
        x = start.position
        e1, e2 = _tangent_frame(surface, t, x)
        d = V.add(V.scale(e1, math.cos(direction)), V.scale(e2, math.sin(direction)))

    remaining = target
    crossings = []
    pieces = []
    guard = 0
    while True:
        guard += 1
        if guard > 100000:
            raise GeodesicError("trace did not terminate", code="TRACE_LOOP")
        ch = surface.charts[t]
        best_s, best_f = None, None
        for f in range(3):
            a, b = ch[f], ch[(f + 1) % 3]
            n = V.cross(a, b)
            nd = V.dot(n, d)
            nx = V.dot(n, x)
            tiny = 1e-15 * V.norm(n)
            if nx <= tiny and nd >= -tiny:
                continue  # on this edge and not leaving through it
            # big triangles: the exit may come after the ray has turned back
            # toward this edge's circle, so nd > 0 is not excluded
            s = math.atan2(max(nx, 0.0), -nd)
            if best_s is None or s < best_s:
                best_s, best_f = s, f
        if best_s is None or best_s >= remaining:
            y = V.add(V.scale(x, math.cos(remaining)), V.scale(d, math.sin(remaining)))
            y = V.normalize(y)
            pieces.append((t, x, y))
            return GeodesicPath(start, SurfacePoint(t, y), target, tuple(crossings), tuple(pieces), status_end)
        s = best_s
        X = V.normalize(V.add(V.scale(x, math.cos(s)), V.scale(d, math.sin(s))))
        dX = V.normalize(V.sub(V.scale(d, math.cos(s)), V.scale(x, math.sin(s))))
        pieces.append((t, x, X))
        remaining -= s
        f = best_f
        hit = None
        for i in (f, (f + 1) % 3):
            if V.arc(ch[i], X) <= VERTEX_HIT:
                hit = 3 * t + i
        if hit is not None:
            v = surface.corner_vertex[hit]
            if not surface.is_smooth(v):
                end = SurfacePoint(t, ch[hit % 3])
                length_done = target - remaining
                return GeodesicPath(start, end, length_done, tuple(crossings), tuple(pieces), HIT_CONE_POINT)
            back = _corner_angle_of(surface, hit, V.neg(dX))
            c, th = _walk_corners(surface, hit, back + PI)
            t = c // 3
            x = surface.corner_image(c)
            d = _corner_direction(surface, c, th)
            continue
        h = 3 * t + f
        ln = surface.lengths[t][f]
        crossings.append(Crossing(h, V.arc(ch[f], X) / ln))
        R = surface.unfold[h]
        t = surface.twin[h] // 3
        x = V.normalize(V.tmatvec(R, X))
        d = V.tmatvec(R, dX)
        d = V.normalize(V.sub(d, V.scale(x, V.dot(d, x))))


# ---------------------------------------------------------------------------
# two-path loops


@dataclass(frozen=True)
class LoopWitness:
    """Two distinct minimizing geodesics from ``base`` to ``far`` of common
    length ``half_length``; together they form a loop of twice that length."""

    base: SurfacePoint
    far: SurfacePoint
    half_length: float
    paths: tuple

    @property
    def length(self):
        return 2.0 * self.half_length

    def loop(self, surface):
        g1, g2 = self.paths
        return _concat([g1, _reverse(g2, surface)])


@dataclass(frozen=True)
class LoopEstimate:
    length: float | None
    witness: LoopWitness | None
    samples: int
    cap: float
    truncated: int = 0

    @property
    def status(self):
        return "NO_VIOLATION_FOUND" if self.witness is None else "VIOLATION"


def incenter(surface, t):
    v = surface.charts[t]
    a, b, c = surface.shapes[t].sides()
    w = V.add(V.add(V.scale(v[0], math.sin(a)), V.scale(v[1], math.sin(b))), V.scale(v[2], math.sin(c)))
    return SurfacePoint(t, V.normalize(w))


def sample_basepoints(surface, n, seed=0):
    """First ``n`` points of a fixed sequence: edge midpoints, triangle
    incenters, then area-weighted Halton points. Any prefix of a longer run is
    the shorter run, so raising ``n`` only adds points."""
    from scipy.stats import qmc

    out = [surface.edge_point(h, 0.5) for h in surface.edges()]
    out.extend(incenter(surface, t) for t in range(surface.n_triangles))
    if len(out) >= n:
        return out[:n]
    need = n - len(out)
    u = qmc.Halton(d=3, scramble=True, seed=seed).random(need)
    cum = np.cumsum(surface.areas)
    cum /= cum[-1]
    for u0, u1, u2 in u:
        t = min(int(np.searchsorted(cum, u0, side="right")), surface.n_triangles - 1)
        r = math.sqrt(u1)
        w = (1.0 - r, r * (1.0 - u2), r * u2)
        ch = surface.charts[t]
        x = tuple(sum(w[i] * ch[i][k] for i in range(3)) for k in range(3))
        out.append(SurfacePoint(t, V.normalize(x)))
    return out


def _constraints(surface, ss, s, P):
    ch = surface.charts[s.tri]
    cons = [V.cross(ch[f], ch[(f + 1) % 3]) for f in range(3)]
    if s.a is not None:
        A = V.tmatvec(s.R, s.a)
        B = V.tmatvec(s.R, s.b)
        cons.append(V.cross(P, A))
        cons.append(V.cross(B, P))
    return cons


def _feasible(cons, x, tol=LUNE_TOL):
    return all(V.dot(c, x) >= -tol for c in cons)


def _bisector_point(surface, ss, s1, s2):
    """Point ``x`` of the shared triangle nearest to both images of the source
    with ``x`` equidistant from them and reached straight through both strips."""
    P1 = V.tmatvec(s1.R, ss.p0)
    P2 = V.tmatvec(s2.R, ss.p0)
    cons = [V.normalize(c) for c in _constraints(surface, ss, s1, P1) + _constraints(surface, ss, s2, P2)
            if V.norm(c) > 1e-15]
    diff = V.sub(P1, P2)
    if V.norm(diff) < 1e-9:
        x = V.neg(P1)
        return (PI, x) if _feasible(cons, x) else None
    nb = V.normalize(diff)
    m = V.add(P1, P2)
    if V.norm(m) > 1e-12:
        e1 = V.normalize(m)
    else:
        axis = (1.0, 0.0, 0.0) if abs(nb[0]) < 0.9 else (0.0, 1.0, 0.0)
        e1 = V.normalize(V.cross(nb, axis))
    e2 = V.cross(nb, e1)
    thetas = [0.0, PI]
    for c in cons:
        ca, cb = V.dot(c, e1), V.dot(c, e2)
        if math.hypot(ca, cb) < 1e-15:
            continue
        z = math.atan2(-ca, cb)
        thetas.extend((z, z - PI if z > 0 else z + PI))
    best = None
    for th in thetas:
        x = V.add(V.scale(e1, math.cos(th)), V.scale(e2, math.sin(th)))
        if not _feasible(cons, x):
            continue
        L = V.arc(P1, x)
        if best is None or L < best[0]:
            best = (L, x)
    return best


def based_loops(surface, p, half_cap=PI, bound=None):
    """Shortest two-path witness based at ``p`` with half-length at most
    ``half_cap`` (and below ``bound`` when given), or ``None``."""
    return _based_loops(surface, p, half_cap, bound)[0]


def _based_loops(surface, p, half_cap, bound):
    ss = StripSet(surface, p, min(half_cap, PI))
    limit = half_cap + LEN_TOL if bound is None else min(bound, half_cap + LEN_TOL)
    cands = []
    for t, strips in ss.by_tri.items():
        k = len(strips)
        for i in range(k):
            s1 = strips[i]
            for j in range(i + 1, k):
                s2 = strips[j]
                if max(s1.dmin, s2.dmin) > limit:
                    continue
                hit = _bisector_point(surface, ss, s1, s2)
                if hit is None or hit[0] > limit:
                    continue
                cands.append((hit[0], t, hit[1], s1, s2))
    cands.sort(key=lambda c: c[0])
    for L, t, x, s1, s2 in cands:
        if L > limit:
            break
        y1 = V.matvec(s1.R, x)
        y2 = V.matvec(s2.R, x)
        if V.arc(y1, y2) <= 1e-9 and abs(L - PI) > 1e-9:
            continue
        xp = SurfacePoint(t, x)
        d = distance_from(ss, xp, min(L, PI))
        if d < L - LEN_TOL:
            continue
        g1 = ss.path_to(s1, y1, xp)
        g2 = ss.path_to(s2, y2, xp)
        return LoopWitness(p, xp, float(L), (g1, g2)), ss.truncated
    return None, ss.truncated


def shortest_loop_estimate(surface, cap=2.0 * PI, samples=1000, seed=0):
    """Shortest loop made of two minimizing geodesics of equal length found from
    the first ``samples`` basepoints, with length at most ``cap``.

    A witness certifies a loop of the reported length; its absence means only
    that none exists through the sample set."""
    pts = sample_basepoints(surface, samples, seed)
    best = None
    truncated = 0
    for p in pts:
        bound = None if best is None else best.half_length - 1e-12
        w, cut = _based_loops(surface, p, 0.5 * cap, bound)
        truncated += bool(cut)
        if w is not None and (best is None or w.half_length < best.half_length):
            best = w
    return LoopEstimate(None if best is None else best.length, best, len(pts), cap, truncated)


def direction_angle(surface, p, d):
    """Angle of tangent vector ``d`` at ``p`` in the convention of :func:`trace`."""
    e1, e2 = _tangent_frame(surface, p.triangle, p.position)
    return math.atan2(V.dot(d, e2), V.dot(d, e1))


def locate(surface, t, y):
    """Surface point whose image in the chart of ``t`` is ``y``, found by
    walking straight from the centroid of ``t`` (``y`` may lie outside ``t``)."""
    y = V.normalize(tuple(y))
    if surface.contains(t, y, 0.0):
        return SurfacePoint(t, y)
    c = surface.centroid(t)
    dist = V.arc(c.position, y)
    ang = direction_angle(surface, c, V.tangent(c.position, y))
    g = trace(surface, c, ang, min(dist, PI), dist)
    return g.end
