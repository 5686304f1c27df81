import itertools
import math

from conesurf import _vec as V
from conesurf import generators as G
from conesurf.surface import build_surface


def doubled_polygon(points):
    """Two copies of a fan-triangulated spherical polygon glued along its boundary."""
    n = len(points)
    top = [(0, i, i + 1) for i in range(1, n - 1)]
    bottom = [(a, c, b) for a, b, c in top]
    return G.sphere_surface(points, top + bottom)


def circle_points(n, z=0.5, phase=0.0, jitter=()):
    r = math.sqrt(1 - z * z)
    pts = []
    for i in range(n):
        a = phase + 2 * math.pi * i / n + (jitter[i] if i < len(jitter) else 0.0)
        pts.append((r * math.cos(a), r * math.sin(a), z))
    return pts


def _rotated(S, t, r):
    """Labels and lengths of triangle ``t`` read from corner ``r``."""
    labels = tuple(S.corner_vertex[3 * t + (r + i) % 3] for i in range(3))
    lengths = tuple(S.lengths[t][(r + i) % 3] for i in range(3))
    return labels, lengths


def same_up_to_relabelling(S1, S2, tol=1e-12, moved=None):
    """True when some triangle permutation and rotation carries S1 onto S2,
    preserving vertex labels, lengths (to ``tol``) and gluing. ``moved``
    restricts the search to the listed triangles; the rest map to themselves."""
    nt = S1.n_triangles
    if nt != S2.n_triangles or S1.n_vertices != S2.n_vertices:
        return False
    free = sorted(moved) if moved is not None else list(range(nt))
    for perm in itertools.permutations(free):
        for rots in itertools.product(range(3), repeat=len(free)):
            tmap = {t: (t, 0) for t in range(nt)}
            for t, t2, r in zip(free, perm, rots):
                tmap[t] = (t2, r)
            if _check(S1, S2, tmap, tol):
                return True
    return False


def _check(S1, S2, tmap, tol):
    hmap = {}
    for t, (t2, r) in tmap.items():
        l1 = _rotated(S1, t, 0)
        l2 = _rotated(S2, t2, r)
        if l1[0] != l2[0] or any(abs(a - b) > tol for a, b in zip(l1[1], l2[1])):
            return False
        for e in range(3):
            hmap[3 * t + e] = 3 * t2 + (r + e) % 3
    return all(hmap[S1.twin[h]] == S2.twin[hmap[h]] for h in hmap)


def reglue(S, lengths):
    return build_surface([tuple(x) for x in lengths], S.gluing())


def unit(v):
    return V.normalize(tuple(float(x) for x in v))


# acceptance criterion -> summary line, printed at the end of the session
ACCEPTANCE = {}
