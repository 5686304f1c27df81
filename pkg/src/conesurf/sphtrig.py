"""Spherical trigonometry on the unit sphere and the cap predicate.

All lengths and angles are radians. Unit vectors are plain ``(x, y, z)``
tuples; arrays are accepted wherever a sequence of three floats is.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _vec as V
from .errors import DegenerateError, DomainError

ACOS_SLACK = 1e-9
ON_BAND = 1e-12
DEGENERATE_DET = 1e-12


@dataclass(frozen=True)
class SphTriangleShape:
    """Side lengths of a spherical triangle; side ``a`` is opposite vertex 0."""

    a: float
    b: float
    c: float

    @classmethod
    def from_edges(cls, l01, l12, l20):
        """Build from edge lengths listed in vertex order (0-1, 1-2, 2-0)."""
        return cls(a=l12, b=l20, c=l01)

    def edges(self):
        """Edge lengths in vertex order (0-1, 1-2, 2-0)."""
        return (self.c, self.a, self.b)

    def sides(self):
        return (self.a, self.b, self.c)


class Cap(enum.Enum):
    INSIDE = "INSIDE"
    OUTSIDE = "OUTSIDE"
    ON = "ON"


def validate_sides(shape):
    """Return ``(ok, violations)``; every failed strict inequality is named."""
    a, b, c = shape.sides()
    bad = []
    for name, s in (("a", a), ("b", b), ("c", c)):
        if not math.isfinite(s):
            bad.append(f"{name} is finite")
        elif not 0.0 < s < math.pi:
            bad.append(f"0 < {name} < pi")
    if bad:
        return False, bad
    if not a < b + c:
        bad.append("a < b + c")
    if not b < a + c:
        bad.append("b < a + c")
    if not c < a + b:
        bad.append("c < a + b")
    if not a + b + c < 2.0 * math.pi:
        bad.append("a + b + c < 2pi")
    return not bad, bad


def _require_valid(shape):
    ok, bad = validate_sides(shape)
    if not ok:
        raise DomainError(f"invalid spherical triangle {shape}: " + ", ".join(bad))


def clamped_acos(x, slack=ACOS_SLACK):
    if x > 1.0 + slack or x < -1.0 - slack:
        raise DomainError(f"arccos argument {x!r} outside [-1, 1] beyond tolerance")
    return math.acos(min(1.0, max(-1.0, x)))


def angle_from_sides(shape, vertex):
    """Interior angle at ``vertex`` (0, 1 or 2) by the spherical law of cosines.

    The cosine is range-checked as-is; the returned value comes from the
    half-angle form, which keeps full precision for slivers and tiny triangles.
    """
    _require_valid(shape)
    sides = shape.sides()
    opp = sides[vertex]
    s1, s2 = sides[(vertex + 1) % 3], sides[(vertex + 2) % 3]
    cos_val = (math.cos(opp) - math.cos(s1) * math.cos(s2)) / (math.sin(s1) * math.sin(s2))
    clamped_acos(cos_val)
    s = 0.5 * (sides[0] + sides[1] + sides[2])
    num = math.sin(s - s1) * math.sin(s - s2)
    den = math.sin(s) * math.sin(s - opp)
    return 2.0 * math.atan2(math.sqrt(max(num, 0.0)), math.sqrt(max(den, 0.0)))


def triangle_angles(shape):
    return tuple(angle_from_sides(shape, i) for i in range(3))


def triangle_area(shape):
    """Spherical excess, via L'Huilier so that slivers do not cancel catastrophically."""
    _require_valid(shape)
    a, b, c = shape.sides()
    s = 0.5 * (a + b + c)
    prod = (
        math.tan(0.5 * s)
        * math.tan(0.5 * (s - a))
        * math.tan(0.5 * (s - b))
        * math.tan(0.5 * (s - c))
    )
    return 4.0 * math.atan(math.sqrt(max(prod, 0.0)))


def canonical_embed(shape):
    """Fixed chart of a triangle: vertex 0 at the north pole, vertex 1 in the
    x > 0 half of the xz great circle, vertex 2 in the y > 0 hemisphere."""
    _require_valid(shape)
    a, b, c = shape.sides()
    alpha = angle_from_sides(shape, 0)
    v0 = (0.0, 0.0, 1.0)
    v1 = (math.sin(c), 0.0, math.cos(c))
    v2 = (math.sin(b) * math.cos(alpha), math.sin(b) * math.sin(alpha), math.cos(b))
    return v0, V.normalize(v1), V.normalize(v2)


def circumdisk(p, q, r):
    """Circumcenter and angular radius of the cap through ``p, q, r``.

    The center is taken on the triangle's side, so the radius is below pi/2
    for any triangle that fits in an open hemisphere.
    """
    p, q, r = tuple(p), tuple(q), tuple(r)
    if abs(V.det(p, q, r)) <= DEGENERATE_DET:
        raise DegenerateError("points lie on a common great circle")
    n = V.cross(V.sub(q, p), V.sub(r, p))
    center = V.normalize(n)
    if V.dot(center, V.add(V.add(p, q), r)) < 0.0:
        center = V.neg(center)
    radius = (V.arc(center, p) + V.arc(center, q) + V.arc(center, r)) / 3.0
    return center, radius


def cap_determinant(p, q, r, s):
    """det[q - p, r - p, s - p] and the magnitude used to scale the ON band."""
    qp = (q[0] - p[0], q[1] - p[1], q[2] - p[2])
    rp = (r[0] - p[0], r[1] - p[1], r[2] - p[2])
    sp = (s[0] - p[0], s[1] - p[1], s[2] - p[2])
    d = V.det(qp, rp, sp)
    mag = V.norm(qp) * V.norm(rp) * V.norm(sp)
    return d, mag


def in_cap(p, q, r, s, band=ON_BAND):
    """Classify ``s`` against the circumcap of the positively oriented ``p, q, r``."""
    if V.det(p, q, r) <= DEGENERATE_DET:
        if abs(V.det(p, q, r)) <= DEGENERATE_DET:
            raise DegenerateError("degenerate cap base")
        raise DomainError("cap base must be positively oriented")
    d, mag = cap_determinant(p, q, r, s)
    if abs(d) <= band * mag:
        return Cap.ON
    return Cap.INSIDE if d > 0.0 else Cap.OUTSIDE


def in_cap_array(p, q, r, s, band=ON_BAND):
    """Vectorised :func:`in_cap` over ``(n, 3)`` arrays; returns +1, -1 or 0 per row."""
    p, q, r, s = (np.asarray(x, dtype=float) for x in (p, q, r, s))
    qp, rp, sp = q - p, r - p, s - p
    d = np.einsum("ij,ij->i", np.cross(qp, rp), sp)
    mag = np.linalg.norm(qp, axis=1) * np.linalg.norm(rp, axis=1) * np.linalg.norm(sp, axis=1)
    out = np.sign(d).astype(int)
    out[np.abs(d) <= band * mag] = 0
    return out
