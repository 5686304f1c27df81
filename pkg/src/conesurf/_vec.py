"""Small fixed-size vector helpers on plain float tuples.

numpy carries too much per-call overhead for the 3-vectors handled in the
inner loops of strip propagation, so these work on tuples directly.
"""

from __future__ import annotations

import math

Vec = tuple  # (x, y, z)
Mat = tuple  # row-major 3x3, nine floats


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def scale(a, s):
    return (a[0] * s, a[1] * s, a[2] * s)


def neg(a):
    return (-a[0], -a[1], -a[2])


def norm(a):
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def normalize(a):
    n = norm(a)
    if n == 0.0:
        raise ZeroDivisionError("cannot normalize the zero vector")
    return (a[0] / n, a[1] / n, a[2] / n)


def det(a, b, c):
    """Scalar triple product a . (b x c)."""
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        + a[1] * (b[2] * c[0] - b[0] * c[2])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def arc(a, b):
    """Great-circle distance between unit vectors, accurate at both ends."""
    c = cross(a, b)
    return math.atan2(norm(c), dot(a, b))


def lerp_unit(a, b, s):
    """Point at parameter ``s`` on the minor arc from ``a`` to ``b`` (by angle)."""
    theta = arc(a, b)
    if theta < 1e-15:
        return a
    sa = math.sin((1.0 - s) * theta) / math.sin(theta)
    sb = math.sin(s * theta) / math.sin(theta)
    return normalize((a[0] * sa + b[0] * sb, a[1] * sa + b[1] * sb, a[2] * sa + b[2] * sb))


def tangent(x, y):
    """Unit tangent at ``x`` pointing along the great circle toward ``y``."""
    t = sub(y, scale(x, dot(x, y)))
    return normalize(t)


MAT_ID: Mat = (1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)


def matvec(m, v):
    return (
        m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
        m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
        m[6] * v[0] + m[7] * v[1] + m[8] * v[2],
    )


def tmatvec(m, v):
    """Apply the transpose (the inverse, for rotations)."""
    return (
        m[0] * v[0] + m[3] * v[1] + m[6] * v[2],
        m[1] * v[0] + m[4] * v[1] + m[7] * v[2],
        m[2] * v[0] + m[5] * v[1] + m[8] * v[2],
    )


def matmul(a, b):
    return (
        a[0] * b[0] + a[1] * b[3] + a[2] * b[6],
        a[0] * b[1] + a[1] * b[4] + a[2] * b[7],
        a[0] * b[2] + a[1] * b[5] + a[2] * b[8],
        a[3] * b[0] + a[4] * b[3] + a[5] * b[6],
        a[3] * b[1] + a[4] * b[4] + a[5] * b[7],
        a[3] * b[2] + a[4] * b[5] + a[5] * b[8],
        a[6] * b[0] + a[7] * b[3] + a[8] * b[6],
        a[6] * b[1] + a[7] * b[4] + a[8] * b[7],
        a[6] * b[2] + a[7] * b[5] + a[8] * b[8],
    )


def transpose(m):
    return (m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8])


def frame(a, b):
    """Rotation whose columns are an orthonormal frame built from ``a`` toward ``b``."""
    u = tangent(a, b)
    w = cross(a, u)
    return (a[0], u[0], w[0], a[1], u[1], w[1], a[2], u[2], w[2])


def rotation_between(a, b, a2, b2):
    """Rotation taking ``a`` to ``a2`` and the direction of ``b`` at ``a`` to that of ``b2`` at ``a2``."""
    return matmul(frame(a2, b2), transpose(frame(a, b)))
