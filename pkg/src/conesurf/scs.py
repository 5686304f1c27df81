"""Reading and writing the ``.scs`` text format.

A document looks like::

    scs 1
    triangles 2
    T 0 2.0 1.5 2.0
    T 1 2.0 1.5 2.0
    gluing 3
    G 0 0 1 2
    ...

Lengths are in radians. Edge ``e`` of a triangle joins its local vertices
``e`` and ``e + 1 mod 3``. ``#`` starts a comment; blank lines are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ScsParseError
from .surface import build_surface

VERSION = 1


@dataclass(frozen=True)
class ScsDocument:
    lengths: tuple  # per triangle (l01, l12, l20)
    gluing: tuple  # ((t, e), (t2, e2)) pairs in file order

    def build(self, **kwargs):
        return build_surface(self.lengths, self.gluing, **kwargs)


def _lines(text):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line.split()


def _int(tok, n, what):
    try:
        return int(tok)
    except ValueError:
        raise ScsParseError(f"{what} must be an integer, got {tok!r}", line=n) from None


def _length(tok, n):
    try:
        x = float(tok)
    except ValueError:
        raise ScsParseError(f"length must be a number, got {tok!r}", line=n) from None
    if not (0.0 < x < math.pi) or math.isnan(x):
        raise ScsParseError(f"length {tok} outside (0, pi)", line=n, code="SCS_LENGTH")
    return x


def _expect(it, keyword, last):
    try:
        n, toks = next(it)
    except StopIteration:
        raise ScsParseError(f"unexpected end of file, expected '{keyword}'", line=last + 1) from None
    if toks[0] != keyword:
        raise ScsParseError(f"expected '{keyword}', got {toks[0]!r}", line=n)
    return n, toks


def parse_scs(text):
    """Parse a document into an :class:`ScsDocument`.

    Raises :class:`ScsParseError` at the first problem, with its line number.
    """
    it = _lines(text)
    n, toks = _expect(it, "scs", 0)
    if len(toks) != 2:
        raise ScsParseError("header must read 'scs <version>'", line=n)
    if toks[1] != str(VERSION):
        raise ScsParseError(f"unsupported version {toks[1]!r}", line=n, code="SCS_VERSION")

    n, toks = _expect(it, "triangles", n)
    if len(toks) != 2:
        raise ScsParseError("expected 'triangles <N>'", line=n)
    nt = _int(toks[1], n, "triangle count")
    if nt < 1:
        raise ScsParseError("triangle count must be positive", line=n)
    lengths = [None] * nt
    for _ in range(nt):
        n, toks = _expect(it, "T", n)
        if len(toks) != 5:
            raise ScsParseError("expected 'T <id> <l01> <l12> <l20>'", line=n)
        t = _int(toks[1], n, "triangle id")
        if not 0 <= t < nt:
            raise ScsParseError(f"triangle id {t} outside 0..{nt - 1}", line=n)
        if lengths[t] is not None:
            raise ScsParseError(f"triangle {t} defined twice", line=n, code="SCS_DUPLICATE")
        lengths[t] = tuple(_length(x, n) for x in toks[2:])

    n, toks = _expect(it, "gluing", n)
    if len(toks) != 2:
        raise ScsParseError("expected 'gluing <M>'", line=n)
    m = _int(toks[1], n, "gluing count")
    used = set()
    gluing = []
    for _ in range(m):
        n, toks = _expect(it, "G", n)
        if len(toks) != 5:
            raise ScsParseError("expected 'G <t> <e> <t2> <e2>'", line=n)
        t, e, t2, e2 = (_int(x, n, "gluing entry") for x in toks[1:])
        for tt, ee in ((t, e), (t2, e2)):
            if not 0 <= tt < nt:
                raise ScsParseError(f"triangle {tt} does not exist", line=n)
            if ee not in (0, 1, 2):
                raise ScsParseError(f"edge index {ee} not in {{0, 1, 2}}", line=n)
        if (t, e) == (t2, e2):
            raise ScsParseError("a half-edge cannot twin itself", line=n, code="SCS_SELF_GLUE")
        for h in ((t, e), (t2, e2)):
            if h in used:
                raise ScsParseError(f"half-edge {h} glued twice", line=n, code="SCS_DUPLICATE")
            used.add(h)
        gluing.append(((t, e), (t2, e2)))
    extra = next(it, None)
    if extra is not None:
        raise ScsParseError(f"unexpected content {extra[1][0]!r} after gluing", line=extra[0])
    missing = [t for t, ls in enumerate(lengths) if ls is None]
    if missing:
        raise ScsParseError(f"triangles {missing} never defined", line=n)
    return ScsDocument(tuple(lengths), tuple(gluing))


def read_scs(path, **kwargs):
    """Parse and build the surface stored at ``path``."""
    with open(path, encoding="utf-8") as fh:
        return parse_scs(fh.read()).build(**kwargs)


def serialize_scs(surface, comment=None):
    """Text of ``surface``; lengths use ``repr`` so they round-trip exactly."""
    out = []
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    out.append(f"scs {VERSION}")
    out.append(f"triangles {surface.n_triangles}")
    for t, ls in enumerate(surface.lengths):
        out.append("T %d %s" % (t, " ".join(repr(float(x)) for x in ls)))
    glue = surface.gluing()
    out.append(f"gluing {len(glue)}")
    for (t, e), (t2, e2) in glue:
        out.append(f"G {t} {e} {t2} {e2}")
    return "\n".join(out) + "\n"


def write_scs(surface, path, comment=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_scs(surface, comment))
