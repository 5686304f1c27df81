"""Extra-largeness checks: cone angles above 2pi and no short loops.

The loop search looks for two distinct minimizing geodesics of equal length
``L`` between a sampled point and some other point. Such a pair is at once
injectivity-radius evidence (``L <= pi``) and a loop of length ``2L``, so both
condition-2 checks read the same search and agree by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geodesic import shortest_loop_estimate

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-9
LOOP_TOL = 1e-9
DEFAULT_RESOLUTION = 1000

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"
VIOLATION = "VIOLATION"
NO_VIOLATION_FOUND = "NO_VIOLATION_FOUND"


@dataclass(frozen=True)
class ConeAngleResult:
    status: str
    failing: tuple  # vertices with cone angle <= 2pi + tol
    boundary: tuple  # failing vertices within tol of 2pi
    cone_angles: tuple
    margin: float  # min cone angle - 2pi

    def to_dict(self):
        return {
            "status": self.status,
            "failing_vertices": list(self.failing),
            "boundary_vertices": list(self.boundary),
            "cone_angles": list(self.cone_angles),
            "margin": self.margin,
        }


@dataclass(frozen=True)
class LoopResult:
    status: str
    resolution: int
    length: float | None = None
    witness: object = None  # LoopWitness
    boundary: bool = False
    truncated: int = 0

    def to_dict(self):
        out = {"status": self.status, "resolution": self.resolution, "truncated_searches": self.truncated}
        if self.witness is not None:
            w = self.witness
            out["length"] = self.length
            out["boundary"] = self.boundary
            out["witness"] = {
                "base": point_dict(w.base),
                "far": point_dict(w.far),
                "half_length": w.half_length,
                "paths": [path_dict(g) for g in w.paths],
            }
        return out


@dataclass(frozen=True)
class InjectivityEvidence:
    p: object
    q: object
    length: float
    paths: tuple

    def to_dict(self):
        return {
            "p": point_dict(self.p),
            "q": point_dict(self.q),
            "length": self.length,
            "paths": [path_dict(g) for g in self.paths],
        }


@dataclass(frozen=True)
class Verdict:
    status: str
    condition1: ConeAngleResult
    condition2: LoopResult
    injectivity_evidence: InjectivityEvidence | None
    tolerances: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == PASS

    def to_dict(self):
        return {
            "status": self.status,
            "condition1": self.condition1.to_dict(),
            "condition2": self.condition2.to_dict(),
            "injectivity_evidence": None if self.injectivity_evidence is None else self.injectivity_evidence.to_dict(),
            "tolerances": dict(self.tolerances),
        }


def point_dict(p):
    return {"triangle": p.triangle, "position": list(p.position)}


def path_dict(g):
    return {
        "length": g.length,
        "status": g.status,
        "crossings": [[c.halfedge, c.t] for c in g.crossings],
        "via": [v for v in g.via if v is not None],
    }


def check_cone_angles(surface, tol=ANGLE_TOL):
    """PASS iff every cone angle exceeds 2pi + tol."""
    th = surface.cone_angles
    failing = tuple(v for v, a in enumerate(th) if a <= TWO_PI + tol)
    boundary = tuple(v for v in failing if abs(th[v] - TWO_PI) <= tol)
    return ConeAngleResult(
        status=FAIL if failing else PASS,
        failing=failing,
        boundary=boundary,
        cone_angles=tuple(th),
        margin=min(th) - TWO_PI,
    )


def _loop_search(surface, resolution, seed=0):
    cache = surface.__dict__.setdefault("_geodesic_cache", {})
    key = ("loops", resolution, seed)
    if key not in cache:
        cache[key] = shortest_loop_estimate(surface, TWO_PI + LOOP_TOL, resolution, seed)
    return cache[key]


def check_closed_geodesics(surface, resolution=DEFAULT_RESOLUTION, seed=0):
    """Shortest loop of length at most 2pi found through the sample set."""
    est = _loop_search(surface, resolution, seed)
    if est.witness is None:
        return LoopResult(NO_VIOLATION_FOUND, est.samples, truncated=est.truncated)
    return LoopResult(
        VIOLATION,
        est.samples,
        est.length,
        est.witness,
        boundary=abs(est.length - TWO_PI) <= LOOP_TOL,
        truncated=est.truncated,
    )


def check_injectivity_radius(surface, resolution=DEFAULT_RESOLUTION, seed=0):
    """Two distinct minimizing paths of common length at most pi, or ``None``."""
    est = _loop_search(surface, resolution, seed)
    w = est.witness
    if w is None:
        return None
    return InjectivityEvidence(w.base, w.far, w.half_length, w.paths)


def is_extra_large(surface, resolution=DEFAULT_RESOLUTION, seed=0):
    """Aggregate verdict.

    PASS needs condition 1 to pass, no loop of length at most 2pi and no
    injectivity evidence. Values within tolerance of 2pi count as failures.
    INCONCLUSIVE means nothing failed but some strip search hit its depth limit.
    """
    c1 = check_cone_angles(surface)
    c2 = check_closed_geodesics(surface, resolution, seed)
    ev = check_injectivity_radius(surface, resolution, seed)
    if c1.status == FAIL or c2.status == VIOLATION or ev is not None:
        status = FAIL
    elif c2.truncated:
        status = INCONCLUSIVE
    else:
        status = PASS
    tol = {"cone_angle": ANGLE_TOL, "loop_length": LOOP_TOL}
    return Verdict(status, c1, c2, ev, tol)
