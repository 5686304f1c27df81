"""End-to-end runs shared by the command line and the acceptance suite."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _vec as V
from .delaunay import delaunay_flip, global_empty_disk_check
from .geodesic import distance_within
from .oracle import build_graph, pair_distances
from .report import build_report, delaunay_block, oracle_block, voronoi_block
from .surface import SurfacePoint
from .validator import DEFAULT_RESOLUTION, is_extra_large
from .voronoi import dualize, nearest_site_partition_check, verify_diagram


@dataclass
class PipelineResult:
    surface: object
    verdict: object
    delaunay: object = None
    empty_disk: tuple = None
    diagram: object = None
    checks: dict = None
    report: dict = None

    @property
    def invariants_ok(self):
        return self.report is not None and self.report.get("voronoi", {}).get("passed", False)


def run_voronoi(surface, resolution=DEFAULT_RESOLUTION, samples=100, force=False, seed=0, max_flips=None):
    """validate -> delaunay -> dualize -> verify. Stops after validation when
    the surface is not extra large, unless ``force`` is set."""
    verdict = is_extra_large(surface, resolution, seed)
    res = PipelineResult(surface, verdict)
    if verdict.status != "PASS" and not force:
        res.report = build_report(surface, verdict)
        return res
    dt = delaunay_flip(surface, max_flips=max_flips, force=True)
    res.delaunay = dt
    res.empty_disk = global_empty_disk_check(dt)
    res.diagram = dualize(dt)
    res.checks = verify_diagram(res.diagram, samples)
    res.report = build_report(surface, verdict, delaunay_block(dt, res.empty_disk),
                              voronoi_block(res.diagram, res.checks))
    return res


def random_point(surface, rng):
    """A uniformly chosen triangle, then flat Dirichlet weights on its corners."""
    t = int(rng.integers(surface.n_triangles))
    w = rng.dirichlet((1.0, 1.0, 1.0))
    ch = surface.charts[t]
    x = V.normalize(tuple(float(sum(w[i] * ch[i][k] for i in range(3))) for k in range(3)))
    return SurfacePoint(t, x)


def engine_pairs(surface, n=50, seed=0, max_draws=10000):
    """``n`` random point pairs whose engine distance is below pi, with those distances."""
    rng = np.random.default_rng(seed)
    pairs, ref = [], []
    for _ in range(max_draws):
        if len(pairs) == n:
            break
        p, q = random_point(surface, rng), random_point(surface, rng)
        hit = distance_within(surface, p, q, math.pi)
        if hit is not None:
            pairs.append((p, q))
            ref.append(hit[0])
    return pairs, np.array(ref)


@dataclass(frozen=True)
class GapSeries:
    ks: tuple
    mean_gaps: tuple
    max_gaps: tuple
    min_signed_gap: float  # most negative graph - engine difference seen

    @property
    def ratios(self):
        m = self.mean_gaps
        return tuple(b / a if a > 0 else 0.0 for a, b in zip(m, m[1:]))

    def to_dict(self):
        return {"ks": list(self.ks), "mean_gaps": list(self.mean_gaps), "max_gaps": list(self.max_gaps),
                "ratios": list(self.ratios), "min_signed_gap": self.min_signed_gap}


def gap_series(surface, pairs, reference, ks=(16, 32), attach="cell"):
    """Mean and max |graph - engine| over ``pairs`` at each ``k``."""
    means, maxes, low = [], [], math.inf
    for k in ks:
        d = pair_distances(build_graph(surface, k), pairs, attach)
        gap = d - reference
        means.append(float(np.mean(np.abs(gap))))
        maxes.append(float(np.max(np.abs(gap))))
        low = min(low, float(np.min(gap)))
    return GapSeries(tuple(ks), tuple(means), tuple(maxes), low)


def run_oracle(surface, k=16, n_pairs=50, samples=10000, seed=0, diagram=None, resolution=DEFAULT_RESOLUTION,
               force=False):
    """Partition agreement at ``k`` and the engine/oracle gap at ``k/2, k, 2k``."""
    verdict = is_extra_large(surface, resolution, seed)
    if diagram is None:
        if verdict.status != "PASS" and not force:
            return verdict, None, None, build_report(surface, verdict)
        diagram = dualize(delaunay_flip(surface, force=True))
    graph = build_graph(surface, k)
    coarse = build_graph(surface, max(1, k // 2))
    part = nearest_site_partition_check(diagram, graph, samples, seed, coarse=coarse)
    pairs, ref = engine_pairs(surface, n_pairs, seed)
    ks = tuple(sorted({max(1, k // 2), k, 2 * k}))
    series = gap_series(surface, pairs, ref, ks)
    block = oracle_block(graph, part)
    block["convergence"] = series.to_dict()
    block["pairs"] = len(pairs)
    return verdict, part, series, build_report(surface, verdict, oracle=block)
