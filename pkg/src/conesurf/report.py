"""JSON reports: assembly, schema and canonical serialization."""

from __future__ import annotations

import hashlib
import json
import math

import jsonschema

from . import __version__
from .scs import serialize_scs

_NUM = {"type": ["number", "null"]}
_INT = {"type": "integer", "minimum": 0}

_CELL = {
    "type": "object",
    "required": ["site", "vertex_distance_margin", "diameter_margin", "angle_margin",
                 "star_samples", "star_contained", "passed"],
    "properties": {
        "site": _INT,
        "max_vertex_distance": _NUM,
        "vertex_distance_margin": _NUM,
        "diameter": _NUM,
        "diameter_margin": _NUM,
        "min_angle": _NUM,
        "max_angle": _NUM,
        "angle_margin": _NUM,
        "star_samples": _INT,
        "star_contained": _INT,
        "area": _NUM,
        "passed": {"type": "boolean"},
    },
}

SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "conesurf report",
    "type": "object",
    "required": ["tool", "version", "instance_hash", "units", "instance", "verdict"],
    "properties": {
        "tool": {"const": "conesurf"},
        "version": {"type": "string"},
        "instance_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "units": {"const": "radians"},
        "instance": {
            "type": "object",
            "required": ["triangles", "edges", "vertices", "cone_angles", "total_area", "gauss_bonnet_defect"],
            "properties": {
                "triangles": _INT,
                "edges": _INT,
                "vertices": _INT,
                "cone_angles": {"type": "array", "items": {"type": "number"}},
                "total_area": {"type": "number"},
                "gauss_bonnet_defect": {"type": "number"},
            },
        },
        "verdict": {
            "type": "object",
            "required": ["status", "condition1", "condition2"],
            "properties": {
                "status": {"enum": ["PASS", "FAIL", "INCONCLUSIVE"]},
                "condition1": {"type": "object", "required": ["status"]},
                "condition2": {"type": "object", "required": ["status", "resolution"]},
                "injectivity_evidence": {"type": ["object", "null"]},
                "tolerances": {"type": "object"},
            },
        },
        "delaunay": {
            "type": "object",
            "required": ["flip_count", "circumradius_min", "circumradius_max", "cocircular_classes"],
            "properties": {
                "flip_count": _INT,
                "circumradius_min": {"type": "number"},
                "circumradius_max": {"type": "number"},
                "circumradius_margin": {"type": "number"},
                "cocircular_classes": _INT,
                "non_delaunay_edges": _INT,
                "empty_disk_violations": _INT,
                "empty_disk_margin": _NUM,
                "flips": {"type": "array"},
            },
        },
        "voronoi": {
            "type": "object",
            "required": ["cells", "connected_pairs_ok", "area_gap", "euler_characteristic", "passed"],
            "properties": {
                "cells": {"type": "array", "items": _CELL},
                "connected_pairs_ok": {"type": "boolean"},
                "connectedness_failures": {"type": "array"},
                "area_gap": {"type": "number"},
                "euler_characteristic": {"type": "integer"},
                "dual_consistent": {"type": "boolean"},
                "degenerate": {"type": "boolean"},
                "passed": {"type": "boolean"},
            },
        },
        "oracle": {
            "type": "object",
            "required": ["k", "h"],
            "properties": {
                "k": _INT,
                "h": {"type": "number"},
                "nodes": _INT,
                "arcs": _INT,
                "agreement": _NUM,
                "samples": _INT,
                "compared": _INT,
                "band": _NUM,
                "error_estimate": _NUM,
                "convergence": {"type": "object"},
            },
        },
    },
}


def _clean(x):
    """Plain JSON values; non-finite floats become ``None``."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return int(x)
    try:
        f = float(x)
    except (TypeError, ValueError):
        return str(x)
    if hasattr(x, "dtype") and getattr(x.dtype, "kind", "") in "iu":
        return int(x)
    return f if math.isfinite(f) else None


def instance_hash(surface):
    return hashlib.sha256(serialize_scs(surface).encode()).hexdigest()


def instance_block(surface):
    return {
        "triangles": surface.n_triangles,
        "edges": surface.n_edges,
        "vertices": surface.n_vertices,
        "cone_angles": list(surface.cone_angles),
        "total_area": surface.total_area,
        "gauss_bonnet_defect": surface.gauss_bonnet_defect(),
    }


def delaunay_block(dt, empty_disk=None):
    lo, hi = dt.circumradius_range()
    out = {
        "flip_count": dt.flip_count,
        "circumradius_min": lo,
        "circumradius_max": hi,
        "circumradius_margin": math.pi / 2 - hi,
        "cocircular_classes": len(dt.cocircular_classes),
        "non_delaunay_edges": sum(1 for s in dt.edge_status.values() if s == "NO"),
        "flips": [[r.halfedge, list(r.quad), r.no_edges_before, r.no_edges_after] for r in dt.flip_log],
    }
    if empty_disk is not None:
        bad, margin = empty_disk
        out["empty_disk_violations"] = len(bad)
        out["empty_disk_margin"] = margin
    return out


def voronoi_block(diagram, checks):
    conn = checks["connectedness"]
    cells = [c.to_dict() for c in checks["cells"]]
    ok = (all(c["passed"] for c in cells) and conn.passed and checks["dual_consistent"]
          and checks["area_gap"] <= 1e-6)
    return {
        "cells": cells,
        "connected_pairs_ok": conn.passed,
        "connectedness_failures": [list(p) for p in conn.failures()],
        "area_gap": checks["area_gap"],
        "euler_characteristic": checks["euler"],
        "dual_consistent": checks["dual_consistent"],
        "degenerate": bool(diagram.degenerate),
        "passed": ok,
    }


def oracle_block(graph, partition=None, convergence=None):
    out = {"k": graph.k, "h": graph.h, "nodes": graph.n_nodes, "arcs": graph.n_arcs}
    if partition is not None:
        out.update(agreement=partition.agreement, samples=partition.samples, compared=partition.compared,
                   band=partition.band, error_estimate=partition.error_estimate)
    if convergence is not None:
        c = convergence
        out["convergence"] = {"ks": list(c.ks), "max_gaps": list(c.gaps), "mean_gaps": list(c.mean_gaps),
                              "ratios": list(c.ratios), "converged": c.converged}
    return out


def build_report(surface, verdict, delaunay=None, voronoi=None, oracle=None):
    """Assemble and schema-check a report. ``delaunay``, ``voronoi`` and
    ``oracle`` are ready-made blocks (see the ``*_block`` helpers)."""
    rep = {
        "tool": "conesurf",
        "version": __version__,
        "instance_hash": instance_hash(surface),
        "units": "radians",
        "instance": instance_block(surface),
        "verdict": verdict.to_dict(),
    }
    for key, block in (("delaunay", delaunay), ("voronoi", voronoi), ("oracle", oracle)):
        if block is not None:
            rep[key] = block
    rep = _clean(rep)
    validate_report(rep)
    return rep


def validate_report(report):
    jsonschema.validate(report, SCHEMA)


def dumps(report):
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"
