"""Spherical cone surfaces: extra-largeness checks, intrinsic Delaunay
triangulations and Voronoi diagrams, with a brute-force graph oracle."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConeSurfError,
    DegenerateError,
    DomainError,
    FlipError,
    GeodesicError,
    OracleError,
    ScsParseError,
    SurfaceError,
    VoronoiError,
)
from .surface import ConeSurface, SurfacePoint, build_surface, cone_points  # noqa: E402
from .geodesic import distance_within, shortest_loop_estimate, trace  # noqa: E402
from .validator import (  # noqa: E402
    check_closed_geodesics,
    check_cone_angles,
    check_injectivity_radius,
    is_extra_large,
)
from .delaunay import delaunay_flip, flip, global_empty_disk_check, is_edge_delaunay  # noqa: E402
from .voronoi import dualize, nearest_site_partition_check, verify_cell, verify_diagram  # noqa: E402
from .oracle import build_graph, multi_source_distances, refine_until  # noqa: E402
from .scs import parse_scs, read_scs, serialize_scs, write_scs  # noqa: E402

__all__ = [
    "ConeSurfError", "DegenerateError", "DomainError", "FlipError", "GeodesicError", "OracleError",
    "ScsParseError", "SurfaceError", "VoronoiError",
    "ConeSurface", "SurfacePoint", "build_surface", "cone_points",
    "distance_within", "shortest_loop_estimate", "trace",
    "check_closed_geodesics", "check_cone_angles", "check_injectivity_radius", "is_extra_large",
    "delaunay_flip", "flip", "global_empty_disk_check", "is_edge_delaunay",
    "dualize", "nearest_site_partition_check", "verify_cell", "verify_diagram",
    "build_graph", "multi_source_distances", "refine_until",
    "parse_scs", "read_scs", "serialize_scs", "write_scs",
]
