import math

import numpy as np
import pytest

from conesurf import generators as G
from conesurf.errors import OracleError
from conesurf.oracle import build_graph, multi_source_distances, pair_distances, refine_until
from conesurf.pipeline import engine_pairs
from test_geodesic import octa_global

PI = math.pi


def global_nodes(graph):
    """Round-sphere position of every node of an octa graph."""
    S = graph.surface
    X = np.empty((graph.n_nodes, 3))
    for t in range(S.n_triangles):
        R = np.array(octa_global(S, t)).reshape(3, 3)
        X[graph.node_of[t]] = graph.positions[t] @ R.T
    return X


def test_single_subdivision_nodes(big_tetra, octa):
    for S in (big_tetra, octa):
        g = build_graph(S, 1)
        assert g.n_nodes == S.n_vertices
        assert g.n_arcs == S.n_edges


def test_node_counts(octa):
    # V + E(k-1) + F(k-1)(k-2)/2
    for k in (2, 3, 8):
        g = build_graph(octa, k)
        assert g.n_nodes == 6 + 12 * (k - 1) + 8 * (k - 1) * (k - 2) // 2


def test_size_guard(big_tetra):
    with pytest.raises(OracleError):
        build_graph(big_tetra, 1024)
    with pytest.raises(ValueError):
        build_graph(big_tetra, 0)


def test_merged_nodes_agree(octa):
    g = build_graph(octa, 8)
    X = global_nodes(g)
    for t in range(octa.n_triangles):
        R = np.array(octa_global(octa, t)).reshape(3, 3)
        assert np.allclose(g.positions[t] @ R.T, X[g.node_of[t]], atol=1e-12)


def test_octa_multi_source_closed_form(octa):
    # the nearest axis vertex is a corner of the node's own octant, joined to
    # it by an exact chord, so the graph reproduces the closed form
    for k in (4, 8, 16):
        g = build_graph(octa, k)
        D, nearest, tie = multi_source_distances(g)
        X = global_nodes(g)
        true = np.arccos(np.clip(np.abs(X).max(axis=1), -1, 1))
        assert np.allclose(D.min(axis=0), true, atol=1e-12)


def test_octa_nearest_site(octa):
    g = build_graph(octa, 16)
    D, nearest, tie = multi_source_distances(g)
    X = global_nodes(g)
    P = np.array([octa.vertex_point(v).position for v in range(6)])
    axis = np.array([np.array(octa_global(octa, octa.vertex_point(v).triangle)).reshape(3, 3) @ P[v] for v in range(6)])
    want = np.argmax(X @ axis.T, axis=1)
    margin = np.sort(X @ axis.T, axis=1)
    clear = (margin[:, -1] - margin[:, -2]) > 2 * g.h
    assert clear.sum() > 0.5 * g.n_nodes
    assert np.array_equal(nearest[clear], want[clear])


def test_single_source_triangle_inequality(big_tetra):
    g = build_graph(big_tetra, 8)
    D, _, _ = multi_source_distances(g, [0, 1])
    d01 = D[0, g.vertex_node[1]]
    assert np.all(np.abs(D[0] - D[1]) <= d01 + 1e-12)
    rows = g.matrix.tocoo()
    assert np.all(D[0, rows.row] <= D[0, rows.col] + rows.data + 1e-12)


def test_antipodal_bisector(octa):
    g = build_graph(octa, 16)
    X = global_nodes(g)
    north = int(np.argmax(X[g.vertex_node] @ np.array([0, 0, 1.0])))
    south = int(np.argmin(X[g.vertex_node] @ np.array([0, 0, 1.0])))
    D, _, _ = multi_source_distances(g, [north, south])
    band = np.abs(D[0] - D[1]) <= g.h
    assert band.sum() >= 4 * 16
    assert np.all(np.abs(D[0, band] - PI / 2) <= 2 * g.h)
    assert np.all(np.abs(X[band, 2]) <= math.sin(2 * g.h))


def test_graph_never_undercuts_engine(big_tetra):
    pairs, ref = engine_pairs(big_tetra, 20, seed=4)
    assert len(pairs) == 20
    for attach in ("cell", "triangle"):
        d = pair_distances(build_graph(big_tetra, 8), pairs, attach)
        assert np.all(d >= ref - 1e-9)


def test_refine_until(octa):
    pairs, ref = engine_pairs(octa, 20, seed=1)
    conv = refine_until(octa, pairs, ref, target=0.02, k0=4)
    assert conv.converged and conv.gaps[-1] < 0.02
    assert list(conv.ks) == [4 * 2 ** i for i in range(len(conv.ks))]
    assert all(0.2 < r < 0.8 for r in conv.ratios)
    with pytest.raises(ValueError):
        refine_until(octa, pairs, ref, target=0.0)


def test_refine_until_hits_guard(big_tetra):
    pairs, ref = engine_pairs(big_tetra, 3, seed=0)
    with pytest.raises(OracleError):
        refine_until(big_tetra, pairs, ref, target=1e-12, k0=64, max_k=4096)
