"""Brute-force reference distances on a refined graph.

Every triangle is cut into ``k * k`` cells in its chart. For ``k`` a power of
two the cells come from repeated arc-midpoint splitting, which keeps cells
close to one size even on large triangles; other ``k`` use normalized convex
combinations of the corners. Nodes on glued edges are merged. Within a triangle, every boundary node is joined to
every other boundary node and to every interior node by its exact chart
chord, so graph paths are admissible curves and graph distances never
undercut true ones.

Arbitrary points enter the graph through an attachment: ``"cell"`` joins a
point to the three corners of its grid cell (first order in the grid size),
``"triangle"`` joins it to every boundary node of its triangle as well
(second order). Nothing here calls the strip-unfolding engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import OracleError

MAX_ARCS = 10_000_000
TIE_TOL = 1e-9


def _grid(k):
    ij = [(i, j) for i in range(k + 1) for j in range(k + 1 - i)]
    index = {p: n for n, p in enumerate(ij)}
    return np.array(ij, dtype=int), index


def _arcs(a, b):
    """Great-circle distances between matching rows (or broadcast) of unit vectors."""
    cr = np.linalg.norm(np.cross(a, b), axis=-1)
    dt = np.sum(a * b, axis=-1)
    return np.arctan2(cr, dt)


def _edge_index(k, e, m):
    """Grid point ``m`` steps from the origin of edge ``e``."""
    if e == 0:
        return (m, 0)
    if e == 1:
        return (k - m, m)
    return (0, k - m)


@dataclass
class RefinedGraph:
    surface: object
    k: int
    n_nodes: int
    n_arcs: int
    matrix: object  # symmetric csr adjacency
    node_of: np.ndarray  # (F, G) grid point -> merged node id
    grid: np.ndarray  # (G, 2) grid (i, j)
    positions: np.ndarray  # (F, G, 3) chart positions
    boundary: np.ndarray  # grid indices on the triangle boundary
    interior: np.ndarray
    vertex_node: np.ndarray  # cone point -> node id
    h: float  # longest grid-cell side
    cells: np.ndarray  # (C, 3) grid indices per cell
    normals: np.ndarray  # (F, C, 3, 3) inward side normals per cell

    def cell_of(self, t, x):
        """Grid indices of the three corners of the cell of ``t`` containing ``x``."""
        s = self.normals[t] @ np.asarray(x, dtype=float)  # (C, 3)
        c = int(np.argmax(s.min(axis=1)))
        return self.cells[c].tolist()

    def attachments(self, p, attach="triangle"):
        """``(node ids, arc lengths)`` linking surface point ``p`` into the graph."""
        t = p.triangle
        x = np.asarray(p.position, dtype=float)
        idx = self.cell_of(t, x)
        if attach == "triangle":
            idx = sorted(set(idx) | set(self.boundary.tolist()))
        elif attach != "cell":
            raise ValueError(f"unknown attachment {attach!r}")
        idx = np.asarray(idx)
        return self.node_of[t, idx], _arcs(self.positions[t, idx], x[None, :])


def _node_positions(C, k, grid, index):
    if k & (k - 1):
        w = np.column_stack([k - grid.sum(axis=1), grid[:, 0], grid[:, 1]]) / k
        P = w @ C
        return P / np.linalg.norm(P, axis=1)[:, None]
    P = {(0, 0): C[0], (1, 0): C[1], (0, 1): C[2]}
    n = 1
    while n < k:
        Q = {}
        for i in range(2 * n + 1):
            for j in range(2 * n + 1 - i):
                if i % 2 == 0 and j % 2 == 0:
                    Q[(i, j)] = P[(i // 2, j // 2)]
                    continue
                if i % 2 and j % 2 == 0:
                    a, b = ((i - 1) // 2, j // 2), ((i + 1) // 2, j // 2)
                elif i % 2 == 0:
                    a, b = (i // 2, (j - 1) // 2), (i // 2, (j + 1) // 2)
                else:
                    a, b = ((i - 1) // 2, (j + 1) // 2), ((i + 1) // 2, (j - 1) // 2)
                m = P[a] + P[b]
                Q[(i, j)] = m / np.linalg.norm(m)
        P = Q
        n *= 2
    out = np.empty((len(grid), 3))
    for (i, j), g in index.items():
        out[g] = P[(i, j)]
    return out


def _cells(k, index):
    out = []
    for i in range(k):
        for j in range(k - i):
            out.append((index[(i, j)], index[(i + 1, j)], index[(i, j + 1)]))
            if i + j < k - 1:
                out.append((index[(i + 1, j)], index[(i + 1, j + 1)], index[(i, j + 1)]))
    return np.array(out, dtype=int)


def build_graph(surface, k):
    """Refined graph with ``k`` subdivisions per triangle edge (``k >= 1``)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    grid, index = _grid(k)
    G = len(grid)
    on_b = (grid[:, 0] == 0) | (grid[:, 1] == 0) | (grid.sum(axis=1) == k)
    boundary = np.flatnonzero(on_b)
    interior = np.flatnonzero(~on_b)
    nb, ni = len(boundary), len(interior)
    F = surface.n_triangles
    per_tri = nb * (nb - 1) // 2 + ni * nb
    if per_tri * F > MAX_ARCS:
        raise OracleError(f"k={k} needs about {per_tri * F} arcs (limit {MAX_ARCS})", k=k, arcs=per_tri * F)

    positions = np.empty((F, G, 3))
    for t in range(F):
        positions[t] = _node_positions(np.array(surface.charts[t]), k, grid, index)
    cells = _cells(k, index)

    # merge glued boundary nodes with a union-find over (triangle, grid) ids
    parent = np.arange(F * G)

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    for h in range(3 * F):
        h2 = surface.twin[h]
        if h2 < h:
            continue
        t, e = divmod(h, 3)
        t2, e2 = divmod(h2, 3)
        for m in range(k + 1):
            a = t * G + index[_edge_index(k, e, m)]
            b = t2 * G + index[_edge_index(k, e2, k - m)]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(a) for a in range(F * G)])
    uniq, node_flat = np.unique(roots, return_inverse=True)
    node_of = node_flat.reshape(F, G)
    n_nodes = len(uniq)

    bi, bj = np.triu_indices(nb, 1)
    rows, cols, vals = [], [], []
    for t in range(F):
        P = positions[t]
        B = boundary
        rows.append(node_of[t, B[bi]])
        cols.append(node_of[t, B[bj]])
        vals.append(_arcs(P[B[bi]], P[B[bj]]))
        if ni:
            ii = np.repeat(interior, nb)
            jj = np.tile(boundary, ni)
            rows.append(node_of[t, ii])
            cols.append(node_of[t, jj])
            vals.append(_arcs(P[ii], P[jj]))
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    v = np.concatenate(vals)
    keep = r != c
    r, c, v = r[keep], c[keep], v[keep]
    lo, hi = np.minimum(r, c), np.maximum(r, c)
    key = lo.astype(np.int64) * n_nodes + hi
    order = np.argsort(key, kind="stable")
    key, v = key[order], v[order]
    starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    vmin = np.minimum.reduceat(v, starts)
    ukey = key[starts]
    lo, hi = ukey // n_nodes, ukey % n_nodes
    mat = coo_matrix((vmin, (lo, hi)), shape=(n_nodes, n_nodes)).tocsr()
    ncomp, _ = connected_components(mat, directed=False)
    if ncomp != 1:
        raise OracleError(f"refined graph has {ncomp} components", code="ORACLE_DISCONNECTED")

    # longest side of a grid cell
    hmax = 0.0
    for di, dj in ((1, 0), (0, 1), (-1, 1)):
        src = [index[(i, j)] for i, j in grid.tolist() if (i + di, j + dj) in index]
        dst = [index[(i + di, j + dj)] for i, j in grid.tolist() if (i + di, j + dj) in index]
        hmax = max(hmax, float(_arcs(positions[:, src], positions[:, dst]).max()))

    vnode = np.empty(surface.n_vertices, dtype=int)
    corners = (index[(0, 0)], index[(k, 0)], index[(0, k)])
    for c in range(3 * F):
        vnode[surface.corner_vertex[c]] = node_of[c // 3, corners[c % 3]]

    P = positions[:, cells]  # (F, C, 3 corners, 3)
    normals = np.stack([np.cross(P[:, :, 0], P[:, :, 1]), np.cross(P[:, :, 1], P[:, :, 2]),
                        np.cross(P[:, :, 2], P[:, :, 0])], axis=2)
    normals /= np.linalg.norm(normals, axis=-1)[..., None]
    return RefinedGraph(surface, k, n_nodes, len(vmin), mat, node_of, grid, positions,
                        boundary, interior, vnode, hmax, cells, normals)


def multi_source_distances(graph, sources=None):
    """Distances from each source cone point to every node.

    Returns ``(D, nearest, tie)``: ``D`` has one row per source, ``nearest``
    is the index (into ``sources``) of the closest one with ties going to the
    lowest index, and ``tie`` flags nodes whose two best sources are within 1e-9.
    """
    if sources is None:
        sources = list(range(graph.surface.n_vertices))
    if len(sources) == 0:
        raise ValueError("at least one source is required")
    D = dijkstra(graph.matrix, directed=False, indices=graph.vertex_node[list(sources)])
    D = np.atleast_2d(D)
    nearest = np.argmin(D, axis=0)
    if D.shape[0] > 1:
        part = np.sort(D, axis=0)
        tie = part[1] - part[0] <= TIE_TOL
    else:
        tie = np.zeros(D.shape[1], dtype=bool)
    return D, nearest, tie


def point_site_distances(graph, D, p, attach="triangle"):
    """Distance from surface point ``p`` to every source row of ``D``."""
    nodes, lens = graph.attachments(p, attach)
    return np.min(D[:, nodes] + lens[None, :], axis=1)


def pair_distances(graph, pairs, attach="triangle"):
    """Graph distance for each ``(p, q)`` pair of surface points.

    Query points are added as extra nodes joined by their attachment arcs
    (and by a direct chord when both lie in one triangle).
    """
    pts = []
    for p, q in pairs:
        pts.extend((p, q))
    n0 = graph.n_nodes
    rows, cols, vals = [], [], []
    for n, p in enumerate(pts):
        nodes, lens = graph.attachments(p, attach)
        rows.append(np.full(len(nodes), n0 + n))
        cols.append(nodes)
        vals.append(lens)
    for n in range(0, len(pts), 2):
        p, q = pts[n], pts[n + 1]
        if p.triangle == q.triangle:
            rows.append(np.array([n0 + n]))
            cols.append(np.array([n0 + n + 1]))
            vals.append(_arcs(np.asarray(p.position)[None, :], np.asarray(q.position)[None, :]))
    base = graph.matrix.tocoo()
    r = np.concatenate([base.row] + rows)
    c = np.concatenate([base.col] + cols)
    v = np.concatenate([base.data] + vals)
    N = n0 + len(pts)
    mat = coo_matrix((v, (r, c)), shape=(N, N)).tocsr()
    src = [n0 + n for n in range(0, len(pts), 2)]
    D = np.atleast_2d(dijkstra(mat, directed=False, indices=src))
    return np.array([D[m, n0 + 2 * m + 1] for m in range(len(src))])


@dataclass(frozen=True)
class Convergence:
    ks: tuple
    gaps: tuple  # max gap per k
    mean_gaps: tuple
    ratios: tuple  # successive mean-gap ratios
    k: int
    converged: bool


def refine_until(surface, pairs, reference, target, k0=4, attach="cell", max_k=256):
    """Double ``k`` from ``k0`` until the largest gap to ``reference`` falls
    below ``target``; gap ratios per doubling are reported as convergence evidence."""
    if target <= 0:
        raise ValueError("target gap must be positive")
    ref = np.asarray(reference, dtype=float)
    ks, gaps, means = [], [], []
    k = k0
    while k <= max_k:
        try:
            g = build_graph(surface, k)
        except OracleError as err:
            raise OracleError(f"target {target} not reached before the size guard; best gap "
                              f"{min(gaps) if gaps else float('nan'):.3e}", k=k,
                              best=min(gaps) if gaps else None) from err
        d = pair_distances(g, pairs, attach)
        gap = d - ref
        ks.append(k)
        gaps.append(float(np.max(np.abs(gap))))
        means.append(float(np.mean(np.abs(gap))))
        if gaps[-1] < target and len(ks) >= 2:
            break
        k *= 2
    ratios = tuple(b / a if a > 0 else 0.0 for a, b in zip(means, means[1:]))
    return Convergence(tuple(ks), tuple(gaps), tuple(means), ratios, ks[-1], gaps[-1] < target)
