"""Seeded fixture generators for embedded planar graphs.

Triangulations come from the Delaunay triangulation of seeded random points
inside a fixed enclosing triangle, so the convex hull (= outer face) is that
triangle and every bounded face is a triangle.  Rotations are the
counterclockwise angular orders, which are automatically consistent.  The
seed fully determines the output.
"""

from __future__ import annotations

import math
import random

from .graphs import LoopGraph, edge_key
from .planar import EmbeddedGraph

_CORNERS = [(-10.0, -10.0), (20.0, -10.0), (0.5, 20.0)]


def delaunay_triangulation(n: int, seed: int) -> EmbeddedGraph:
    """Embedded planar triangulation on n >= 3 vertices.

    The last three vertices are the enclosing triangle (the outer face,
    traversed counterclockwise); the first n-3 are uniform random points in
    the unit square.
    """
    if n < 3:
        raise ValueError("need at least 3 vertices")
    from scipy.spatial import Delaunay
    rng = random.Random(seed)
    pts = [(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)) for _ in range(n - 3)]
    pts += _CORNERS
    tri = Delaunay(pts)
    edges = set()
    for simplex in tri.simplices:
        a, b, c = (int(x) for x in simplex)
        edges.update((edge_key(a, b), edge_key(b, c), edge_key(a, c)))
    rotation = _angular_rotation(pts, edges, n)
    outer = (n - 3, n - 2)   # corner order is a counterclockwise hull walk
    eg = EmbeddedGraph(LoopGraph(n, edges), rotation, outer)
    eg.check()
    return eg


def _angular_rotation(pts, edges, n) -> tuple[tuple[int, ...], ...]:
    nb: list[list[int]] = [[] for _ in range(n)]
    for (u, v) in edges:
        nb[u].append(v)
        nb[v].append(u)
    rotation = []
    for v in range(n):
        x, y = pts[v]
        rotation.append(tuple(sorted(
            nb[v], key=lambda w: math.atan2(pts[w][1] - y, pts[w][0] - x))))
    return tuple(rotation)


def random_embedded_graph(n: int, seed: int,
                          keep: float = 0.7) -> EmbeddedGraph:
    """2-connected embedded planar graph: a Delaunay triangulation with a
    random subset of non-hull edges removed while 2-connectivity survives."""
    eg = delaunay_triangulation(n, seed)
    rng = random.Random(seed ^ 0x9E3779B9)
    g = eg.graph
    hull = {edge_key(n - 3, n - 2), edge_key(n - 2, n - 1), edge_key(n - 3, n - 1)}
    edges = set(g.edges)
    for e in sorted(g.edges):
        if e in hull or rng.random() < keep:
            continue
        trial = edges - {e}
        if _two_connected(n, trial):
            edges = trial
    rotation = tuple(
        tuple(w for w in eg.rotation[v] if edge_key(v, w) in edges)
        for v in range(n))
    out = EmbeddedGraph(LoopGraph(n, edges), rotation, eg.outer)
    out.check()
    return out


def _two_connected(n: int, edges: set[tuple[int, int]]) -> bool:
    if n < 3:
        return False
    adj: list[list[int]] = [[] for _ in range(n)]
    for (u, v) in edges:
        adj[u].append(v)
        adj[v].append(u)
    visited = [False] * n
    depth = [0] * n
    low = [0] * n
    parent = [-1] * n
    cut = [False] * n
    # iterative lowpoint computation
    stack = [(0, iter(adj[0]))]
    visited[0] = True
    root_children = 0
    order = [0]
    while stack:
        v, it = stack[-1]
        advanced = False
        for w in it:
            if not visited[w]:
                visited[w] = True
                depth[w] = depth[v] + 1
                low[w] = depth[w]
                parent[w] = v
                if v == 0:
                    root_children += 1
                stack.append((w, iter(adj[w])))
                order.append(w)
                advanced = True
                break
            elif w != parent[v]:
                low[v] = min(low[v], depth[w])
        if not advanced:
            stack.pop()
            if parent[v] >= 0:
                low[parent[v]] = min(low[parent[v]], low[v])
                if parent[v] != 0 and low[v] >= depth[parent[v]]:
                    cut[parent[v]] = True
    if not all(visited):
        return False
    if root_children > 1:
        return False
    return not any(cut)
