"""Loop graphs, strong products and the brute-force embedding checker.

Vertices are dense integer ids 0..n-1.  A loop graph carries a set of
undirected edges between distinct vertices plus an optional set of vertices
with a self-loop; simple graphs are loop graphs with no loops.  All values
are immutable after construction, so they can be shared freely.

Product vertices of A x B are encoded row-major: (a, b) -> a * B.n + b.
This encoding is fixed so certificates stay portable.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import deque
from typing import Iterable, Optional, Sequence


def edge_key(u: int, v: int) -> tuple[int, int]:
    """Normalized (min, max) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


class LoopGraph:
    """Immutable graph with optional self-loops and no parallel edges."""

    __slots__ = ("n", "edges", "loops", "names", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (),
                 loops: Iterable[int] = (), names: Optional[Sequence[str]] = None):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        es = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"edge ({u},{v}) has equal endpoints; use loops")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            es.add(edge_key(u, v))
        ls = set()
        for v in loops:
            if not 0 <= v < n:
                raise ValueError(f"loop on {v} out of range for n={n}")
            ls.add(v)
        self.n = n
        self.edges = frozenset(es)
        self.loops = frozenset(ls)
        self.names = tuple(names) if names is not None else None
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in es:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = tuple(frozenset(s) for s in adj)

    def neighbours(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def max_degree(self) -> int:
        return max((len(s) for s in self._adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return u in self.loops
        return v in self._adj[u]

    def num_edges(self) -> int:
        return len(self.edges)

    def is_simple(self) -> bool:
        return not self.loops

    def __eq__(self, other) -> bool:
        if not isinstance(other, LoopGraph):
            return NotImplemented
        return (self.n == other.n and self.edges == other.edges
                and self.loops == other.loops)

    def __hash__(self):
        return hash((self.n, self.edges, self.loops))

    def __repr__(self):
        return f"LoopGraph(n={self.n}, edges={len(self.edges)}, loops={len(self.loops)})"


@dataclass(frozen=True)
class ProductVertex:
    """Vertex (a, b) of a strong product; id is a * n_right + b."""
    a: int
    b: int

    def encode(self, n_right: int) -> int:
        return self.a * n_right + self.b


@dataclass(frozen=True)
class ProductEmbedding:
    """Injective map of a graph's vertices into pairs over two factors.

    ``image[x]`` is the (a, b) coordinate pair of vertex x.  Whether the map
    is an induced embedding into left (x) right is decided by
    :func:`check_induced_embedding`, never assumed.
    """
    left: LoopGraph
    right: LoopGraph
    image: tuple[tuple[int, int], ...]

    def encoded(self, x: int) -> int:
        a, b = self.image[x]
        return a * self.right.n + b


@dataclass(frozen=True)
class BfsStructure:
    """BFS tree with per-vertex parent and level (= graph distance to root)."""
    root: int
    parent: tuple[int, ...]   # parent[root] == -1
    level: tuple[int, ...]


@dataclass(frozen=True)
class Verdict:
    """Outcome of a certificate check; carries the first found violation."""
    ok: bool
    reason: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# constructions

def path_graph(n: int) -> LoopGraph:
    return LoopGraph(n, [(i, i + 1) for i in range(n - 1)])

def cycle_graph(n: int) -> LoopGraph:
    if n < 3:
        raise ValueError("cycle needs >= 3 vertices")
    return LoopGraph(n, [(i, (i + 1) % n) for i in range(n)])

def complete_graph(n: int) -> LoopGraph:
    return LoopGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

def star_graph(leaves: int) -> LoopGraph:
    """Star with center 0 and leaf vertices 1..leaves."""
    return LoopGraph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])

def grid_graph(a: int, b: int) -> LoopGraph:
    """a x b grid; vertex (i, j) has id i*b + j."""
    edges = []
    for i in range(a):
        for j in range(b):
            if j + 1 < b:
                edges.append((i * b + j, i * b + j + 1))
            if i + 1 < a:
                edges.append((i * b + j, (i + 1) * b + j))
    return LoopGraph(a * b, edges)


def reflexive_closure(g: LoopGraph) -> LoopGraph:
    return LoopGraph(g.n, g.edges, range(g.n), g.names)

def strip_loops(g: LoopGraph) -> LoopGraph:
    return LoopGraph(g.n, g.edges, (), g.names)


def strong_product(g1: LoopGraph, g2: LoopGraph) -> LoopGraph:
    """Strong product of two simple graphs, row-major vertex encoding.

    (u,u') ~ (v,v') iff the coordinates are pairwise equal or adjacent,
    and not both equal.
    """
    if g1.loops or g2.loops:
        raise ValueError("strong product is defined on loop-free graphs")
    n2 = g2.n
    edges = []
    for (u, v) in g1.edges:
        for b in range(n2):
            edges.append((u * n2 + b, v * n2 + b))          # u~v, b=b
        for (a, b) in g2.edges:
            edges.append((u * n2 + a, v * n2 + b))          # u~v, a~b
            edges.append((u * n2 + b, v * n2 + a))
    for (a, b) in g2.edges:
        for u in range(g1.n):
            edges.append((u * n2 + a, u * n2 + b))          # u=u, a~b
    return LoopGraph(g1.n * g2.n, edges)


def product_adjacent(g1: LoopGraph, g2: LoopGraph,
                     p: tuple[int, int], q: tuple[int, int]) -> bool:
    """Adjacency of two product vertices without materializing the product."""
    if p == q:
        return False
    a_ok = p[0] == q[0] or g1.has_edge(p[0], q[0])
    b_ok = p[1] == q[1] or g2.has_edge(p[1], q[1])
    return a_ok and b_ok


def square(g: LoopGraph) -> LoopGraph:
    """Graph on V(g) joining pairs at distance 1 or 2."""
    if g.loops:
        raise ValueError("square is defined on loop-free graphs")
    edges = set(g.edges)
    for v in range(g.n):
        nb = g.neighbours(v)
        for u in nb:
            for w in g.neighbours(u):
                if w != v and w not in nb:
                    edges.add(edge_key(v, w))
    return LoopGraph(g.n, edges)


def bfs_tree(g: LoopGraph, root: int) -> BfsStructure:
    """Deterministic BFS (ascending neighbour ids); rejects disconnected input."""
    if not 0 <= root < g.n:
        raise ValueError(f"root {root} out of range")
    parent = [-2] * g.n
    level = [-1] * g.n
    parent[root] = -1
    level[root] = 0
    queue = deque([root])
    seen = 1
    while queue:
        v = queue.popleft()
        for w in sorted(g.neighbours(v)):
            if level[w] < 0:
                level[w] = level[v] + 1
                parent[w] = v
                queue.append(w)
                seen += 1
    if seen != g.n:
        raise ValueError("bfs_tree requires a connected graph")
    return BfsStructure(root, tuple(parent), tuple(level))


def is_connected(g: LoopGraph) -> bool:
    if g.n == 0:
        return True
    try:
        bfs_tree(g, 0)
        return True
    except ValueError:
        return False


def greedy_square_coloring(q: LoopGraph) -> list[int]:
    """Proper colouring of square(q): greedy over BFS order from vertex 0.

    Returns 1-based colours; uses at most max_degree(q)^2 + 1 of them, and
    at most 3 on any path.  BFS order plus smallest-free-colour keeps the
    output deterministic.
    """
    if q.loops:
        raise ValueError("colouring expects a simple graph")
    q2 = square(q)
    order: list[int] = []
    seen = [False] * q.n
    for start in range(q.n):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in sorted(q.neighbours(v)):
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    colour = [0] * q.n
    for v in order:
        used = {colour[w] for w in q2.neighbours(v) if colour[w]}
        c = 1
        while c in used:
            c += 1
        colour[v] = c
    return colour


def subdivide(g: LoopGraph, k: int) -> LoopGraph:
    """Replace every edge with a path of length k+1 (k new internal vertices).

    Original ids are preserved; edge j (in sorted edge order) gets internal
    vertices n + j*k .. n + j*k + k - 1, ordered from the smaller endpoint.
    """
    if g.loops:
        raise ValueError("subdivide expects a simple graph")
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return g
    edges = []
    nxt = g.n
    for (u, v) in sorted(g.edges):
        chain = [u] + list(range(nxt, nxt + k)) + [v]
        nxt += k
        edges.extend(zip(chain, chain[1:]))
    return LoopGraph(nxt, edges)


def check_induced_embedding(g: LoopGraph, emb: ProductEmbedding) -> Verdict:
    """Referee for product-structure certificates.

    Accepts iff the image is in-range, injective, and for every vertex pair
    x != y of g: xy is an edge of g exactly when the image pair is an edge
    of strong_product(left, right).  Product adjacency is evaluated on the
    factors directly, which is equivalent and avoids building the product.
    """
    if len(emb.image) != g.n:
        return Verdict(False, "image-size", (len(emb.image), g.n))
    for x, (a, b) in enumerate(emb.image):
        if not (0 <= a < emb.left.n and 0 <= b < emb.right.n):
            return Verdict(False, "out-of-range", (x, a, b))
    seen: dict[tuple[int, int], int] = {}
    for x, p in enumerate(emb.image):
        if p in seen:
            return Verdict(False, "not-injective", (seen[p], x))
        seen[p] = x
    for x in range(g.n):
        for y in range(x + 1, g.n):
            want = g.has_edge(x, y)
            got = product_adjacent(emb.left, emb.right, emb.image[x], emb.image[y])
            if want != got:
                return Verdict(False, "adjacency-mismatch", (x, y, want, got))
    return Verdict(True)


def induced_subgraph(g: LoopGraph, keep: Sequence[int]) -> LoopGraph:
    """Subgraph induced on ``keep``; vertex i of the result is keep[i]."""
    idx = {v: i for i, v in enumerate(keep)}
    if len(idx) != len(keep):
        raise ValueError("duplicate vertices in keep")
    edges = [(idx[u], idx[v]) for (u, v) in g.edges if u in idx and v in idx]
    loops = [idx[v] for v in g.loops if v in idx]
    names = [g.names[v] for v in keep] if g.names else None
    return LoopGraph(len(keep), edges, loops, names)


def is_path_order(q: LoopGraph) -> Optional[list[int]]:
    """Vertices of q in path order, or None if q is not a path."""
    if q.loops or q.n == 0:
        return None
    if q.n == 1:
        return [0]
    degs = [q.degree(v) for v in range(q.n)]
    ends = [v for v in range(q.n) if degs[v] == 1]
    if len(ends) != 2 or any(d > 2 for d in degs) or q.num_edges() != q.n - 1:
        return None
    order = [min(ends)]
    prev = -1
    while len(order) < q.n:
        nxt = [w for w in q.neighbours(order[-1]) if w != prev]
        if len(nxt) != 1:
            return None
        prev = order[-1]
        order.append(nxt[0])
    return order


def ball(g: LoopGraph, x: int, r: int) -> list[int]:
    """Vertices within distance r of x, ascending ids."""
    dist = {x: 0}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        if dist[v] == r:
            continue
        for w in g.neighbours(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return sorted(dist)
