"""Shared random instance generators and independent oracles for the tests.

The oracles here deliberately avoid the library's own code paths: edge sets
come from definition-level enumeration, tree-width from elimination-order
search, embeddings from exhaustive map enumeration.
"""

from __future__ import annotations

import itertools
import random

from prodstruct.graphs import LoopGraph, edge_key, product_adjacent
from prodstruct.expressions import (AddEdges, ClassicExpression, Create,
                                    ParamExpression, Recolor, Union)
from prodstruct.induced import ProductSubgraph


def random_simple_graph(rng: random.Random, n: int, p: float = 0.5) -> LoopGraph:
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return LoopGraph(n, edges)


def random_connected_graph(rng: random.Random, n: int, p: float = 0.5) -> LoopGraph:
    edges = {edge_key(i, rng.randrange(i)) for i in range(1, n)}
    edges.update(e for e in itertools.combinations(range(n), 2) if rng.random() < p)
    return LoopGraph(n, edges)


def random_partial_2tree(rng: random.Random, n: int, keep: float = 0.8) -> LoopGraph:
    """Random subgraph of a 2-tree; tree-width at most 2 by construction."""
    if n == 1:
        return LoopGraph(1)
    edges = {(0, 1)}
    for v in range(2, n):
        a, b = rng.choice(sorted(edges))
        edges.add(edge_key(a, v))
        edges.add(edge_key(b, v))
    return LoopGraph(n, {e for e in edges if rng.random() < keep})


def random_classic_expression(rng: random.Random, ell: int,
                              creates: int) -> ClassicExpression:
    node = Create(rng.randint(1, ell))
    made = 1
    while made < creates:
        roll = rng.random()
        if roll < 0.45:
            node = Union(node, Create(rng.randint(1, ell)))
            made += 1
        elif roll < 0.55 and made < creates - 1:
            size = rng.randint(1, creates - made)
            sub = random_classic_expression(rng, ell, size)
            node = Union(node, sub.root)
            made += size
        elif roll < 0.8 and ell >= 2:
            i = rng.randint(1, ell)
            j = rng.choice([c for c in range(1, ell + 1) if c != i])
            node = AddEdges(i, j, node)
        elif ell >= 2:
            i = rng.randint(1, ell)
            j = rng.choice([c for c in range(1, ell + 1) if c != i])
            node = Recolor(i, j, node)
    return ClassicExpression(node, ell)


def random_param_expression(rng: random.Random, h: LoopGraph, ell: int,
                            creates: int) -> ParamExpression:
    def create():
        return Create(rng.randint(1, ell), rng.randrange(h.n))

    node = create()
    made = 1
    while made < creates:
        roll = rng.random()
        if roll < 0.4:
            node = Union(node, create())
            made += 1
        elif roll < 0.5 and made < creates - 1:
            size = rng.randint(1, creates - made)
            sub = random_param_expression(rng, h, ell, size)
            node = Union(node, sub.root)
            made += size
        elif roll < 0.8 and ell >= 2:
            i = rng.randint(1, ell)
            j = rng.choice([c for c in range(1, ell + 1) if c != i])
            node = AddEdges(i, j, node)
        elif ell >= 2:
            i = rng.randint(1, ell)
            j = rng.choice([c for c in range(1, ell + 1) if c != i])
            node = Recolor(i, j, node)
    return ParamExpression(node, ell, h)


def random_product_subgraph(rng: random.Random, q: LoopGraph, m: LoopGraph,
                            member_p: float = 0.7, edge_p: float = 0.6,
                            spanning: bool = False) -> ProductSubgraph:
    members = [(a, b) for a in range(q.n) for b in range(m.n)
               if spanning or rng.random() < member_p]
    if not members:
        members = [(0, 0)]
    edges = []
    for i, pa in enumerate(members):
        for pb in members[i + 1:]:
            if product_adjacent(q, m, pa, pb) and rng.random() < edge_p:
                edges.append((pa, pb))
    return ProductSubgraph.build(members, edges)


# ---------------------------------------------------------------------------
# oracles

def strong_product_edges_oracle(g1: LoopGraph, g2: LoopGraph) -> set:
    """Definition-level pair enumeration of the strong product's edges."""
    n2 = g2.n
    out = set()
    for (u, a) in itertools.product(range(g1.n), range(n2)):
        for (v, b) in itertools.product(range(g1.n), range(n2)):
            if (u, a) >= (v, b):
                continue
            first = g1.has_edge(u, v)
            second = g2.has_edge(a, b)
            if (first and second) or (u == v and second) or (first and a == b):
                out.add(edge_key(u * n2 + a, v * n2 + b))
    return out


def distances_oracle(g: LoopGraph) -> dict[tuple[int, int], int]:
    dist = {}
    for s in range(g.n):
        seen = {s: 0}
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for v in frontier:
                for w in g.neighbours(v):
                    if w not in seen:
                        seen[w] = d
                        nxt.append(w)
            frontier = nxt
        for v, dv in seen.items():
            dist[(s, v)] = dv
    return dist


def treewidth_by_order_search(g: LoopGraph) -> int:
    """Exact tree-width by branch-and-bound over elimination orders."""
    n = g.n
    best = n - 1

    def width_of_prefix(adj: dict[int, set[int]], order: list[int],
                        so_far: int) -> None:
        nonlocal best
        if so_far >= best:
            return
        if len(adj) <= 1:
            best = so_far
            return
        for v in sorted(adj):
            d = len(adj[v])
            if d >= best:
                continue
            nxt = {u: set(s) for u, s in adj.items() if u != v}
            nb = adj[v]
            for a in nb:
                nxt[a].discard(v)
            for a in nb:
                for b in nb:
                    if a != b:
                        nxt[a].add(b)
            width_of_prefix(nxt, order + [v], max(so_far, d))

    width_of_prefix({v: set(g.neighbours(v)) for v in range(n)}, [], 0)
    return best


def induced_map_oracle(g: LoopGraph, left: LoopGraph, right: LoopGraph,
                       image: tuple[tuple[int, int], ...]) -> bool:
    """Definition-level acceptance of one candidate embedding."""
    if len(set(image)) != len(image):
        return False
    for (a, b) in image:
        if not (0 <= a < left.n and 0 <= b < right.n):
            return False
    for x in range(g.n):
        for y in range(x + 1, g.n):
            if g.has_edge(x, y) != product_adjacent(left, right, image[x], image[y]):
                return False
    return True


def naive_contraction_replay(g: LoopGraph, steps) -> int:
    """From-scratch trigraph replay on dict-of-frozenset snapshots."""
    black = {frozenset((u, v)) for (u, v) in g.edges}
    red: set[frozenset] = set()
    live = set(range(g.n))
    fresh = g.n
    worst = 0
    for (x1, x2) in steps:
        assert x1 in live and x2 in live and x1 != x2
        def nb(kind, x):
            return {next(iter(e - {x})) for e in kind if x in e}
        n1 = nb(black, x1) | nb(red, x1)
        n2 = nb(black, x2) | nb(red, x2)
        newred = (nb(red, x1) | nb(red, x2) | (n1 ^ n2)) - {x1, x2}
        newall = (n1 | n2) - {x1, x2}
        live -= {x1, x2}
        black = {e for e in black if not (e & {x1, x2})}
        red = {e for e in red if not (e & {x1, x2})}
        x0 = fresh
        fresh += 1
        live.add(x0)
        for y in newred:
            red.add(frozenset((x0, y)))
        for y in newall - newred:
            black.add(frozenset((x0, y)))
        degs = {v: 0 for v in live}
        for e in red:
            for v in e:
                degs[v] += 1
        if degs:
            worst = max(worst, max(degs.values()))
    return worst
