"""Contraction sequences: replay verification, synthesis from
path-parameterized expressions, and the star-product subdivision embedding.

A contraction replaces two live vertices x1, x2 by a fresh vertex x0 whose
full neighbourhood is the union of theirs (minus x1, x2) and whose red
neighbours are the inherited red ones plus the symmetric difference of the
full neighbourhoods.  The verifier replays a sequence and reports the
maximum red degree encountered across every intermediate trigraph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .graphs import (LoopGraph, ProductEmbedding, is_path_order, star_graph,
                     subdivide)
from .expressions import (Create, Node, ParamExpression, Recolor,
                          Union, evaluate, postorder, validate)


@dataclass(frozen=True)
class ContractionSequence:
    """Ordered vertex-pair merges over an initially red-free trigraph.

    Step i merges (u, v), both live, into the fresh vertex n + i.
    """
    initial: LoopGraph
    steps: tuple[tuple[int, int], ...]


def verify_contraction_sequence(g: LoopGraph, steps: Sequence[tuple[int, int]]
                                ) -> tuple[int, int]:
    """Replay the merges; return (max red degree, step index attaining it).

    Step index 0 is the state before any contraction (red degree 0 there);
    partial sequences are allowed.  Raises on dead or repeated vertex
    references.
    """
    if g.loops:
        raise ValueError("trigraph replay expects a simple graph")
    black: dict[int, set[int]] = {v: set(g.neighbours(v)) for v in range(g.n)}
    red: dict[int, set[int]] = {v: set() for v in range(g.n)}
    max_red, arg = 0, 0
    fresh = g.n
    for idx, (x1, x2) in enumerate(steps, start=1):
        for x in (x1, x2):
            if x not in black:
                raise ValueError(f"step {idx}: vertex {x} is dead or unknown")
        if x1 == x2:
            raise ValueError(f"step {idx}: contracting {x1} with itself")
        n1 = black[x1] | red[x1]
        n2 = black[x2] | red[x2]
        new_red = (red[x1] | red[x2] | (n1 ^ n2)) - {x1, x2}
        new_all = (n1 | n2) - {x1, x2}
        x0 = fresh
        fresh += 1
        for y in (black[x1] | red[x1]) - {x2}:
            black[y].discard(x1)
            red[y].discard(x1)
        for y in (black[x2] | red[x2]) - {x1}:
            black[y].discard(x2)
            red[y].discard(x2)
        del black[x1], red[x1], black[x2], red[x2]
        black[x0] = new_all - new_red
        red[x0] = set(new_red)
        for y in black[x0]:
            black[y].add(x0)
        for y in red[x0]:
            red[y].add(x0)
        worst = max((len(r) for r in red.values()), default=0)
        if worst > max_red:
            max_red, arg = worst, idx
    return max_red, arg


# ---------------------------------------------------------------------------
# synthesis from a path-parameterized expression

def contraction_from_path_expression(expr: ParamExpression) -> ContractionSequence:
    """Contraction sequence for the value of an expression over a reflexive
    path, with max red degree at most 5*ell - 2 for ell the used budget.

    Walks the expression tree bottom-up keeping one live representative per
    (colour, pvertex) class -- class members share all adjacency outside
    their subexpression, so intra-class merges never spend red degree.
    Union nodes merge the two sides' representatives in path order and
    colour order, recolour nodes merge the affected class pairs, and a
    final sweep collapses the survivors column by column along the path.
    """
    h = expr.param
    if len(h.loops) != h.n:
        raise ValueError("parameter graph must be reflexive")
    path_order = is_path_order(LoopGraph(h.n, h.edges))
    if path_order is None:
        raise ValueError("parameter graph must be a reflexive path")
    bad = [d for d in validate(expr) if d.fatal]
    if bad:
        raise ValueError("invalid expression: " + "; ".join(map(str, bad)))

    value = evaluate(expr)
    n = value.graph.n
    steps: list[tuple[int, int]] = []
    fresh = [n]

    def contract(a: int, b: int) -> int:
        steps.append((a, b))
        out = fresh[0]
        fresh[0] += 1
        return out

    counter = 0
    stack: list[dict[tuple[int, int], int]] = []
    for node in postorder(expr.root):
        if isinstance(node, Create):
            stack.append({(node.colour, node.pvertex): counter})
            counter += 1
        elif isinstance(node, Union):
            reps_r = stack.pop()
            merged = stack[-1]
            for v in path_order:
                for c in range(1, expr.ell + 1):
                    key = (c, v)
                    if key in reps_r:
                        if key in merged:
                            merged[key] = contract(merged[key], reps_r[key])
                        else:
                            merged[key] = reps_r[key]
        elif isinstance(node, Recolor):
            reps = stack[-1]
            for v in path_order:
                key_i, key_j = (node.i, v), (node.j, v)
                if key_i in reps:
                    if key_j in reps:
                        reps[key_j] = contract(reps[key_j], reps.pop(key_i))
                    else:
                        reps[key_j] = reps.pop(key_i)
        # addedges: classes unchanged
    (reps,) = stack
    # collapse survivors column by column towards the path's far end
    acc: Optional[int] = None
    for v in path_order:
        col = [reps[key] for key in sorted(reps) if key[1] == v]
        cur: Optional[int] = None
        for r in col:
            cur = r if cur is None else contract(cur, r)
        if cur is not None:
            acc = cur if acc is None else contract(acc, cur)
    assert len(steps) == max(n - 1, 0), "not a full sequence"
    return ContractionSequence(value.graph, tuple(steps))


# ---------------------------------------------------------------------------
# star-product subdivision embedding

@dataclass
class StarSubdivisionResult:
    """3-subdivision of g mapped into the product of two stars.

    The map is not an induced embedding (the product adds edges between the
    original-vertex side and the middle-vertex side); its contract is the
    structural scan of verify: the two-sided part is exactly the
    subdivision's, the B side is independent, middles have two B-neighbours
    and B vertices one original-side neighbour.
    """
    g: LoopGraph
    subdivision: LoopGraph
    n_star: int
    embedding: ProductEmbedding
    a_side: list[int]        # subdivision vertices on the A side
    b_side: list[int]


def star_subdivision_embedding(g: LoopGraph) -> StarSubdivisionResult:
    """Map the 3-subdivision of g into star x star, per the construction:
    vertex u -> (leaf u, center), edge j's middle -> (center, leaf j), and
    edge j's two B vertices -> (leaf endpoint, leaf j).

    The star has n = max(|V|, |E|) leaves; center is vertex 0, leaves 1..n.
    """
    if g.loops:
        raise ValueError("expects a simple graph")
    n = max(g.n, g.num_edges())
    if n < 1:
        raise ValueError("graph must have at least one vertex or edge")
    star = star_graph(n)
    sub = subdivide(g, 3)
    sorted_edges = sorted(g.edges)
    image: list[tuple[int, int]] = [(0, 0)] * sub.n
    a_side: list[int] = []
    b_side: list[int] = []
    for u in range(g.n):
        image[u] = (u + 1, 0)
        a_side.append(u)
    for j, (u, v) in enumerate(sorted_edges):
        b1 = g.n + 3 * j        # neighbour of u
        mid = g.n + 3 * j + 1
        b2 = g.n + 3 * j + 2    # neighbour of v
        image[b1] = (u + 1, j + 1)
        image[mid] = (0, j + 1)
        image[b2] = (v + 1, j + 1)
        a_side.append(mid)
        b_side.extend((b1, b2))
    emb = ProductEmbedding(star, star, tuple(image))
    return StarSubdivisionResult(g, sub, n, emb, sorted(a_side), sorted(b_side))


def verify_star_subdivision(res: StarSubdivisionResult) -> list[str]:
    """Structural scan; returns the violated properties (empty = all hold).

    Checks, inside the product: the B side is independent, every middle
    vertex has exactly its two B-neighbours, every B vertex exactly one
    neighbour on the original-vertex side, and the two-sided bipartite part
    equals the subdivision's edge set between A and B.
    """
    from .graphs import product_adjacent
    star = res.embedding.left
    img = res.embedding.image
    sub = res.subdivision
    problems = []
    bs = set(res.b_side)
    as_ = set(res.a_side)
    for i, x in enumerate(res.b_side):
        for y in res.b_side[i + 1:]:
            if product_adjacent(star, star, img[x], img[y]):
                problems.append(f"B-B edge {x}-{y}")
    originals = set(range(res.g.n))
    middles = as_ - originals
    for x in middles:
        got = sum(1 for y in bs if product_adjacent(star, star, img[x], img[y]))
        if got != 2:
            problems.append(f"middle {x} has {got} B-neighbours")
    for x in bs:
        got = sum(1 for y in originals if product_adjacent(star, star, img[x], img[y]))
        if got != 1:
            problems.append(f"B vertex {x} has {got} original-side neighbours")
    for x in sorted(as_):
        for y in sorted(bs):
            want = sub.has_edge(x, y)
            got = product_adjacent(star, star, img[x], img[y])
            if want != got:
                problems.append(f"A-B mismatch {x}-{y}: sub={want} product={got}")
    return problems
