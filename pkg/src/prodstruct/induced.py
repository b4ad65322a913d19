"""From a subgraph of a product Q x M to induced product structure.

Given g drawn inside Q x M (any subgraph, not necessarily induced), a proper
colouring s of the square of Q, and a rooted binarized tree decomposition of
M with the bag labelling p, every vertex x = (q, m) receives at its creation
node a *base colour*: k+1 sparse 0/1 functions b_0..b_k over the square
colours, where b_{p(m')}(s(q')) = 1 exactly when x has a g-neighbour
(q', m') with m' in the creation bag.  Bag-injectivity of p and square
properness of s make the encoded neighbour unique per entry, so wiring whole
colour classes against each other reproduces g's edges exactly.

Two constructions share this machinery:

  * build_expression: a parameterized expression over reflexive(Q) valued
    exactly g, assembled bottom-up over the decomposition -- per node, union
    the children, attach each finishing column's batch with its initial
    colours, wire running x initial and initial x initial colour pairs,
    retire initials to running colours, and zero out departing entries.
  * build_induced_factor: a factor M2 on V(M) x (used initial colours) whose
    edges are decided purely by the colour entries along an orientation of
    M, plus a width-controlled decomposition of M2 and the embedding
    x -> (q, (m, initial colour of x)).

Colours are interned lazily: the symbolic colour space is astronomically
large, so only colours actually appearing on vertices get dense ids, while
all reported bounds are checked against the symbolic formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .graphs import (LoopGraph, ProductEmbedding, edge_key,
                     greedy_square_coloring, is_path_order,
                     reflexive_closure)
from .expressions import (AddEdges, Create, Node, ParamExpression, Recolor,
                          Union)
from .treedec import (DecompositionContext, TreeDecomposition, binarize,
                      derive_context, validate_decomposition)

BaseColour = tuple  # tuple[frozenset[int], ...], one entry set per bag label
FullColour = tuple  # (alpha: int | None, BaseColour); alpha None = running


@dataclass(frozen=True)
class ProductSubgraph:
    """A graph drawn inside Q x M: member coordinates plus edges between them.

    Members are (a, b) coordinate pairs sorted row-major; edges index into
    the member list.  ``validate_against`` enforces membership ranges and
    that every edge is a real product edge.
    """
    members: tuple[tuple[int, int], ...]
    edges: frozenset[tuple[int, int]]

    @staticmethod
    def build(members: Sequence[tuple[int, int]],
              edges: Sequence[tuple[tuple[int, int], tuple[int, int]]]
              ) -> "ProductSubgraph":
        ms = sorted(set(members))
        idx = {p: i for i, p in enumerate(ms)}
        es = set()
        for p, q in edges:
            if p not in idx or q not in idx:
                raise ValueError(f"edge endpoint {p if p not in idx else q} not a member")
            if p == q:
                raise ValueError(f"self-loop at {p}")
            es.add(edge_key(idx[p], idx[q]))
        return ProductSubgraph(tuple(ms), frozenset(es))

    @property
    def n(self) -> int:
        return len(self.members)

    def graph(self) -> LoopGraph:
        return LoopGraph(self.n, self.edges)

    def validate_against(self, q: LoopGraph, m: LoopGraph) -> None:
        from .graphs import product_adjacent
        for (a, b) in self.members:
            if not (0 <= a < q.n and 0 <= b < m.n):
                raise ValueError(f"member ({a},{b}) outside the product")
        for (x, y) in self.edges:
            if not product_adjacent(q, m, self.members[x], self.members[y]):
                raise ValueError(
                    f"edge {self.members[x]}-{self.members[y]} is not a product edge")


@dataclass
class ColourInterner:
    """Bijection between used colours and dense ids 1..len."""
    ids: dict = field(default_factory=dict)
    colours: list = field(default_factory=list)

    def intern(self, colour: FullColour) -> int:
        got = self.ids.get(colour)
        if got is None:
            self.colours.append(colour)
            got = len(self.colours)
            self.ids[colour] = got
        return got

    def __len__(self) -> int:
        return len(self.colours)


@dataclass(frozen=True)
class BoundReport:
    """Exact integer evaluation of the published size bounds."""
    delta: int
    k: int
    d: Optional[int]
    cw_general: int
    tw_general: int
    cw_refined: Optional[int]
    tw_refined: Optional[int]


def bound_report(delta: int, k: int, d: Optional[int] = None) -> BoundReport:
    """Symbolic clique-width / tree-width bounds as exact integers.

    General: (delta^2+2) * delta^(2(delta+1)(k+1)) for the expression budget
    and (k+1)(delta^2+1) * delta^(...) for the factor width; with a
    d-colourable square the base shrinks to min((d-1)^(delta+1), 2^d)^(k+1).
    Values are exact big integers, never saturated.
    """
    if delta < 2:
        raise ValueError("delta must be >= 2")
    if k < 0:
        raise ValueError("k must be >= 0")
    power = delta ** (2 * (delta + 1) * (k + 1))
    cw_general = (delta * delta + 2) * power
    tw_general = (k + 1) * (delta * delta + 1) * power
    cw_refined = tw_refined = None
    if d is not None:
        if d < 2:
            raise ValueError("d must be >= 2")
        base = min((d - 1) ** (delta + 1), 2 ** d) ** (k + 1)
        cw_refined = (d + 1) * base
        tw_refined = (k + 1) * d * base
    return BoundReport(delta, k, d, cw_general, tw_general, cw_refined, tw_refined)


# ---------------------------------------------------------------------------
# base colours

def base_colour(x_index: int, node: int, g: ProductSubgraph,
                adjacency: Sequence[Sequence[int]], s: Sequence[int],
                td: TreeDecomposition, ctx: DecompositionContext) -> BaseColour:
    """Entries of x's colour at a node whose Y-set holds x's column.

    b_{p(m')}(s(q')) = 1 exactly when x has a g-neighbour (q', m') with m'
    in the node's bag; all other entries are zero.  Raises when x's column
    is not in the node's Y-set.
    """
    a, m = g.members[x_index]
    if m not in ctx.y[node]:
        raise ValueError(f"column {m} is not in Y of node {node}")
    k1 = max(len(b) for b in td.bags)
    entries: list[set[int]] = [set() for _ in range(k1)]
    bag = td.bags[node]
    for y in adjacency[x_index]:
        qy, my = g.members[y]
        if my in bag:
            entries[ctx.p[my]].add(s[qy])
    return tuple(frozenset(e) for e in entries)


def _zeroed(base: BaseColour, j: int) -> BaseColour:
    out = list(base)
    out[j] = frozenset()
    return tuple(out)


# ---------------------------------------------------------------------------
# the recursive expression builder

@dataclass
class ExpressionCertificate:
    """Expression valued g plus the bookkeeping the caller needs.

    ``order[i]`` is the member index created i-th, i.e. value vertex i of
    the evaluated expression corresponds to g's member order[i].
    """
    expr: ParamExpression
    order: list[int]
    interner: ColourInterner
    s: list[int]
    td: TreeDecomposition
    ctx: DecompositionContext
    ell_used: int


class _Builder:
    def __init__(self, g: ProductSubgraph, q: LoopGraph, m: LoopGraph,
                 td: TreeDecomposition, s: Sequence[int]):
        self.g = g
        self.q = q
        self.s = list(s)
        self.td = td
        self.ctx = derive_context(m, td)
        adjacency: list[list[int]] = [[] for _ in range(g.n)]
        for (x, y) in g.edges:
            adjacency[x].append(y)
            adjacency[y].append(x)
        self.adjacency = [sorted(a) for a in adjacency]
        cols: dict[int, list[int]] = {}
        for i, (a, b) in enumerate(g.members):
            cols.setdefault(b, []).append(i)
        self.columns = cols              # m-coordinate -> member indices
        self.interner = ColourInterner()
        self.order: list[int] = []
        self.initial: list[Optional[FullColour]] = [None] * g.n

    def initial_colour(self, x: int) -> FullColour:
        got = self.initial[x]
        if got is None:
            a, m = self.g.members[x]
            base = base_colour(x, self.ctx.top_node[m], self.g, self.adjacency,
                               self.s, self.td, self.ctx)
            got = (self.s[a], base)
            self.initial[x] = got
        return got

    def run(self) -> tuple[Node, dict[int, list[int]]]:
        # leaf-to-root sweep with per-node partial results, so deep
        # decomposition trees stay off the Python stack; each partial
        # carries its own creation-order list mirroring its union structure
        children: dict[int, list[int]] = {}
        for c, par in enumerate(self.td.parent):
            if par >= 0:
                children.setdefault(par, []).append(c)
        done: dict[int, tuple[Optional[Node], dict[int, list[int]], list[int]]] = {}
        for t in reversed(self.td.topo_order()):
            expr: Optional[Node] = None
            state: dict[int, list[int]] = {}
            order: list[int] = []
            for c in children.get(t, []):
                sub, sub_state, sub_order = done.pop(c)
                if sub is None:
                    continue
                order.extend(sub_order)
                if expr is None:
                    expr, state = sub, sub_state
                else:
                    expr = Union(expr, sub)
                    for cid, xs in sub_state.items():
                        state.setdefault(cid, []).extend(xs)
            for m in self.ctx.yprime[t]:
                batch = self.columns.get(m, [])
                if not batch:
                    continue
                expr, state = self._attach_batch(t, m, batch, expr, state)
                order.extend(batch)
            if t != self.td.root and expr is not None:
                expr, state = self._zero_departing(t, expr, state)
            done[t] = (expr, state, order)
        node, state, order = done[self.td.root]
        if node is None:
            raise ValueError("empty product subgraph")
        self.order = order
        return node, state

    def _attach_batch(self, t: int, m: int, batch: list[int],
                      expr: Optional[Node], state: dict[int, list[int]]):
        j = self.ctx.p[m]
        # creates, with pvertex = the Q coordinate and the interned initial colour
        batch_initial: dict[int, list[int]] = {}
        sub: Optional[Node] = None
        for x in batch:
            a, _ = self.g.members[x]
            cid = self.interner.intern(self.initial_colour(x))
            created = Create(cid, a)
            sub = created if sub is None else Union(sub, created)
            batch_initial.setdefault(cid, []).append(x)
        assert sub is not None
        expr = sub if expr is None else Union(expr, sub)

        # wire running x initial: running entry at j lists the square colours
        # of its real neighbours in this column
        emitted: set[tuple[int, int]] = set()
        for cid_b in sorted(batch_initial):
            beta = self.interner.colours[cid_b - 1][0]
            for cid_a in sorted(state):
                alpha_a, base_a = self.interner.colours[cid_a - 1]
                assert alpha_a is None
                if beta in base_a[j]:
                    key = (cid_a, cid_b)
                    if key not in emitted:
                        emitted.add(key)
                        expr = AddEdges(cid_a, cid_b, expr)
        # wire initial x initial inside the batch
        for cid_b in sorted(batch_initial):
            beta = self.interner.colours[cid_b - 1][0]
            for cid_a in sorted(batch_initial):
                if cid_a == cid_b:
                    continue
                _, base_a = self.interner.colours[cid_a - 1]
                if beta in base_a[j]:
                    key = (min(cid_a, cid_b), max(cid_a, cid_b))
                    if key not in emitted:
                        emitted.add(key)
                        expr = AddEdges(cid_a, cid_b, expr)
        # retire initial colours to running ones
        for cid_b in sorted(batch_initial):
            _, base_b = self.interner.colours[cid_b - 1]
            cid_run = self.interner.intern((None, base_b))
            if cid_run != cid_b:
                expr = Recolor(cid_b, cid_run, expr)
            state.setdefault(cid_run, []).extend(batch_initial[cid_b])
        return expr, state

    def _zero_departing(self, t: int, expr: Node, state: dict[int, list[int]]):
        for m in self.ctx.yprime[t]:
            j = self.ctx.p[m]
            for cid in sorted(state):
                if not state.get(cid):
                    continue
                alpha, base = self.interner.colours[cid - 1]
                assert alpha is None
                if base[j]:
                    cid_new = self.interner.intern((None, _zeroed(base, j)))
                    assert cid_new != cid
                    expr = Recolor(cid, cid_new, expr)
                    state.setdefault(cid_new, []).extend(state.pop(cid))
        return expr, state


def _prepare(g: ProductSubgraph, q: LoopGraph, m: LoopGraph,
             td: TreeDecomposition) -> TreeDecomposition:
    if q.loops or m.loops:
        raise ValueError("factors must be simple graphs")
    if q.max_degree() < 2:
        raise ValueError("left factor must have maximum degree >= 2")
    g.validate_against(q, m)
    verdict = validate_decomposition(m, td)
    if not verdict:
        raise ValueError(f"invalid decomposition: {verdict.reason} {verdict.witness}")
    return binarize(td)


def build_expression(g: ProductSubgraph, q: LoopGraph, m: LoopGraph,
                     td: TreeDecomposition,
                     s: Optional[Sequence[int]] = None) -> ExpressionCertificate:
    """Parameterized expression over reflexive(q) valued exactly g.

    The value's vertex i is g's member order[i], its pvertex is that
    member's Q coordinate, and its edge set equals g's edge set -- asserted
    by the caller via evaluate, never assumed here.
    """
    td2 = _prepare(g, q, m, td)
    colour = list(s) if s is not None else greedy_square_coloring(q)
    builder = _Builder(g, q, m, td2, colour)
    root, _ = builder.run()
    ell = len(builder.interner)
    expr = ParamExpression(root, ell, reflexive_closure(q))
    return ExpressionCertificate(expr, builder.order, builder.interner,
                                 builder.s, td2, builder.ctx, ell)


# ---------------------------------------------------------------------------
# the bounded-tree-width factor

@dataclass
class InducedFactorCertificate:
    """Factor on V(M) x (used initial colours) with aligned decomposition.

    ``gamma`` lists the used initial colours in dense order; factor vertex
    (m, gamma[r]) has id m * len(gamma) + r.  ``embedding`` maps g's member
    i into Q x m2.  Width bounds: symbolic from bound_report, interned from
    the actual bags.
    """
    m2: LoopGraph
    td2: TreeDecomposition
    embedding: ProductEmbedding
    gamma: list[FullColour]
    width_interned: int
    report: BoundReport
    ell_used: int


def build_induced_factor(g: ProductSubgraph, q: LoopGraph, m: LoopGraph,
                         td: TreeDecomposition,
                         s: Optional[Sequence[int]] = None,
                         d: Optional[int] = None) -> InducedFactorCertificate:
    """Factor M2 plus decomposition and embedding certificate.

    Edges of M2 are decided per oriented column pair: with (m, m') equal or
    adjacent in M and m preceding m' (bottom-up node order, then batch
    order), (m, c) ~ (m', c') exactly when c's entry at m''s bag label
    contains c''s own square colour.  On colour pairs that both occur on
    real vertices the rule is symmetric, so the orientation only
    disambiguates never-realized combinations.
    """
    td_b = _prepare(g, q, m, td)
    colour = list(s) if s is not None else greedy_square_coloring(q)
    ctx = derive_context(m, td_b)

    adjacency: list[list[int]] = [[] for _ in range(g.n)]
    for (x, y) in g.edges:
        adjacency[x].append(y)
        adjacency[y].append(x)

    initial: list[FullColour] = []
    for x in range(g.n):
        a, mm = g.members[x]
        base = base_colour(x, ctx.top_node[mm], g, adjacency, colour, td_b, ctx)
        initial.append((colour[a], base))
    gamma = sorted(set(initial),
                   key=lambda c: (c[0], tuple(tuple(sorted(e)) for e in c[1])))
    rank = {c: r for r, c in enumerate(gamma)}
    ng = len(gamma)

    order = td_b.topo_order()
    node_pos = {t: i for i, t in enumerate(order)}

    def precedes(m1: int, m2v: int) -> bool:
        t1, t2 = ctx.top_node[m1], ctx.top_node[m2v]
        if t1 == t2:
            return m1 <= m2v
        # descendant nodes come later in topo order
        return node_pos[t1] > node_pos[t2]

    pairs = [(mm, mm) for mm in range(m.n)]
    for (m1, m2v) in m.edges:
        pairs.append((m1, m2v))
    edges: set[tuple[int, int]] = set()
    for (m1, m2v) in pairs:
        lo, hi = (m1, m2v) if precedes(m1, m2v) else (m2v, m1)
        j = ctx.p[hi]
        for c_lo in gamma:
            entry = c_lo[1][j]
            if not entry:
                continue
            for c_hi in gamma:
                if c_hi[0] in entry:
                    u = lo * ng + rank[c_lo]
                    v = hi * ng + rank[c_hi]
                    if u != v:
                        edges.add(edge_key(u, v))
    m2 = LoopGraph(m.n * ng, edges)

    bags = tuple(frozenset(mm * ng + r for mm in bag for r in range(ng))
                 for bag in td_b.bags)
    td2 = TreeDecomposition(td_b.parent, bags, td_b.root)

    image = tuple((a, mm * ng + rank[initial[x]])
                  for x, (a, mm) in enumerate(g.members))
    emb = ProductEmbedding(q, m2, image)

    delta = max(q.max_degree(), 2)
    k = td_b.width()
    report = bound_report(delta, k, d)
    return InducedFactorCertificate(m2, td2, emb, gamma, td2.width(), report, ng)


# ---------------------------------------------------------------------------
# the path specialization

def modulo3_coloring(q: LoopGraph) -> list[int]:
    """Square-proper 3-colouring of a path: position along the path mod 3."""
    order = is_path_order(q)
    if order is None:
        raise ValueError("left factor is not a path")
    colour = [0] * q.n
    for i, v in enumerate(order):
        colour[v] = (i % 3) + 1
    return colour


@dataclass
class PathCaseResult:
    expression: ExpressionCertificate
    factor: InducedFactorCertificate
    report: BoundReport


def path_case(g: ProductSubgraph, q: LoopGraph, m: LoopGraph,
              td: TreeDecomposition) -> PathCaseResult:
    """Both constructions over a path left factor with the mod-3 colouring.

    The refined d=3 bounds apply: the expression budget stays within
    4 * 8^(k+1) = 2^(3k+5) and the factor width within 3(k+1) * 8^(k+1) - 1.
    """
    colour = modulo3_coloring(q)
    ec = build_expression(g, q, m, td, s=colour)
    fc = build_induced_factor(g, q, m, td, s=colour, d=3)
    k = fc.report.k
    report = bound_report(max(q.max_degree(), 2), k, 3)
    assert ec.ell_used <= report.cw_refined
    assert fc.width_interned <= report.tw_refined - 1
    return PathCaseResult(ec, fc, report)
