"""Labelled expression calculus over a parameter loop graph.

A ParamExpression builds a simple graph from four operations on labelled
graphs.  Every vertex carries a label (colour, pvertex) where the colour is
an integer in 1..ell and pvertex is a vertex of the parameter graph H:

  * create(colour, pvertex)     -- one new vertex;
  * union                       -- disjoint union, left block reindexed first;
  * addedges(i, j), i != j      -- add every edge between a colour-i vertex
                                   with pvertex v and a colour-j vertex with
                                   pvertex w whenever vw is an edge of H,
                                   including v == w when v has a loop;
  * recolor(i, j), i != j       -- rewrite colour i to j, pvertices fixed.

A ClassicExpression is the colour-only calculus (addedges joins all i/j
pairs); it coincides with a ParamExpression over a single looped vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union as TUnion

from .graphs import LoopGraph, edge_key


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Create:
    colour: int
    pvertex: int = 0

@dataclass(frozen=True)
class Union:
    left: "Node"
    right: "Node"

@dataclass(frozen=True)
class AddEdges:
    i: int
    j: int
    child: "Node"

@dataclass(frozen=True)
class Recolor:
    i: int
    j: int
    child: "Node"

Node = TUnion[Create, Union, AddEdges, Recolor]


@dataclass(frozen=True)
class ParamExpression:
    """Expression over parameter graph ``param`` with colour budget ``ell``."""
    root: Node
    ell: int
    param: LoopGraph


@dataclass(frozen=True)
class ClassicExpression:
    """Ordinary colour-only expression (pvertex fields are ignored)."""
    root: Node
    ell: int


@dataclass
class LabeledGraph:
    """Value of an expression: a simple graph plus per-vertex labels."""
    graph: LoopGraph
    colours: list[int]
    pvertices: list[int]
    max_colour_used: int = 0

    def labels(self) -> list[tuple[int, int]]:
        return list(zip(self.colours, self.pvertices))


def postorder(node: Node) -> Iterator[Node]:
    stack = [(node, False)]
    while stack:
        cur, done = stack.pop()
        if done:
            yield cur
            continue
        stack.append((cur, True))
        if isinstance(cur, Union):
            stack.append((cur.right, False))
            stack.append((cur.left, False))
        elif isinstance(cur, (AddEdges, Recolor)):
            stack.append((cur.child, False))


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str
    fatal: bool = True

    def __str__(self):
        kind = "error" if self.fatal else "warning"
        return f"{kind} at {self.path}: {self.message}"


def _components(h: LoopGraph) -> list[int]:
    comp = [-1] * h.n
    c = 0
    for s in range(h.n):
        if comp[s] >= 0:
            continue
        stack = [s]
        comp[s] = c
        while stack:
            v = stack.pop()
            for w in h.neighbours(v):
                if comp[w] < 0:
                    comp[w] = c
                    stack.append(w)
        c += 1
    return comp


def _walk_with_paths(root: Node):
    """Iterative preorder over (node, path-link); paths render on demand.

    A path link is None for the root or (parent_link, step); rendering joins
    the steps, so deep expressions cost nothing unless a diagnostic fires.
    """
    stack = [(root, None)]
    while stack:
        node, link = stack.pop()
        yield node, link
        if isinstance(node, Union):
            stack.append((node.right, (link, "right")))
            stack.append((node.left, (link, "left")))
        elif isinstance(node, (AddEdges, Recolor)):
            stack.append((node.child, (link, "child")))


def _render_path(link) -> str:
    steps = []
    while link is not None:
        link, step = link
        steps.append(step)
    return ".".join(["root"] + steps[::-1])


def validate(expr: ParamExpression) -> list[Diagnostic]:
    """All invariant violations, each with the AST path where it occurs.

    Fatal diagnostics block evaluation.  A non-fatal warning is emitted when
    the created pvertices span several components of the parameter graph:
    no edge can ever join them, so a connected value is impossible.
    """
    out: list[Diagnostic] = []
    h = expr.param
    if expr.ell < 1:
        out.append(Diagnostic("root", f"colour budget {expr.ell} < 1"))
    used_pvertices: set[int] = set()
    for node, link in _walk_with_paths(expr.root):
        if isinstance(node, Create):
            if not 1 <= node.colour <= expr.ell:
                out.append(Diagnostic(_render_path(link),
                                      f"colour {node.colour} outside 1..{expr.ell}"))
            if not 0 <= node.pvertex < h.n:
                out.append(Diagnostic(_render_path(link),
                                      f"pvertex {node.pvertex} outside parameter graph"))
            else:
                used_pvertices.add(node.pvertex)
        elif isinstance(node, (AddEdges, Recolor)):
            if node.i == node.j:
                kind = "addedges" if isinstance(node, AddEdges) else "recolour"
                out.append(Diagnostic(_render_path(link), f"{kind} i=j ({node.i})"))
            for c in (node.i, node.j):
                if not 1 <= c <= expr.ell:
                    out.append(Diagnostic(_render_path(link),
                                          f"colour {c} outside 1..{expr.ell}"))
    if h.n and used_pvertices:
        comp = _components(h)
        if len({comp[v] for v in used_pvertices}) > 1:
            out.append(Diagnostic(
                "root", "pvertices span several components of the parameter "
                "graph; a connected value is impossible", fatal=False))
    return out


def validate_classic(expr: ClassicExpression) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for node, link in _walk_with_paths(expr.root):
        if isinstance(node, Create):
            if not 1 <= node.colour <= expr.ell:
                out.append(Diagnostic(_render_path(link),
                                      f"colour {node.colour} outside 1..{expr.ell}"))
        elif isinstance(node, (AddEdges, Recolor)):
            if node.i == node.j:
                out.append(Diagnostic(_render_path(link), f"i=j ({node.i})"))
            for c in (node.i, node.j):
                if not 1 <= c <= expr.ell:
                    out.append(Diagnostic(_render_path(link),
                                          f"colour {c} outside 1..{expr.ell}"))
    return out


# ---------------------------------------------------------------------------
# evaluation

class _State:
    """Mutable evaluation state for one subtree."""

    __slots__ = ("colours", "pvertices", "edges", "max_colour")

    def __init__(self):
        self.colours: list[int] = []
        self.pvertices: list[int] = []
        self.edges: set[tuple[int, int]] = set()
        self.max_colour = 0

    def buckets(self) -> dict[tuple[int, int], list[int]]:
        b: dict[tuple[int, int], list[int]] = {}
        for x, (c, v) in enumerate(zip(self.colours, self.pvertices)):
            b.setdefault((c, v), []).append(x)
        return b


def evaluate(expr: ParamExpression) -> LabeledGraph:
    """Value of a validated expression.

    Evaluation runs over the postorder with an explicit value stack, so
    arbitrarily deep operation chains stay within constant Python stack.
    addedges(i, j) buckets vertices per (colour, pvertex) and walks the
    parameter graph's edges and loops once, so its cost is near-linear in
    the touched vertices rather than quadratic in the value.
    """
    bad = [d for d in validate(expr) if d.fatal]
    if bad:
        raise ValueError("invalid expression: " + "; ".join(map(str, bad)))
    h = expr.param
    stack: list[_State] = []
    for node in postorder(expr.root):
        if isinstance(node, Create):
            st = _State()
            st.colours = [node.colour]
            st.pvertices = [node.pvertex]
            st.max_colour = node.colour
            stack.append(st)
        elif isinstance(node, Union):
            right = stack.pop()
            left = stack.pop()
            off = len(left.colours)
            left.colours.extend(right.colours)
            left.pvertices.extend(right.pvertices)
            left.edges.update((u + off, v + off) for (u, v) in right.edges)
            left.max_colour = max(left.max_colour, right.max_colour)
            stack.append(left)
        elif isinstance(node, Recolor):
            st = stack[-1]
            touched = False
            for x, c in enumerate(st.colours):
                if c == node.i:
                    st.colours[x] = node.j
                    touched = True
            if touched:
                st.max_colour = max(st.max_colour, node.j)
        else:
            st = stack[-1]
            buckets = st.buckets()
            pairs: list[tuple[list[int], list[int]]] = []
            for (v, w) in h.edges:
                a, b = buckets.get((node.i, v)), buckets.get((node.j, w))
                if a and b:
                    pairs.append((a, b))
                a, b = buckets.get((node.i, w)), buckets.get((node.j, v))
                if a and b:
                    pairs.append((a, b))
            for v in h.loops:
                a, b = buckets.get((node.i, v)), buckets.get((node.j, v))
                if a and b:
                    pairs.append((a, b))
            for xs, ys in pairs:
                for x in xs:
                    for y in ys:
                        st.edges.add(edge_key(x, y))
    (st,) = stack
    graph = LoopGraph(len(st.colours), st.edges)
    return LabeledGraph(graph, st.colours, st.pvertices, st.max_colour)


def evaluate_classic(expr: ClassicExpression) -> LabeledGraph:
    """Value of a colour-only expression (independent of the param calculus)."""
    bad = validate_classic(expr)
    if bad:
        raise ValueError("invalid classic expression: " + "; ".join(map(str, bad)))
    stack: list[tuple[list[int], set, int]] = []
    for node in postorder(expr.root):
        if isinstance(node, Create):
            stack.append(([node.colour], set(), node.colour))
        elif isinstance(node, Union):
            rc, re, rm = stack.pop()
            lc, le, lm = stack.pop()
            off = len(lc)
            lc.extend(rc)
            le.update((u + off, v + off) for (u, v) in re)
            stack.append((lc, le, max(lm, rm)))
        elif isinstance(node, Recolor):
            cs, es, m = stack.pop()
            touched = False
            for x, c in enumerate(cs):
                if c == node.i:
                    cs[x] = node.j
                    touched = True
            stack.append((cs, es, max(m, node.j) if touched else m))
        else:
            cs, es, m = stack[-1]
            xs = [x for x, c in enumerate(cs) if c == node.i]
            ys = [x for x, c in enumerate(cs) if c == node.j]
            for x in xs:
                for y in ys:
                    es.add(edge_key(x, y))
    ((colours, edges, used),) = stack
    graph = LoopGraph(len(colours), edges)
    return LabeledGraph(graph, colours, [0] * len(colours), used)


def expression_ell(expr: ParamExpression) -> int:
    """Largest colour actually placed on a vertex during evaluation.

    This is an upper-bound witness for the value's parameterized
    clique-width, not the exact minimum (computing that is excluded).
    """
    return evaluate(expr).max_colour_used


# ---------------------------------------------------------------------------
# classic <-> parameterized bridge

K1_LOOP = LoopGraph(1, (), loops=(0,))


def _copy_tree(root: Node) -> Node:
    stack: list[Node] = []
    for node in postorder(root):
        if isinstance(node, Create):
            stack.append(Create(node.colour, 0))
        elif isinstance(node, Union):
            right = stack.pop()
            stack.append(Union(stack.pop(), right))
        elif isinstance(node, AddEdges):
            stack.append(AddEdges(node.i, node.j, stack.pop()))
        else:
            stack.append(Recolor(node.i, node.j, stack.pop()))
    return stack[0]


def cw_expression_bridge(classic: ClassicExpression) -> ParamExpression:
    """Rewrite a classic expression over the single looped vertex.

    Every label i becomes (i, v0); addedges then fires through the loop for
    every colour pair, so both evaluations agree vertex-for-vertex.
    """
    return ParamExpression(_copy_tree(classic.root), classic.ell, K1_LOOP)


def strip_pvertices(expr: ParamExpression) -> ClassicExpression:
    """Forget pvertices, reinterpreting addedges classically."""
    return ClassicExpression(_copy_tree(expr.root), expr.ell)


# ---------------------------------------------------------------------------
# grid construction

def _column(b: int, c_odd: int, c_even: int, helper: int) -> Node:
    """Vertical path on pvertices 0..b-1, rows alternating c_odd/c_even.

    Built row by row with the helper colour on the frontier vertex only, so
    the helper is free for reuse once the column is finished.
    """
    node: Node = Create(c_odd, 0)
    prev_colour = c_odd
    for r in range(1, b):
        node = Union(node, Create(helper, r))
        node = AddEdges(prev_colour, helper, node)
        prev_colour = c_odd if r % 2 == 0 else c_even
        node = Recolor(helper, prev_colour, node)
    return node


def grid_expression(a: int, b: int) -> tuple[ParamExpression, LoopGraph]:
    """(expression, reflexive path) whose value is the a x b grid.

    Columns are built standalone from three colours (two alternating row
    colours plus the frontier colour 5), joined to the previous column by
    two addedges calls, and retired wholesale to colour 5 one round later.
    Vertex ids come out row-major: column i occupies i*b .. i*b + b - 1,
    matching grid_graph(a, b) exactly.
    """
    if a < 1 or b < 1:
        raise ValueError("grid dimensions must be >= 1")
    pal = [(1, 2), (3, 4)]
    node = _column(b, 1, 2, 5)
    for col in range(1, a):
        c_odd, c_even = pal[col % 2]
        p_odd, p_even = pal[(col - 1) % 2]
        if col >= 2:
            node = Recolor(c_odd, 5, node)   # column col-2 reused these
            node = Recolor(c_even, 5, node)
        node = Union(node, _column(b, c_odd, c_even, 5))
        node = AddEdges(p_odd, c_odd, node)
        node = AddEdges(p_even, c_even, node)
    param = LoopGraph(b, [(i, i + 1) for i in range(b - 1)], loops=range(b))
    return ParamExpression(node, 5, param), param


# ---------------------------------------------------------------------------
# localization to an ordinary expression

def localize(expr: ParamExpression, x: int, r: int) -> tuple[ClassicExpression, list[int]]:
    """Ordinary expression valued the closed r-ball of x in the value.

    The expression is restricted to the ball's create nodes (restricting an
    expression to a vertex subset evaluates to the induced subgraph) and
    every (colour, pvertex) pair over the ball's pvertices becomes its own
    colour, so at most ell * |ball pvertices| colours appear.  Returns the
    expression and the ball (ascending original ids; the i-th created vertex
    of the localized value corresponds to ball[i]).
    """
    from .graphs import ball as ball_of
    value = evaluate(expr)
    if not 0 <= x < value.graph.n:
        raise ValueError(f"vertex {x} not in the value")
    keep = ball_of(value.graph, x, r)
    keep_set = set(keep)
    pvs = sorted({value.pvertices[v] for v in keep})
    pv_rank = {v: i for i, v in enumerate(pvs)}
    ell = expr.ell
    h = expr.param

    def colour_id(c: int, pv: int) -> int:
        return pv_rank[pv] * ell + c

    pv_set = set(pvs)
    adj_pairs = []
    for (v, w) in h.edges:
        if v in pv_set and w in pv_set:
            adj_pairs.append((v, w))
            adj_pairs.append((w, v))
    for v in h.loops:
        if v in pv_set:
            adj_pairs.append((v, v))

    counter = 0
    stack: list[Optional[Node]] = []
    for node in postorder(expr.root):
        if isinstance(node, Create):
            if counter in keep_set:
                stack.append(Create(colour_id(node.colour, node.pvertex)))
            else:
                stack.append(None)
            counter += 1
        elif isinstance(node, Union):
            right = stack.pop()
            left = stack.pop()
            if left is None:
                stack.append(right)
            elif right is None:
                stack.append(left)
            else:
                stack.append(Union(left, right))
        elif isinstance(node, Recolor):
            child = stack.pop()
            if child is not None:
                for pv in pvs:
                    child = Recolor(colour_id(node.i, pv),
                                    colour_id(node.j, pv), child)
            stack.append(child)
        else:
            child = stack.pop()
            if child is not None:
                for (v, w) in adj_pairs:
                    a, b = colour_id(node.i, v), colour_id(node.j, w)
                    if a != b:
                        child = AddEdges(a, b, child)
            stack.append(child)
    (root,) = stack
    if root is None:
        raise RuntimeError("ball lost every create node")
    return ClassicExpression(root, ell * len(pvs)), keep


# ---------------------------------------------------------------------------
# adversarial chained-copies family with a fixed small colour count

COND_LT, COND_EQ, COND_NE = "i<j", "i=j", "i!=j"
_CONDS = {
    COND_LT: lambda i, j: i < j,
    COND_EQ: lambda i, j: i == j,
    COND_NE: lambda i, j: i != j,
}


def check_pattern(h1: LoopGraph, a_list: list[int], b_list: list[int],
                  cond: str) -> list[tuple[int, int]]:
    """Index pairs (i, j) where h1's A x B adjacency contradicts
    'edge iff cond(i+1, j+1) is false' (equal entries consult loops)."""
    pred = _CONDS[cond]
    bad = []
    for i, u in enumerate(a_list):
        for j, w in enumerate(b_list):
            want = not pred(i + 1, j + 1)
            got = h1.has_edge(u, w)
            if want != got:
                bad.append((i, j))
    return bad


def _copy_of_h1(h1: LoopGraph, a_set: set[int], b_set: set[int],
                colour_a: int, colour_b: int, same: bool) -> Node:
    """Standalone loopless copy of h1: A-class/B-class coloured, rest colour 1.

    Vertices are created in id order with helper colour 5 on the frontier;
    edges to already-placed classes come from addedges against each live
    colour (pvertex adjacency restricts them to the real copy edges).
    """
    live = sorted({1, colour_a, colour_b})
    node: Optional[Node] = None
    for v in range(h1.n):
        created = Create(5, v)
        node = created if node is None else Union(node, created)
        if v > 0:
            for c in live:
                node = AddEdges(c, 5, node)
        if v in b_set:
            target = colour_b
        elif v in a_set and not same:
            target = colour_a
        else:
            target = 1
        node = Recolor(5, target, node)
    assert node is not None
    return node


def highcw_family(h1: LoopGraph, a_list: list[int], b_list: list[int],
                  cond: str, k: int) -> tuple[ParamExpression, LoopGraph]:
    """Chain of k copies of h1, consecutive copies wired by the cond pattern.

    Requires |A| = |B| with A = B or A, B disjoint, and the A x B adjacency
    of h1 to be exactly the negation of cond; violations are reported per
    index pair since the conclusion silently depends on them.  The expression
    uses five colours regardless of k.  Returns the expression and the
    directly constructed target graph (copy a of h1 occupies ids
    a*|V(h1)| .. ; loops stripped; copy a's B row joined to copy a+1's A row
    exactly where h1 has the corresponding edge).
    """
    if cond not in _CONDS:
        raise ValueError(f"cond must be one of {sorted(_CONDS)}")
    if len(a_list) != len(b_list):
        raise ValueError("|A| != |B|")
    if k < 1:
        raise ValueError("need k >= 1 copies")
    same = a_list == b_list
    if not same and set(a_list) & set(b_list):
        raise ValueError("A and B must be equal or disjoint")
    bad = check_pattern(h1, a_list, b_list, cond)
    if bad:
        raise ValueError(f"adjacency pattern violates '{cond}' at index pairs {bad}")

    a_set, b_set = set(a_list), set(b_list)
    # colours: 1 retired/inactive, 2 previous copy's B, 3 fresh A, 4 fresh B,
    # 5 frontier helper inside copies
    node = _copy_of_h1(h1, a_set, b_set, 1, 2, same)
    for _ in range(1, k):
        fresh = _copy_of_h1(h1, a_set, b_set, 3, 3 if same else 4, same)
        node = Union(node, fresh)
        node = AddEdges(2, 3, node)
        if same:
            node = Recolor(2, 1, node)
            node = Recolor(3, 2, node)
        else:
            node = Recolor(2, 1, node)
            node = Recolor(3, 1, node)
            node = Recolor(4, 2, node)
    expr = ParamExpression(node, 5, h1)

    nv = h1.n
    edges = []
    for a in range(k):
        off = a * nv
        edges.extend((off + u, off + v) for (u, v) in h1.edges)
        if a + 1 < k:
            for u in b_list:
                for w in a_list:
                    if h1.has_edge(u, w):
                        edges.append((off + u, off + nv + w))
    target = LoopGraph(k * nv, edges)
    return expr, target
