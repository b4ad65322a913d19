"""Rooted tree decompositions, derived node sets, and an exact small-instance
tree-width oracle.

The derived sets per node t of a rooted decomposition:
  xplus[t] : union of the bags of t and its descendants
  y[t]     : xplus[t] minus the parent's bag (whole vertex set at the root) --
             the vertices occurring only at or below t
  p        : vertex -> {0..k} labelling, injective on every bag

The exact tree-width oracle runs a subset DP over elimination orders with
bitmask adjacency; the default cap of 14 vertices is configurable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graphs import LoopGraph, Verdict


@dataclass(frozen=True)
class TreeDecomposition:
    """Rooted tree of bags over node ids 0..len(bags)-1."""
    parent: tuple[int, ...]            # parent[root] == -1
    bags: tuple[frozenset[int], ...]
    root: int = 0

    def __post_init__(self):
        if not self.bags:
            raise ValueError("decomposition needs at least one node")
        if len(self.parent) != len(self.bags):
            raise ValueError("parent/bags length mismatch")
        if self.parent[self.root] != -1:
            raise ValueError("root must have parent -1")

    @property
    def num_nodes(self) -> int:
        return len(self.bags)

    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in self.bags]
        for t, par in enumerate(self.parent):
            if par >= 0:
                ch[par].append(t)
        return ch

    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    def topo_order(self) -> list[int]:
        """Nodes root-first; every node appears after its parent."""
        ch = self.children()
        order = [self.root]
        i = 0
        while i < len(order):
            order.extend(ch[order[i]])
            i += 1
        if len(order) != self.num_nodes:
            raise ValueError("decomposition tree is not connected")
        return order


@dataclass(frozen=True)
class DecompositionContext:
    """Derived sets of a binarized rooted decomposition plus the bag labelling."""
    xplus: tuple[frozenset[int], ...]
    y: tuple[frozenset[int], ...]
    p: tuple[int, ...]                       # per graph vertex
    yprime: tuple[tuple[int, ...], ...]      # y[t] & bag[t], ascending ids
    top_node: tuple[int, ...]                # per graph vertex: its Y' node


def validate_decomposition(g: LoopGraph, td: TreeDecomposition) -> Verdict:
    """Check the three axioms; report the first violated one with a witness."""
    try:
        order = td.topo_order()
    except ValueError as e:
        return Verdict(False, "tree", (str(e),))
    covered = set()
    for b in td.bags:
        for v in b:
            if not 0 <= v < g.n:
                return Verdict(False, "bag-vertex-range", (v,))
        covered |= b
    if covered != set(range(g.n)):
        missing = min(set(range(g.n)) - covered)
        return Verdict(False, "axiom-i-cover", (missing,))
    # axiom (ii): nodes holding v form a subtree
    for v in range(g.n):
        holders = [t for t in range(td.num_nodes) if v in td.bags[t]]
        hs = set(holders)
        top = min(holders, key=order.index)
        reached = {top}
        stack = [top]
        ch = td.children()
        while stack:
            t = stack.pop()
            for c in ch[t]:
                if c in hs and c not in reached:
                    reached.add(c)
                    stack.append(c)
        if reached != hs:
            return Verdict(False, "axiom-ii-connectivity", (v,))
    for (u, v) in g.edges:
        if not any(u in b and v in b for b in td.bags):
            return Verdict(False, "axiom-iii-edge", (u, v))
    return Verdict(True)


def binarize(td: TreeDecomposition) -> TreeDecomposition:
    """Same-width decomposition in which every node has at most two children.

    A node with d > 2 children keeps its first child and hands the rest to a
    chain of fresh nodes carrying duplicated bags (duplicates have empty Y,
    so the derived-set semantics is unchanged).
    """
    ch = td.children()
    if all(len(c) <= 2 for c in ch):
        return td
    parent = list(td.parent)
    bags = list(td.bags)
    for t in range(td.num_nodes):
        kids = ch[t]
        if len(kids) <= 2:
            continue
        anchor = t
        for i in range(1, len(kids) - 1):
            fresh = len(bags)
            bags.append(td.bags[t])
            parent.append(anchor)
            parent[kids[i]] = fresh
            anchor = fresh
        parent[kids[-1]] = anchor
    return TreeDecomposition(tuple(parent), tuple(bags), td.root)


def derive_context(g: LoopGraph, td: TreeDecomposition) -> DecompositionContext:
    """Derived sets and the top-down greedy bag labelling.

    p is assigned root-to-leaves: when a vertex first appears (its topmost
    bag), it takes the smallest value in 0..k unused by the already-assigned
    vertices of that bag.  When a vertex is introduced below, every other
    vertex of that bag is already assigned, so injectivity on every bag
    follows by induction.
    """
    verdict = validate_decomposition(g, td)
    if not verdict:
        raise ValueError(f"invalid decomposition: {verdict.reason} {verdict.witness}")
    ch = td.children()
    order = td.topo_order()
    k1 = max(len(b) for b in td.bags)
    xplus: list[set[int]] = [set() for _ in td.bags]
    for t in reversed(order):
        xplus[t] |= td.bags[t]
        for c in ch[t]:
            xplus[t] |= xplus[c]
    y: list[frozenset[int]] = [frozenset()] * td.num_nodes
    for t in range(td.num_nodes):
        if t == td.root:
            y[t] = frozenset(xplus[t])
        else:
            y[t] = frozenset(xplus[t] - td.bags[td.parent[t]])
    p = [-1] * g.n
    for t in order:
        used = {p[v] for v in td.bags[t] if p[v] >= 0}
        for v in sorted(td.bags[t]):
            if p[v] < 0:
                c = 0
                while c in used:
                    c += 1
                if c >= k1:
                    raise ValueError(f"bag at node {t} exceeds declared width")
                p[v] = c
                used.add(c)
    yprime = tuple(tuple(sorted(y[t] & td.bags[t])) for t in range(td.num_nodes))
    top_node = [-1] * g.n
    for t in range(td.num_nodes):
        for v in yprime[t]:
            top_node[v] = t
    if any(t < 0 for t in top_node):
        raise RuntimeError("some vertex has no top node")
    return DecompositionContext(
        tuple(frozenset(s) for s in xplus), tuple(y), tuple(p), yprime,
        tuple(top_node))


# ---------------------------------------------------------------------------
# exact tree-width

DEFAULT_TW_CAP = 14


def exact_treewidth(g: LoopGraph, cap: int = DEFAULT_TW_CAP
                    ) -> tuple[int, TreeDecomposition]:
    """Exact tree-width by subset DP over elimination orders, with witness.

    tw(S) = min over v in S of max(tw(S - v), |outside-neighbourhood of the
    component of v in S|); the witness decomposition is rebuilt from the
    recorded elimination order and always validates at the returned width.
    """
    if g.loops:
        raise ValueError("tree-width is defined for simple graphs here")
    n = g.n
    if n > cap:
        raise ValueError(f"instance has {n} > {cap} vertices; raise the cap explicitly")
    if n == 0:
        raise ValueError("empty graph")
    adj = [0] * n
    for (u, v) in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u

    def q_size(smask: int, v: int) -> int:
        # vertices outside smask|{v} seen from v through smask
        comp = 1 << v
        frontier = comp
        seen_nb = 0
        while frontier:
            reach = 0
            f = frontier
            while f:
                low = f & -f
                reach |= adj[low.bit_length() - 1]
                f ^= low
            seen_nb |= reach
            frontier = reach & smask & ~comp
            comp |= frontier
        return bin(seen_nb & ~smask & ~(1 << v)).count("1")

    full = (1 << n) - 1
    tw = {0: -1}
    choice: dict[int, int] = {}
    masks_by_size: list[list[int]] = [[] for _ in range(n + 1)]
    for m in range(1 << n):
        masks_by_size[bin(m).count("1")].append(m)
    for size in range(1, n + 1):
        for m in masks_by_size[size]:
            best, bestv = None, -1
            rest = m
            while rest:
                low = rest & -rest
                v = low.bit_length() - 1
                rest ^= low
                prev = m ^ low
                val = max(tw[prev], q_size(prev, v))
                if best is None or val < best or (val == best and v < bestv):
                    best, bestv = val, v
            tw[m] = best  # type: ignore[assignment]
            choice[m] = bestv
    width = tw[full]

    order = []
    m = full
    while m:
        v = choice[m]
        order.append(v)
        m ^= 1 << v
    order.reverse()   # elimination order: order[0] eliminated first

    td = decomposition_from_elimination(g, order)
    assert td.width() == width, "witness width disagrees with DP"
    return width, td


def decomposition_from_elimination(g: LoopGraph, order: Sequence[int]
                                   ) -> TreeDecomposition:
    """Tree decomposition induced by an elimination order (fill-in bags)."""
    n = g.n
    pos = {v: i for i, v in enumerate(order)}
    if len(pos) != n:
        raise ValueError("order must enumerate all vertices")
    adj = {v: set(g.neighbours(v)) for v in range(n)}
    bags: list[frozenset[int]] = [frozenset()] * n
    for v in order:
        later = {u for u in adj[v] if pos[u] > pos[v]}
        bags[pos[v]] = frozenset(later | {v})
        for a in later:
            adj[a].discard(v)
            for b in later:
                if a != b:
                    adj[a].add(b)
    parent = [-1] * n
    # bag i attaches under the bag of its earliest-eliminated later neighbour
    for i in range(n):
        rest = bags[i] - {order[i]}
        if rest:
            parent[i] = pos[min(rest, key=lambda u: pos[u])]
        elif i + 1 < n:
            parent[i] = i + 1
    root = n - 1
    # reroot so node 0 is the root, keeping ids stable except parent flips
    if root != 0:
        # relabel nodes so the root becomes 0 by swapping ids 0 and root
        perm = list(range(n))
        perm[0], perm[root] = perm[root], perm[0]
        inv = {old: new for new, old in enumerate(perm)}
        parent2 = [-1] * n
        bags2: list[frozenset[int]] = [frozenset()] * n
        for old in range(n):
            new = inv[old]
            bags2[new] = bags[old]
            parent2[new] = inv[parent[old]] if parent[old] >= 0 else -1
        parent, bags = parent2, bags2
    return TreeDecomposition(tuple(parent), tuple(bags), 0)


def elimination_width(g: LoopGraph, order: Sequence[int]) -> int:
    """Width of one elimination order (max forward degree during fill-in)."""
    adj = {v: set(g.neighbours(v)) for v in range(g.n)}
    width = 0
    for v in order:
        nb = adj[v]
        width = max(width, len(nb))
        for a in nb:
            adj[a].discard(v)
        for a in nb:
            for b in nb:
                if a != b:
                    adj[a].add(b)
        del adj[v]
    return width
