import itertools
import random

import pytest

from prodstruct.graphs import (LoopGraph, complete_graph, grid_graph,
                               path_graph)
from prodstruct.treedec import (TreeDecomposition, binarize,
                                decomposition_from_elimination, derive_context,
                                elimination_width, exact_treewidth,
                                validate_decomposition)
from helpers import (random_connected_graph, random_partial_2tree,
                     random_simple_graph, treewidth_by_order_search)


def path_decomposition(n):
    """Bags {i, i+1} along a path graph, rooted at the first bag."""
    bags = tuple(frozenset({i, i + 1}) for i in range(n - 1))
    parent = tuple([-1] + list(range(n - 2)))
    return TreeDecomposition(parent, bags, 0)


def test_validate_accepts_path_decomposition():
    g = path_graph(3)
    td = TreeDecomposition((-1, 0), (frozenset({0, 1}), frozenset({1, 2})))
    v = validate_decomposition(g, td)
    assert v.ok and td.width() == 1


def test_validate_rejects_uncovered_edge():
    g = LoopGraph(3, [(0, 1), (1, 2), (0, 2)])
    td = TreeDecomposition((-1, 0), (frozenset({0, 1}), frozenset({1, 2})))
    v = validate_decomposition(g, td)
    assert not v.ok and v.reason == "axiom-iii-edge"
    assert tuple(sorted(v.witness)) == (0, 2)


def test_validate_rejects_broken_connectivity():
    g = path_graph(3)
    td = TreeDecomposition(
        (-1, 0, 1),
        (frozenset({0, 1}), frozenset({1, 2}), frozenset({0, 1})))
    v = validate_decomposition(g, td)
    assert not v.ok and v.reason == "axiom-ii-connectivity"


def test_validate_rejects_missing_vertex():
    g = path_graph(3)
    td = TreeDecomposition((-1,), (frozenset({0, 1}),))
    v = validate_decomposition(g, td)
    assert not v.ok and v.reason == "axiom-i-cover"


def test_validate_agrees_with_direct_axioms_random():
    rng = random.Random(19)
    g = complete_graph(4)
    for _ in range(60):
        nodes = rng.randint(1, 4)
        parent = [-1] + [rng.randrange(t) for t in range(1, nodes)]
        bags = tuple(frozenset(v for v in range(4) if rng.random() < 0.6)
                     for _ in range(nodes))
        td = TreeDecomposition(tuple(parent), bags, 0)
        verdict = validate_decomposition(g, td)
        cover = set().union(*bags) == set(range(4))
        edges_ok = all(any({u, v} <= b for b in bags) for (u, v) in g.edges)
        conn_ok = True
        for v in range(4):
            holders = {t for t in range(nodes) if v in bags[t]}
            if not holders:
                conn_ok = False
                continue
            reach = {min(holders)}
            grew = True
            while grew:
                grew = False
                for t in holders:
                    if t not in reach and (parent[t] in reach or
                                           any(parent[s] == t for s in reach)):
                        reach.add(t)
                        grew = True
            if reach != holders:
                conn_ok = False
        assert verdict.ok == (cover and edges_ok and conn_ok)


def test_binarize_star():
    td = TreeDecomposition((-1, 0, 0, 0, 0), (frozenset({0, 1}),) * 5)
    b = binarize(td)
    assert all(len(c) <= 2 for c in b.children())
    assert b.width() == td.width()
    g = LoopGraph(2, [(0, 1)])
    assert validate_decomposition(g, b).ok


def test_binarize_noop_on_binary():
    td = path_decomposition(5)
    assert binarize(td) is td


def test_binarize_random_preserves_width_and_validity():
    rng = random.Random(29)
    for _ in range(30):
        g = random_partial_2tree(rng, rng.randint(2, 9))
        _, td = exact_treewidth(g)
        # fan out: reattach every non-root node to the root
        parent = tuple([-1] + [td.root] * (td.num_nodes - 1))
        star = TreeDecomposition(parent, td.bags, td.root)
        if not validate_decomposition(g, star).ok:
            star = td
        b = binarize(star)
        assert validate_decomposition(g, b).ok
        assert b.width() == star.width()
        assert all(len(c) <= 2 for c in b.children())


def test_derive_context_path():
    g = path_graph(4)
    td = path_decomposition(4)
    ctx = derive_context(g, td)
    assert ctx.y[2] == frozenset({3})
    assert ctx.y[0] == frozenset(range(4))
    assert ctx.xplus[1] == frozenset({1, 2, 3})
    assert ctx.yprime[2] == (3,)


def test_derive_context_single_bag():
    g = complete_graph(3)
    td = TreeDecomposition((-1,), (frozenset({0, 1, 2}),))
    ctx = derive_context(g, td)
    assert ctx.y[0] == frozenset({0, 1, 2})
    assert sorted(ctx.p) == [0, 1, 2]


def test_p_injective_on_bags_random():
    rng = random.Random(37)
    for _ in range(50):
        g = random_partial_2tree(rng, rng.randint(2, 10))
        _, td = exact_treewidth(g)
        td = binarize(td)
        ctx = derive_context(g, td)
        for bag in td.bags:
            vals = [ctx.p[v] for v in bag]
            assert len(set(vals)) == len(vals)
            assert all(0 <= x < max(len(b) for b in td.bags) for x in vals)


def test_neighbourhood_confinement():
    # neighbours of a Y_t vertex outside Y_t lie in the bag minus Y_t
    rng = random.Random(43)
    for _ in range(30):
        g = random_connected_graph(rng, rng.randint(2, 9), 0.4)
        _, td = exact_treewidth(g)
        td = binarize(td)
        ctx = derive_context(g, td)
        for t in range(td.num_nodes):
            for m in ctx.y[t]:
                for nb in g.neighbours(m):
                    if nb not in ctx.y[t]:
                        assert nb in td.bags[t] - ctx.y[t]


def test_sibling_y_sets_disjoint():
    rng = random.Random(53)
    for _ in range(20):
        g = random_connected_graph(rng, rng.randint(3, 9), 0.4)
        _, td = exact_treewidth(g)
        td = binarize(td)
        ctx = derive_context(g, td)
        for t, kids in enumerate(td.children()):
            for a, b in itertools.combinations(kids, 2):
                assert not (ctx.xplus[a] - td.bags[t]) & (ctx.xplus[b] - td.bags[t])


def test_subtree_y_union_is_y():
    # the union of Y over a node's subtree equals the node's own Y set
    rng = random.Random(61)
    for _ in range(20):
        g = random_connected_graph(rng, rng.randint(2, 9), 0.4)
        _, td = exact_treewidth(g)
        td = binarize(td)
        ctx = derive_context(g, td)
        ch = td.children()
        for t in reversed(td.topo_order()):
            sub = set()
            stack = [t]
            while stack:
                s = stack.pop()
                sub |= ctx.y[s] & td.bags[s]
                stack.extend(ch[s])
            assert sub | ctx.y[t] == ctx.y[t]
            assert set().union(*(ctx.y[s] & td.bags[s] for s in _subtree(td, t))) == ctx.y[t]


def _subtree(td, t):
    ch = td.children()
    out = [t]
    i = 0
    while i < len(out):
        out.extend(ch[out[i]])
        i += 1
    return out


def test_exact_treewidth_known_values():
    assert exact_treewidth(path_graph(6))[0] == 1
    assert exact_treewidth(complete_graph(5))[0] == 4
    assert exact_treewidth(grid_graph(3, 3))[0] == 3
    assert exact_treewidth(LoopGraph(1))[0] == 0


def test_exact_treewidth_witness_validates():
    rng = random.Random(59)
    for _ in range(25):
        g = random_simple_graph(rng, rng.randint(1, 9), 0.4)
        w, td = exact_treewidth(g)
        assert validate_decomposition(g, td).ok
        assert td.width() == w


def test_exact_treewidth_matches_order_search():
    rng = random.Random(67)
    for _ in range(40):
        g = random_simple_graph(rng, rng.randint(2, 7), 0.45)
        assert exact_treewidth(g)[0] == treewidth_by_order_search(g)


def test_exact_treewidth_cap():
    g = path_graph(15)
    with pytest.raises(ValueError, match="cap"):
        exact_treewidth(g)
    assert exact_treewidth(g, cap=15)[0] == 1


def test_elimination_width_and_reconstruction():
    g = grid_graph(3, 3)
    w, td = exact_treewidth(g)
    # any order's width upper-bounds the tree-width
    rng = random.Random(71)
    for _ in range(10):
        order = list(range(9))
        rng.shuffle(order)
        assert elimination_width(g, order) >= w
        td2 = decomposition_from_elimination(g, order)
        assert validate_decomposition(g, td2).ok
        assert td2.width() == elimination_width(g, order)
