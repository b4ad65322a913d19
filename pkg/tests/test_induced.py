import random

import pytest

from prodstruct.graphs import (LoopGraph, check_induced_embedding, cycle_graph,
                               edge_key, grid_graph, path_graph,
                               greedy_square_coloring, product_adjacent)
from prodstruct.expressions import evaluate
from prodstruct.treedec import (TreeDecomposition, binarize, derive_context,
                                exact_treewidth, validate_decomposition)
from prodstruct.induced import (ProductSubgraph, base_colour, bound_report,
                                build_expression, build_induced_factor,
                                is_path_order, modulo3_coloring, path_case)
from helpers import random_partial_2tree, random_product_subgraph


def make_instance(rng, spanning=False):
    kind = rng.choice(["path", "cycle", "grid"])
    if kind == "path":
        q = path_graph(rng.randint(3, 8))
    elif kind == "cycle":
        q = cycle_graph(rng.randint(4, 8))
    else:
        q = grid_graph(3, 3)
    m = random_partial_2tree(rng, rng.randint(2, 8))
    g = random_product_subgraph(rng, q, m, spanning=spanning)
    k, td = exact_treewidth(m)
    return g, q, m, td, k


def value_edges_via_order(cert):
    value = evaluate(cert.expr)
    return value, {edge_key(cert.order[u], cert.order[v])
                   for (u, v) in value.graph.edges}


def test_product_subgraph_validation():
    q, m = path_graph(3), path_graph(2)
    with pytest.raises(ValueError, match="not a member"):
        ProductSubgraph.build([(0, 0)], [((0, 0), (1, 1))])
    ps = ProductSubgraph.build([(0, 0), (2, 1)], [])
    ps.validate_against(q, m)
    bad = ProductSubgraph.build([(0, 0), (2, 1)], [((0, 0), (2, 1))])
    with pytest.raises(ValueError, match="not a product edge"):
        bad.validate_against(q, m)
    with pytest.raises(ValueError, match="outside"):
        ProductSubgraph.build([(5, 0)], []).validate_against(q, m)


def test_base_colour_isolated_vertex():
    q, m = path_graph(3), path_graph(2)
    ps = ProductSubgraph.build([(0, 0), (2, 1)], [])
    td = binarize(exact_treewidth(m)[1])
    ctx = derive_context(m, td)
    s = greedy_square_coloring(q)
    adjacency = [[] for _ in range(ps.n)]
    x = 0
    t = ctx.top_node[ps.members[x][1]]
    bc = base_colour(x, t, ps, adjacency, s, td, ctx)
    assert all(not entry for entry in bc)


def test_base_colour_encodes_neighbours():
    # complete P2 x P2 with the single-bag decomposition of M = P2
    q = m = path_graph(2)
    members = [(a, b) for a in range(2) for b in range(2)]
    edges = [(p, r) for i, p in enumerate(members) for r in members[i + 1:]
             if product_adjacent(q, m, p, r)]
    ps = ProductSubgraph.build(members, edges)
    td = TreeDecomposition((-1,), (frozenset({0, 1}),))
    ctx = derive_context(m, td)
    s = greedy_square_coloring(q)
    adjacency = [[] for _ in range(ps.n)]
    for (x, y) in ps.edges:
        adjacency[x].append(y)
        adjacency[y].append(x)
    for x in range(ps.n):
        bc = base_colour(x, 0, ps, adjacency, s, td, ctx)
        encoded = sum(len(e) for e in bc)
        assert encoded == len(adjacency[x]) == 3


def test_base_colour_support_bound():
    rng = random.Random(3)
    for _ in range(100):
        g, q, m, td, k = make_instance(rng)
        tdb = binarize(td)
        ctx = derive_context(m, tdb)
        s = greedy_square_coloring(q)
        adjacency = [[] for _ in range(g.n)]
        for (x, y) in g.edges:
            adjacency[x].append(y)
            adjacency[y].append(x)
        delta = q.max_degree()
        for x in range(g.n):
            t = ctx.top_node[g.members[x][1]]
            bc = base_colour(x, t, g, adjacency, s, tdb, ctx)
            assert all(len(entry) <= delta + 1 for entry in bc)


def test_base_colour_rejects_wrong_node():
    q, m = path_graph(3), path_graph(3)
    ps = ProductSubgraph.build([(0, 2)], [])
    td = binarize(exact_treewidth(m)[1])
    ctx = derive_context(m, td)
    s = greedy_square_coloring(q)
    bad_nodes = [t for t in range(td.num_nodes) if 2 not in ctx.y[t]]
    if bad_nodes:
        with pytest.raises(ValueError, match="not in Y"):
            base_colour(0, bad_nodes[0], ps, [[]], s, td, ctx)


def test_claim_edge_criterion():
    # for x in a Y-batch and x' in the bag's columns: adjacency iff the
    # pvertices touch in reflexive Q and x's entry holds x''s square colour
    rng = random.Random(7)
    for _ in range(40):
        g, q, m, td, k = make_instance(rng)
        tdb = binarize(td)
        ctx = derive_context(m, tdb)
        s = greedy_square_coloring(q)
        adjacency = [[] for _ in range(g.n)]
        for (x, y) in g.edges:
            adjacency[x].append(y)
            adjacency[y].append(x)
        index = {mem: i for i, mem in enumerate(g.members)}
        gset = set(g.edges)
        for x, (qx, mx) in enumerate(g.members):
            t = ctx.top_node[mx]
            bc = base_colour(x, t, g, adjacency, s, tdb, ctx)
            for y, (qy, my) in enumerate(g.members):
                if x == y or my not in tdb.bags[t]:
                    continue
                reflexive_adjacent = qx == qy or q.has_edge(qx, qy)
                criterion = reflexive_adjacent and s[qy] in bc[ctx.p[my]]
                assert (edge_key(x, y) in gset) == criterion


def test_build_expression_c6_in_p3xp2():
    q, m = path_graph(3), path_graph(2)
    members = [(0, 0), (0, 1), (1, 1), (2, 1), (2, 0), (1, 0)]
    ring = [(members[i], members[(i + 1) % 6]) for i in range(6)]
    g = ProductSubgraph.build(members, ring)
    k, td = exact_treewidth(m)
    cert = build_expression(g, q, m, td)
    value, mapped = value_edges_via_order(cert)
    assert mapped == set(g.edges)
    assert value.graph.num_edges() == 6
    assert cert.ell_used <= 2 ** (3 * k + 5) == 256
    # the value's pvertices are the left coordinates
    for i in range(g.n):
        assert value.pvertices[i] == g.members[cert.order[i]][0]


def test_build_expression_edgeless():
    q, m = path_graph(4), path_graph(3)
    g = ProductSubgraph.build([(0, 0), (1, 1), (3, 2)], [])
    cert = build_expression(g, q, m, exact_treewidth(m)[1])
    value, mapped = value_edges_via_order(cert)
    assert value.graph.num_edges() == 0 and value.graph.n == 3


def test_build_expression_empty_rejected():
    q, m = path_graph(3), path_graph(2)
    with pytest.raises(ValueError):
        build_expression(ProductSubgraph((), frozenset()), q, m,
                         exact_treewidth(m)[1])


def test_build_expression_spanning_random():
    rng = random.Random(11)
    q = path_graph(4)
    for _ in range(50):
        m = random_partial_2tree(rng, rng.randint(2, 6))
        g = random_product_subgraph(rng, q, m, spanning=True)
        td = exact_treewidth(m)[1]
        cert = build_expression(g, q, m, td)
        value, mapped = value_edges_via_order(cert)
        assert mapped == set(g.edges)


def test_build_expression_random_exact():
    rng = random.Random(13)
    for _ in range(100):
        g, q, m, td, k = make_instance(rng)
        cert = build_expression(g, q, m, td)
        value, mapped = value_edges_via_order(cert)
        assert mapped == set(g.edges)
        delta = max(q.max_degree(), 2)
        assert cert.ell_used <= bound_report(delta, td.width()).cw_general


def test_build_factor_certificates_random():
    rng = random.Random(17)
    for _ in range(30):
        g, q, m, td, k = make_instance(rng)
        fc = build_induced_factor(g, q, m, td)
        assert check_induced_embedding(g.graph(), fc.embedding).ok
        assert validate_decomposition(fc.m2, fc.td2).ok
        delta = max(q.max_degree(), 2)
        rep = bound_report(delta, td.width())
        assert fc.width_interned <= rep.tw_general - 1
        # pulled-back edges equal the instance's edges
        img = fc.embedding.image
        for x in range(g.n):
            for y in range(x + 1, g.n):
                assert product_adjacent(q, fc.m2, img[x], img[y]) == (
                    edge_key(x, y) in g.edges)


def test_build_factor_edgeless():
    q, m = path_graph(3), path_graph(2)
    g = ProductSubgraph.build([(0, 0), (2, 1)], [])
    fc = build_induced_factor(g, q, m, exact_treewidth(m)[1])
    assert fc.m2.num_edges() == 0 or all(
        not product_adjacent(q, fc.m2, fc.embedding.image[x],
                             fc.embedding.image[y])
        for x in range(g.n) for y in range(x + 1, g.n))
    assert check_induced_embedding(g.graph(), fc.embedding).ok


def test_m2_bag_shape():
    rng = random.Random(19)
    for _ in range(10):
        g, q, m, td, k = make_instance(rng)
        fc = build_induced_factor(g, q, m, td)
        ng = len(fc.gamma)
        for bag in fc.td2.bags:
            assert len(bag) % ng == 0
            assert len(bag) // ng <= td.width() + 1
        assert fc.td2.width() <= (td.width() + 1) * ng - 1


def test_is_path_order():
    assert is_path_order(path_graph(5)) == [0, 1, 2, 3, 4]
    shuffled = LoopGraph(4, [(2, 0), (0, 3), (3, 1)])
    order = is_path_order(shuffled)
    assert order in ([1, 3, 0, 2], [2, 0, 3, 1])
    assert is_path_order(cycle_graph(4)) is None
    assert is_path_order(LoopGraph(1)) == [0]


def test_modulo3_coloring_square_proper():
    from prodstruct.graphs import square
    for n in (1, 2, 5, 9):
        q = path_graph(n)
        col = modulo3_coloring(q)
        assert max(col) <= 3
        for (u, v) in square(q).edges:
            assert col[u] != col[v]


def test_path_case_bounds_and_certificates():
    rng = random.Random(23)
    for _ in range(25):
        q = path_graph(rng.randint(3, 8))
        m = random_partial_2tree(rng, rng.randint(2, 8))
        g = random_product_subgraph(rng, q, m)
        k, td = exact_treewidth(m)
        res = path_case(g, q, m, td)
        value, mapped = (evaluate(res.expression.expr), None)
        mapped = {edge_key(res.expression.order[u], res.expression.order[v])
                  for (u, v) in value.graph.edges}
        assert mapped == set(g.edges)
        assert check_induced_embedding(g.graph(), res.factor.embedding).ok
        assert res.expression.ell_used <= 2 ** (3 * td.width() + 5)
        assert res.factor.width_interned <= 3 * (td.width() + 1) * 8 ** (td.width() + 1) - 1


def test_path_case_single_column_factor():
    # k = 0: the factor is a single vertex, so the instance is a sub-path
    q, m = path_graph(7), LoopGraph(1)
    td = TreeDecomposition((-1,), (frozenset({0}),))
    g = ProductSubgraph.build([(a, 0) for a in (1, 2, 3, 5)],
                              [((1, 0), (2, 0)), ((2, 0), (3, 0))])
    res = path_case(g, q, m, td)
    assert res.expression.ell_used <= 2 ** 5 == 32
    assert check_induced_embedding(g.graph(), res.factor.embedding).ok


def test_path_case_rejects_non_path():
    q, m = cycle_graph(4), path_graph(2)
    g = random_product_subgraph(random.Random(1), q, m)
    with pytest.raises(ValueError, match="path"):
        path_case(g, q, m, exact_treewidth(m)[1])


def test_bound_report_published_instances():
    rep = bound_report(2, 1, 3)
    assert rep.cw_general == 6 * 4096 == 24576
    assert rep.cw_refined == 4 * 64 == 256
    rep = bound_report(2, 6, 3)
    assert rep.cw_refined == 2 ** 23 == 8388608
    rep = bound_report(2, 0, 3)
    assert rep.tw_refined == 24
    # big integers, never saturated
    rep = bound_report(5, 10)
    assert rep.cw_general == 27 * 5 ** (2 * 6 * 11)


def test_bound_report_rejects_bad_params():
    with pytest.raises(ValueError):
        bound_report(1, 0)
    with pytest.raises(ValueError):
        bound_report(2, -1)
    with pytest.raises(ValueError):
        bound_report(2, 0, d=1)


def test_interned_colours_within_symbolic_gamma():
    rng = random.Random(29)
    for _ in range(20):
        q = path_graph(rng.randint(3, 6))
        m = random_partial_2tree(rng, rng.randint(2, 6))
        g = random_product_subgraph(rng, q, m)
        k, td = exact_treewidth(m)
        fc = build_induced_factor(g, q, m, td, s=modulo3_coloring(q), d=3)
        # used initial colours within S x B_{S,k}
        assert fc.ell_used <= 3 * 8 ** (td.width() + 1)
