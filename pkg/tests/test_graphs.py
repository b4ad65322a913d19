import random

import pytest

from prodstruct.graphs import (LoopGraph, ProductEmbedding, ball, bfs_tree,
                               check_induced_embedding, complete_graph,
                               cycle_graph, edge_key, greedy_square_coloring,
                               grid_graph, induced_subgraph, path_graph,
                               reflexive_closure, square, strip_loops,
                               strong_product, subdivide)
from helpers import (distances_oracle, induced_map_oracle, random_simple_graph,
                     strong_product_edges_oracle)


def test_loop_graph_invariants():
    g = LoopGraph(4, [(0, 1), (1, 2)], loops=[3])
    assert g.has_edge(1, 0) and not g.has_edge(0, 2)
    assert g.has_edge(3, 3) and not g.has_edge(0, 0)
    with pytest.raises(ValueError):
        LoopGraph(2, [(0, 2)])
    with pytest.raises(ValueError):
        LoopGraph(2, [(1, 1)])
    with pytest.raises(ValueError):
        LoopGraph(2, loops=[2])


def test_strong_product_examples():
    # P3 x P3 is the 3x3 king graph: frozen from the pair-enumeration oracle
    pr = strong_product(path_graph(3), path_graph(3))
    assert pr.n == 9 and pr.num_edges() == 20
    assert pr.edges == frozenset(strong_product_edges_oracle(path_graph(3), path_graph(3)))
    # identity factor
    g = random_simple_graph(random.Random(1), 5, 0.5)
    pr = strong_product(LoopGraph(1), g)
    assert pr == g
    # P2 x P2 = K4
    assert strong_product(path_graph(2), path_graph(2)) == complete_graph(4)


def test_strong_product_rejects_loops():
    with pytest.raises(ValueError):
        strong_product(reflexive_closure(path_graph(2)), path_graph(2))


def test_strong_product_against_oracle_random():
    rng = random.Random(7)
    for _ in range(25):
        g1 = random_simple_graph(rng, rng.randint(1, 8), 0.4)
        g2 = random_simple_graph(rng, rng.randint(1, 8), 0.4)
        pr = strong_product(g1, g2)
        assert pr.n == g1.n * g2.n
        assert pr.edges == frozenset(strong_product_edges_oracle(g1, g2))


def test_product_swap_isomorphism():
    rng = random.Random(3)
    for _ in range(10):
        g1 = random_simple_graph(rng, rng.randint(1, 5), 0.5)
        g2 = random_simple_graph(rng, rng.randint(1, 5), 0.5)
        ab = strong_product(g1, g2)
        image = tuple(divmod(x, g2.n)[::-1] for x in range(ab.n))
        swap = ProductEmbedding(g2, g1, image)
        assert check_induced_embedding(ab, swap).ok


def test_square_examples():
    # square(P4): path plus the two distance-2 chords, frozen from all-pairs BFS
    sq = square(path_graph(4))
    assert sq.num_edges() == 5
    assert edge_key(0, 2) in sq.edges and edge_key(1, 3) in sq.edges
    assert square(complete_graph(3)) == complete_graph(3)
    assert square(cycle_graph(6)).num_edges() == 12


def test_square_against_distance_oracle():
    rng = random.Random(11)
    for _ in range(20):
        g = random_simple_graph(rng, rng.randint(1, 8), 0.3)
        dist = distances_oracle(g)
        sq = square(g)
        for u in range(g.n):
            for v in range(u + 1, g.n):
                want = dist.get((u, v), 99) in (1, 2)
                assert sq.has_edge(u, v) == want
        assert sq.edges >= g.edges
        # idempotent on diameter <= 2 graphs
        if all(dist.get((u, v), 99) <= 2 for u in range(g.n) for v in range(g.n)):
            assert square(sq) == sq


def test_reflexive_closure_round_trip():
    p3 = path_graph(3)
    r = reflexive_closure(p3)
    assert r.loops == frozenset({0, 1, 2})
    assert strip_loops(r) == p3
    assert strip_loops(p3) == p3


def test_greedy_square_coloring():
    assert greedy_square_coloring(path_graph(5)) == [1, 2, 3, 1, 2]
    assert greedy_square_coloring(LoopGraph(1)) == [1]
    c5 = cycle_graph(5)
    col = greedy_square_coloring(c5)
    assert max(col) <= 5  # delta^2 + 1
    sq = square(c5)
    for (u, v) in sq.edges:
        assert col[u] != col[v]


def test_greedy_square_coloring_random_proper():
    rng = random.Random(5)
    for _ in range(30):
        q = random_simple_graph(rng, rng.randint(1, 9), 0.35)
        col = greedy_square_coloring(q)
        sq = square(q)
        for (u, v) in sq.edges:
            assert col[u] != col[v]
        assert max(col) <= q.max_degree() ** 2 + 1


def test_paths_three_colours_any_numbering():
    rng = random.Random(17)
    for _ in range(20):
        n = rng.randint(1, 12)
        perm = list(range(n))
        rng.shuffle(perm)
        q = LoopGraph(n, [(perm[i], perm[i + 1]) for i in range(n - 1)])
        assert max(greedy_square_coloring(q)) <= 3


def test_check_induced_embedding_examples():
    p2, k1 = path_graph(2), LoopGraph(1)
    emb = ProductEmbedding(p2, k1, ((0, 0), (1, 0)))
    assert check_induced_embedding(p2, emb).ok
    bad = ProductEmbedding(p2, k1, ((0, 0), (0, 0)))
    v = check_induced_embedding(p2, bad)
    assert not v.ok and v.reason == "not-injective"
    # P3 minus middle edge inside P3 x K1 under the identity is not induced
    broken = LoopGraph(3, [(0, 1)])
    emb = ProductEmbedding(path_graph(3), k1, ((0, 0), (1, 0), (2, 0)))
    v = check_induced_embedding(broken, emb)
    assert not v.ok and v.reason == "adjacency-mismatch"
    assert tuple(v.witness[:2]) == (1, 2)
    out = ProductEmbedding(p2, k1, ((0, 0), (5, 0)))
    assert check_induced_embedding(p2, out).reason == "out-of-range"


def test_check_embedding_agrees_with_map_oracle():
    rng = random.Random(23)
    for _ in range(60):
        left = random_simple_graph(rng, rng.randint(1, 3), 0.6)
        right = random_simple_graph(rng, rng.randint(1, 3), 0.6)
        host_n = left.n * right.n
        k = rng.randint(1, min(4, host_n))
        g = random_simple_graph(rng, k, 0.5)
        coords = [(a, b) for a in range(left.n) for b in range(right.n)]
        image = tuple(rng.sample(coords, k))
        emb = ProductEmbedding(left, right, image)
        assert check_induced_embedding(g, emb).ok == induced_map_oracle(
            g, left, right, image)


def test_bfs_tree():
    s = bfs_tree(cycle_graph(4), 0)
    assert list(s.level) == [0, 1, 2, 1]
    assert bfs_tree(LoopGraph(1), 0).level == (0,)
    s = bfs_tree(path_graph(5), 0)
    assert list(s.level) == [0, 1, 2, 3, 4]
    with pytest.raises(ValueError):
        bfs_tree(LoopGraph(3, [(0, 1)]), 0)
    # levels are graph distances; parents are neighbours one level up
    rng = random.Random(2)
    for _ in range(15):
        g = random_simple_graph(rng, rng.randint(2, 9), 0.5)
        try:
            s = bfs_tree(g, 0)
        except ValueError:
            continue
        dist = distances_oracle(g)
        for v in range(g.n):
            assert s.level[v] == dist[(0, v)]
            if v != 0:
                assert g.has_edge(v, s.parent[v])
                assert s.level[s.parent[v]] == s.level[v] - 1


def test_subdivide():
    assert subdivide(complete_graph(3), 3) == cycle_graph(12) or \
        subdivide(complete_graph(3), 3).n == 12
    g12 = subdivide(complete_graph(3), 3)
    assert g12.n == 12 and g12.num_edges() == 12
    assert all(g12.degree(v) == 2 for v in range(12))
    g = random_simple_graph(random.Random(9), 6, 0.5)
    assert subdivide(g, 0) == g
    assert subdivide(complete_graph(4), 3).n == 4 + 3 * 6


def test_induced_subgraph_and_ball():
    g = grid_graph(3, 3)
    b = ball(g, 0, 1)
    assert b == [0, 1, 3]
    sub = induced_subgraph(g, b)
    assert sub.num_edges() == 2
    dist = distances_oracle(g)
    for r in range(4):
        assert ball(g, 4, r) == sorted(v for v in range(9) if dist[(4, v)] <= r)
