import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starclt.errors import (
    MalformedLineError,
    PreconditionError,
    RootOutOfRangeError,
    SelfLoopError,
    SizeCapError,
    VertexOutOfRangeError,
)
from starclt.graphs import (
    INFINITE,
    RootedGraph,
    base_vertex,
    bfs_distances,
    cartesian_power,
    cartesian_product,
    copy_of,
    cycle_graph,
    decompose_star_distance_k,
    distance_k_graph,
    format_graph,
    hypercube,
    is_connected,
    parse_graph,
    path_graph,
    single_vertex,
    star_graph,
    star_power,
    star_product,
    _star_power_unchecked,
)

from oracles import distance_k_edges, floyd_warshall, star_power_edges


@st.composite
def graphs(draw, max_n=8, connected=False):
    n = draw(st.integers(1 if not connected else 2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    if connected:
        # a random spanning tree keeps the graph connected
        for v in range(1, n):
            chosen.append((draw(st.integers(0, v - 1)), v))
    root = draw(st.integers(0, n - 1))
    return RootedGraph.from_edges(n, chosen, root)


# -- parsing -----------------------------------------------------------------

def test_parse_k2():
    g = parse_graph("v 2\nroot 0\ne 0 1")
    assert g.n == 2 and g.root == 0 and g.edges() == [(0, 1)]


def test_parse_c5():
    g = parse_graph("v 5\nroot 0\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 4 0")
    assert g == cycle_graph(5)


def test_parse_comments_and_duplicates():
    g = parse_graph("# header\nv 3  # three\n\nroot 2\ne 0 1\ne 1 0\ne 1 2\n")
    assert g.edges() == [(0, 1), (1, 2)]
    assert g.root == 2


@pytest.mark.parametrize("text, exc, lineno", [
    ("v 3\nroot 0\ne 0 0", SelfLoopError, 3),
    ("v 3\nroot 3\ne 0 1", RootOutOfRangeError, 2),
    ("v 3\nroot 0\ne 0 3", VertexOutOfRangeError, 3),
    ("v 3\nroot 0\ne 0 x", MalformedLineError, 3),
    ("root 0\nv 3", MalformedLineError, 1),
    ("v 3\ne 0 1", MalformedLineError, 2),
    ("v 3\nroot 0\nedge 0 1", MalformedLineError, 3),
    ("v 3\nroot 0\ne 0 1 2", MalformedLineError, 3),
])
def test_parse_errors_name_the_line(text, exc, lineno):
    with pytest.raises(exc) as info:
        parse_graph(text)
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


def test_format_round_trip(c5):
    text = format_graph(star_power(c5, 3))
    assert format_graph(parse_graph(text)) == text
    assert parse_graph(text) == star_power(c5, 3)


def test_writer_sorts_edges():
    g = RootedGraph.from_edges(4, [(3, 2), (1, 0), (2, 0)], 1)
    assert format_graph(g) == "v 4\nroot 1\ne 0 1\ne 0 2\ne 2 3\n"


def test_graph_is_immutable(c5):
    with pytest.raises(ValueError):
        c5.indices[0] = 3


def test_from_edges_rejects_self_loop():
    with pytest.raises(PreconditionError):
        RootedGraph.from_edges(2, [(1, 1)])


# -- bfs ---------------------------------------------------------------------

def test_bfs_c5(c5):
    assert bfs_distances(c5, 0).dist.tolist() == [0, 1, 2, 2, 1]


def test_bfs_k2(k2):
    assert bfs_distances(k2, 0).dist.tolist() == [0, 1]


def test_bfs_unreachable():
    g = RootedGraph.from_edges(4, [(0, 1), (2, 3)])
    assert bfs_distances(g, 0).dist.tolist() == [0, 1, INFINITE, INFINITE]
    assert not is_connected(g)


def test_bfs_source_out_of_range(c5):
    with pytest.raises(PreconditionError):
        bfs_distances(c5, 5)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_bfs_matches_floyd_warshall(g):
    D = floyd_warshall(g.n, g.edges())
    for s in range(g.n):
        dv = bfs_distances(g, s)
        expected = [INFINITE if np.isinf(x) else int(x) for x in D[s]]
        assert dv.dist.tolist() == expected
        # adjacent vertices differ by at most one level
        for u, v in g.edges():
            if dv.dist[u] != INFINITE:
                assert abs(int(dv.dist[u]) - int(dv.dist[v])) <= 1


# -- distance-k graphs -------------------------------------------------------

def test_q3_distance_2_is_two_k4(q3):
    d = distance_k_graph(q3, 2)
    assert d.n == 8 and d.num_edges == 12
    assert set(d.degrees().tolist()) == {3}
    # frozen from the Floyd-Warshall oracle
    assert d.edges() == [(0, 3), (0, 5), (0, 6), (1, 2), (1, 4), (1, 7), (2, 4), (2, 7),
                         (3, 5), (3, 6), (4, 7), (5, 6)]
    even = [v for v in range(8) if bin(v).count("1") % 2 == 0]
    assert all(d.neighbors(v).tolist() == sorted(set(even) - {v}) for v in even)


def test_distance_1_is_identity(c5):
    assert distance_k_graph(c5, 1).edge_set() == c5.edge_set()


def test_k2_distance_2_empty(k2):
    assert distance_k_graph(k2, 2).num_edges == 0


def test_distance_k_requires_positive_k(c5):
    with pytest.raises(PreconditionError):
        distance_k_graph(c5, 0)


@settings(max_examples=80, deadline=None)
@given(graphs(), st.integers(1, 5))
def test_distance_k_matches_bfs_oracle(g, k):
    d = distance_k_graph(g, k, chunk=3)
    brute = {(u, v) for u in range(g.n) for v in range(u + 1, g.n)
             if bfs_distances(g, u).dist[v] == k}
    assert d.edge_set() == brute
    assert d.root == g.root


def test_distance_k_exhaustive_small(corpus):
    for g in corpus[:200]:
        for k in (1, 2, 3):
            assert distance_k_graph(g, k).edge_set() == distance_k_edges(g.n, g.edges(), k)


# -- star products -----------------------------------------------------------

def test_star_product_two_cycles():
    g = star_product(cycle_graph(4), cycle_graph(5))
    assert g.n == 8 and g.num_edges == 9 and g.degree(g.root) == 4
    assert is_connected(g)


def test_star_product_k2_k2_is_p3(k2):
    g = star_product(k2, k2)
    assert g == RootedGraph.from_edges(3, [(0, 1), (0, 2)], 0)


def test_star_product_identity(c5):
    assert star_product(c5, single_vertex()) == c5
    assert star_product(single_vertex(), c5) == c5


def test_star_product_relabels_root_first():
    g = path_graph(3, root=1)
    h = star_product(g, g)
    assert h.root == 0 and h.degree(0) == 4


def test_star_product_of_disconnected_is_disconnected():
    g = RootedGraph.from_edges(3, [(0, 1)], 0)
    assert not is_connected(star_product(g, path_graph(2)))


def test_star_power_k2_is_star(k2):
    assert star_power(k2, 5) == star_graph(5)


def test_star_power_c5(c5):
    g = star_power(c5, 3)
    assert g.n == 13 and g.num_edges == 15
    assert g.degree(0) == 3 * c5.degree(c5.root)


def test_star_power_one_is_g(c5):
    assert star_power(c5, 1) == c5


def test_star_power_matches_oracle_labels():
    g = RootedGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 1)], root=2)
    n, edges = star_power_edges(4, g.edges(), 2, 3)
    assert star_power(g, 3) == RootedGraph.from_edges(n, edges, 0)


def test_star_power_rejects_disconnected():
    with pytest.raises(PreconditionError):
        star_power(RootedGraph.from_edges(3, [(0, 1)]), 2)
    with pytest.raises(PreconditionError):
        star_power(single_vertex(), 2)


def test_copy_indexing(c5):
    g = path_graph(3, root=1)
    assert [copy_of(v, 3) for v in range(5)] == [None, 0, 0, 1, 1]
    assert [base_vertex(v, g) for v in range(5)] == [1, 0, 2, 0, 2]


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=5), graphs(max_n=5), graphs(max_n=5))
def test_star_product_associative_and_additive(a, b, c):
    left = star_product(star_product(a, b), c)
    right = star_product(a, star_product(b, c))
    assert left == right
    assert left.n == a.n + b.n + c.n - 2
    assert left.num_edges == a.num_edges + b.num_edges + c.num_edges


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=6, connected=True), st.integers(2, 4))
def test_star_power_distances_go_through_root(g, N):
    G = star_power(g, N)
    D = floyd_warshall(G.n, G.edges())
    for x in range(1, G.n):
        for y in range(1, G.n):
            if copy_of(x, g.n) != copy_of(y, g.n):
                assert D[x, y] == D[x, 0] + D[0, y]


# -- cartesian products ------------------------------------------------------

def test_cartesian_k2_k2_is_c4(k2):
    g = cartesian_product(k2, k2)
    assert g.n == 4 and g.num_edges == 4 and set(g.degrees().tolist()) == {2}


def test_hypercube_q3():
    g = hypercube(3)
    assert g.n == 8 and g.num_edges == 3 * 2 ** 2


@pytest.mark.parametrize("N", [1, 2, 4, 6])
def test_hypercube_edge_count(N):
    assert hypercube(N).num_edges == N * 2 ** (N - 1)


def test_cartesian_identity(c5):
    assert cartesian_product(c5, single_vertex()) == c5


def test_cartesian_row_major_adjacency():
    g1, g2 = path_graph(3), path_graph(2)
    g = cartesian_product(g1, g2)
    for (u1, u2) in np.ndindex(3, 2):
        for (v1, v2) in np.ndindex(3, 2):
            adjacent = ((u1 == v1 and abs(u2 - v2) == 1) or (u2 == v2 and abs(u1 - v1) == 1))
            assert ((u1 * 2 + u2, v1 * 2 + v2) in g.edge_set()) == (adjacent and u1 * 2 + u2 < v1 * 2 + v2)


def test_cartesian_cap(c5):
    with pytest.raises(SizeCapError):
        cartesian_product(c5, c5, cap=20)
    with pytest.raises(SizeCapError):
        cartesian_power(c5, 6, cap=4096)


# -- decomposition -----------------------------------------------------------

def test_decompose_c5_n2_k2(c5):
    dec = decompose_star_distance_k(c5, 2, 2)
    assert len(dec.star_power_edges) == 10
    assert dec.cross_edges == {(1, 5), (1, 8), (4, 5), (4, 8)}
    n, e = star_power_edges(5, c5.edges(), 0, 2)
    assert dec.all_edges == distance_k_edges(n, e, 2)


def test_decompose_k2_k1_has_no_cross_edges(k2):
    dec = decompose_star_distance_k(k2, 3, 1)
    assert dec.cross_edges == frozenset()
    assert dec.star_power_edges == {(0, 1), (0, 2), (0, 3)}


def test_decompose_p3_end_rooted(p3_end):
    dec = decompose_star_distance_k(p3_end, 2, 2)
    assert dec.cross_edges == {(1, 3)}
    assert dec.star_power_edges == {(0, 2), (0, 4)}


def test_decompose_rejects_trivial(k2):
    with pytest.raises(PreconditionError):
        decompose_star_distance_k(k2, 2, 2)


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=6, connected=True), st.integers(2, 3), st.integers(1, 3))
def test_decomposition_invariants(g, N, k):
    if distance_k_graph(g, k).num_edges == 0:
        return
    dec = decompose_star_distance_k(g, N, k)
    assert not dec.star_power_edges & dec.cross_edges
    G = star_power(g, N)
    assert dec.all_edges == distance_k_edges(G.n, G.edges(), k)
    assert dec.star_power_edges == _star_power_unchecked(distance_k_graph(g, k), N).edge_set()
    depth = bfs_distances(G, 0).dist
    for x, y in dec.cross_edges:
        assert copy_of(x, g.n) != copy_of(y, g.n)
        assert depth[x] > 0 and depth[y] > 0 and depth[x] + depth[y] == k
