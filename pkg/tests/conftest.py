import networkx as nx
import pytest

from starclt.graphs import RootedGraph, complete_graph, cycle_graph, hypercube, path_graph, star_graph


def atlas_corpus(max_n=7):
    """Every connected graph on 2..max_n vertices up to isomorphism, rooted at vertex 0."""
    out = []
    for G in nx.graph_atlas_g():
        n = G.number_of_nodes()
        if 2 <= n <= max_n and nx.is_connected(G):
            out.append(RootedGraph.from_edges(n, list(G.edges()), 0))
    return out


@pytest.fixture(scope="session")
def corpus():
    return atlas_corpus()


@pytest.fixture
def k2():
    return complete_graph(2)


@pytest.fixture
def c5():
    return cycle_graph(5)


@pytest.fixture
def p3_end():
    return path_graph(3, root=0)


@pytest.fixture
def q3():
    return hypercube(3)


@pytest.fixture
def k13():
    return star_graph(3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
