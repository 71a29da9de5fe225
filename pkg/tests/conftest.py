from link_communities.core import graph

import networkx as nx
import numpy as np
import pytest

BOW_TIE_EDGES = "a b\na c\nb c\nc d\nc e\nd e\n"


def clique_links(nodes: list[int]) -> list[tuple[int, int]]:
    return [(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:]]


def from_networkx(nx_graph: nx.Graph) -> graph.Graph:
    mapping = {v: i for i, v in enumerate(sorted(nx_graph.nodes))}
    links = [(mapping[u], mapping[v]) for u, v in sorted(nx_graph.edges)]
    return graph.Graph(len(mapping), links)


def random_connected(seed: int, max_links: int = 12) -> graph.Graph:
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(4, 8))
        m = int(rng.integers(n, min(max_links, n * (n - 1) // 2) + 1))
        candidate = nx.gnm_random_graph(n, m, seed=int(rng.integers(2 ** 31)))
        if nx.is_connected(candidate):
            return from_networkx(candidate)


@pytest.fixture
def bow_tie() -> graph.Graph:
    """Two triangles sharing node c; links 0-2 form the first triangle, links 3-5 the second."""
    return graph.from_text(BOW_TIE_EDGES)


@pytest.fixture
def clique_bridge() -> graph.Graph:
    """A 4-clique on nodes 0-3 (links 0-5) and a 5-clique on nodes 4-8 (links 6-15) joined by link 16."""
    return graph.Graph(9, clique_links([0, 1, 2, 3]) + clique_links([4, 5, 6, 7, 8]) + [(3, 4)])


@pytest.fixture
def barbell() -> graph.Graph:
    """Two 4-cliques joined through a path of two middle nodes."""
    return from_networkx(nx.barbell_graph(4, 2))


@pytest.fixture
def random_graphs() -> list[graph.Graph]:
    return [random_connected(seed) for seed in range(20)]
