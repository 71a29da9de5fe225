from link_communities.core import errors, graph

from .conftest import random_connected
from .oracles import bfs_connected

import io

import numpy as np
import pytest


def test_load_edge_list_path():
    g = graph.from_text("a b\nb c")
    assert (g.node_count, g.link_count) == (3, 2)
    assert g.labels == ("a", "b", "c")


def test_load_edge_list_collapses_reversed_duplicates():
    g = graph.from_text("a b\nb a")
    assert (g.node_count, g.link_count) == (2, 1)


def test_load_edge_list_bow_tie(bow_tie):
    assert (bow_tie.node_count, bow_tie.link_count) == (5, 6)
    assert int(bow_tie.degrees.sum()) == 12
    assert bow_tie.degree_list[bow_tie.node_id("c")] == 4


def test_load_edge_list_reads_bytes_and_skips_comments():
    source = io.BytesIO(b"# citations\na b\n\n# more\nb c\n")
    g = graph.load_edge_list(source)
    assert g.link_count == 2


def test_load_edge_list_reports_line_number():
    with pytest.raises(errors.EdgeListParseError) as info:
        graph.from_text("a b\nb c d\n")
    assert info.value.line_number == 2


def test_load_edge_list_rejects_invalid_utf8():
    with pytest.raises(errors.EdgeListParseError) as info:
        graph.load_edge_list(io.BytesIO(b"a b\n\xff\xfe c\n"))
    assert info.value.line_number == 2
    assert "invalid UTF-8" in str(info.value)


def test_load_edge_list_rejects_empty_input():
    with pytest.raises(errors.EmptyGraphError):
        graph.from_text("# nothing here\n")


def test_load_edge_list_drops_self_loops(caplog):
    g = graph.from_text("a a\na b\n")
    assert g.link_count == 1
    assert "self-loop" in caplog.text


def test_graph_rejects_malformed_links():
    with pytest.raises(errors.GraphError):
        graph.Graph(2, [(0, 0)])
    with pytest.raises(errors.GraphError):
        graph.Graph(2, [(0, 1), (1, 0)])
    with pytest.raises(errors.GraphError):
        graph.Graph(2, [(0, 2)])


def test_graph_arrays_are_read_only(bow_tie):
    with pytest.raises(ValueError):
        bow_tie.links[0, 0] = 3


def test_prune_star_with_protected_center():
    g = graph.from_text("hub x\nhub y\nhub z\n")
    pruned = graph.prune_degree_one(g, lambda i: g.labels[i] == "hub")
    assert (pruned.node_count, pruned.link_count) == (1, 0)


def test_prune_leaves_triangle_unchanged():
    g = graph.from_text("a b\nb c\nc a\n")
    assert graph.prune_degree_one(g, lambda i: False) is g


def test_prune_is_single_pass():
    g = graph.from_text("a b\nb c\n")
    pruned = graph.prune_degree_one(g, lambda i: g.labels[i] != "a")
    assert pruned.labels == ("b", "c")
    assert pruned.link_count == 1


def test_giant_component_tie_goes_to_smallest_id():
    g = graph.from_text("a b\nb c\nc a\nx y\ny z\nz x\n")
    giant = graph.giant_component(g)
    assert giant.labels == ("a", "b", "c")


def test_giant_component_identity_when_connected(bow_tie):
    assert graph.giant_component(bow_tie) is bow_tie


def test_giant_component_prefers_larger_component():
    g = graph.from_text("x y\na b\na c\na d\nb c\nb d\nc d\n")
    giant = graph.giant_component(g)
    assert (giant.node_count, giant.link_count) == (4, 6)


def test_giant_component_rejects_empty_graph():
    with pytest.raises(errors.EmptyGraphError):
        graph.giant_component(graph.Graph(0, []))


def test_prepare_graph_is_idempotent_on_bipartite_citations():
    text = "p1 s1\np1 s2\np2 s2\np2 s3\np3 s3\np3 s4\np4 s5\np1 p2\n"
    protected = lambda g: (lambda i: g.labels[i].startswith("p"))
    once = graph.prepare_graph(graph.from_text(text), protected(graph.from_text(text)))
    twice = graph.prepare_graph(once, protected(once))
    assert once.labels == twice.labels
    assert once.link_ends == twice.link_ends
    assert not once.has_label("s1")


def test_prepare_graph_rejects_graph_pruned_to_nothing():
    g = graph.from_text("hub x\n")
    with pytest.raises(errors.EmptyGraphError):
        graph.prepare_graph(g, lambda i: g.labels[i] == "hub")


def test_is_connected_link_set_bow_tie(bow_tie):
    assert graph.is_connected_link_set(bow_tie, {0, 1, 2})
    assert not graph.is_connected_link_set(bow_tie, {0, 5})
    assert graph.is_connected_link_set(bow_tie, set(range(6)))
    assert not graph.is_connected_link_set(bow_tie, set())


def test_is_connected_link_set_rejects_unknown_links(bow_tie):
    with pytest.raises(errors.LinkSetError):
        graph.is_connected_link_set(bow_tie, {6})


def test_is_connected_link_set_agrees_with_traversal():
    rng = np.random.default_rng(7)
    for seed in range(30):
        g = random_connected(seed, max_links=20)
        for _ in range(10):
            size = int(rng.integers(1, g.link_count + 1))
            links = set(rng.choice(g.link_count, size=size, replace=False).tolist())
            assert graph.is_connected_link_set(g, links) == bfs_connected(g, links)


def test_link_components_order(bow_tie):
    components = graph.link_components(bow_tie, {0, 3, 4, 5})
    assert components == [frozenset({3, 4, 5}), frozenset({0})]


def test_read_node_attributes_skips_malformed_rows(caplog):
    flags = graph.read_node_attributes(io.StringIO("a\t1\nb\tno\nbroken\nc\tProtected\n"))
    assert flags == {"a": True, "b": False, "c": True}
    assert "malformed" in caplog.text


def test_graph_cache_round_trip(tmp_path, bow_tie):
    path = tmp_path / "bow_tie.npz"
    graph.save_graph(bow_tie, path)
    loaded = graph.load_graph(path)
    assert loaded.labels == bow_tie.labels
    assert loaded.link_ends == bow_tie.link_ends


def test_write_labels(bow_tie):
    stream = io.StringIO()
    graph.write_labels(bow_tie, stream)
    assert stream.getvalue().splitlines()[:2] == ["node\tlabel", "0\ta"]
