"""Immutable undirected unweighted graphs with dense node and link ids."""

from . import errors

from collections import abc
import collections
import io
import logging
import os
import typing

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

type NodeSet = frozenset[int]
type Link = tuple[int, int]


class Graph:
    """An undirected unweighted graph without self-loops or parallel links."""
    def __init__(
            self,
            node_count: int,
            links: abc.Sequence[Link],
            labels: abc.Sequence[str] | None = None
    ) -> None:
        """Constructs a Graph object.

        :param node_count: The number of nodes n. Nodes are identified by 0..n-1.
        :param links: The links as (node, node) pairs. The position of a pair is its link id.
        :param labels: Optional external node labels, one per node.
        """
        if labels is not None and len(labels) != node_count:
            raise errors.GraphError("expected {0:d} labels, got {1:d}".format(node_count, len(labels)))

        seen = set()
        ends = []
        adjacency: list[list[tuple[int, int]]] = [[] for _ in range(node_count)]
        for link_id, (u, v) in enumerate(links):
            u, v = int(u), int(v)
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise errors.GraphError("link {0:d} references a node outside [0, {1:d})".format(link_id, node_count))
            if u == v:
                raise errors.GraphError("link {0:d} is a self-loop on node {1:d}".format(link_id, u))
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise errors.GraphError("link {0:d} duplicates {1}".format(link_id, key))
            seen.add(key)
            ends.append((u, v))
            adjacency[u].append((v, link_id))
            adjacency[v].append((u, link_id))

        self.node_count = node_count
        self.link_count = len(ends)
        self.link_ends: tuple[Link, ...] = tuple(ends)
        self.adjacency: tuple[tuple[tuple[int, int], ...], ...] = tuple(tuple(a) for a in adjacency)
        self.degree_list: tuple[int, ...] = tuple(len(a) for a in adjacency)
        self.labels: tuple[str, ...] = tuple(labels) if labels is not None else tuple(
            str(i) for i in range(node_count)
        )

        self.links = np.array(ends, dtype=np.int64).reshape(-1, 2)
        self.links.flags.writeable = False
        self.degrees = np.array(self.degree_list, dtype=np.int64)
        self.degrees.flags.writeable = False

        self._label_index: dict[str, int] | None = None
        self._connected: bool | None = None
        assert int(self.degrees.sum()) == 2 * self.link_count

    def __repr__(self) -> str:
        return "Graph(n={0:d}, m={1:d})".format(self.node_count, self.link_count)

    def endpoints(self, link_id: int) -> Link:
        """Returns the two nodes attached to a link.

        :param link_id: A link id.
        :return: The pair of attached nodes.
        """
        return self.link_ends[link_id]

    def neighbors(self, node: int) -> abc.Iterator[int]:
        return (nbr for nbr, _ in self.adjacency[node])

    def node_id(self, label: str) -> int:
        """Looks up the dense id of an external node label.

        :param label: An external node label.
        :return: The dense node id.
        """
        if self._label_index is None:
            self._label_index = {label: i for i, label in enumerate(self.labels)}
        return self._label_index[label]

    def has_label(self, label: str) -> bool:
        try:
            self.node_id(label)
        except KeyError:
            return False
        return True

    def check_links(self, links: abc.Iterable[int]) -> None:
        """Raises LinkSetError if any link id is outside [0, m).

        :param links: Link ids.
        """
        for e in links:
            if not 0 <= e < self.link_count:
                raise errors.LinkSetError("link id {0} outside [0, {1:d})".format(e, self.link_count))

    def induced_links(self, nodes: abc.Collection[int]) -> frozenset[int]:
        """Returns all links with both endpoints in a node set.

        :param nodes: A node set C.
        :return: The link set induced by C.
        """
        induced = set()
        for i in nodes:
            for nbr, e in self.adjacency[i]:
                if nbr in nodes:
                    induced.add(e)
        return frozenset(induced)

    def attached_nodes(self, links: abc.Iterable[int]) -> frozenset[int]:
        """Returns the nodes attached to the links of a link set.

        :param links: A link set.
        :return: The node set of the subgraph defined by the links.
        """
        nodes = set()
        for e in links:
            nodes.update(self.link_ends[e])
        return frozenset(nodes)

    @property
    def is_connected(self) -> bool:
        if self._connected is None:
            self._connected = self.node_count > 0 and len(node_components(self)) == 1
        return self._connected

    def subgraph(self, nodes: abc.Iterable[int]) -> "Graph":
        """Constructs the subgraph induced by a node set with dense ids renumbered in increasing order.

        :param nodes: The nodes to keep.
        :return: A new Graph. Link order follows the original link ids.
        """
        kept = sorted(set(nodes))
        remap = {old: new for new, old in enumerate(kept)}
        links = [
            (remap[u], remap[v]) for u, v in self.link_ends
            if u in remap and v in remap
        ]
        return Graph(len(kept), links, [self.labels[i] for i in kept])

    def to_networkx(self) -> nx.Graph:
        """Converts the graph to a networkx Graph with link ids stored as the "link" edge attribute.

        :return: A networkx Graph.
        """
        nxg = nx.Graph()
        nxg.add_nodes_from(range(self.node_count))
        nxg.add_edges_from((u, v, {"link": e}) for e, (u, v) in enumerate(self.link_ends))
        return nxg


def node_components(g: Graph) -> list[NodeSet]:
    """Finds the connected components of a graph.

    :param g: A graph.
    :return: Node sets ordered by decreasing size, ties broken by smallest minimum node id.
    """
    components = [frozenset(c) for c in nx.connected_components(g.to_networkx())]
    return sorted(components, key=lambda c: (-len(c), min(c)))


def link_components(g: Graph, links: abc.Iterable[int]) -> list[frozenset[int]]:
    """Splits a link set into the link sets of its connected components.

    :param g: A graph.
    :param links: A link set L.
    :return: Component link sets ordered by decreasing size, ties broken by smallest attached node id.
    """
    incident: dict[int, list[int]] = collections.defaultdict(list)
    for e in links:
        u, v = g.link_ends[e]
        incident[u].append(e)
        incident[v].append(e)

    visited_nodes = set()
    components = []
    for start in sorted(incident):
        if start in visited_nodes:
            continue
        visited_nodes.add(start)
        component = set()
        stack = [start]
        while stack:
            node = stack.pop()
            for e in incident[node]:
                if e in component:
                    continue
                component.add(e)
                for end in g.link_ends[e]:
                    if end not in visited_nodes:
                        visited_nodes.add(end)
                        stack.append(end)
        components.append((start, frozenset(component)))
    components.sort(key=lambda item: (-len(item[1]), item[0]))
    return [component for _, component in components]


def is_connected_link_set(g: Graph, links: abc.Collection[int]) -> bool:
    """Determines whether the subgraph formed by a link set and its attached nodes is connected.

    :param g: A graph.
    :param links: A link set L.
    :return: True if L is non-empty and connected, false otherwise.
    """
    g.check_links(links)
    if not links:
        return False
    return len(link_components(g, links)) == 1


def _decode(line: bytes | str) -> str:
    return line.decode("utf-8") if isinstance(line, bytes) else line


def load_edge_list(
        source: typing.BinaryIO | typing.TextIO | abc.Iterable[bytes | str],
        comment: str = "#"
) -> Graph:
    """Reads a whitespace-separated edge list.

    Direction of input pairs is discarded, parallel links collapse and labels are interned to dense ids in order of
    first appearance. Self-loops are dropped with a warning.

    :param source: A byte or text stream, or any iterable of lines.
    :param comment: Lines starting with this prefix are ignored.
    :return: The graph.
    """
    index: dict[str, int] = {}
    labels: list[str] = []
    links: list[Link] = []
    seen: set[Link] = set()
    self_loops = 0
    for line_number, raw in enumerate(source, start=1):
        try:
            line = _decode(raw).strip()
        except UnicodeDecodeError:
            raise errors.EdgeListParseError(line_number, repr(raw), "invalid UTF-8") from None
        if not line or line.startswith(comment):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise errors.EdgeListParseError(line_number, line, "expected two node labels")
        ids = []
        for token in tokens:
            if token not in index:
                index[token] = len(labels)
                labels.append(token)
            ids.append(index[token])
        u, v = ids
        if u == v:
            self_loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            continue
        seen.add(key)
        links.append(key)

    if not links:
        raise errors.EmptyGraphError("edge list contains no links")
    if self_loops:
        logger.warning("Dropped %d self-loops", self_loops)
    # Nodes that only appeared in self-loops stay as isolated nodes; giant_component removes them.
    return Graph(len(labels), links, labels)


def read_edge_list(path: str | os.PathLike) -> Graph:
    """Reads an edge list file.

    :param path: Path to the edge list.
    :return: The graph.
    """
    with open(path, "rb") as f:
        return load_edge_list(f)


def read_node_attributes(source: str | os.PathLike | typing.TextIO) -> dict[str, bool]:
    """Reads a two-column TSV file of node labels and protected flags.

    Flags "1", "true", "yes" and "protected" (case-insensitive) mark a node as protected.

    :param source: A path or an open text stream.
    :return: A mapping from node label to protected flag.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as f:
            return read_node_attributes(f)
    flags = {}
    for line_number, line in enumerate(source, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            logger.warning("Skipping malformed attribute row %d: %r", line_number, line)
            continue
        flags[fields[0]] = fields[1].strip().lower() in ("1", "true", "yes", "protected")
    return flags


def prune_degree_one(g: Graph, protected: abc.Callable[[int], bool]) -> Graph:
    """Removes every unprotected node of degree one in a single pass.

    Only nodes with degree one in the input graph are removed; nodes whose degree drops to one as a consequence are
    kept.

    :param g: A graph.
    :param protected: A predicate on node ids marking nodes that must never be pruned.
    :return: The pruned graph.
    """
    removed = [
        i for i in range(g.node_count)
        if g.degree_list[i] == 1 and not protected(i)
    ]
    if not removed:
        return g
    logger.info("Pruned %d unprotected degree-one nodes", len(removed))
    logger.debug("Pruned nodes: %s", ", ".join(g.labels[i] for i in removed))
    removed_set = set(removed)
    return g.subgraph(i for i in range(g.node_count) if i not in removed_set)


def giant_component(g: Graph) -> Graph:
    """Reduces a graph to its largest connected component.

    :param g: A graph.
    :return: The largest component by node count, ties broken by smallest minimum node id.
    """
    if g.node_count == 0:
        raise errors.EmptyGraphError("cannot take the giant component of an empty graph")
    components = node_components(g)
    if len(components) == 1:
        return g
    giant = components[0]
    logger.info(
        "Discarded %d nodes outside the giant component (%d components)",
        g.node_count - len(giant), len(components)
    )
    return g.subgraph(giant)


def prepare_graph(g: Graph, protected: abc.Callable[[int], bool] | None = None) -> Graph:
    """Applies the ingestion pipeline: optional degree-one pruning followed by the giant component.

    :param g: A freshly loaded graph.
    :param protected: A predicate marking nodes never to prune, or None to skip pruning.
    :return: A connected graph.
    """
    if protected is not None:
        g = prune_degree_one(g, protected)
    g = giant_component(g)
    if g.link_count == 0:
        raise errors.EmptyGraphError("graph has no links after preprocessing")
    return g


def save_graph(g: Graph, path: str | os.PathLike) -> None:
    """Writes a binary graph cache.

    :param g: A graph.
    :param path: Destination path; numpy appends ".npz" if missing.
    """
    np.savez_compressed(
        path,
        node_count=np.array([g.node_count], dtype=np.int64),
        links=np.asarray(g.links),
        labels=np.array(g.labels, dtype=np.str_)
    )


def load_graph(path: str | os.PathLike) -> Graph:
    """Reads a binary graph cache written by save_graph.

    :param path: Path to the ".npz" file.
    :return: The graph.
    """
    with np.load(path, allow_pickle=False) as data:
        node_count = int(data["node_count"][0])
        links = [(int(u), int(v)) for u, v in data["links"]]
        labels = [str(label) for label in data["labels"]]
    return Graph(node_count, links, labels)


def write_labels(g: Graph, stream: typing.TextIO) -> None:
    """Writes the dense id to label sidecar as TSV.

    :param g: A graph.
    :param stream: An open text stream.
    """
    stream.write("node\tlabel\n")
    for i, label in enumerate(g.labels):
        stream.write("{0:d}\t{1}\n".format(i, label))


def from_text(text: str) -> Graph:
    """Parses an edge list held in a string.

    :param text: Edge list text.
    :return: The graph.
    """
    return load_edge_list(io.StringIO(text))
