"""Relative inclusion, overlaps and the subtopic/supertopic poly-hierarchy."""

from collections import abc
import collections
import dataclasses
import itertools

import networkx as nx
import numpy as np

type Links = abc.Set[int]


def relative_inclusion(a: Links, b: Links) -> tuple[float, float]:
    """Computes the share of each link set that also belongs to the other.

    :param a: A link set.
    :param b: Another link set.
    :return: (|A & B| / |A|, |A & B| / |B|), with 0 for an empty side.
    """
    shared = len(a & b)
    return (shared / len(a) if a else 0.0), (shared / len(b) if b else 0.0)


@dataclasses.dataclass(frozen=True)
class HierarchyEdge:
    """A subtopic pointing at one of its supertopics."""
    subtopic: int
    supertopic: int
    inclusion: float
    direct: bool


@dataclasses.dataclass(frozen=True)
class RelatedPair:
    """Two communities sharing links without either being a subtopic of the other."""
    a: int
    b: int
    shared: int


@dataclasses.dataclass
class Hierarchy:
    edges: list[HierarchyEdge]
    related: list[RelatedPair]

    def subtopics(self, index: int) -> list[int]:
        return [edge.subtopic for edge in self.edges if edge.supertopic == index]

    def supertopics(self, index: int, direct_only: bool = False) -> list[int]:
        return [edge.supertopic for edge in self.edges if edge.subtopic == index and (edge.direct or not direct_only)]

    def related_to(self, index: int) -> list[int]:
        return [p.b if p.a == index else p.a for p in self.related if index in (p.a, p.b)]

    def to_dot(self, names: abc.Sequence[str] | None = None) -> str:
        """Renders the hierarchy in the DOT language, direct edges solid and indirect edges dashed.

        :param names: Optional node names, default "c<index>".
        :return: The DOT source.
        """
        nodes = sorted({i for edge in self.edges for i in (edge.subtopic, edge.supertopic)})
        name = (lambda i: names[i]) if names is not None else (lambda i: "c{0:d}".format(i))
        lines = ["digraph hierarchy {", "  rankdir=BT;"]
        lines.extend('  "{0}";'.format(name(i)) for i in nodes)
        for edge in self.edges:
            style = "solid" if edge.direct else "dashed"
            lines.append('  "{0}" -> "{1}" [label="{2:.2f}", style={3}];'.format(
                name(edge.subtopic), name(edge.supertopic), edge.inclusion, style
            ))
        lines.append("}")
        return "\n".join(lines) + "\n"


def _shared_counts(link_sets: abc.Sequence[Links], arity: int) -> collections.Counter:
    index: dict[int, list[int]] = collections.defaultdict(list)
    for i, links in enumerate(link_sets):
        for e in links:
            index[e].append(i)
    counts: collections.Counter = collections.Counter()
    for members in index.values():
        if len(members) >= arity:
            counts.update(itertools.combinations(members, arity))
    return counts


def build_hierarchy(link_sets: abc.Sequence[Links], inclusion_threshold: float = 0.95) -> Hierarchy:
    """Links every community to the larger communities containing at least a threshold share of its links.

    An edge is direct when its supertopic cannot be reached from the subtopic through a chain of other edges.
    Relaxed inclusion is not transitive, so chains are followed only along edges that exist.

    :param link_sets: Community link sets; positions are community indices.
    :param inclusion_threshold: The minimum share of the subtopic's links inside the supertopic.
    :return: The hierarchy edges and the other related pairs.
    """
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(len(link_sets)))
    inclusions = {}
    related = []
    for (a, b), shared in sorted(_shared_counts(link_sets, 2).items()):
        in_a, in_b = relative_inclusion(link_sets[a], link_sets[b])
        if len(link_sets[a]) < len(link_sets[b]) and in_a >= inclusion_threshold:
            digraph.add_edge(a, b)
            inclusions[a, b] = in_a
        elif len(link_sets[b]) < len(link_sets[a]) and in_b >= inclusion_threshold:
            digraph.add_edge(b, a)
            inclusions[b, a] = in_b
        else:
            related.append(RelatedPair(a, b, shared))

    descendants = {i: nx.descendants(digraph, i) for i in digraph.nodes}
    edges = []
    for sub, sup in sorted(digraph.edges):
        indirect = any(sup in descendants[mid] for mid in digraph.successors(sub) if mid != sup)
        edges.append(HierarchyEdge(sub, sup, inclusions[sub, sup], not indirect))
    return Hierarchy(edges, related)


@dataclasses.dataclass(frozen=True)
class PairOverlap:
    a: int
    b: int
    shared: int
    inclusion_a: float
    inclusion_b: float


@dataclasses.dataclass(frozen=True)
class TripleOverlap:
    a: int
    b: int
    c: int
    shared: int


@dataclasses.dataclass
class OverlapStats:
    pairs: list[PairOverlap]
    triples: list[TripleOverlap]


def overlap_stats(link_sets: abc.Sequence[Links], min_shared: int = 1) -> OverlapStats:
    """Counts shared links of all overlapping pairs and triples.

    :param link_sets: Community link sets.
    :param min_shared: Minimum number of common links reported.
    :return: Pair and triple overlaps.
    """
    pairs = []
    for (a, b), shared in sorted(_shared_counts(link_sets, 2).items()):
        if shared >= min_shared:
            pairs.append(PairOverlap(a, b, shared, *relative_inclusion(link_sets[a], link_sets[b])))
    triples = [
        TripleOverlap(a, b, c, shared)
        for (a, b, c), shared in sorted(_shared_counts(link_sets, 3).items())
        if shared >= min_shared
    ]
    return OverlapStats(pairs, triples)


def inclusion_histogram(pairs: abc.Iterable[PairOverlap], bins: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Bins the relative inclusions of overlapping pairs in both directions.

    :param pairs: Pair overlaps.
    :param bins: Number of equal-width bins over [0, 1].
    :return: The counts and the bin edges.
    """
    values = np.array([v for p in pairs for v in (p.inclusion_a, p.inclusion_b)], dtype=float)
    return np.histogram(values, bins=bins, range=(0.0, 1.0))
