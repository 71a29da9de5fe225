"""Greedy node-wise and link-wise adaptation toward local minima of psi."""

from ..core import errors, graph, link_set

from collections import abc
import collections
import dataclasses
import enum
import logging
import math
import typing

import networkx as nx

logger = logging.getLogger(__name__)

PLATEAU_LIMIT = 256


class SearchDirection(enum.Enum):
    """The phase a local search starts with."""
    INCLUSION_FIRST = "inclusion-first"
    EXCLUSION_FIRST = "exclusion-first"

    @property
    def other(self) -> "SearchDirection":
        if self is SearchDirection.INCLUSION_FIRST:
            return SearchDirection.EXCLUSION_FIRST
        return SearchDirection.INCLUSION_FIRST


INCLUDE = SearchDirection.INCLUSION_FIRST
EXCLUDE = SearchDirection.EXCLUSION_FIRST


@dataclasses.dataclass(frozen=True)
class SearchBudget:
    """Limits on non-improving moves derived from the resolution parameter."""
    resolution: float = 1 / 3
    max_steps: int | None = None

    def __post_init__(self) -> None:
        if not 0 < self.resolution < 1:
            raise errors.ConfigError("resolution must lie in (0, 1), got {0}".format(self.resolution))
        if self.max_steps is not None and self.max_steps < 1:
            raise errors.ConfigError("max_steps must be positive")

    def max_worsening_steps(self, size: int) -> int:
        """Returns how many consecutive non-improving moves are allowed.

        :param size: The current size of the searched set in units of the active move set.
        :return: floor(r * size).
        """
        return link_set.minimal_range(self.resolution, size)


class _Walker(typing.Protocol):
    def size(self) -> int: ...

    def psi(self) -> float | None: ...

    def candidates(self, phase: SearchDirection) -> abc.Iterable[tuple[int, float]]: ...

    def apply(self, phase: SearchDirection, move: int) -> float | None: ...

    def snapshot(self) -> typing.Any: ...

    def restore(self, state: typing.Any) -> None: ...

    def key(self) -> frozenset[int]: ...


def _greedy_choice(candidates: abc.Iterable[tuple[int, float]]) -> int | None:
    chosen = None
    chosen_psi = math.inf
    for move, value in sorted(candidates):
        if chosen is None or link_set.is_lower(value, chosen_psi):
            chosen, chosen_psi = move, value
    return chosen


def _run_phase(
        walker: _Walker,
        phase: SearchDirection,
        budget: SearchBudget,
        best_psi: float | None
) -> tuple[typing.Any, float | None, bool]:
    best_state = walker.snapshot()
    improved = False
    worsening = 0
    steps = 0
    while budget.max_steps is None or steps < budget.max_steps:
        move = _greedy_choice(walker.candidates(phase))
        if move is None:
            break
        value = walker.apply(phase, move)
        steps += 1
        if value is not None and (best_psi is None or link_set.is_lower(value, best_psi)):
            best_state, best_psi = walker.snapshot(), value
            improved = True
            worsening = 0
            continue
        worsening += 1
        if worsening > budget.max_worsening_steps(walker.size()):
            break
    return best_state, best_psi, improved


def _explore_plateau(walker: _Walker, psi: float) -> tuple[typing.Any, float, bool]:
    """Walks the states reachable from the current one through moves of equal psi.

    :param walker: A walker positioned at a state without lower neighbours in its last phases.
    :param psi: The psi of that state.
    :return: A strictly lower neighbour of some plateau state and True, or else the plateau state with the smallest
        sorted ids and False.
    """
    start = walker.snapshot()
    plateau = {walker.key(): start}
    frontier = collections.deque([start])
    while frontier:
        state = frontier.popleft()
        for phase in (INCLUDE, EXCLUDE):
            walker.restore(state)
            for move, value in sorted(walker.candidates(phase)):
                if link_set.is_lower(value, psi):
                    walker.restore(state)
                    lower = walker.apply(phase, move)
                    return walker.snapshot(), lower, True
                if not link_set.is_equal(value, psi) or len(plateau) >= PLATEAU_LIMIT:
                    continue
                walker.restore(state)
                walker.apply(phase, move)
                key = walker.key()
                if key not in plateau:
                    plateau[key] = walker.snapshot()
                    frontier.append(plateau[key])
    if len(plateau) >= PLATEAU_LIMIT:
        logger.debug("Plateau exploration stopped at %d states", len(plateau))
    key = min(plateau, key=sorted)
    walker.restore(plateau[key])
    return plateau[key], psi, False


def _descend(walker: _Walker, direction: SearchDirection, budget: SearchBudget) -> typing.Any:
    best_state = walker.snapshot()
    best_psi = walker.psi()
    phase = direction if best_psi is not None else SearchDirection.EXCLUSION_FIRST
    while True:
        idle_phases = 0
        while idle_phases < 2:
            walker.restore(best_state)
            best_state, best_psi, improved = _run_phase(walker, phase, budget, best_psi)
            idle_phases = 0 if improved else idle_phases + 1
            phase = phase.other
        if best_psi is None:
            raise errors.SearchError("search never reached a set with defined psi")
        walker.restore(best_state)
        best_state, best_psi, lower = _explore_plateau(walker, best_psi)
        if not lower:
            return best_state
        phase = direction


class _LinkWalker:
    """Single-link moves: include a link adjacent to the set or exclude any link of the set."""
    def __init__(self, g: graph.Graph, links: abc.Iterable[int]) -> None:
        self.graph = g
        self.current = link_set.LinkSet(g, links)

    def size(self) -> int:
        return len(self.current)

    def psi(self) -> float | None:
        return self.current.psi_or_none()

    def candidates(self, phase: SearchDirection) -> abc.Iterator[tuple[int, float]]:
        if phase is INCLUDE:
            for e in adjacent_links(self.graph, self.current):
                value = self.current.psi_with_link(e)
                if value is not None:
                    yield e, value
        else:
            for e in self.current.links:
                value = self.current.psi_without_link(e)
                if value is not None:
                    yield e, value

    def apply(self, phase: SearchDirection, move: int) -> float | None:
        if phase is INCLUDE:
            self.current.include(move)
        else:
            self.current.exclude(move)
        return self.current.psi_or_none()

    def snapshot(self) -> link_set.LinkSet:
        return self.current.copy()

    def restore(self, state: link_set.LinkSet) -> None:
        self.current = state.copy()

    def key(self) -> frozenset[int]:
        return self.current.frozen()


class _NodeWalker:
    """Single-node moves on induced subgraphs, keeping the main component after a disconnecting exclusion."""
    def __init__(self, g: graph.Graph, nodes: abc.Iterable[int]) -> None:
        self.graph = g
        self.nodes: set[int] = set()
        self.current = link_set.LinkSet(g)
        self.restore(main_component(g, frozenset(nodes)))
        if not self.current.links:
            raise errors.SearchError("node set induces no links")

    def size(self) -> int:
        return len(self.nodes)

    def psi(self) -> float | None:
        return self.current.psi_or_none()

    def _inner_neighbors(self, v: int) -> list[tuple[int, int]]:
        return [(nbr, e) for nbr, e in self.graph.adjacency[v] if nbr in self.nodes]

    def boundary(self) -> set[int]:
        """Returns the nodes of the set with at least one link leaving it."""
        degrees = self.graph.degree_list
        return {v for v in self.nodes if degrees[v] > self.current.internal_degree.get(v, 0)}

    def _cut_nodes(self) -> set[int]:
        inner = nx.Graph(self.graph.link_ends[e] for e in self.current.links)
        return set(nx.articulation_points(inner))

    def _split_psi(self, v: int) -> float | None:
        kept = main_component(self.graph, frozenset(self.nodes - {v}))
        return link_set.LinkSet(self.graph, self.graph.induced_links(kept)).psi_or_none()

    def candidates(self, phase: SearchDirection) -> abc.Iterator[tuple[int, float]]:
        cut: set[int] = set()
        if phase is INCLUDE:
            frontier = {
                nbr for v in self.nodes for nbr in self.graph.neighbors(v)
                if nbr not in self.nodes
            }
            sign = 1
        else:
            # Without boundary nodes the set spans its whole component; any node may leave.
            frontier = self.boundary() or self.nodes
            sign = -1
            cut = self._cut_nodes()
        for v in sorted(frontier):
            if v in cut:
                # Excluding a cut node keeps only the main component.
                value = self._split_psi(v)
                if value is not None:
                    yield v, value
                continue
            inner = self._inner_neighbors(v)
            changes = {v: sign * len(inner)}
            for nbr, _ in inner:
                changes[nbr] = sign
            value = self.current.prospective_psi(changes, sign * len(inner))
            if value is not None:
                yield v, value

    def apply(self, phase: SearchDirection, move: int) -> float | None:
        inner = self._inner_neighbors(move)
        if phase is INCLUDE:
            self.nodes.add(move)
            for _, e in inner:
                self.current.include(e)
        else:
            self.nodes.remove(move)
            for _, e in inner:
                self.current.exclude(e)
            kept = main_component(self.graph, frozenset(self.nodes))
            if len(kept) < len(self.nodes):
                logger.debug("Node exclusion split the subgraph; keeping %d of %d nodes", len(kept), len(self.nodes))
                self.restore(kept)
        return self.current.psi_or_none()

    def snapshot(self) -> graph.NodeSet:
        return frozenset(self.nodes)

    def restore(self, state: graph.NodeSet) -> None:
        self.nodes = set(state)
        self.current = link_set.LinkSet(self.graph, self.graph.induced_links(state))

    def key(self) -> frozenset[int]:
        return frozenset(self.nodes)


def adjacent_links(g: graph.Graph, current: link_set.LinkSet) -> set[int]:
    """Collects the links outside a set that touch one of its nodes.

    :param g: A graph.
    :param current: A link set.
    :return: The neighbouring link ids.
    """
    return {
        e for i in current.internal_degree for _, e in g.adjacency[i]
        if e not in current.links
    }


def main_component(g: graph.Graph, nodes: graph.NodeSet) -> graph.NodeSet:
    """Reduces a node set to the component of its induced subgraph with the most links.

    Ties go to the component with the most nodes, then to the one with the smallest node id.

    :param g: A graph.
    :param nodes: A node set C.
    :return: The node set of the main component.
    """
    remaining = set(nodes)
    best: tuple[int, int, int] | None = None
    best_nodes: set[int] = set()
    while remaining:
        start = min(remaining)
        remaining.discard(start)
        component = {start}
        stack = [start]
        degree_sum = 0
        while stack:
            v = stack.pop()
            for nbr in g.neighbors(v):
                if nbr in nodes:
                    degree_sum += 1
                    if nbr in remaining:
                        remaining.discard(nbr)
                        component.add(nbr)
                        stack.append(nbr)
        key = (-degree_sum // 2, -len(component), start)
        if best is None or key < best:
            best, best_nodes = key, component
    return frozenset(best_nodes)


def node_wise_adapt(
        g: graph.Graph,
        nodes: abc.Iterable[int],
        direction: SearchDirection = INCLUDE,
        budget: SearchBudget | None = None
) -> graph.NodeSet:
    """Adapts a node set by greedy node inclusions and exclusions.

    :param g: A graph.
    :param nodes: The starting node set C.
    :param direction: The phase to start with; exclusion is forced when psi of C is undefined.
    :param budget: The worsening budget, default r = 1/3.
    :return: A node set whose induced link set is a local minimum under node moves.
    """
    start = frozenset(nodes)
    if not start:
        raise errors.SearchError("cannot adapt an empty node set")
    if min(start) < 0 or max(start) >= g.node_count:
        raise errors.SearchError("node set references nodes outside [0, {0:d})".format(g.node_count))
    walker = _NodeWalker(g, start)
    result = _descend(walker, direction, budget or SearchBudget())
    logger.debug("Node-wise adaptation %d -> %d nodes, psi %.6f", len(start), len(result), walker.psi())
    return result


def link_wise_adapt(
        g: graph.Graph,
        links: link_set.Links,
        direction: SearchDirection = INCLUDE,
        budget: SearchBudget | None = None
) -> list[link_set.LinkSet]:
    """Adapts a link set by greedy single-link inclusions and exclusions.

    Intermediate sets may be unconnected. If the best set found is unconnected, each of its components is adapted
    again and all connected results are returned. A search ending on a plateau of equal psi walks the plateau for a
    lower exit; a plateau without one holds no strict local minimum and yields no result.

    :param g: A graph.
    :param links: The starting link set L.
    :param direction: The phase to start with.
    :param budget: The worsening budget, default r = 1/3.
    :return: Distinct connected local minima sorted by psi, then fingerprint.
    """
    start = frozenset(links.links if isinstance(links, link_set.LinkSet) else links)
    if not start:
        raise errors.LinkSetError("cannot adapt an empty link set")
    g.check_links(start)
    budget = budget or SearchBudget()

    results: dict[str, link_set.LinkSet] = {}
    seen: set[str] = set()
    pending = [start]
    while pending:
        current = pending.pop()
        key = link_set.fingerprint(current)
        if key in seen:
            continue
        seen.add(key)
        best = _descend(_LinkWalker(g, current), direction, budget)
        components = graph.link_components(g, best.links)
        if len(components) == 1:
            if is_local_minimum(g, best):
                results.setdefault(link_set.fingerprint(best), best)
            else:
                logger.debug("Dropping a flat result of %d links with equal-psi neighbours", len(best))
        else:
            logger.debug("Link-wise result has %d components; adapting each", len(components))
            pending.extend(reversed(components))
    if not results:
        logger.warning("Link-wise adaptation of %d links produced no connected set", len(start))
    return sorted(results.values(), key=lambda s: (s.psi, link_set.fingerprint(s)))


def is_local_minimum(g: graph.Graph, links: link_set.Links) -> bool:
    """Determines whether every single-link move raises psi.

    Moves are removals of any link and additions of adjacent links. Neighbours with undefined psi are ignored; a
    neighbour equal within tolerance is not higher, so a set on a plateau is no local minimum.

    :param g: A graph.
    :param links: A link set with defined psi.
    :return: True if the set is a strict local minimum, false otherwise.
    """
    current = links if isinstance(links, link_set.LinkSet) else link_set.LinkSet(g, links)
    value = current.psi
    for e in current.links:
        other = current.psi_without_link(e)
        if other is not None and not link_set.is_lower(value, other):
            return False
    for e in adjacent_links(g, current):
        other = current.psi_with_link(e)
        if other is not None and not link_set.is_lower(value, other):
            return False
    return True


def is_node_local_minimum(g: graph.Graph, nodes: graph.NodeSet) -> bool:
    """Determines whether no single-node move lowers psi of the induced link set.

    :param g: A graph.
    :param nodes: A node set with defined psi.
    :return: True if the node set is a local minimum under node moves.
    """
    walker = _NodeWalker(g, nodes)
    value = walker.current.psi
    return not any(
        link_set.is_lower(other, value)
        for phase in (INCLUDE, EXCLUDE)
        for _, other in walker.candidates(phase)
    )
