"""Link sets with incrementally maintained external connectivity and normalised node-cut."""

from . import errors, graph

from collections import abc
import hashlib
import math

import numpy as np

type LandscapeDistance = int

PSI_TOLERANCE = 1e-12
RECOMPUTE_INTERVAL = 2 ** 16


def is_equal(a: float, b: float) -> bool:
    """Determines whether two cost values are equal within the relative tolerance.

    :param a: A cost value.
    :param b: Another cost value.
    :return: True if |a - b| <= 1e-12 * max(1, |a|, |b|).
    """
    return abs(a - b) <= PSI_TOLERANCE * max(1.0, abs(a), abs(b))


def is_lower(a: float, b: float) -> bool:
    """Determines whether a is lower than b beyond the relative tolerance.

    :param a: A cost value.
    :param b: Another cost value.
    :return: True if a < b and the two are not equal within tolerance.
    """
    return a < b and not is_equal(a, b)


def _term(k_in: int, k: int) -> float:
    return k_in * (k - k_in) / k


def _normalise(sigma_value: float, k_in_total: int, link_count: int) -> float | None:
    two_m = 2 * link_count
    if k_in_total <= 0 or k_in_total >= two_m:
        return None
    return sigma_value / (k_in_total * (1.0 - k_in_total / two_m))


class LinkSet:
    """A set of link ids with per-node internal degrees and a running sigma."""
    def __init__(self, g: graph.Graph, links: abc.Iterable[int] = ()) -> None:
        """Constructs a LinkSet object.

        :param g: The graph the links belong to.
        :param links: The initial link ids.
        """
        self.graph = g
        self.links: set[int] = set()
        self.internal_degree: dict[int, int] = {}
        self._sigma = 0.0
        self._deltas = 0
        for e in links:
            self.include(e)

    def __len__(self) -> int:
        return len(self.links)

    def __iter__(self) -> abc.Iterator[int]:
        return iter(self.links)

    def __contains__(self, e: object) -> bool:
        return e in self.links

    def __repr__(self) -> str:
        return "LinkSet(size={0:d}, psi={1})".format(len(self.links), self.psi_or_none())

    @property
    def k_in_total(self) -> int:
        return 2 * len(self.links)

    @property
    def sigma(self) -> float:
        return self._sigma

    @property
    def psi(self) -> float:
        """The normalised node-cut of the link set.

        :return: Psi in [0, 1].
        """
        value = self.psi_or_none()
        if value is None:
            raise errors.UndefinedCostError(
                "psi is undefined for {0:d} of {1:d} links".format(len(self.links), self.graph.link_count)
            )
        return value

    def psi_or_none(self) -> float | None:
        return _normalise(self._sigma, self.k_in_total, self.graph.link_count)

    def frozen(self) -> frozenset[int]:
        return frozenset(self.links)

    def nodes(self) -> frozenset[int]:
        return frozenset(self.internal_degree)

    def copy(self) -> "LinkSet":
        other = LinkSet.__new__(LinkSet)
        other.graph = self.graph
        other.links = set(self.links)
        other.internal_degree = dict(self.internal_degree)
        other._sigma = self._sigma
        other._deltas = self._deltas
        return other

    def _bump(self) -> None:
        self._deltas += 1
        if self._deltas >= RECOMPUTE_INTERVAL:
            self.recompute()

    def recompute(self) -> None:
        """Recomputes sigma from the internal degrees to discard accumulated rounding."""
        degrees = self.graph.degree_list
        self._sigma = math.fsum(_term(a, degrees[i]) for i, a in self.internal_degree.items())
        self._deltas = 0

    def include(self, e: int) -> None:
        """Adds a link.

        :param e: A link id not in the set.
        """
        if e in self.links:
            raise errors.LinkSetError("link {0} is already in the set".format(e))
        self.graph.check_links((e,))
        degrees = self.graph.degree_list
        for i in self.graph.link_ends[e]:
            a = self.internal_degree.get(i, 0)
            k = degrees[i]
            self._sigma += (k - 2 * a - 1) / k
            self.internal_degree[i] = a + 1
        self.links.add(e)
        self._bump()

    def exclude(self, e: int) -> None:
        """Removes a link.

        :param e: A link id in the set.
        """
        if e not in self.links:
            raise errors.LinkSetError("link {0} is not in the set".format(e))
        degrees = self.graph.degree_list
        for i in self.graph.link_ends[e]:
            a = self.internal_degree[i]
            k = degrees[i]
            self._sigma += (2 * a - k - 1) / k
            if a == 1:
                del self.internal_degree[i]
            else:
                self.internal_degree[i] = a - 1
        self.links.remove(e)
        if not self.links:
            self._sigma = 0.0
        self._bump()

    def update(self, add: abc.Iterable[int] = (), remove: abc.Iterable[int] = ()) -> None:
        for e in remove:
            self.exclude(e)
        for e in add:
            self.include(e)

    def psi_with_link(self, e: int) -> float | None:
        """Evaluates psi after adding a link without changing the set.

        :param e: A link id not in the set.
        :return: The prospective psi, or None if it would be undefined.
        """
        degrees = self.graph.degree_list
        delta = 0.0
        for i in self.graph.link_ends[e]:
            k = degrees[i]
            delta += (k - 2 * self.internal_degree.get(i, 0) - 1) / k
        return _normalise(self._sigma + delta, self.k_in_total + 2, self.graph.link_count)

    def psi_without_link(self, e: int) -> float | None:
        """Evaluates psi after removing a link without changing the set.

        :param e: A link id in the set.
        :return: The prospective psi, or None if it would be undefined.
        """
        degrees = self.graph.degree_list
        delta = 0.0
        for i in self.graph.link_ends[e]:
            k = degrees[i]
            delta += (2 * self.internal_degree[i] - k - 1) / k
        return _normalise(self._sigma + delta, self.k_in_total - 2, self.graph.link_count)

    def prospective_psi(self, node_changes: abc.Mapping[int, int], link_change: int) -> float | None:
        """Evaluates psi after a batch change of internal degrees without changing the set.

        :param node_changes: Change of internal degree per affected node.
        :param link_change: Change of the number of links.
        :return: The prospective psi, or None if it would be undefined.
        """
        degrees = self.graph.degree_list
        sigma_value = self._sigma
        for i, d in node_changes.items():
            a = self.internal_degree.get(i, 0)
            sigma_value += _term(a + d, degrees[i]) - _term(a, degrees[i])
        return _normalise(sigma_value, self.k_in_total + 2 * link_change, self.graph.link_count)


type Links = LinkSet | abc.Iterable[int]


def _ids(links: Links) -> np.ndarray:
    if isinstance(links, LinkSet):
        links = links.links
    return np.fromiter(links, dtype=np.int64)


def internal_degrees(g: graph.Graph, links: Links) -> np.ndarray:
    """Counts, for every node, the links of a set attached to it.

    :param g: A graph.
    :param links: A link set.
    :return: An array of k_i^in indexed by node id.
    """
    ids = _ids(links)
    g.check_links(ids.tolist())
    return np.bincount(g.links[ids].ravel(), minlength=g.node_count)


def sigma(g: graph.Graph, links: Links) -> float:
    """Computes the external connectivity of a link set from scratch.

    :param g: A graph.
    :param links: A link set.
    :return: The sum over nodes of k_in * k_out / k.
    """
    k_in = internal_degrees(g, links)
    boundary = k_in > 0
    k = g.degrees[boundary]
    return float(np.sum(k_in[boundary] * (k - k_in[boundary]) / k))


def psi(g: graph.Graph, links: Links) -> float:
    """Computes the normalised node-cut of a link set from scratch.

    :param g: A graph.
    :param links: A link set.
    :return: Psi in [0, 1].
    """
    size = len(_ids(links))
    value = _normalise(sigma(g, links), 2 * size, g.link_count)
    if value is None:
        raise errors.UndefinedCostError("psi is undefined for {0:d} of {1:d} links".format(size, g.link_count))
    return value


def apply_delta(g: graph.Graph, link_set: LinkSet, add: abc.Collection[int], remove: abc.Collection[int]) -> LinkSet:
    """Returns a new link set with links added and removed.

    :param g: The graph of the link set.
    :param link_set: The original link set, left unchanged.
    :param add: Links not in the set.
    :param remove: Links in the set.
    :return: The updated link set.
    """
    if link_set.graph is not g:
        raise errors.LinkSetError("link set belongs to a different graph")
    add, remove = set(add), set(remove)
    if add & remove:
        raise errors.LinkSetError("links {0} are both added and removed".format(sorted(add & remove)))
    if add & link_set.links:
        raise errors.LinkSetError("links {0} are already in the set".format(sorted(add & link_set.links)))
    if not remove <= link_set.links:
        raise errors.LinkSetError("links {0} are not in the set".format(sorted(remove - link_set.links)))
    result = link_set.copy()
    result.update(add=sorted(add), remove=sorted(remove))
    return result


def _as_set(links: Links) -> abc.Set[int]:
    if isinstance(links, LinkSet):
        return links.links
    if isinstance(links, abc.Set):
        return links
    return set(links)


def distance(a: Links, b: Links) -> LandscapeDistance:
    """Counts the single-link steps between two link sets in the cost landscape.

    :param a: A link set.
    :param b: Another link set.
    :return: The size of the symmetric difference.
    """
    return len(_as_set(a) ^ _as_set(b))


def fingerprint(links: Links) -> str:
    """Computes the canonical 128-bit fingerprint of a link set.

    :param links: A link set.
    :return: A 32-character hex digest over the sorted link ids.
    """
    ids = np.sort(_ids(links)).astype("<i8")
    return hashlib.blake2b(ids.tobytes(), digest_size=16).hexdigest()


def minimal_range(resolution: float, size: int) -> int:
    """Computes floor(r * size), absorbing rounding of r = 1/3 and similar fractions.

    :param resolution: The resolution parameter r.
    :param size: A set size.
    :return: The minimal range R_min.
    """
    return math.floor(resolution * size + 1e-9)
