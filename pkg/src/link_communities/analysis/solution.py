"""Coverage, memberships and final selection of communities."""

from ..core import constraints, graph, link_set
from . import hierarchy

from collections import abc
import dataclasses
import functools
import logging
import math
import typing

import numpy as np
import scipy.sparse

logger = logging.getLogger(__name__)


class Ranked(typing.Protocol):
    """A scored community as kept by the registry."""
    links: frozenset[int]
    psi: float
    valid: bool | None

    @property
    def fingerprint(self) -> str: ...


@dataclasses.dataclass(frozen=True)
class ScoredCommunity:
    """A link set with its psi and validity, for analysing communities from outside a run."""
    links: frozenset[int]
    psi: float
    valid: bool | None = None

    @functools.cached_property
    def fingerprint(self) -> str:
        return link_set.fingerprint(self.links)

    @classmethod
    def from_links(cls, g: graph.Graph, links: abc.Iterable[int], valid: bool | None = None) -> "ScoredCommunity":
        links = frozenset(links)
        return cls(links, link_set.psi(g, links), valid)


def membership_grades(g: graph.Graph, links: abc.Iterable[int]) -> dict[int, float]:
    """Computes the fraction of each node's links inside a community.

    :param g: A graph.
    :param links: A community link set.
    :return: k_in / k for every node with k_in > 0.
    """
    k_in = link_set.internal_degrees(g, links)
    nodes = np.flatnonzero(k_in)
    return {int(i): float(k_in[i] / g.degrees[i]) for i in nodes}


@dataclasses.dataclass(frozen=True)
class CommunityStats:
    """Size and relation measures of one community."""
    link_count: int
    psi: float
    node_count: int
    full_papers: int
    fraction_sum: float
    valid: bool | None = None
    subtopics: int = 0
    supertopics: int = 0
    related: int = 0


def community_stats(g: graph.Graph, community: Ranked) -> CommunityStats:
    """Measures a community.

    :param g: A graph.
    :param community: A scored community.
    :return: Its statistics without hierarchy counts.
    """
    grades = membership_grades(g, community.links)
    return CommunityStats(
        link_count=len(community.links),
        psi=community.psi,
        node_count=len(grades),
        full_papers=sum(1 for grade in grades.values() if grade == 1.0),
        fraction_sum=math.fsum(grades.values()),
        valid=community.valid
    )


@dataclasses.dataclass(frozen=True)
class CoveragePoint:
    psi: float
    fraction: float
    fingerprint: str


def coverage_curve(
        g: graph.Graph,
        communities: abc.Iterable[Ranked],
        exclusions: abc.Container[str] = frozenset()
) -> list[CoveragePoint]:
    """Computes the share of all links covered by the communities up to each psi.

    :param g: A graph.
    :param communities: Communities; they are ranked by psi here.
    :param exclusions: Fingerprints of communities to leave out.
    :return: One point per distinct community, with non-decreasing fraction.
    """
    covered: set[int] = set()
    seen: set[str] = set()
    curve = []
    for community in sorted(communities, key=lambda c: (c.psi, c.fingerprint)):
        if community.fingerprint in exclusions or community.fingerprint in seen:
            continue
        seen.add(community.fingerprint)
        covered |= community.links
        curve.append(CoveragePoint(community.psi, len(covered) / g.link_count, community.fingerprint))
    return curve


def coverage_at(curve: abc.Sequence[CoveragePoint], psi_cutoff: float) -> float:
    """Reads the covered share at a psi cutoff.

    :param curve: A coverage curve.
    :param psi_cutoff: Communities with psi up to this value count.
    :return: The covered share of all links.
    """
    fraction = 0.0
    for point in curve:
        if point.psi > psi_cutoff:
            break
        fraction = point.fraction
    return fraction


def larger_than(g: graph.Graph, communities: abc.Iterable[Ranked], fraction: float) -> frozenset[str]:
    return frozenset(c.fingerprint for c in communities if len(c.links) > fraction * g.link_count)


@dataclasses.dataclass
class Solution:
    """Accepted communities ranked by psi with derived artifacts."""
    communities: list[Ranked]
    stats: list[CommunityStats]
    coverage_curve: list[CoveragePoint]
    memberships: scipy.sparse.csr_matrix
    hierarchy: hierarchy.Hierarchy
    overlaps: hierarchy.OverlapStats

    def __len__(self) -> int:
        return len(self.communities)

    @property
    def coverage(self) -> float:
        return self.coverage_curve[-1].fraction if self.coverage_curve else 0.0


def membership_matrix(g: graph.Graph, communities: abc.Sequence[Ranked]) -> scipy.sparse.csr_matrix:
    """Builds the sparse node by community matrix of membership grades.

    :param g: A graph.
    :param communities: Communities, one column each.
    :return: A CSR matrix of shape (n, len(communities)).
    """
    rows, cols, data = [], [], []
    for j, community in enumerate(communities):
        for i, grade in sorted(membership_grades(g, community.links).items()):
            rows.append(i)
            cols.append(j)
            data.append(grade)
    return scipy.sparse.csr_matrix(
        (np.array(data, dtype=float), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(g.node_count, len(communities))
    )


def build_solution(
        g: graph.Graph,
        communities: abc.Iterable[Ranked],
        inclusion_threshold: float = 0.95
) -> Solution:
    """Derives coverage, memberships, hierarchy and overlaps of a set of communities.

    :param g: A graph.
    :param communities: The accepted communities.
    :param inclusion_threshold: The subtopic inclusion threshold.
    :return: The solution ranked by psi.
    """
    ranked = sorted(communities, key=lambda c: (c.psi, c.fingerprint))
    link_sets = [c.links for c in ranked]
    tree = hierarchy.build_hierarchy(link_sets, inclusion_threshold)
    stats = [
        dataclasses.replace(
            community_stats(g, c),
            subtopics=len(tree.subtopics(j)),
            supertopics=len(tree.supertopics(j)),
            related=len(tree.related_to(j))
        )
        for j, c in enumerate(ranked)
    ]
    return Solution(
        ranked, stats, coverage_curve(g, ranked), membership_matrix(g, ranked), tree,
        hierarchy.overlap_stats(link_sets)
    )


def select_final(
        g: graph.Graph,
        communities: abc.Iterable[Ranked],
        psi_cutoff: float = math.inf,
        min_fraction_sum: float = 20.0,
        exclude_larger_than: float = 0.5,
        inclusion_threshold: float = 0.95,
        extra: abc.Iterable[constraints.Constraint] = ()
) -> Solution:
    """Selects valid communities below a psi cutoff that are neither too small nor too large.

    :param g: A graph.
    :param communities: Candidate communities with verdicts.
    :param psi_cutoff: Communities must have psi strictly below this value.
    :param min_fraction_sum: The minimum sum of membership grades.
    :param exclude_larger_than: The maximum share of all links.
    :param inclusion_threshold: The subtopic inclusion threshold of the hierarchy.
    :param extra: Further constraints.
    :return: The final solution, possibly empty.
    """
    rules = [
        constraints.ValidConstraint(),
        constraints.MaxPsiConstraint(psi_cutoff),
        constraints.MinFractionSumConstraint(min_fraction_sum),
        constraints.MaxSizeConstraint(exclude_larger_than),
        *extra
    ]
    selected = []
    seen = set()
    for community in communities:
        if community.fingerprint in seen:
            continue
        seen.add(community.fingerprint)
        stats = community_stats(g, community)
        if all(rule(stats, link_count=g.link_count) for rule in rules):
            selected.append(community)
    if not selected:
        logger.warning("No community satisfies the selection constraints")
    return build_solution(g, selected, inclusion_threshold)
