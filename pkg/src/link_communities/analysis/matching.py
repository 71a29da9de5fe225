"""Salton similarity and best-partner matching between two solutions."""

from ..core import graph
from . import solution

from collections import abc
import dataclasses
import enum
import math

MEMBERSHIP_THRESHOLD = 0.5


class MatchMode(enum.Enum):
    LINKS = "links"
    NODES = "nodes"


def salton_index(a: abc.Set, b: abc.Set) -> float:
    """Computes the cosine similarity of two sets.

    :param a: A set.
    :param b: Another set over the same universe.
    :return: |A & B| / sqrt(|A| |B|), or 0 if either set is empty.
    """
    if not a or not b:
        return 0.0
    return len(a & b) / math.sqrt(len(a) * len(b))


@dataclasses.dataclass(frozen=True)
class MatchRow:
    """The most similar partner of one community."""
    index: int
    partner: int | None
    salton: float
    overlap_first: float
    overlap_second: float
    shared: int


def node_sets(
        g: graph.Graph,
        link_sets: abc.Iterable[abc.Set[int]],
        threshold: float = MEMBERSHIP_THRESHOLD
) -> list[frozenset[int]]:
    """Maps communities to the nodes with membership grade above a threshold.

    :param g: A graph.
    :param link_sets: Community link sets.
    :param threshold: Grades must be strictly larger than this.
    :return: One node set per community.
    """
    return [
        frozenset(i for i, grade in solution.membership_grades(g, links).items() if grade > threshold)
        for links in link_sets
    ]


def match_solutions(first: abc.Sequence[abc.Set], second: abc.Sequence[abc.Set]) -> list[MatchRow]:
    """Finds for every community of the first solution its most similar community in the second.

    Ties go to the lower partner index. A row without any shared element has no partner.

    :param first: Sets of the first solution.
    :param second: Sets of the second solution or an external partition.
    :return: One row per set of the first solution.
    """
    rows = []
    for i, a in enumerate(first):
        best, best_salton = None, 0.0
        for j, b in enumerate(second):
            value = salton_index(a, b)
            if value > best_salton:
                best, best_salton = j, value
        if best is None:
            rows.append(MatchRow(i, None, 0.0, 0.0, 0.0, 0))
            continue
        b = second[best]
        shared = len(a & b)
        rows.append(MatchRow(i, best, best_salton, shared / len(a), shared / len(b), shared))
    return rows
