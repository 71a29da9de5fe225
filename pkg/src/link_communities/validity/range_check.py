"""Validity of communities by the range criterion and complements of mid-size communities."""

from ..core import errors, graph, link_set
from ..memetics import local_search

from collections import abc
import dataclasses
import enum
import logging
import math
import typing

logger = logging.getLogger(__name__)

OVERSIZE_FRACTION = 0.75
OVERSIZE_REASON = "undecidable: more than three quarters of all links"


class ValidityStatus(enum.Enum):
    VALID = "valid"
    INVALID = "invalid"
    UNDECIDABLE = "undecidable"


@dataclasses.dataclass(frozen=True)
class ValidityVerdict:
    """Outcome of a validity check.

    An invalid verdict carries a witness: a connected link set with lower psi inside the minimal range. Communities
    rejected for their size are invalid without a witness and say so in the reason.
    """
    status: ValidityStatus
    checked_radius: int
    witness: frozenset[int] | None = None
    witness_psi: float | None = None
    witness_distance: int | None = None
    reason: str = ""

    @property
    def is_valid(self) -> bool:
        return self.status is ValidityStatus.VALID


class Known(typing.Protocol):
    """Anything with a link set and its psi, such as a registered community."""
    links: frozenset[int]
    psi: float


class _Schedule(enum.Enum):
    INCLUSION = ("+",)
    EXCLUSION = ("-",)
    INCLUSION_EXCLUSION = ("+", "-")
    EXCLUSION_INCLUSION = ("-", "+")


def _moves(
        g: graph.Graph,
        origin: abc.Set[int],
        current: link_set.LinkSet,
        kind: str
) -> abc.Iterator[tuple[int, float]]:
    if kind == "+":
        for e in local_search.adjacent_links(g, current):
            if e not in origin:
                value = current.psi_with_link(e)
                if value is not None:
                    yield e, value
    else:
        for e in current.links:
            if e in origin:
                value = current.psi_without_link(e)
                if value is not None:
                    yield e, value


def _apply(current: link_set.LinkSet, kind: str, e: int) -> None:
    if kind == "+":
        current.include(e)
    else:
        current.exclude(e)


def _ranked(moves: abc.Iterable[tuple[int, float]]) -> list[tuple[int, float]]:
    return sorted(moves, key=lambda move: (move[1], move[0]))


def _walk(
        g: graph.Graph,
        origin: abc.Set[int],
        psi0: float,
        radius: int,
        schedule: _Schedule,
        first: tuple[str, int]
) -> tuple[frozenset[int], float, int] | None:
    current = link_set.LinkSet(g, origin)
    kinds = schedule.value
    switch = math.ceil(radius / 2) if len(kinds) == 2 else radius
    step = 0
    move: tuple[str, int] | None = first
    while move is not None:
        kind, e = move
        _apply(current, kind, e)
        step += 1
        value = current.psi_or_none()
        if value is not None and link_set.is_lower(value, psi0) and graph.is_connected_link_set(g, current.links):
            return current.frozen(), value, step
        if step >= radius:
            return None
        phase = kinds[0] if step < switch else kinds[-1]
        ranked = _ranked(_moves(g, origin, current, phase))
        move = (phase, ranked[0][0]) if ranked else None
    return None


def _excursions(
        g: graph.Graph,
        origin: frozenset[int],
        psi0: float,
        radius: int,
        beam: int
) -> list[tuple[frozenset[int], float, int]]:
    start = link_set.LinkSet(g, origin)
    witnesses = []
    for schedule in _Schedule:
        kind = schedule.value[0]
        for e, _ in _ranked(_moves(g, origin, start, kind))[:beam]:
            found = _walk(g, origin, psi0, radius, schedule, (kind, e))
            if found is not None:
                witnesses.append(found)
    return witnesses


def check_validity(
        g: graph.Graph,
        links: link_set.Links,
        resolution: float = 1 / 3,
        registry: abc.Iterable[Known] = (),
        beam: int = 4
) -> ValidityVerdict:
    """Searches a connected link set with lower psi within the minimal range of a community.

    The search runs bounded greedy excursions that move strictly away from the community, starting from its best
    few neighbours, and compares against known communities. A verdict of valid holds up to the power of that search.

    :param g: A graph.
    :param links: A connected local minimum L.
    :param resolution: The resolution parameter r; the minimal range is floor(r * |L|).
    :param registry: Known communities to compare against.
    :param beam: Number of first moves each excursion schedule starts from.
    :return: The verdict.
    """
    current = links if isinstance(links, link_set.LinkSet) else link_set.LinkSet(g, links)
    origin = current.frozen()
    psi0 = current.psi
    if len(origin) > OVERSIZE_FRACTION * g.link_count:
        return ValidityVerdict(ValidityStatus.INVALID, 0, reason=OVERSIZE_REASON)

    radius = link_set.minimal_range(resolution, len(origin))
    witnesses = []
    if radius > 0:
        witnesses.extend(_excursions(g, origin, psi0, radius, beam))
        for known in registry:
            if known.links == origin or not link_set.is_lower(known.psi, psi0):
                continue
            d = link_set.distance(known.links, origin)
            if d <= radius:
                witnesses.append((known.links, known.psi, d))

    if not witnesses:
        return ValidityVerdict(ValidityStatus.VALID, radius, reason="no lower connected set found within range")
    witness, witness_psi, d = min(witnesses, key=lambda w: (w[2], w[1], link_set.fingerprint(w[0])))
    logger.debug("Community of %d links invalidated by a witness at distance %d", len(origin), d)
    return ValidityVerdict(
        ValidityStatus.INVALID, radius, witness, witness_psi, d,
        reason="lower connected set at distance {0:d}".format(d)
    )


def complement_candidates(
        g: graph.Graph,
        links: link_set.Links,
        resolution: float = 1 / 3
) -> list[link_set.LinkSet]:
    """Adapts the components of the complement of a mid-size community.

    :param g: A graph.
    :param links: A community with between m/4 and 3m/4 links.
    :param resolution: The resolution parameter of the adaptation budget.
    :return: Distinct connected local minima grown from the complement's components.
    """
    origin = frozenset(links.links if isinstance(links, link_set.LinkSet) else links)
    g.check_links(origin)
    m = g.link_count
    if not m / 4 <= len(origin) <= 3 * m / 4:
        raise errors.LinkSetError(
            "complements are only taken for communities with m/4 to 3m/4 links, got {0:d} of {1:d}".format(
                len(origin), m
            )
        )
    complement = frozenset(range(m)) - origin
    if not complement:
        raise errors.LinkSetError("complement is empty")

    budget = local_search.SearchBudget(resolution)
    found: dict[str, link_set.LinkSet] = {}
    for component in graph.link_components(g, complement):
        for adapted in local_search.link_wise_adapt(g, component, local_search.SearchDirection.INCLUSION_FIRST, budget):
            found.setdefault(link_set.fingerprint(adapted), adapted)
    return sorted(found.values(), key=lambda s: (s.psi, link_set.fingerprint(s)))
