"""Communities, evolution parameters and fixed-size populations."""

from ..core import errors, graph, link_set

from collections import abc
import dataclasses
import enum
import functools

import numpy as np


@dataclasses.dataclass(frozen=True)
class Community:
    """A connected link set at a local minimum of psi, with provenance."""
    links: frozenset[int]
    psi: float
    nodes: graph.NodeSet
    seed_id: int | None = None
    evolution_id: str | None = None

    @functools.cached_property
    def fingerprint(self) -> str:
        return link_set.fingerprint(self.links)

    @property
    def size(self) -> int:
        return len(self.links)

    @classmethod
    def from_links(
            cls,
            g: graph.Graph,
            links: link_set.Links,
            seed_id: int | None = None,
            evolution_id: str | None = None
    ) -> "Community":
        """Constructs a Community from a link set.

        :param g: The graph.
        :param links: A link set with defined psi.
        :param seed_id: Index of the seed the community descends from.
        :param evolution_id: Identifier of the evolution run that produced it.
        :return: The community.
        """
        current = links if isinstance(links, link_set.LinkSet) else link_set.LinkSet(g, links)
        return cls(current.frozen(), current.psi, current.nodes(), seed_id, evolution_id)

    @classmethod
    def from_nodes(
            cls,
            g: graph.Graph,
            nodes: abc.Iterable[int],
            seed_id: int | None = None,
            evolution_id: str | None = None
    ) -> "Community":
        """Constructs a Community from the link set induced by a node set.

        :param g: The graph.
        :param nodes: A node set C.
        :param seed_id: Index of the seed the community descends from.
        :param evolution_id: Identifier of the evolution run that produced it.
        :return: The community.
        """
        return cls.from_links(g, g.induced_links(frozenset(nodes)), seed_id, evolution_id)


def sort_key(community: Community) -> tuple[float, str]:
    return community.psi, community.fingerprint


class VarianceSchedule(enum.Enum):
    """How the mutation variance of the best community evolves."""
    FIXED = "fixed"
    DECREASING = "decreasing"


@dataclasses.dataclass(frozen=True)
class EvolutionConfig:
    """Parameters of one evolution round."""
    population_size: int = 16
    init_variance: float = 0.15
    low_variance: float = 0.02
    renewal_variance: float = 0.15
    stagnation_generations: int = 10
    best_max_age: int = 20
    crossover_partners: int = 2
    variance_decay: float = 0.9
    rng_seed: int = 0
    schedule: VarianceSchedule = VarianceSchedule.FIXED
    resolution: float = 1 / 3
    runs: int = 5
    init_attempts: int = 64
    mutation_retries: int = 10
    oversize_fraction: float = 0.75

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise errors.ConfigError("population_size must be at least 2")
        if not 0 < self.low_variance <= self.init_variance < 1:
            raise errors.ConfigError("variances must satisfy 0 < low_variance <= init_variance < 1")
        if not 0 < self.renewal_variance < 1:
            raise errors.ConfigError("renewal_variance must lie in (0, 1)")
        if not 0 < self.variance_decay <= 1:
            raise errors.ConfigError("variance_decay must lie in (0, 1]")
        if not 0 < self.resolution < 1:
            raise errors.ConfigError("resolution must lie in (0, 1)")
        if not 0 < self.oversize_fraction <= 1:
            raise errors.ConfigError("oversize_fraction must lie in (0, 1]")
        for name in ("stagnation_generations", "best_max_age", "runs", "init_attempts", "mutation_retries"):
            if getattr(self, name) < 1:
                raise errors.ConfigError("{0} must be positive".format(name))
        if self.crossover_partners < 0:
            raise errors.ConfigError("crossover_partners must not be negative")
        if self.rng_seed < 0:
            raise errors.ConfigError("rng_seed must not be negative")

    @classmethod
    def first_round(cls, **overrides) -> "EvolutionConfig":
        return cls(**overrides)

    @classmethod
    def second_round(cls, **overrides) -> "EvolutionConfig":
        values = {"population_size": 8, "schedule": VarianceSchedule.DECREASING, "runs": 10}
        values.update(overrides)
        return cls(**values)

    def replace(self, **changes) -> "EvolutionConfig":
        return dataclasses.replace(self, **changes)


class Population:
    """A fixed-size collection of distinct communities ordered by psi."""
    def __init__(self, members: abc.Iterable[Community], size: int) -> None:
        """Constructs a Population object.

        :param members: The initial communities, distinct by fingerprint.
        :param size: The population size kept by selection.
        """
        unique = {}
        for community in members:
            unique.setdefault(community.fingerprint, community)
        self.members: list[Community] = sorted(unique.values(), key=sort_key)[:size]
        if not self.members:
            raise errors.SearchError("a population needs at least one member")
        self.size = size
        self.seen: set[str] = set(unique)
        self.best_age = 0
        self.accepted_since_renewal = 0
        self.origin_best = self.members[0]
        self.side_seeds: list[Community] = []

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> abc.Iterator[Community]:
        return iter(self.members)

    @property
    def best(self) -> Community:
        return self.members[0]

    @property
    def worst(self) -> Community:
        return self.members[-1]

    def entropy(self) -> float:
        """Measures diversity as the mean binary entropy of link membership frequencies.

        :return: 0 when all members are equal, up to 1 bit.
        """
        counts: dict[int, int] = {}
        for community in self.members:
            for e in community.links:
                counts[e] = counts.get(e, 0) + 1
        if not counts:
            return 0.0
        p = np.fromiter(counts.values(), dtype=float) / len(self.members)
        inner = (p > 0) & (p < 1)
        q = p[inner]
        h = -(q * np.log2(q) + (1 - q) * np.log2(1 - q))
        return float(h.sum() / len(p))


def select(population: Population, candidates: abc.Iterable[Community], r_min: int) -> int:
    """Merges adapted candidates into a population, keeping its size constant.

    A candidate that would become the new best is only admitted within distance r_min of the population's original
    best; otherwise it goes to the population's side seeds.

    :param population: The population, updated in place.
    :param candidates: Adapted communities.
    :param r_min: The minimal range of the original best.
    :return: The number of admitted candidates.
    """
    accepted = 0
    for candidate in sorted(candidates, key=sort_key):
        if candidate.fingerprint in population.seen:
            continue
        population.seen.add(candidate.fingerprint)
        if len(population.members) >= population.size and not link_set.is_lower(
                candidate.psi, population.worst.psi
        ):
            continue
        if link_set.is_lower(candidate.psi, population.best.psi) and \
                link_set.distance(candidate.links, population.origin_best.links) > r_min:
            population.side_seeds.append(candidate)
            continue
        population.members.append(candidate)
        population.members.sort(key=sort_key)
        del population.members[population.size:]
        accepted += 1
    population.accepted_since_renewal += accepted
    return accepted


def minimal_range(resolution: float, community: Community) -> int:
    """Computes R_min = floor(r * |L|).

    :param resolution: The resolution parameter r.
    :param community: A community.
    :return: The minimal range.
    """
    return link_set.minimal_range(resolution, community.size)
