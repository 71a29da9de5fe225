"""Memetic evolution of one population of communities."""

from ..core import errors, graph
from . import genetic_ops, local_search, population

from collections import abc
import collections
import dataclasses
import logging
import typing

import numpy as np

logger = logging.getLogger(__name__)

TRACE_HEADER = ("evolution", "generation", "best_psi", "best_size", "entropy", "variance", "accepted", "renewed")


@dataclasses.dataclass(frozen=True)
class GenerationRecord:
    """Summary of one generation."""
    generation: int
    best_psi: float
    best_size: int
    entropy: float
    variance: float
    accepted: int
    renewed: bool = False

    def to_row(self, evolution_id: str) -> str:
        return "\t".join((
            evolution_id,
            str(self.generation),
            repr(self.best_psi),
            str(self.best_size),
            "{0:.6f}".format(self.entropy),
            "{0:.6f}".format(self.variance),
            str(self.accepted),
            "1" if self.renewed else "0"
        ))


def write_trace(rows: abc.Iterable[tuple[str, GenerationRecord]], stream: typing.TextIO) -> None:
    """Writes an evolution trace as TSV.

    :param rows: Pairs of evolution id and generation record.
    :param stream: An open text stream.
    """
    stream.write("\t".join(TRACE_HEADER) + "\n")
    for evolution_id, record in rows:
        stream.write(record.to_row(evolution_id) + "\n")


def check_size(g: graph.Graph, community: population.Community, cfg: population.EvolutionConfig) -> None:
    """Raises OversizeCommunityError if a community exceeds the allowed share of all links.

    :param g: A graph.
    :param community: A community.
    :param cfg: The evolution configuration.
    """
    if community.size > cfg.oversize_fraction * g.link_count:
        raise errors.OversizeCommunityError(
            "community with {0:d} of {1:d} links exceeds the allowed fraction {2}".format(
                community.size, g.link_count, cfg.oversize_fraction
            ),
            community
        )


def _communities(
        g: graph.Graph,
        node_sets: abc.Iterable[graph.NodeSet],
        cfg: population.EvolutionConfig,
        seed_id: int | None,
        evolution_id: str | None
) -> list[population.Community]:
    result = []
    for nodes in node_sets:
        community = population.Community.from_nodes(g, nodes, seed_id, evolution_id)
        check_size(g, community, cfg)
        result.append(community)
    return result


def _mutants(
        g: graph.Graph,
        nodes: graph.NodeSet,
        variance: float,
        cfg: population.EvolutionConfig,
        rng: np.random.Generator
) -> list[graph.NodeSet]:
    try:
        return genetic_ops.mutate(
            g, nodes, variance, rng, local_search.SearchBudget(cfg.resolution), cfg.mutation_retries
        )
    except errors.MutationError as e:
        logger.debug("Mutation skipped: %s", e)
        return []


def init_population(
        g: graph.Graph,
        adapted_seed: graph.NodeSet,
        cfg: population.EvolutionConfig,
        rng: np.random.Generator,
        seed_id: int | None = None,
        evolution_id: str | None = None
) -> population.Population:
    """Fills a population with the adapted seed and adapted high-variance mutants of it.

    :param g: A graph.
    :param adapted_seed: A node-wise local minimum.
    :param cfg: The evolution configuration.
    :param rng: The random generator.
    :param seed_id: Provenance of the created communities.
    :param evolution_id: Provenance of the created communities.
    :return: A population of cfg.population_size distinct communities.
    """
    members: dict[str, population.Community] = {}
    for community in _communities(g, (adapted_seed,), cfg, seed_id, evolution_id):
        members[community.fingerprint] = community
    attempts = 0
    while len(members) < cfg.population_size and attempts < cfg.init_attempts:
        attempts += 1
        mutants = _mutants(g, adapted_seed, cfg.init_variance, cfg, rng)
        for community in _communities(g, mutants, cfg, seed_id, evolution_id):
            members.setdefault(community.fingerprint, community)
    if len(members) < cfg.population_size:
        partial = sorted(members.values(), key=population.sort_key)
        raise errors.PopulationShortfallError(
            "not enough mutants: {0:d} of {1:d} after {2:d} attempts".format(
                len(members), cfg.population_size, attempts
            ),
            partial
        )
    return population.Population(members.values(), cfg.population_size)


def evolution_generator(
        g: graph.Graph,
        pop: population.Population,
        cfg: population.EvolutionConfig,
        rng: np.random.Generator,
        seed_id: int | None = None,
        evolution_id: str | None = None
) -> typing.Generator[GenerationRecord, None, population.Community]:
    """Evolves a population, yielding a record after every generation.

    Each generation mutates the best community with the current variance, crosses it with randomly chosen members
    and merges the adapted offspring. With the fixed schedule a stagnant population without innovation is renewed by
    a high-variance mutation of the best; with the decreasing schedule the variance decays instead.

    :param g: A graph.
    :param pop: An initialised population, updated in place.
    :param cfg: The evolution configuration.
    :param rng: The random generator.
    :param seed_id: Provenance of the created communities.
    :param evolution_id: Provenance of the created communities.
    :return: The best community once it has grown older than cfg.best_max_age.
    """
    budget = local_search.SearchBudget(cfg.resolution)
    r_min = population.minimal_range(cfg.resolution, pop.origin_best)
    fixed = cfg.schedule is population.VarianceSchedule.FIXED
    variance = cfg.low_variance if fixed else cfg.renewal_variance
    window: collections.deque[int] = collections.deque(maxlen=cfg.stagnation_generations)
    stagnant = 0
    generation = 0

    while pop.best_age <= cfg.best_max_age:
        generation += 1
        best = pop.best
        candidates = _communities(g, _mutants(g, best.nodes, variance, cfg, rng), cfg, seed_id, evolution_id)

        others = pop.members[1:]
        k = min(cfg.crossover_partners, len(others))
        if k:
            for idx in sorted(rng.choice(len(others), size=k, replace=False).tolist()):
                for child in genetic_ops.crossover(g, best, others[idx], budget):
                    check_size(g, child, cfg)
                    candidates.append(dataclasses.replace(child, seed_id=seed_id, evolution_id=evolution_id))

        accepted = population.select(pop, candidates, r_min)
        window.append(accepted)
        if pop.best.fingerprint != best.fingerprint:
            pop.best_age = 0
            stagnant = 0
        else:
            pop.best_age += 1
            stagnant += 1

        renewed = False
        if fixed and stagnant >= cfg.stagnation_generations and sum(window) == 0:
            logger.debug("Generation %d: renewing stagnant population", generation)
            renewal = _communities(
                g, _mutants(g, pop.best.nodes, cfg.renewal_variance, cfg, rng), cfg, seed_id, evolution_id
            )
            admitted = population.select(pop, renewal, r_min)
            renewed = True
            pop.accepted_since_renewal = admitted
            stagnant = 0
            window.clear()
            if admitted == 0 and len({c.fingerprint for c in pop.members}) == 1:
                yield GenerationRecord(generation, pop.best.psi, pop.best.size, pop.entropy(), variance, accepted, True)
                logger.debug("Renewal left a single distinct member; stopping after %d generations", generation)
                return pop.best
        elif not fixed and pop.best.fingerprint == best.fingerprint:
            variance = max(variance * cfg.variance_decay, min(variance, 1 / len(pop.best.nodes)))

        yield GenerationRecord(generation, pop.best.psi, pop.best.size, pop.entropy(), variance, accepted, renewed)

    return pop.best


def evolve(
        g: graph.Graph,
        pop: population.Population,
        cfg: population.EvolutionConfig,
        rng: np.random.Generator | None = None,
        trace: list[GenerationRecord] | None = None,
        seed_id: int | None = None,
        evolution_id: str | None = None
) -> population.Community:
    """Runs an evolution to completion.

    :param g: A graph.
    :param pop: An initialised population.
    :param cfg: The evolution configuration.
    :param rng: The random generator, default seeded with cfg.rng_seed.
    :param trace: Optional list receiving one record per generation.
    :param seed_id: Provenance of the created communities.
    :param evolution_id: Provenance of the created communities.
    :return: The best community.
    """
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
    generator = evolution_generator(g, pop, cfg, rng, seed_id, evolution_id)
    while True:
        try:
            record = next(generator)
        except StopIteration as stop:
            best = stop.value
            break
        if trace is not None:
            trace.append(record)
        logger.debug(
            "Generation %d: best psi %.6f size %d entropy %.3f",
            record.generation, record.best_psi, record.best_size, record.entropy
        )
    return best
