"""The two-round search protocol run from one seed."""

from ..core import errors, graph
from . import evolution, local_search, population

from collections import abc
import dataclasses
import logging

import numpy as np

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class ProtocolResult:
    """Communities found from one seed."""
    communities: list[population.Community]
    side_seeds: list[population.Community] = dataclasses.field(default_factory=list)
    trace: list[tuple[str, evolution.GenerationRecord]] = dataclasses.field(default_factory=list)
    salvaged: bool = False


def _expand_seed(g: graph.Graph, seed: graph.NodeSet) -> graph.NodeSet:
    if g.induced_links(seed):
        return seed
    expanded = set(seed)
    for v in seed:
        expanded.update(g.neighbors(v))
    logger.debug("Seed of %d nodes induces no links; expanded to %d nodes", len(seed), len(expanded))
    return frozenset(expanded)


def _run_round(
        g: graph.Graph,
        start: graph.NodeSet,
        cfg: population.EvolutionConfig,
        rng: np.random.Generator,
        result: ProtocolResult,
        intermediates: list[population.Community],
        seed_id: int | None,
        name: str
) -> population.Community:
    best = None
    for run in range(cfg.runs):
        evolution_id = "{0}-{1}-{2:d}".format(seed_id if seed_id is not None else "x", name, run)
        try:
            pop = evolution.init_population(g, start, cfg, rng, seed_id, evolution_id)
        except errors.PopulationShortfallError as e:
            intermediates.extend(e.partial)
            raise
        records: list[evolution.GenerationRecord] = []
        try:
            winner = evolution.evolve(g, pop, cfg, rng, records, seed_id, evolution_id)
        finally:
            result.trace.extend((evolution_id, record) for record in records)
            result.side_seeds.extend(pop.side_seeds)
            intermediates.append(pop.best)
        logger.debug("%s: best psi %.6f with %d links", evolution_id, winner.psi, winner.size)
        if best is not None and winner.fingerprint == best.fingerprint:
            break
        if best is None or winner.psi < best.psi:
            best = winner
    assert best is not None
    return best


def _link_wise(
        g: graph.Graph,
        starts: abc.Iterable[population.Community],
        budget: local_search.SearchBudget,
        seed_id: int | None,
        evolution_id: str
) -> list[population.Community]:
    found: dict[str, population.Community] = {}
    for start in starts:
        for links in local_search.link_wise_adapt(g, start.links, local_search.SearchDirection.INCLUSION_FIRST, budget):
            community = population.Community.from_links(g, links, seed_id, evolution_id)
            found.setdefault(community.fingerprint, community)
    return sorted(found.values(), key=population.sort_key)


def run_protocol(
        g: graph.Graph,
        seed: abc.Iterable[int],
        configs: tuple[population.EvolutionConfig, population.EvolutionConfig] | None = None,
        rng: np.random.Generator | None = None,
        seed_id: int | None = None
) -> ProtocolResult:
    """Searches communities from one seed.

    The seed is adapted node-wise, evolved in a fixed-variance round and then in a decreasing-variance round. The
    overall best is adapted link-wise and, if unconnected, split into adapted components. If a population cannot be
    initialised or a community grows beyond the allowed share of all links, the intermediate results are adapted
    link-wise instead.

    :param g: A graph.
    :param seed: The seed node set.
    :param configs: The first and second round configurations.
    :param rng: The random generator, default seeded with the first round's rng_seed.
    :param seed_id: Index of the seed, recorded as provenance.
    :return: The communities, side seeds and generation trace.
    """
    first, second = configs or (population.EvolutionConfig.first_round(), population.EvolutionConfig.second_round())
    rng = rng if rng is not None else np.random.default_rng(first.rng_seed)
    budget = local_search.SearchBudget(first.resolution)
    final_id = "{0}-final".format(seed_id if seed_id is not None else "x")

    start = _expand_seed(g, frozenset(seed))
    adapted = local_search.node_wise_adapt(g, start, local_search.SearchDirection.INCLUSION_FIRST, budget)
    seed_community = population.Community.from_nodes(g, adapted, seed_id, "{0}-seed".format(seed_id))
    intermediates = [seed_community]
    result = ProtocolResult([])

    try:
        evolution.check_size(g, seed_community, first)
        best = _run_round(g, adapted, first, rng, result, intermediates, seed_id, "r1")
        best = _run_round(g, best.nodes, second, rng, result, intermediates, seed_id, "r2")
        result.communities = _link_wise(g, (best,), budget, seed_id, final_id)
    except (errors.PopulationShortfallError, errors.OversizeCommunityError) as e:
        logger.warning("Seed %s: %s; adapting %d intermediate results link-wise", seed_id, e, len(intermediates))
        result.salvaged = True
        result.communities = _link_wise(g, intermediates, budget, seed_id, final_id)
    return result
