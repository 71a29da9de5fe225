"""Mutation and crossover of communities followed by node-wise adaptation."""

from ..core import errors, graph
from . import local_search, population

from collections import abc
import logging
import math

import numpy as np

logger = logging.getLogger(__name__)


def _grow(
        g: graph.Graph,
        start: abc.Iterable[int],
        target: int,
        rng: np.random.Generator,
        allowed: abc.Container[int] | None = None
) -> set[int] | None:
    grown = set(start)
    frontier: list[int] = []
    queued: set[int] = set()

    def push(v: int) -> None:
        for nbr in g.neighbors(v):
            if nbr in grown or nbr in queued:
                continue
            if allowed is not None and nbr not in allowed:
                continue
            frontier.append(nbr)
            queued.add(nbr)

    for v in sorted(grown):
        push(v)
    while len(grown) < target:
        if not frontier:
            return None
        idx = int(rng.integers(len(frontier)))
        v = frontier[idx]
        frontier[idx] = frontier[-1]
        frontier.pop()
        queued.discard(v)
        grown.add(v)
        push(v)
    return grown


def random_mutant(
        g: graph.Graph,
        nodes: graph.NodeSet,
        variance: float,
        rng: np.random.Generator,
        retries: int = 10
) -> graph.NodeSet:
    """Grows a random connected node set of size |C| that keeps at least a proportion 1 - v of C.

    :param g: A graph.
    :param nodes: The node set C to mutate.
    :param variance: The mutation variance v in (0, 1).
    :param rng: The random generator.
    :param retries: How many random start nodes to try before giving up.
    :return: The mutant node set, before adaptation.
    """
    if not 0 < variance < 1:
        raise errors.ConfigError("mutation variance must lie in (0, 1), got {0}".format(variance))
    if not nodes:
        raise errors.MutationError("cannot mutate an empty node set")
    members = sorted(nodes)
    core_size = min(math.floor((1 - variance) * len(members)) + 1, len(members))
    for _ in range(retries):
        start = members[int(rng.integers(len(members)))]
        core = _grow(g, (start,), core_size, rng, allowed=nodes)
        if core is None:
            continue
        mutant = _grow(g, core, len(members), rng)
        if mutant is None:
            continue
        return frozenset(mutant)
    raise errors.MutationError("random growth got stuck {0:d} times on {1:d} nodes".format(retries, len(members)))


def mutate(
        g: graph.Graph,
        nodes: graph.NodeSet,
        variance: float,
        rng: np.random.Generator,
        budget: local_search.SearchBudget | None = None,
        retries: int = 10
) -> list[graph.NodeSet]:
    """Mutates a node set and adapts the mutant starting with inclusion and with exclusion.

    :param g: A graph.
    :param nodes: The node set C.
    :param variance: The mutation variance v.
    :param rng: The random generator.
    :param budget: The local search budget.
    :param retries: Bounded restarts of random growth.
    :return: The distinct adapted node sets, at most two.
    """
    mutant = random_mutant(g, nodes, variance, rng, retries)
    results: list[graph.NodeSet] = []
    for direction in local_search.SearchDirection:
        try:
            adapted = local_search.node_wise_adapt(g, mutant, direction, budget)
        except errors.SearchError as e:
            logger.debug("Mutant adaptation failed: %s", e)
            continue
        if adapted not in results:
            results.append(adapted)
    return results


def crossover(
        g: graph.Graph,
        a: population.Community,
        b: population.Community,
        budget: local_search.SearchBudget | None = None
) -> list[population.Community]:
    """Adapts the union of two parents starting with exclusion and their intersection starting with inclusion.

    Nested and node-disjoint parents are not crossed.

    :param g: A graph.
    :param a: A parent community.
    :param b: Another parent community.
    :param budget: The local search budget.
    :return: The distinct adapted offspring, at most two.
    """
    if a.nodes <= b.nodes or b.nodes <= a.nodes or a.nodes.isdisjoint(b.nodes):
        return []
    offspring: dict[str, population.Community] = {}
    starts = (
        (a.nodes | b.nodes, local_search.SearchDirection.EXCLUSION_FIRST),
        (a.nodes & b.nodes, local_search.SearchDirection.INCLUSION_FIRST)
    )
    for start, direction in starts:
        try:
            adapted = local_search.node_wise_adapt(g, start, direction, budget)
        except errors.SearchError as e:
            logger.debug("Crossover adaptation failed: %s", e)
            continue
        child = population.Community.from_nodes(g, adapted, a.seed_id, a.evolution_id)
        offspring.setdefault(child.fingerprint, child)
    return list(offspring.values())
