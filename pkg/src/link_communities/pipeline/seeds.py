"""Seed node sets for protocol runs."""

from ..core import errors, graph
from . import config

import logging
import os
import typing

import numpy as np

logger = logging.getLogger(__name__)


def star(g: graph.Graph, node: int) -> graph.NodeSet:
    """Returns a node together with all its neighbours.

    :param g: A graph.
    :param node: The centre node.
    :return: The closed neighbourhood, whose induced links include all links of the node.
    """
    return frozenset((node, *g.neighbors(node)))


def random_seeds(g: graph.Graph, count: int, rng: np.random.Generator) -> list[graph.NodeSet]:
    """Draws distinct random nodes and returns their stars.

    :param g: A graph.
    :param count: The number of seeds, capped at the node count.
    :param rng: The random generator.
    :return: The seeds.
    """
    centres = rng.choice(g.node_count, size=min(count, g.node_count), replace=False)
    return [star(g, int(i)) for i in centres]


def read_seed_file(g: graph.Graph, source: str | os.PathLike | typing.TextIO) -> list[graph.NodeSet]:
    """Reads one seed per line as whitespace-separated node labels.

    Blank lines and lines starting with '#' are skipped. Seeds may overlap.

    :param g: A graph.
    :param source: A path or an open text stream.
    :return: The seeds in file order.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as f:
            return read_seed_file(g, f)
    seeds = []
    for line_number, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        nodes = set()
        for label in line.split():
            try:
                nodes.add(g.node_id(label))
            except KeyError:
                raise errors.SeedFileError(line_number, label) from None
        seeds.append(frozenset(nodes))
    return seeds


def make_seeds(g: graph.Graph, cfg: config.RunConfig, rng: np.random.Generator) -> list[graph.NodeSet]:
    """Creates the random seeds of one batch or, for seed files, all seeds.

    :param g: A graph.
    :param cfg: The run configuration.
    :param rng: The random generator of the batch.
    :return: The seeds.
    """
    if cfg.seed_strategy is config.SeedStrategy.FILE:
        seeds = read_seed_file(g, cfg.seed_file)
        logger.info("Read %d seeds from %s", len(seeds), cfg.seed_file)
        return seeds
    return random_seeds(g, cfg.batch_size, rng)
