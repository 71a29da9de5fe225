"""Command-line entry point: ingest, run, validity, analyze and match."""

from ..analysis import matching
from ..core import errors, graph
from ..validity import beta_range_check, range_check
from . import batch, config, registry, report, seeds

from collections import abc
import argparse
import csv
import dataclasses
import json
import logging
import pathlib
import sys
import typing

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Command-line flags overriding RunConfig fields, by attribute name.
_RUN_FLAGS = (
    "output_dir", "seed_count", "seed_file", "resolution", "workers", "master_seed", "batch_size", "epsilon",
    "patience", "max_batches", "use_side_seeds"
)
_SELECTION_FLAGS = ("psi_cutoff", "min_fraction_sum", "exclude_larger_than", "inclusion_threshold")


def load_any_graph(path: str | pathlib.Path, attributes: str | None = None) -> graph.Graph:
    """Loads a graph cache as is, or reads and prepares an edge list.

    :param path: A ".npz" cache or an edge list.
    :param attributes: Optional node attribute TSV marking nodes protected from pruning.
    :return: A connected graph.
    """
    path = pathlib.Path(path)
    if path.suffix == ".npz":
        return graph.load_graph(path)
    g = graph.read_edge_list(path)
    protected = None
    if attributes is not None:
        flags = graph.read_node_attributes(attributes)
        protected = lambda i: flags.get(g.labels[i], False)
    return graph.prepare_graph(g, protected)


def _add_selection_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--psi-cutoff", type=float, help="only select communities with psi below this value")
    parser.add_argument("--min-fraction-sum", type=float, help="minimum sum of membership grades (default 20)")
    parser.add_argument("--exclude-larger-than", type=float, help="maximum share of all links (default 0.5)")
    parser.add_argument("--inclusion-threshold", type=float, help="subtopic inclusion threshold (default 0.95)")


def _selection(args: argparse.Namespace, base: config.SelectionConfig) -> config.SelectionConfig:
    changes = {name: getattr(args, name) for name in _SELECTION_FLAGS if getattr(args, name, None) is not None}
    return dataclasses.replace(base, **changes)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="link-communities",
        description="Search overlapping link communities by memetic minimisation of the normalised node cut."
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output, repeatable")
    parser.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR"), help="explicit log level")
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="convert an edge list to a graph cache")
    ingest.add_argument("edges", help="whitespace-separated edge list")
    ingest.add_argument("-o", "--output", required=True, help="graph cache path (.npz)")
    ingest.add_argument("--attributes", help="TSV of node labels and protected flags; enables degree-one pruning")
    ingest.add_argument("--labels", help="where to write the id to label sidecar (default next to the cache)")

    run = commands.add_parser("run", help="run batches of protocol searches")
    run.add_argument("graph", nargs="?", help="graph cache or edge list (default: from the configuration)")
    run.add_argument("--config", help="TOML configuration file")
    run.add_argument("--manifest", help="rerun with the configuration recorded in a run manifest")
    run.add_argument("--resume", action="store_true", help="continue the run in the output directory")
    run.add_argument("-o", "--output-dir", help="output directory")
    run.add_argument("--seed-file", help="one seed per line as node labels")
    run.add_argument("--seed-count", type=int, help="maximum number of seeds")
    run.add_argument("--resolution", type=float, help="resolution parameter r in (0, 1)")
    run.add_argument("--workers", type=int, help="worker processes")
    run.add_argument("--master-seed", type=int, help="master random seed")
    run.add_argument("--batch-size", type=int, help="seeds per batch")
    run.add_argument("--epsilon", type=float, help="minimum coverage gain of an improving batch")
    run.add_argument("--patience", type=int, help="non-improving batches before stopping")
    run.add_argument("--max-batches", type=int, help="hard limit on batches")
    run.add_argument("--use-side-seeds", action="store_true", default=None, help="queue deselected bests as seeds")
    _add_selection_flags(run)

    validity = commands.add_parser("validity", help="re-check the communities of a registry")
    validity.add_argument("graph", help="graph cache or edge list")
    validity.add_argument("registry", help="registry file")
    validity.add_argument("--resolution", type=float, default=1 / 3, help="resolution parameter r")
    validity.add_argument("--exact", action="store_true", help="prove verdicts with the CP-SAT range prover")
    validity.add_argument("--time-limit", type=float, help="solver time limit per community in seconds")
    validity.add_argument("-o", "--output", help="verdict TSV (default stdout)")

    analyze = commands.add_parser("analyze", help="write the report of a registry")
    analyze.add_argument("graph", help="graph cache or edge list")
    analyze.add_argument("registry", help="registry file")
    analyze.add_argument("-o", "--output-dir", required=True, help="report directory")
    analyze.add_argument(
        "--partition", action="append", default=[], metavar="NAME=PATH",
        help="external partition to match against, one cluster of node labels per line"
    )
    _add_selection_flags(analyze)

    match = commands.add_parser("match", help="compare two solutions")
    match.add_argument("graph", help="graph cache or edge list")
    match.add_argument("first", help="registry file or cluster file of node labels")
    match.add_argument("second", help="registry file or cluster file of node labels")
    match.add_argument("--mode", choices=[m.value for m in matching.MatchMode], default=matching.MatchMode.NODES.value)
    match.add_argument("-o", "--output", help="match TSV (default stdout)")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    if args.log_level is not None:
        level = getattr(logging, args.log_level)
    else:
        level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format=LOG_FORMAT)


def _run_config(args: argparse.Namespace) -> config.RunConfig:
    if args.manifest:
        with open(args.manifest, "r", encoding="utf-8") as f:
            cfg = config.RunConfig.from_dict(json.load(f)["config"])
    elif args.config:
        cfg = config.RunConfig.from_toml(args.config)
    else:
        cfg = config.RunConfig()
    changes: dict[str, typing.Any] = {
        name: getattr(args, name) for name in _RUN_FLAGS if getattr(args, name) is not None
    }
    if args.graph:
        changes["graph"] = args.graph
    if args.seed_file:
        changes["seed_strategy"] = config.SeedStrategy.FILE
    changes["selection"] = _selection(args, cfg.selection)
    cfg = cfg.replace(**changes).with_environment()
    if cfg.graph is None:
        raise errors.ConfigError("no graph given on the command line or in the configuration")
    return cfg


def _open_output(path: str | None) -> typing.TextIO:
    return open(path, "w", encoding="utf-8", newline="") if path else sys.stdout


def _ingest(args: argparse.Namespace) -> None:
    g = load_any_graph(args.edges, args.attributes)
    graph.save_graph(g, args.output)
    labels = pathlib.Path(args.labels) if args.labels else pathlib.Path(args.output).with_name("labels.tsv")
    with open(labels, "w", encoding="utf-8", newline="\n") as f:
        graph.write_labels(g, f)
    logger.info("Cached graph with %d nodes and %d links at %s", g.node_count, g.link_count, args.output)


def _run(args: argparse.Namespace) -> None:
    cfg = _run_config(args)
    g = load_any_graph(cfg.graph)
    outcome = batch.run_batch(g, cfg, resume=args.resume)
    print("{0:d} communities, {1:d} selected, coverage {2:.4f} ({3})".format(
        len(outcome.registry), len(outcome.solution), outcome.coverage, outcome.stop_reason
    ))


def _validity(args: argparse.Namespace) -> None:
    g = load_any_graph(args.graph)
    entries = list(registry.CommunityRegistry.load(args.registry, append=False))
    if args.exact:
        prover = beta_range_check.RangeProver(time_limit=args.time_limit)
        check = lambda e: prover.check(g, e.links, args.resolution)
    else:
        check = lambda e: range_check.check_validity(g, e.links, args.resolution, entries)

    header = ("fingerprint", "links", "psi", "status", "radius", "witness_psi", "distance", "reason")
    stream = _open_output(args.output)
    try:
        writer = csv.writer(stream, delimiter="\t", lineterminator="\n")
        writer.writerow(header)
        for entry in sorted(entries, key=lambda e: (e.psi, e.fingerprint)):
            verdict = check(entry)
            writer.writerow((
                entry.fingerprint, entry.size, repr(entry.psi), verdict.status.value, verdict.checked_radius,
                "" if verdict.witness_psi is None else repr(verdict.witness_psi),
                "" if verdict.witness_distance is None else verdict.witness_distance, verdict.reason
            ))
    finally:
        if stream is not sys.stdout:
            stream.close()


def _partition(g: graph.Graph, value: str) -> tuple[str, list[graph.NodeSet]]:
    name, sep, path = value.partition("=")
    if not sep or not name or not path:
        raise errors.ConfigError("partitions are given as NAME=PATH, got {0!r}".format(value))
    return name, seeds.read_seed_file(g, path)


def _analyze(args: argparse.Namespace) -> None:
    g = load_any_graph(args.graph)
    entries = list(registry.CommunityRegistry.load(args.registry, append=False))
    partitions = dict(_partition(g, value) for value in args.partition)
    sol = report.write_report(g, entries, _selection(args, config.SelectionConfig()), args.output_dir, partitions)
    print("{0:d} communities selected, coverage {1:.4f}".format(len(sol), sol.coverage))


def _solution_sets(g: graph.Graph, path: str, mode: matching.MatchMode) -> list[abc.Set[int]]:
    if path.endswith(".ndjson"):
        entries = sorted(
            (e for e in registry.CommunityRegistry.load(path, append=False) if e.valid),
            key=lambda e: (e.psi, e.fingerprint)
        )
        links = [e.links for e in entries]
        return links if mode is matching.MatchMode.LINKS else matching.node_sets(g, links)
    if mode is matching.MatchMode.LINKS:
        raise errors.ConfigError("cluster files of node labels can only be matched by nodes")
    return seeds.read_seed_file(g, path)


def _match(args: argparse.Namespace) -> None:
    g = load_any_graph(args.graph)
    mode = matching.MatchMode(args.mode)
    first = _solution_sets(g, args.first, mode)
    second = _solution_sets(g, args.second, mode)
    stream = _open_output(args.output)
    try:
        writer = csv.writer(stream, delimiter="\t", lineterminator="\n")
        writer.writerow(report.MATCH_HEADER[1:])
        for row in matching.match_solutions(first, second):
            writer.writerow((
                row.index, "" if row.partner is None else row.partner, "{0:.4f}".format(row.salton),
                "{0:.4f}".format(row.overlap_first), "{0:.4f}".format(row.overlap_second), row.shared
            ))
    finally:
        if stream is not sys.stdout:
            stream.close()


_COMMANDS: dict[str, abc.Callable[[argparse.Namespace], None]] = {
    "ingest": _ingest,
    "run": _run,
    "validity": _validity,
    "analyze": _analyze,
    "match": _match
}


def main(argv: abc.Sequence[str] | None = None) -> int:
    """Runs the command line.

    :param argv: Arguments without the program name, default sys.argv[1:].
    :return: The exit status.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        _COMMANDS[args.command](args)
    except (errors.LinkCommunityError, ImportError, OSError) as e:
        logger.error("%s", e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
