"""Tab-separated report files of a registry and its final solution."""

from ..analysis import hierarchy, matching, solution
from ..core import graph, link_set
from . import config, registry

from collections import abc
import contextlib
import csv
import logging
import os
import pathlib
import typing

logger = logging.getLogger(__name__)

COMMUNITY_HEADER = (
    "id", "fingerprint", "links", "psi", "nodes", "full_papers", "fraction_sum", "subtopics", "supertopics",
    "related", "hits", "valid"
)
MATCH_HEADER = ("partition", "community", "partner", "salton", "overlap_first", "overlap_second", "shared")


@contextlib.contextmanager
def _table(path: pathlib.Path, header: abc.Sequence[str]) -> abc.Iterator[typing.Any]:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, delimiter="\t", lineterminator="\n")
        writer.writerow(header)
        yield writer


def _flag(value: bool | None) -> str:
    return "" if value is None else ("1" if value else "0")


def community_names(count: int) -> list[str]:
    return ["c{0:d}".format(j) for j in range(count)]


def write_communities(sol: solution.Solution, hits: abc.Mapping[str, int], path: pathlib.Path) -> None:
    with _table(path, COMMUNITY_HEADER) as writer:
        for name, community, stats in zip(community_names(len(sol)), sol.communities, sol.stats):
            writer.writerow((
                name, community.fingerprint, stats.link_count, "{0:.4f}".format(stats.psi), stats.node_count,
                stats.full_papers, "{0:.4f}".format(stats.fraction_sum), stats.subtopics, stats.supertopics,
                stats.related, hits.get(community.fingerprint, 0), _flag(stats.valid)
            ))


def write_memberships(g: graph.Graph, sol: solution.Solution, path: pathlib.Path) -> None:
    names = community_names(len(sol))
    matrix = sol.memberships.tocoo()
    cells = sorted(zip(matrix.row.tolist(), matrix.col.tolist(), matrix.data.tolist()))
    with _table(path, ("node", "community", "grade")) as writer:
        for i, j, grade in cells:
            writer.writerow((g.labels[i], names[j], "{0:.6f}".format(grade)))


def write_coverage(curve: abc.Iterable[solution.CoveragePoint], path: pathlib.Path) -> None:
    with _table(path, ("psi", "coverage", "fingerprint")) as writer:
        for point in curve:
            writer.writerow(("{0:.6f}".format(point.psi), "{0:.6f}".format(point.fraction), point.fingerprint))


def write_hierarchy(tree: hierarchy.Hierarchy, directory: pathlib.Path, names: abc.Sequence[str]) -> None:
    with _table(directory / "hierarchy.tsv", ("subtopic", "supertopic", "inclusion", "direct")) as writer:
        for edge in tree.edges:
            writer.writerow((names[edge.subtopic], names[edge.supertopic], "{0:.4f}".format(edge.inclusion),
                             _flag(edge.direct)))
    with open(directory / "hierarchy.dot", "w", encoding="utf-8", newline="\n") as f:
        f.write(tree.to_dot(names))


def write_overlaps(overlaps: hierarchy.OverlapStats, directory: pathlib.Path, names: abc.Sequence[str]) -> None:
    with _table(directory / "overlaps.tsv", ("a", "b", "shared", "inclusion_a", "inclusion_b")) as writer:
        for pair in overlaps.pairs:
            writer.writerow((names[pair.a], names[pair.b], pair.shared, "{0:.4f}".format(pair.inclusion_a),
                             "{0:.4f}".format(pair.inclusion_b)))
    with _table(directory / "triple_overlaps.tsv", ("a", "b", "c", "shared")) as writer:
        for triple in overlaps.triples:
            writer.writerow((names[triple.a], names[triple.b], names[triple.c], triple.shared))
    counts, edges = hierarchy.inclusion_histogram(overlaps.pairs)
    with _table(directory / "inclusion_histogram.tsv", ("low", "high", "count")) as writer:
        for low, high, count in zip(edges[:-1], edges[1:], counts):
            writer.writerow(("{0:.2f}".format(low), "{0:.2f}".format(high), int(count)))


def write_cost_size(g: graph.Graph, entries: abc.Sequence[registry.Entry], path: pathlib.Path) -> None:
    """Writes every registered community ranked by size, for cost over size plots."""
    ranked = sorted(entries, key=lambda e: (-e.size, e.psi, e.fingerprint))
    with _table(path, ("rank", "fingerprint", "links", "psi", "fraction_sum", "hits", "origin", "valid")) as writer:
        for rank, entry in enumerate(ranked):
            grades = solution.membership_grades(g, entry.links)
            writer.writerow((
                rank, entry.fingerprint, entry.size, repr(entry.psi), "{0:.4f}".format(sum(grades.values())),
                entry.hits, entry.origin, _flag(entry.valid)
            ))


def write_invalidations(entries: abc.Iterable[registry.Entry], path: pathlib.Path) -> None:
    header = ("fingerprint", "links", "psi", "witness", "witness_links", "witness_psi", "distance", "reason")
    with _table(path, header) as writer:
        for entry in sorted(entries, key=lambda e: (e.psi, e.fingerprint)):
            verdict = entry.verdict
            if verdict is None or verdict.is_valid:
                continue
            witness = verdict.witness
            writer.writerow((
                entry.fingerprint, entry.size, repr(entry.psi),
                link_set.fingerprint(witness) if witness is not None else "",
                len(witness) if witness is not None else "",
                repr(verdict.witness_psi) if verdict.witness_psi is not None else "",
                verdict.witness_distance if verdict.witness_distance is not None else "",
                verdict.reason
            ))


def write_matches(
        rows: abc.Iterable[tuple[str, matching.MatchRow]],
        path: pathlib.Path,
        names: abc.Sequence[str]
) -> None:
    with _table(path, MATCH_HEADER) as writer:
        for partition, row in rows:
            writer.writerow((
                partition, names[row.index],
                "" if row.partner is None else row.partner, "{0:.4f}".format(row.salton),
                "{0:.4f}".format(row.overlap_first), "{0:.4f}".format(row.overlap_second), row.shared
            ))


def match_partitions(
        g: graph.Graph,
        sol: solution.Solution,
        partitions: abc.Mapping[str, abc.Sequence[abc.Set[int]]]
) -> list[tuple[str, matching.MatchRow]]:
    """Matches the solution's node sets against external partitions of the nodes.

    :param g: A graph.
    :param sol: The final solution.
    :param partitions: Named lists of node sets.
    :return: Rows tagged with the partition name.
    """
    nodes = matching.node_sets(g, [c.links for c in sol.communities])
    return [(name, row) for name, sets in sorted(partitions.items()) for row in matching.match_solutions(nodes, sets)]


def write_report(
        g: graph.Graph,
        entries: abc.Sequence[registry.Entry],
        selection: config.SelectionConfig,
        directory: str | os.PathLike,
        partitions: abc.Mapping[str, abc.Sequence[abc.Set[int]]] | None = None
) -> solution.Solution:
    """Selects the final solution from registered communities and writes all report files.

    Files without rows keep their header line.

    :param g: A graph.
    :param entries: Registered communities with verdicts.
    :param selection: The selection thresholds.
    :param directory: The output directory.
    :param partitions: Optional named external node partitions to match against.
    :return: The final solution.
    """
    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    sol = solution.select_final(
        g, entries, selection.psi_cutoff, selection.min_fraction_sum, selection.exclude_larger_than,
        selection.inclusion_threshold
    )
    names = community_names(len(sol))
    valid = [e for e in entries if e.valid]
    curve = solution.coverage_curve(g, valid, solution.larger_than(g, valid, selection.exclude_larger_than))

    write_coverage(curve, directory / "coverage.tsv")
    write_communities(sol, {e.fingerprint: e.hits for e in entries}, directory / "communities.tsv")
    write_memberships(g, sol, directory / "memberships.tsv")
    write_hierarchy(sol.hierarchy, directory, names)
    write_overlaps(sol.overlaps, directory, names)
    write_cost_size(g, entries, directory / "cost_size.tsv")
    write_invalidations(entries, directory / "invalidations.tsv")
    write_matches(match_partitions(g, sol, partitions or {}), directory / "matches.tsv", names)
    with open(directory / "labels.tsv", "w", encoding="utf-8", newline="\n") as f:
        graph.write_labels(g, f)
    logger.info("Wrote report of %d selected communities to %s", len(sol), directory)
    return sol
