"""Batches of protocol runs until coverage with valid communities stops improving."""

from ..analysis import solution
from ..core import graph
from ..memetics import evolution, population, protocol
from ..validity import range_check
from . import config, registry, report, seeds

from collections import abc
import collections
import concurrent.futures
import dataclasses
import hashlib
import json
import logging
import pathlib
import time
import typing

import numpy as np

logger = logging.getLogger(__name__)

REGISTRY_FILE = "registry.ndjson"
TRACE_FILE = "trace.tsv"
MANIFEST_FILE = "manifest.json"

# Graph of the current worker process, installed once by the pool initializer.
_graph: graph.Graph | None = None


def _install(g: graph.Graph) -> None:
    global _graph
    _graph = g


def seed_rng(master_seed: int, seed_id: int) -> np.random.Generator:
    """Derives the random stream of one seed, independent of which worker runs it.

    :param master_seed: The run's master seed.
    :param seed_id: The global index of the seed.
    :return: The generator.
    """
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(0, seed_id)))


def batch_rng(master_seed: int, batch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(1, batch)))


def _protocol_task(
        seed_id: int,
        seed: graph.NodeSet,
        configs: tuple[population.EvolutionConfig, population.EvolutionConfig],
        master_seed: int
) -> protocol.ProtocolResult:
    assert _graph is not None, "worker graph not installed"
    return protocol.run_protocol(_graph, seed, configs, seed_rng(master_seed, seed_id), seed_id)


@dataclasses.dataclass
class BatchSummary:
    """What one batch added."""
    index: int
    seed_ids: list[int]
    failed: list[int]
    new_communities: int
    invalidated: int
    valid: int
    coverage: float
    seconds: float

    def to_dict(self) -> dict[str, typing.Any]:
        return dataclasses.asdict(self)


@dataclasses.dataclass
class RunOutcome:
    registry: registry.CommunityRegistry
    solution: solution.Solution
    batches: list[BatchSummary]
    stop_reason: str

    @property
    def coverage(self) -> float:
        return self.batches[-1].coverage if self.batches else 0.0


class BatchRunner:
    """Dispatches seeds to workers and folds their results into the registry between batches."""
    def __init__(self, g: graph.Graph, cfg: config.RunConfig, resume: bool = False) -> None:
        """Constructs a BatchRunner object.

        :param g: A prepared graph.
        :param cfg: The run configuration.
        :param resume: Whether to continue from the registry and manifest in the output directory.
        """
        self.g = g
        self.cfg = cfg
        self.output = pathlib.Path(cfg.output_dir)
        self.output.mkdir(parents=True, exist_ok=True)
        registry_path = self.output / REGISTRY_FILE
        previous = self._previous_manifest() if resume else None
        if resume and registry_path.exists():
            self.registry = registry.CommunityRegistry.load(registry_path)
        else:
            for stale in (registry_path, self.output / TRACE_FILE):
                stale.unlink(missing_ok=True)
            self.registry = registry.CommunityRegistry(registry_path)
        self.batches: list[BatchSummary] = [
            BatchSummary(**summary) for summary in (previous or {}).get("batches", [])
        ]
        self.next_seed_id = max(
            self.registry.next_seed_id(), max((i + 1 for b in self.batches for i in b.seed_ids), default=0)
        )
        self.queue: collections.deque[graph.NodeSet] = collections.deque()
        if cfg.seed_strategy is config.SeedStrategy.FILE:
            self.queue.extend(seeds.make_seeds(g, cfg, batch_rng(cfg.master_seed, 0))[self.next_seed_id:])

    def _previous_manifest(self) -> dict[str, typing.Any] | None:
        path = self.output / MANIFEST_FILE
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    def _next_seeds(self, batch: int) -> list[graph.NodeSet]:
        remaining = self.cfg.seed_count - self.next_seed_id
        count = min(self.cfg.batch_size, remaining)
        if self.cfg.seed_strategy is config.SeedStrategy.RANDOM and len(self.queue) < count:
            self.queue.extend(seeds.make_seeds(self.g, self.cfg, batch_rng(self.cfg.master_seed, batch)))
        return [self.queue.popleft() for _ in range(min(count, len(self.queue)))]

    def _dispatch(
            self,
            executor: concurrent.futures.Executor | None,
            batch_seeds: abc.Sequence[tuple[int, graph.NodeSet]]
    ) -> list[tuple[int, protocol.ProtocolResult | None]]:
        configs = (self.cfg.first_round, self.cfg.second_round)
        if executor is None:
            results = []
            for seed_id, seed in batch_seeds:
                try:
                    results.append((seed_id, _protocol_task(seed_id, seed, configs, self.cfg.master_seed)))
                except Exception:
                    logger.exception("Protocol run for seed %d failed", seed_id)
                    results.append((seed_id, None))
            return results

        futures = [
            (seed_id, executor.submit(_protocol_task, seed_id, seed, configs, self.cfg.master_seed))
            for seed_id, seed in batch_seeds
        ]
        results = []
        for seed_id, future in futures:
            try:
                results.append((seed_id, future.result()))
            except Exception:
                logger.exception("Protocol run for seed %d failed", seed_id)
                results.append((seed_id, None))
        return results

    def _register(self, results: abc.Iterable[tuple[int, protocol.ProtocolResult | None]]) -> list[str]:
        new = []
        with open(self.output / TRACE_FILE, "a", encoding="utf-8", newline="\n") as trace:
            if trace.tell() == 0:
                trace.write("\t".join(evolution.TRACE_HEADER) + "\n")
            for _, result in results:
                if result is None:
                    continue
                for evolution_id, record in result.trace:
                    trace.write(record.to_row(evolution_id) + "\n")
                for community in result.communities:
                    if self.registry.add(community):
                        new.append(community.fingerprint)
                if self.cfg.use_side_seeds:
                    self.queue.extend(side.nodes for side in result.side_seeds)
        return new

    def _complements(self, fingerprints: abc.Iterable[str]) -> list[str]:
        m = self.g.link_count
        new = []
        for fp in fingerprints:
            entry = self.registry[fp]
            if not m / 4 < entry.size <= 3 * m / 4:
                continue
            for links in range_check.complement_candidates(self.g, entry.links, self.cfg.resolution):
                community = population.Community.from_links(self.g, links, entry.seed_id, "complement")
                if self.registry.add(community, origin="complement"):
                    new.append(community.fingerprint)
        return new

    def coverage(self) -> float:
        curve = solution.coverage_curve(self.g, self.registry.valid_entries())
        return curve[-1].fraction if curve else 0.0

    def run(self) -> RunOutcome:
        """Runs batches until the stop rule fires, the seeds run out or the batch limit is reached.

        :return: The registry, the final solution and the batch summaries.
        """
        cfg = self.cfg
        best = self.coverage()
        stale = 0
        stop_reason = "max_batches"
        executor = None
        if cfg.workers > 1:
            executor = concurrent.futures.ProcessPoolExecutor(
                max_workers=cfg.workers, initializer=_install, initargs=(self.g,)
            )
        else:
            _install(self.g)
        started = time.perf_counter()
        try:
            for batch in range(len(self.batches), cfg.max_batches):
                batch_seeds = self._next_seeds(batch)
                if not batch_seeds:
                    stop_reason = "seeds exhausted"
                    break
                tic = time.perf_counter()
                numbered = list(enumerate(batch_seeds, start=self.next_seed_id))
                self.next_seed_id += len(numbered)

                results = self._dispatch(executor, numbered)
                new = self._register(results)
                new.extend(self._complements(new))
                self.registry.validate_pending(self.g, cfg.resolution)
                invalidated = self.registry.revalidate(self.g, cfg.resolution, new)
                coverage = self.coverage()

                summary = BatchSummary(
                    batch, [i for i, _ in numbered], [i for i, r in results if r is None], len(new), invalidated,
                    len(self.registry.valid_entries()), coverage, time.perf_counter() - tic
                )
                self.batches.append(summary)
                logger.info(
                    "Batch %d: %d seeds, %d new communities, %d valid, coverage %.4f",
                    batch, len(numbered), summary.new_communities, summary.valid, coverage
                )
                if coverage - best <= cfg.epsilon:
                    stale += 1
                else:
                    stale = 0
                best = max(best, coverage)
                if stale >= cfg.patience:
                    stop_reason = "coverage converged"
                    break
                self._write_manifest(stop_reason="running", seconds=time.perf_counter() - started)
        finally:
            if executor is not None:
                executor.shutdown()
            self.registry.close()

        final = report.write_report(self.g, list(self.registry), cfg.selection, self.output)
        self._write_manifest(stop_reason, time.perf_counter() - started)
        logger.info("Stopped after %d batches (%s); coverage %.4f", len(self.batches), stop_reason, best)
        return RunOutcome(self.registry, final, self.batches, stop_reason)

    def _write_manifest(self, stop_reason: str, seconds: float) -> None:
        manifest = {
            "config": self.cfg.to_dict(),
            "graph": {
                "nodes": self.g.node_count,
                "links": self.g.link_count,
                "digest": _links_digest(self.g)
            },
            "batches": [b.to_dict() for b in self.batches],
            "next_seed_id": self.next_seed_id,
            "stop_reason": stop_reason,
            "seconds": seconds
        }
        with open(self.output / MANIFEST_FILE, "w", encoding="utf-8", newline="\n") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")


def _links_digest(g: graph.Graph) -> str:
    return hashlib.blake2b(np.ascontiguousarray(g.links, dtype="<i8").tobytes(), digest_size=16).hexdigest()


def run_batch(g: graph.Graph, cfg: config.RunConfig, resume: bool = False) -> RunOutcome:
    """Runs the full pipeline on a prepared graph and writes all artifacts to the output directory.

    :param g: A prepared graph.
    :param cfg: The run configuration.
    :param resume: Whether to continue an interrupted run in the same output directory.
    :return: The outcome of the run.
    """
    return BatchRunner(g, cfg, resume).run()
