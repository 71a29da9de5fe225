"""Append-only store of every community found during a run."""

from ..core import graph, link_set
from ..memetics import population
from ..validity import range_check

from collections import abc
import dataclasses
import json
import logging
import os
import threading
import typing

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class Entry:
    """A registered community with its search statistics and latest verdict."""
    links: frozenset[int]
    psi: float
    fingerprint: str
    seed_id: int | None
    evolution_id: str | None
    origin: str
    hits: int = 0
    verdict: range_check.ValidityVerdict | None = None

    @property
    def valid(self) -> bool | None:
        return None if self.verdict is None else self.verdict.is_valid

    @property
    def size(self) -> int:
        return len(self.links)


def _verdict_record(fingerprint: str, verdict: range_check.ValidityVerdict) -> dict[str, typing.Any]:
    return {
        "type": "verdict",
        "fingerprint": fingerprint,
        "status": verdict.status.value,
        "checked_radius": verdict.checked_radius,
        "witness": sorted(verdict.witness) if verdict.witness is not None else None,
        "witness_psi": verdict.witness_psi,
        "witness_distance": verdict.witness_distance,
        "reason": verdict.reason
    }


def _verdict(record: abc.Mapping[str, typing.Any]) -> range_check.ValidityVerdict:
    witness = record.get("witness")
    return range_check.ValidityVerdict(
        range_check.ValidityStatus(record["status"]),
        record["checked_radius"],
        frozenset(witness) if witness is not None else None,
        record.get("witness_psi"),
        record.get("witness_distance"),
        record.get("reason", "")
    )


class CommunityRegistry:
    """Communities keyed by fingerprint, persisted as newline-delimited JSON records.

    Records are "community" on first discovery, "hit" for every search path ending in a community and "verdict"
    whenever a validity status is set. Replaying the records restores the registry.
    """
    def __init__(self, path: str | os.PathLike | None = None) -> None:
        """Constructs a CommunityRegistry object.

        :param path: The file to append records to, or None to keep the registry in memory.
        """
        self.path = path
        self.entries: dict[str, Entry] = {}
        self._lock = threading.Lock()
        self._stream: typing.TextIO | None = None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> abc.Iterator[Entry]:
        return iter(self.entries.values())

    def __contains__(self, fingerprint: object) -> bool:
        return fingerprint in self.entries

    def __getitem__(self, fingerprint: str) -> Entry:
        return self.entries[fingerprint]

    def __enter__(self) -> "CommunityRegistry":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def close(self) -> None:
        if self._stream is not None:
            self._stream.close()
            self._stream = None

    def _write(self, record: dict[str, typing.Any]) -> None:
        if self.path is None:
            return
        if self._stream is None:
            self._stream = open(self.path, "a", encoding="utf-8", newline="\n")
        self._stream.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
        self._stream.flush()

    def add(self, community: population.Community, origin: str = "protocol") -> bool:
        """Registers a community and counts a hit on it.

        :param community: A connected community.
        :param origin: How it was found, "protocol" or "complement".
        :return: True if the community is new.
        """
        with self._lock:
            fp = community.fingerprint
            entry = self.entries.get(fp)
            new = entry is None
            if new:
                entry = Entry(
                    community.links, community.psi, fp, community.seed_id, community.evolution_id, origin
                )
                self.entries[fp] = entry
                self._write({
                    "type": "community",
                    "fingerprint": fp,
                    "psi": community.psi,
                    "links": sorted(community.links),
                    "seed_id": community.seed_id,
                    "evolution_id": community.evolution_id,
                    "origin": origin
                })
            entry.hits += 1
            self._write({"type": "hit", "fingerprint": fp, "seed_id": community.seed_id})
            return new

    def set_verdict(self, fingerprint: str, verdict: range_check.ValidityVerdict) -> None:
        with self._lock:
            self.entries[fingerprint].verdict = verdict
            self._write(_verdict_record(fingerprint, verdict))

    def valid_entries(self) -> list[Entry]:
        return [entry for entry in self.entries.values() if entry.valid]

    def pending(self) -> list[Entry]:
        return [entry for entry in self.entries.values() if entry.verdict is None]

    def next_seed_id(self) -> int:
        ids = [entry.seed_id for entry in self.entries.values() if entry.seed_id is not None]
        return max(ids) + 1 if ids else 0

    def validate_pending(self, g: graph.Graph, resolution: float) -> int:
        """Checks every community without a verdict against the landscape and all registered communities.

        :param g: A graph.
        :param resolution: The resolution parameter r.
        :return: The number of communities found valid.
        """
        known = list(self.entries.values())
        valid = 0
        for entry in self.pending():
            verdict = range_check.check_validity(g, entry.links, resolution, known)
            self.set_verdict(entry.fingerprint, verdict)
            valid += verdict.is_valid
        return valid

    def revalidate(self, g: graph.Graph, resolution: float, new: abc.Iterable[str]) -> int:
        """Invalidates valid communities that a newly found lower community lies close to.

        Verdicts only change from valid to invalid.

        :param g: A graph.
        :param resolution: The resolution parameter r.
        :param new: Fingerprints of the newly registered communities.
        :return: The number of invalidated communities.
        """
        arrivals = [self.entries[fp] for fp in new]
        flipped = 0
        for entry in self.valid_entries():
            radius = link_set.minimal_range(resolution, entry.size)
            witnesses = [
                (link_set.distance(entry.links, other.links), other.psi, other.fingerprint, other)
                for other in arrivals
                if other.fingerprint != entry.fingerprint and link_set.is_lower(other.psi, entry.psi)
            ]
            witnesses = [w for w in witnesses if w[0] <= radius]
            if not witnesses:
                continue
            d, psi, _, other = min(witnesses, key=lambda w: w[:3])
            self.set_verdict(entry.fingerprint, range_check.ValidityVerdict(
                range_check.ValidityStatus.INVALID, radius, other.links, psi, d,
                reason="lower community found later at distance {0:d}".format(d)
            ))
            flipped += 1
        if flipped:
            logger.info("Re-validation invalidated %d communities", flipped)
        return flipped

    @classmethod
    def load(cls, path: str | os.PathLike, append: bool = True) -> "CommunityRegistry":
        """Restores a registry by replaying its records.

        :param path: The registry file.
        :param append: Whether new records are appended to the same file.
        :return: The registry.
        """
        registry = cls(path if append else None)
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                record = json.loads(line)
                kind = record["type"]
                if kind == "community":
                    registry.entries[record["fingerprint"]] = Entry(
                        frozenset(record["links"]), record["psi"], record["fingerprint"],
                        record.get("seed_id"), record.get("evolution_id"), record.get("origin", "protocol")
                    )
                elif kind == "hit":
                    registry.entries[record["fingerprint"]].hits += 1
                elif kind == "verdict":
                    registry.entries[record["fingerprint"]].verdict = _verdict(record)
                else:
                    logger.warning("Skipping unknown registry record type %r", kind)
        logger.info("Loaded %d communities from %s", len(registry), path)
        return registry
