from link_communities.core import errors, graph, link_set
from link_communities.memetics import local_search
from link_communities.validity import beta_range_check, range_check

from .conftest import random_connected
from .oracles import is_valid_by_enumeration

import dataclasses

import numpy as np
import pytest

TRIANGLE = frozenset({0, 1, 2})
OTHER_TRIANGLE = frozenset({3, 4, 5})
FOUR_CLIQUE = frozenset(range(6))
FOUR_CLIQUE_MINUS_ONE = FOUR_CLIQUE - {0}


@dataclasses.dataclass
class KnownCommunity:
    links: frozenset[int]
    psi: float


def known(g: graph.Graph, links: frozenset[int]) -> KnownCommunity:
    return KnownCommunity(links, link_set.psi(g, links))


def assert_sound(g: graph.Graph, links: frozenset[int], verdict: range_check.ValidityVerdict) -> None:
    assert verdict.status is range_check.ValidityStatus.INVALID
    assert verdict.witness is not None
    assert graph.is_connected_link_set(g, verdict.witness)
    assert link_set.is_lower(link_set.psi(g, verdict.witness), link_set.psi(g, links))
    assert verdict.witness_distance == link_set.distance(verdict.witness, links)
    assert 0 < verdict.witness_distance <= verdict.checked_radius


def test_bow_tie_triangle_is_valid(bow_tie):
    verdict = range_check.check_validity(bow_tie, TRIANGLE, registry=[known(bow_tie, OTHER_TRIANGLE)])
    assert verdict.is_valid
    assert verdict.checked_radius == 1
    assert verdict.witness is None


def test_incomplete_clique_is_invalid(clique_bridge):
    verdict = range_check.check_validity(clique_bridge, FOUR_CLIQUE_MINUS_ONE)
    assert_sound(clique_bridge, FOUR_CLIQUE_MINUS_ONE, verdict)
    assert verdict.witness == FOUR_CLIQUE
    assert verdict.witness_distance == 1
    assert verdict.witness_psi == pytest.approx(link_set.psi(clique_bridge, FOUR_CLIQUE))


def test_oversized_community_is_invalid_without_witness(bow_tie):
    verdict = range_check.check_validity(bow_tie, frozenset(range(5)))
    assert verdict.status is range_check.ValidityStatus.INVALID
    assert verdict.reason == range_check.OVERSIZE_REASON
    assert verdict.witness is None
    assert verdict.checked_radius == 0


def test_zero_range_is_valid(bow_tie):
    verdict = range_check.check_validity(bow_tie, {0})
    assert verdict.is_valid
    assert verdict.checked_radius == 0


def test_registry_supplies_witnesses(clique_bridge):
    registry = [known(clique_bridge, FOUR_CLIQUE)]
    without = range_check.check_validity(clique_bridge, FOUR_CLIQUE_MINUS_ONE, beam=0)
    assert without.is_valid
    verdict = range_check.check_validity(clique_bridge, FOUR_CLIQUE_MINUS_ONE, registry=registry, beam=0)
    assert_sound(clique_bridge, FOUR_CLIQUE_MINUS_ONE, verdict)
    assert verdict.witness == FOUR_CLIQUE


def test_registry_ignores_higher_and_distant_communities(clique_bridge):
    five_clique = frozenset(range(6, 16))
    registry = [known(clique_bridge, FOUR_CLIQUE_MINUS_ONE), known(clique_bridge, five_clique)]
    verdict = range_check.check_validity(clique_bridge, FOUR_CLIQUE, registry=registry)
    assert verdict.is_valid
    assert verdict.checked_radius == 2


def test_invalid_verdicts_are_sound_on_random_graphs():
    rng = np.random.default_rng(3)
    for seed in range(20):
        g = random_connected(seed)
        start = set(rng.choice(g.link_count, size=int(rng.integers(1, g.link_count)), replace=False).tolist())
        for links in (start, *(r.frozen() for r in local_search.link_wise_adapt(g, start))):
            if not graph.is_connected_link_set(g, links) or len(links) > 0.75 * g.link_count:
                continue
            verdict = range_check.check_validity(g, links)
            if not verdict.is_valid:
                assert_sound(g, frozenset(links), verdict)
                assert not is_valid_by_enumeration(g, frozenset(links))


def test_complement_of_triangle(bow_tie):
    candidates = range_check.complement_candidates(bow_tie, TRIANGLE)
    assert [c.frozen() for c in candidates] == [OTHER_TRIANGLE]


def test_complement_of_four_clique_keeps_bridge(clique_bridge):
    # The complement has the same psi as the four-clique, lower than the bare five-clique.
    candidates = range_check.complement_candidates(clique_bridge, FOUR_CLIQUE)
    assert [c.frozen() for c in candidates] == [frozenset(range(6, 17))]
    assert candidates[0].psi == pytest.approx(link_set.psi(clique_bridge, FOUR_CLIQUE))


def test_complement_candidates_are_connected_local_minima(barbell):
    first_clique = barbell.induced_links({0, 1, 2, 3})
    for candidate in range_check.complement_candidates(barbell, first_clique):
        assert graph.is_connected_link_set(barbell, candidate.links)
        assert local_search.is_local_minimum(barbell, candidate)


def test_complement_candidates_reject_small_and_large_sets(bow_tie):
    with pytest.raises(errors.LinkSetError):
        range_check.complement_candidates(bow_tie, {0})
    with pytest.raises(errors.LinkSetError):
        range_check.complement_candidates(bow_tie, frozenset(range(5)))
    with pytest.raises(errors.LinkSetError):
        range_check.complement_candidates(bow_tie, {0, 1, 42})


def test_reachable_links(bow_tie):
    assert beta_range_check.reachable_links(bow_tie, {0}, 0) == frozenset({0})
    assert beta_range_check.reachable_links(bow_tie, {0}, 1) == TRIANGLE
    assert beta_range_check.reachable_links(bow_tie, {0}, 2) == frozenset(range(6))


def test_range_prover_on_bow_tie(bow_tie):
    pytest.importorskip("ortools")
    prover = beta_range_check.RangeProver()
    verdict = prover.check(bow_tie, TRIANGLE)
    assert verdict.is_valid
    assert verdict.reason.startswith("proven")
    assert prover.check(bow_tie, {0}).checked_radius == 0
    assert prover.check(bow_tie, frozenset(range(5))).reason == range_check.OVERSIZE_REASON


def test_range_prover_finds_nearest_witness(clique_bridge):
    pytest.importorskip("ortools")
    verdict = beta_range_check.RangeProver().check(clique_bridge, FOUR_CLIQUE_MINUS_ONE)
    assert_sound(clique_bridge, FOUR_CLIQUE_MINUS_ONE, verdict)
    assert verdict.witness_distance == 1
    assert verdict.reason.startswith("proven")


def test_range_prover_matches_enumeration():
    pytest.importorskip("ortools")
    prover = beta_range_check.RangeProver()
    for seed in range(8):
        g = random_connected(seed, max_links=10)
        for start in range(0, g.link_count, 3):
            for result in local_search.link_wise_adapt(g, {start}):
                links = result.frozen()
                verdict = prover.check(g, links)
                assert verdict.status is not range_check.ValidityStatus.UNDECIDABLE
                assert verdict.is_valid == is_valid_by_enumeration(g, links)
