from link_communities.core import errors, link_set

from .conftest import random_connected
from .oracles import psi_by_definition

import numpy as np
import pytest

TRIANGLE = frozenset({0, 1, 2})
OTHER_TRIANGLE = frozenset({3, 4, 5})


def test_sigma_bow_tie(bow_tie):
    assert link_set.sigma(bow_tie, TRIANGLE) == pytest.approx(1.0)
    assert link_set.sigma(bow_tie, range(6)) == 0.0
    assert link_set.sigma(bow_tie, {0}) == pytest.approx(1.0)
    assert link_set.sigma(bow_tie, ()) == 0.0


def test_psi_bow_tie(bow_tie):
    assert link_set.psi(bow_tie, TRIANGLE) == pytest.approx(1 / 3)
    assert link_set.psi(bow_tie, {0}) == pytest.approx(0.6)


def test_psi_undefined_at_the_landscape_boundary(bow_tie):
    with pytest.raises(errors.UndefinedCostError):
        link_set.psi(bow_tie, ())
    with pytest.raises(errors.UndefinedCostError):
        link_set.LinkSet(bow_tie, range(6)).psi
    assert link_set.LinkSet(bow_tie).psi_or_none() is None


def test_psi_complement_symmetry():
    rng = np.random.default_rng(3)
    for seed in range(20):
        g = random_connected(seed, max_links=30)
        for _ in range(50):
            size = int(rng.integers(1, g.link_count))
            links = set(rng.choice(g.link_count, size=size, replace=False).tolist())
            complement = set(range(g.link_count)) - links
            assert link_set.psi(g, links) == pytest.approx(link_set.psi(g, complement), abs=1e-12)


def test_psi_matches_definition_and_bounds():
    rng = np.random.default_rng(5)
    for seed in range(20):
        g = random_connected(seed)
        size = int(rng.integers(1, g.link_count))
        links = set(rng.choice(g.link_count, size=size, replace=False).tolist())
        value = link_set.psi(g, links)
        assert value == pytest.approx(psi_by_definition(g, links), abs=1e-12)
        assert 0.0 <= value <= 1.0


def test_link_set_invariants(bow_tie):
    current = link_set.LinkSet(bow_tie, TRIANGLE)
    assert current.k_in_total == 6
    assert current.internal_degree == {0: 2, 1: 2, 2: 2}
    assert sum(current.internal_degree.values()) == current.k_in_total
    assert current.nodes() == frozenset({0, 1, 2})


def test_include_then_exclude_restores_cost(bow_tie):
    current = link_set.LinkSet(bow_tie, TRIANGLE)
    sigma, psi = current.sigma, current.psi
    current.include(3)
    current.exclude(3)
    assert current.sigma == pytest.approx(sigma, abs=1e-12)
    assert current.psi == pytest.approx(psi, abs=1e-12)


def test_include_rejects_misuse(bow_tie):
    current = link_set.LinkSet(bow_tie, TRIANGLE)
    with pytest.raises(errors.LinkSetError):
        current.include(0)
    with pytest.raises(errors.LinkSetError):
        current.exclude(4)
    with pytest.raises(errors.LinkSetError):
        current.include(17)


def test_prospective_values_match_applied_moves(bow_tie):
    current = link_set.LinkSet(bow_tie, TRIANGLE)
    assert current.psi_with_link(3) == pytest.approx(link_set.psi(bow_tie, TRIANGLE | {3}))
    assert current.psi_without_link(0) == pytest.approx(link_set.psi(bow_tie, TRIANGLE - {0}))
    # Adding node d to the triangle induces only link 3 (c-d).
    assert current.prospective_psi({2: 1, 3: 1}, 1) == pytest.approx(link_set.psi(bow_tie, TRIANGLE | {3}))


def test_apply_delta_from_empty_equals_fresh(bow_tie):
    empty = link_set.LinkSet(bow_tie)
    grown = link_set.apply_delta(bow_tie, empty, TRIANGLE, ())
    fresh = link_set.LinkSet(bow_tie, TRIANGLE)
    assert grown.links == fresh.links
    assert grown.internal_degree == fresh.internal_degree
    assert grown.psi == pytest.approx(fresh.psi, abs=1e-12)
    assert len(empty) == 0


def test_apply_delta_preconditions(bow_tie):
    current = link_set.LinkSet(bow_tie, TRIANGLE)
    with pytest.raises(errors.LinkSetError):
        link_set.apply_delta(bow_tie, current, {0}, ())
    with pytest.raises(errors.LinkSetError):
        link_set.apply_delta(bow_tie, current, (), {3})
    with pytest.raises(errors.LinkSetError):
        link_set.apply_delta(bow_tie, current, {3}, {3})


def test_random_deltas_agree_with_recomputation():
    rng = np.random.default_rng(11)
    g = random_connected(1, max_links=50)
    current = link_set.LinkSet(g, {0})
    for _ in range(1000):
        e = int(rng.integers(g.link_count))
        if e in current:
            if len(current) > 1:
                current = link_set.apply_delta(g, current, (), {e})
        elif len(current) < g.link_count - 1:
            current = link_set.apply_delta(g, current, {e}, ())
        assert current.sigma == pytest.approx(link_set.sigma(g, current), abs=1e-9)
        assert current.psi == pytest.approx(link_set.psi(g, current), abs=1e-9)


def test_distance(bow_tie):
    assert link_set.distance(TRIANGLE, TRIANGLE) == 0
    assert link_set.distance(TRIANGLE, OTHER_TRIANGLE) == 6
    assert link_set.distance({0}, TRIANGLE) == 2
    assert link_set.distance(link_set.LinkSet(bow_tie, TRIANGLE), [0, 1]) == 1


def test_distance_triangle_inequality():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a, b, c = (set(rng.choice(20, size=int(rng.integers(0, 20)), replace=False).tolist()) for _ in range(3))
        assert link_set.distance(a, c) <= link_set.distance(a, b) + link_set.distance(b, c)
        assert link_set.distance(a, b) == link_set.distance(b, a)


def test_fingerprint_is_canonical(bow_tie):
    assert link_set.fingerprint([2, 0, 1]) == link_set.fingerprint(TRIANGLE)
    assert link_set.fingerprint(link_set.LinkSet(bow_tie, TRIANGLE)) == link_set.fingerprint(TRIANGLE)
    assert link_set.fingerprint(TRIANGLE) != link_set.fingerprint(OTHER_TRIANGLE)
    assert len(link_set.fingerprint(TRIANGLE)) == 32


def test_tolerance():
    assert link_set.is_equal(1 / 3, 1 / 3 + 1e-14)
    assert not link_set.is_lower(1 / 3, 1 / 3 + 1e-14)
    assert link_set.is_lower(0.3, 1 / 3)


def test_minimal_range():
    assert link_set.minimal_range(1 / 3, 3) == 1
    assert link_set.minimal_range(1 / 3, 6) == 2
    assert link_set.minimal_range(1 / 3, 2) == 0
