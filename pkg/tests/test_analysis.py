from link_communities.analysis import hierarchy, matching, solution
from link_communities.core import constraints

import math

import pytest

TRIANGLE = frozenset({0, 1, 2})
OTHER_TRIANGLE = frozenset({3, 4, 5})


def scored(g, links, valid=True) -> solution.ScoredCommunity:
    return solution.ScoredCommunity.from_links(g, links, valid)


def test_relative_inclusion():
    assert hierarchy.relative_inclusion({1, 2}, {2, 3, 4, 5}) == (0.5, 0.25)
    assert hierarchy.relative_inclusion(set(), {1}) == (0.0, 0.0)


def test_hierarchy_chain_marks_shortcuts_indirect():
    tree = hierarchy.build_hierarchy([{0}, {0, 1}, {0, 1, 2}], inclusion_threshold=1.0)
    assert [(e.subtopic, e.supertopic, e.direct) for e in tree.edges] == [
        (0, 1, True), (0, 2, False), (1, 2, True)
    ]
    assert tree.supertopics(0) == [1, 2]
    assert tree.supertopics(0, direct_only=True) == [1]
    assert tree.subtopics(2) == [0, 1]
    assert tree.related == []


def test_hierarchy_allows_several_supertopics():
    tree = hierarchy.build_hierarchy([{0, 1}, {0, 1, 2}, {0, 1, 3, 4}], inclusion_threshold=1.0)
    assert tree.supertopics(0) == [1, 2]
    assert all(e.direct for e in tree.edges)
    assert tree.related == [hierarchy.RelatedPair(1, 2, 2)]
    assert tree.related_to(2) == [1]


def test_hierarchy_inclusion_is_not_transitive():
    tree = hierarchy.build_hierarchy([{0, 1}, {1, 2, 3}, {2, 3, 4, 5, 6, 7}], inclusion_threshold=0.5)
    assert [(e.subtopic, e.supertopic) for e in tree.edges] == [(0, 1), (1, 2)]
    assert tree.edges[0].inclusion == pytest.approx(0.5)
    assert tree.edges[1].inclusion == pytest.approx(2 / 3)
    assert 2 not in tree.supertopics(0)


def test_relaxed_inclusion_chain_has_no_shortcut():
    a = set(range(0, 20))
    b = set(range(1, 41))
    c = set(range(3, 83))
    tree = hierarchy.build_hierarchy([a, b, c, {82, 83}])
    assert [(e.subtopic, e.supertopic, e.direct) for e in tree.edges] == [(0, 1, True), (1, 2, True)]
    assert tree.related == [hierarchy.RelatedPair(0, 2, 17), hierarchy.RelatedPair(2, 3, 1)]


def test_equal_size_overlap_is_related():
    tree = hierarchy.build_hierarchy([{0, 1, 2}, {0, 1, 3}], inclusion_threshold=0.5)
    assert tree.edges == []
    assert tree.related == [hierarchy.RelatedPair(0, 1, 2)]


def test_hierarchy_to_dot():
    tree = hierarchy.build_hierarchy([{0}, {0, 1}, {0, 1, 2}], inclusion_threshold=1.0)
    dot = tree.to_dot(["small", "medium", "large"])
    assert dot.startswith("digraph hierarchy {\n")
    assert '"small" -> "medium" [label="1.00", style=solid];' in dot
    assert '"small" -> "large" [label="1.00", style=dashed];' in dot
    assert '"c0" -> "c1"' in tree.to_dot()


def test_overlap_stats_and_histogram():
    stats = hierarchy.overlap_stats([{0, 1, 2}, {1, 2, 3}, {2, 3, 4}])
    assert [(p.a, p.b, p.shared) for p in stats.pairs] == [(0, 1, 2), (0, 2, 1), (1, 2, 2)]
    assert [(t.a, t.b, t.c, t.shared) for t in stats.triples] == [(0, 1, 2, 1)]
    counts, edges = hierarchy.inclusion_histogram(stats.pairs)
    assert len(edges) == 21
    assert counts.sum() == 6
    assert counts[13] == 4
    assert counts[6] == 2
    assert hierarchy.overlap_stats([{0, 1, 2}, {1, 2, 3}], min_shared=3).pairs == []


def test_salton_index():
    assert matching.salton_index({1, 2}, {2, 3}) == pytest.approx(0.5)
    assert matching.salton_index({1, 2}, {1, 2}) == pytest.approx(1.0)
    assert matching.salton_index(set(), {1}) == 0.0


def test_match_solutions():
    rows = matching.match_solutions([{1, 2}, {9}], [{2, 3}, {1, 2, 4}])
    assert rows[0].partner == 1
    assert rows[0].salton == pytest.approx(2 / math.sqrt(6))
    assert (rows[0].overlap_first, rows[0].shared) == (1.0, 2)
    assert rows[0].overlap_second == pytest.approx(2 / 3)
    assert rows[1] == matching.MatchRow(1, None, 0.0, 0.0, 0.0, 0)


def test_match_ties_go_to_lower_index():
    assert matching.match_solutions([{1}], [{1, 2}, {1, 3}])[0].partner == 0


def test_node_sets_use_strict_majority(bow_tie):
    assert matching.node_sets(bow_tie, [TRIANGLE]) == [frozenset({0, 1})]


def test_membership_grades_and_stats(bow_tie):
    assert solution.membership_grades(bow_tie, TRIANGLE) == {0: 1.0, 1: 1.0, 2: 0.5}
    stats = solution.community_stats(bow_tie, scored(bow_tie, TRIANGLE))
    assert (stats.link_count, stats.node_count, stats.full_papers) == (3, 3, 2)
    assert stats.fraction_sum == pytest.approx(2.5)
    assert stats.psi == pytest.approx(1 / 3)
    assert stats.valid is True


def test_coverage_curve(bow_tie):
    communities = [scored(bow_tie, TRIANGLE), scored(bow_tie, OTHER_TRIANGLE), scored(bow_tie, {0})]
    curve = solution.coverage_curve(bow_tie, communities + communities[:1])
    assert [p.fraction for p in curve] == [0.5, 1.0, 1.0]
    assert [p.psi for p in curve] == sorted(p.psi for p in curve)
    assert solution.coverage_at(curve, 0.3) == 0.0
    assert solution.coverage_at(curve, 0.34) == 1.0
    excluded = solution.coverage_curve(bow_tie, communities, {communities[0].fingerprint})
    assert [p.fraction for p in excluded] == [0.5, pytest.approx(4 / 6)]


def test_larger_than(bow_tie):
    communities = [scored(bow_tie, TRIANGLE), scored(bow_tie, TRIANGLE | {3})]
    assert solution.larger_than(bow_tie, communities, 0.5) == {communities[1].fingerprint}


def test_select_final_keeps_valid_bounded_communities(bow_tie):
    communities = [
        scored(bow_tie, TRIANGLE), scored(bow_tie, OTHER_TRIANGLE), scored(bow_tie, {0}, valid=False)
    ]
    sol = solution.select_final(bow_tie, communities, min_fraction_sum=2.0)
    assert len(sol) == 2
    assert {c.links for c in sol.communities} == {TRIANGLE, OTHER_TRIANGLE}
    assert sol.coverage == 1.0
    assert sol.memberships.shape == (5, 2)
    assert sol.memberships[2].toarray().tolist() == [[0.5, 0.5]]
    assert sol.hierarchy.edges == []
    assert sol.overlaps.pairs == []


@pytest.mark.parametrize("overrides", [
    {"psi_cutoff": 0.3},
    {"min_fraction_sum": 20.0},
    {"exclude_larger_than": 0.4},
])
def test_select_final_can_be_empty(bow_tie, overrides):
    values = {"min_fraction_sum": 2.0, **overrides}
    sol = solution.select_final(bow_tie, [scored(bow_tie, TRIANGLE)], **values)
    assert len(sol) == 0
    assert sol.coverage == 0.0
    assert sol.memberships.shape == (5, 0)


def test_select_final_skips_unchecked_and_duplicates(bow_tie):
    communities = [scored(bow_tie, TRIANGLE), scored(bow_tie, TRIANGLE), scored(bow_tie, OTHER_TRIANGLE, None)]
    sol = solution.select_final(bow_tie, communities, min_fraction_sum=2.0)
    assert [c.links for c in sol.communities] == [TRIANGLE]


def test_select_final_extra_constraints(bow_tie):
    class AtLeastFourLinks(constraints.Constraint):
        def __call__(self, stats, **kwargs) -> bool:
            return stats.link_count >= 4

    sol = solution.select_final(bow_tie, [scored(bow_tie, TRIANGLE)], min_fraction_sum=2.0, extra=[AtLeastFourLinks()])
    assert len(sol) == 0


def test_constraints():
    stats = solution.CommunityStats(link_count=10, psi=0.2, node_count=6, full_papers=3, fraction_sum=4.5, valid=True)
    assert constraints.Constraint()(stats)
    assert constraints.ValidConstraint()(stats)
    assert not constraints.ValidConstraint()(solution.CommunityStats(10, 0.2, 6, 3, 4.5, valid=None))
    assert constraints.MaxPsiConstraint(0.3)(stats)
    assert not constraints.MaxPsiConstraint(0.2)(stats)
    assert constraints.MinFractionSumConstraint(4.5)(stats)
    assert not constraints.MinFractionSumConstraint(5.0)(stats)
    assert constraints.MaxSizeConstraint(0.5)(stats, link_count=20)
    assert not constraints.MaxSizeConstraint(0.5)(stats, link_count=19)
