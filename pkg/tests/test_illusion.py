import itertools
import random

import pytest

from causalcrowd.illusion import (
    DiscrepancyEntry,
    LinkClass,
    MissingCredibility,
    build_discrepancy,
    crowd_scores,
    discrepancy_histogram,
    edge_color,
    export_discrepancy_dot,
    EDGE_COLORS,
    GREY_SHADES,
)
from causalcrowd.metrics import AggregatedNetwork
from conftest import L, make_catalog, make_cred


def score_vector(catalog, counts):
    """Map the first len(counts) valid pairs to the given vote counts and
    return the crowd scores in the same order."""
    pairs = list(catalog.valid_ordered_pairs())[: len(counts)]
    votes = dict(zip(pairs, counts))
    scores = crowd_scores(votes)
    return [scores[link] for link in pairs]


class TestCrowdScores:
    def test_six_distinct_votes(self, catalog):
        assert score_vector(catalog, [1, 2, 3, 10, 20, 50]) == [1, 1, 2, 2, 3, 3]

    def test_tie_group_pulled_down(self, catalog):
        assert score_vector(catalog, [2, 2, 2, 9]) == [1, 1, 1, 3]

    def test_zero_votes_score_zero(self, catalog):
        assert score_vector(catalog, [0, 0, 5, 6, 7]) == [0, 0, 1, 2, 3]

    def test_fewer_than_three_voted(self, catalog):
        assert score_vector(catalog, [0, 4, 9]) == [0, 1, 1]
        assert score_vector(catalog, [7]) == [1]

    def test_empty(self):
        assert crowd_scores({}) == {}

    def test_equal_votes_equal_score(self, catalog):
        rng = random.Random(5)
        pairs = list(catalog.valid_ordered_pairs())
        for _ in range(200):
            counts = [rng.randint(0, 6) for _ in range(rng.randint(1, 20))]
            votes = dict(zip(pairs, counts))
            scores = crowd_scores(votes)
            for a, b in itertools.combinations(votes, 2):
                if votes[a] == votes[b]:
                    assert scores[a] == scores[b]

    def test_monotone_in_votes(self, catalog):
        rng = random.Random(6)
        pairs = list(catalog.valid_ordered_pairs())
        for _ in range(200):
            counts = [rng.randint(0, 40) for _ in range(rng.randint(1, 25))]
            votes = dict(zip(pairs, counts))
            scores = crowd_scores(votes)
            for a, b in itertools.combinations(votes, 2):
                if votes[a] < votes[b]:
                    assert scores[a] <= scores[b]

    def test_range(self, catalog):
        rng = random.Random(7)
        pairs = list(catalog.valid_ordered_pairs())
        for _ in range(50):
            counts = [rng.randint(0, 100) for _ in range(rng.randint(3, 30))]
            votes = dict(zip(pairs, counts))
            for link, score in crowd_scores(votes).items():
                assert 0 <= score <= 3
                if votes[link] == 0:
                    assert score == 0
                else:
                    assert score >= 1


class TestDiscrepancyEntry:
    def test_full_grid(self, catalog):
        link = L(catalog, "more A", "more B")
        for cs in range(4):
            for cr in range(4):
                entry = DiscrepancyEntry.build(link, votes=5, cr=cr, cs=cs)
                assert entry.discrepancy == cs - cr
                if cs < cr:
                    assert entry.link_class is LinkClass.MISINFORMED
                elif cs > cr:
                    assert entry.link_class is LinkClass.OBLIVIOUS
                else:
                    assert entry.link_class is LinkClass.CORRECT
                    assert entry.grey_level == cs

    def test_visibility_threshold(self, catalog):
        link = L(catalog, "more A", "more B")
        assert not DiscrepancyEntry.build(link, votes=3, cr=1, cs=1).visible
        assert DiscrepancyEntry.build(link, votes=4, cr=1, cs=1).visible
        assert DiscrepancyEntry.build(link, votes=4, cr=1, cs=1, threshold=5).visible is False


class TestBuildDiscrepancy:
    def agg(self, catalog, vote_map):
        agg = AggregatedNetwork(contributing_networks=1)
        for (c, e), count in vote_map.items():
            agg.votes[L(catalog, c, e)] = count
        return agg

    def test_covers_pair_universe(self, catalog):
        cred = make_cred(catalog, default=1)
        agg = self.agg(catalog, {("more A", "more B"): 5})
        d = build_discrepancy(agg, cred)
        assert len(d.entries) == len(list(catalog.valid_ordered_pairs()))

    def test_missing_credibility(self, catalog):
        cred = make_cred(catalog)
        other = make_catalog(8)
        agg = AggregatedNetwork(contributing_networks=1)
        agg.votes[L(other, "more G", "more H")] = 2
        with pytest.raises(MissingCredibility):
            build_discrepancy(agg, cred)

    def test_classes_and_visibility(self, catalog):
        cred = make_cred(
            catalog,
            default=0,
            overrides={
                L(catalog, "more A", "more B"): 3,  # voted heavily: correct
                L(catalog, "more B", "more C"): 3,  # unvoted: oblivious
            },
        )
        agg = self.agg(
            catalog,
            {
                ("more A", "more B"): 50,
                ("more C", "less D"): 10,  # cs 0, high cr: misinformed
                ("less D", "more E"): 2,
            },
        )
        d = build_discrepancy(agg, cred)
        entry = {e.link: e for e in d.entries}
        assert entry[L(catalog, "more A", "more B")].link_class is LinkClass.CORRECT
        assert entry[L(catalog, "more B", "more C")].link_class is LinkClass.OBLIVIOUS
        assert not entry[L(catalog, "more B", "more C")].visible
        mis = entry[L(catalog, "more C", "less D")]
        assert mis.link_class is LinkClass.MISINFORMED and mis.visible
        assert not entry[L(catalog, "less D", "more E")].visible


class TestHistogramAndDot:
    def build(self, catalog):
        cred = make_cred(
            catalog,
            default=0,
            overrides={
                L(catalog, "more A", "more B"): 3,
                L(catalog, "more B", "more C"): 2,
            },
        )
        agg = AggregatedNetwork(contributing_networks=1)
        agg.votes = {
            L(catalog, "more A", "more B"): 50,
            L(catalog, "more B", "more C"): 10,
            L(catalog, "more C", "less D"): 4,
        }
        return build_discrepancy(agg, cred)

    def test_histogram_rows(self, catalog):
        d = self.build(catalog)
        rows = discrepancy_histogram(d)
        assert [(r.link_class.value, r.score_label) for r in rows] == [
            ("misinformed", "-3"),
            ("misinformed", "-2"),
            ("misinformed", "-1"),
            ("correct", "0 (cs = 3)"),
            ("correct", "0 (cs = 2)"),
            ("correct", "0 (cs = 1)"),
            ("correct", "0 (cs = 0)"),
            ("oblivious", "1"),
            ("oblivious", "2"),
            ("oblivious", "3"),
        ]
        total = sum(r.count_all for r in rows)
        assert total == len(d.entries)
        for row in rows:
            assert row.count_visible <= row.count_all

    def test_edge_colors(self, catalog):
        link = L(catalog, "more A", "more B")
        correct = DiscrepancyEntry.build(link, votes=5, cr=2, cs=2)
        assert edge_color(correct) == GREY_SHADES[2]
        mis = DiscrepancyEntry.build(link, votes=5, cr=3, cs=0)
        assert edge_color(mis) == EDGE_COLORS[-3]

    def test_dot_only_visible_links(self, catalog):
        d = self.build(catalog)
        dot = export_discrepancy_dot(d)
        assert '"more A" -> "more B"' in dot
        assert dot.count("->") == len(d.visible_entries())

    def test_dot_mode_filters(self, catalog):
        d = self.build(catalog)
        dot = export_discrepancy_dot(d, LinkClass.MISINFORMED)
        assert 'digraph "discrepancy_misinformed"' in dot
        for line in dot.splitlines():
            if "->" in line:
                assert any(color in line for color in EDGE_COLORS.values())

    def test_dot_deterministic(self, catalog):
        d = self.build(catalog)
        assert export_discrepancy_dot(d) == export_discrepancy_dot(d)
