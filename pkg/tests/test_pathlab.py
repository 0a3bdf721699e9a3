import random
from fractions import Fraction

import pytest

from causalcrowd.metrics import AggregatedNetwork
from causalcrowd.pathlab import (
    IllusionQuery,
    NoTruePath,
    PartialMatrix,
    PathSupport,
    SupportCriterion,
    TrialMatrix,
    ZeroRow,
    best_path_per_hop,
    bogus_votes,
    build_trial_matrices,
    delta_p,
    enumerate_paths,
    illusion_ratio,
)
from conftest import (
    FINAL_VOTES,
    FORMATIVE_VOTES,
    L,
    make_agg,
    make_catalog,
    solar_query,
)


class TestDeltaP:
    def test_strong_positive(self):
        assert delta_p(TrialMatrix.full(16, 4, 4, 16)) == Fraction(3, 5)

    def test_strong_negative(self):
        assert delta_p(TrialMatrix.full(4, 16, 16, 4)) == Fraction(-3, 5)

    def test_no_contingency_equal_rows(self):
        assert delta_p(TrialMatrix.full(10, 10, 10, 10)) == 0

    def test_no_contingency_proportional_rows(self):
        assert delta_p(TrialMatrix.full(16, 4, 4, 1)) == 0

    def test_exactness(self):
        assert delta_p(TrialMatrix.full(1, 2, 1, 6)) == Fraction(1, 3) - Fraction(1, 7)

    def test_partial_matrix(self):
        with pytest.raises(PartialMatrix):
            delta_p(TrialMatrix.upper_left_only(5))

    def test_zero_row(self):
        with pytest.raises(ZeroRow):
            delta_p(TrialMatrix.full(0, 0, 3, 4))

    def test_row_swap_negates(self):
        rng = random.Random(2)
        for _ in range(100):
            cells = [rng.randint(0, 20) for _ in range(4)]
            m = TrialMatrix.full(*cells)
            try:
                value = delta_p(m)
            except ZeroRow:
                continue
            assert delta_p(m.row_swapped()) == -value


class TestPathSupport:
    def test_weakest_and_average(self, catalog):
        path = PathSupport(
            path=tuple(catalog.by_display(d) for d in ("more A", "more B", "more C")),
            link_votes=(3, 10),
        )
        assert path.hops == 2
        assert path.weakest == 3
        assert path.average == Fraction(13, 2)
        assert path.support(SupportCriterion.WEAKEST) == 3
        assert path.support(SupportCriterion.AVERAGE) == Fraction(13, 2)


def brute_force_paths(votes, sources, targets, max_hops):
    """Oracle: exhaustive simple-path enumeration over an edge dict."""
    adjacency = {}
    for (c, e), count in votes.items():
        if count >= 1:
            adjacency.setdefault(c, []).append((e, count))
    found = []

    def walk(node, path, weights):
        if weights and node in targets:
            found.append((tuple(path), tuple(weights)))
        if len(weights) == max_hops:
            return
        for nbr, count in adjacency.get(node, ()):
            if nbr not in path:
                walk(nbr, path + [nbr], weights + [count])

    for src in sources:
        walk(src, [src], [])
    return set(found)


class TestEnumeratePaths:
    def test_matches_oracle_on_random_digraphs(self):
        rng = random.Random(13)
        catalog = make_catalog(5)
        attrs = list(catalog)
        for _ in range(150):
            votes = {}
            for _ in range(rng.randint(0, 14)):
                c, e = rng.sample(attrs, 2)
                if c.base != e.base:
                    votes[(c, e)] = rng.randint(0, 5)
            agg = AggregatedNetwork(contributing_networks=1)
            for (c, e), count in votes.items():
                agg.votes[
                    L(catalog, c.display, e.display)
                ] = count
            sources = rng.sample(attrs, 2)
            targets = set(rng.sample(attrs, 2))
            max_hops = rng.randint(1, 4)
            got = enumerate_paths(agg, sources, targets, max_hops)
            expected = brute_force_paths(votes, sources, targets, max_hops)
            assert {(p.path, p.link_votes) for p in got} == expected

    def test_sorted_by_hops_then_support(self, final_catalog):
        agg = make_agg(final_catalog, FINAL_VOTES)
        query = solar_query(final_catalog)
        paths = enumerate_paths(
            agg, [query.true_cause], query.outcomes, query.max_hops
        )
        hops = [p.hops for p in paths]
        assert hops == sorted(hops)
        for a, b in zip(paths, paths[1:]):
            if a.hops == b.hops:
                assert a.weakest >= b.weakest

    def test_max_hops_validation(self, catalog):
        with pytest.raises(ValueError):
            enumerate_paths(AggregatedNetwork(), [], [], 0)


class TestIllusionQuery:
    def test_disjointness(self, final_catalog):
        solar = final_catalog.by_display("increasing solar radiation")
        temp = final_catalog.by_display("increasing temperature")
        with pytest.raises(ValueError):
            IllusionQuery(
                bogus_causes=frozenset({solar}),
                true_cause=solar,
                outcomes=frozenset({temp}),
            )


class TestFormativeFixture:
    def test_bogus_votes(self, formative_catalog):
        agg = make_agg(formative_catalog, FORMATIVE_VOTES)
        assert bogus_votes(agg, solar_query(formative_catalog)) == 95

    def test_four_hop_chain_support(self, formative_catalog):
        agg = make_agg(formative_catalog, FORMATIVE_VOTES)
        report = illusion_ratio(
            agg, solar_query(formative_catalog), SupportCriterion.WEAKEST
        )
        assert report.best_path.hops == 4
        assert report.best_path.weakest == 16
        assert report.best_path.average == Fraction(95, 4)

    def test_average_ratio_is_four(self, formative_catalog):
        agg = make_agg(formative_catalog, FORMATIVE_VOTES)
        report = illusion_ratio(
            agg, solar_query(formative_catalog), SupportCriterion.AVERAGE
        )
        assert report.ratio == 4


class TestFinalFixture:
    def test_bogus_votes(self, final_catalog):
        agg = make_agg(final_catalog, FINAL_VOTES)
        assert bogus_votes(agg, solar_query(final_catalog)) == 5

    def test_best_per_hop(self, final_catalog):
        agg = make_agg(final_catalog, FINAL_VOTES)
        query = solar_query(final_catalog)
        paths = enumerate_paths(agg, [query.true_cause], query.outcomes, 4)
        best = best_path_per_hop(paths, SupportCriterion.AVERAGE)
        assert set(best) == {1, 2, 3, 4}
        assert best[1].average == 2
        assert best[2].average == Fraction(9, 2)
        assert best[3].average == Fraction(47, 3)
        assert best[4].average == Fraction(55, 4)
        assert best[4].weakest == 4

    def test_ratios(self, final_catalog):
        agg = make_agg(final_catalog, FINAL_VOTES)
        query = solar_query(final_catalog)
        weakest = illusion_ratio(agg, query, SupportCriterion.WEAKEST)
        assert weakest.ratio == Fraction(5, 4)
        average = illusion_ratio(agg, query, SupportCriterion.AVERAGE)
        assert average.ratio == Fraction(5 * 4, 55)
        assert abs(float(average.ratio) - 0.36) < 0.005

    def test_deepest_hop_defines_ratio(self, final_catalog):
        # the 3-hop chain has the higher average but the 4-hop chain is deeper
        agg = make_agg(final_catalog, FINAL_VOTES)
        report = illusion_ratio(
            agg, solar_query(final_catalog), SupportCriterion.AVERAGE
        )
        assert report.best_path.hops == 4


class TestRatioEdgeCases:
    def test_no_true_path(self, final_catalog):
        agg = make_agg(
            final_catalog,
            {("increasing solar radiation", "increasing temperature"): 5},
        )
        with pytest.raises(NoTruePath):
            illusion_ratio(agg, solar_query(final_catalog))

    def test_zero_bogus_votes(self, final_catalog):
        agg = make_agg(
            final_catalog, {("more fossil fuel burning", "increasing temperature"): 7}
        )
        report = illusion_ratio(agg, solar_query(final_catalog))
        assert report.bogus_votes == 0
        assert report.ratio == 0

    def test_max_hops_caps_depth(self, final_catalog):
        agg = make_agg(final_catalog, FINAL_VOTES)
        report = illusion_ratio(
            agg, solar_query(final_catalog, max_hops=2), SupportCriterion.AVERAGE
        )
        assert report.best_path.hops == 2
        assert report.ratio == Fraction(5) / Fraction(9, 2)


class TestTrialMatrices:
    def test_upper_left_only(self, final_catalog):
        agg = make_agg(final_catalog, FINAL_VOTES)
        bogus, true = build_trial_matrices(
            agg, solar_query(final_catalog), SupportCriterion.AVERAGE
        )
        assert bogus.o_given_c == 5
        assert bogus.known == (True, False, False, False)
        assert not bogus.is_complete
        assert true.o_given_c == Fraction(55, 4)
        assert true.cause_label == "more fossil fuel burning"

    def test_no_path_gives_zero_support(self, final_catalog):
        agg = make_agg(
            final_catalog,
            {("increasing solar radiation", "increasing temperature"): 5},
        )
        _, true = build_trial_matrices(agg, solar_query(final_catalog))
        assert true.o_given_c == 0
