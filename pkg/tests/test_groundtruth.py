import random

import pytest

from causalcrowd.core import CausalLink
from causalcrowd.groundtruth import (
    CatalogMiss,
    ExpertNetwork,
    MissingDecision,
    NotOnWorklist,
    Provenance,
    ScoreOutOfRange,
    TooFewExperts,
    apply_deliberations,
    merge_expert_networks,
    suggest_deliberation_score,
)
from conftest import L, make_catalog


def expert(catalog, expert_id, *pairs):
    return ExpertNetwork(
        expert_id=expert_id,
        links=frozenset(L(catalog, c, e) for c, e in pairs),
    )


@pytest.fixture
def experts(catalog):
    shared = ("more A", "more B")
    return [
        expert(catalog, "e1", shared, ("more B", "more C")),
        expert(catalog, "e2", shared, ("more B", "more C"), ("more C", "less D")),
        expert(catalog, "e3", shared),
    ]


class TestMerge:
    def test_present_all_scores_three(self, catalog, experts):
        draft, _ = merge_expert_networks(experts, catalog)
        link = L(catalog, "more A", "more B")
        assert draft.scores[link] == 3
        assert draft.provenance[link] is Provenance.PRESENT_ALL

    def test_absent_all_scores_zero(self, catalog, experts):
        draft, _ = merge_expert_networks(experts, catalog)
        link = L(catalog, "less E", "more F")
        assert draft.scores[link] == 0
        assert draft.provenance[link] is Provenance.ABSENT_ALL

    def test_partial_appearance_goes_on_worklist(self, catalog, experts):
        _, worklist = merge_expert_networks(experts, catalog)
        assert L(catalog, "more B", "more C") in worklist
        assert L(catalog, "more C", "less D") in worklist
        assert len(worklist) == 2

    def test_too_few_experts(self, catalog, experts):
        with pytest.raises(TooFewExperts):
            merge_expert_networks(experts[:2], catalog)

    def test_catalog_miss(self, catalog, experts):
        other = make_catalog(8)
        rogue = expert(other, "e4", ("more G", "more H"))
        with pytest.raises(CatalogMiss):
            merge_expert_networks(experts + [rogue], catalog)

    def test_draft_covers_pair_universe(self, catalog, experts):
        draft, _ = merge_expert_networks(experts, catalog)
        assert set(draft.scores) == set(catalog.valid_ordered_pairs())

    def test_merge_is_order_independent(self, catalog, experts):
        reference, ref_worklist = merge_expert_networks(experts, catalog)
        rng = random.Random(7)
        for _ in range(10):
            shuffled = experts[:]
            rng.shuffle(shuffled)
            draft, worklist = merge_expert_networks(shuffled, catalog)
            assert draft.scores == reference.scores
            assert worklist == ref_worklist


class TestSuggestion:
    def test_one_mediator_suggests_two(self, catalog):
        experts = [
            expert(catalog, "e1", ("more A", "more E"), ("more E", "more B")),
            expert(catalog, "e2", ("more A", "more B")),
            expert(catalog, "e3"),
        ]
        assert suggest_deliberation_score(L(catalog, "more A", "more B"), experts) == 2

    def test_two_mediators_suggest_one(self, catalog):
        experts = [
            expert(
                catalog,
                "e1",
                ("more A", "more C"),
                ("more C", "less D"),
                ("less D", "more B"),
            ),
            expert(catalog, "e2", ("more A", "more B")),
            expert(catalog, "e3"),
        ]
        assert suggest_deliberation_score(L(catalog, "more A", "more B"), experts) == 1

    def test_no_mediated_path_falls_back_to_one(self, catalog):
        experts = [
            expert(catalog, "e1", ("more A", "more B")),
            expert(catalog, "e2"),
            expert(catalog, "e3"),
        ]
        assert suggest_deliberation_score(L(catalog, "more A", "more B"), experts) == 1

    def test_not_on_worklist(self, catalog):
        experts = [
            expert(catalog, "e1", ("more A", "more B")),
            expert(catalog, "e2", ("more A", "more B")),
            expert(catalog, "e3", ("more A", "more B")),
        ]
        with pytest.raises(NotOnWorklist):
            suggest_deliberation_score(L(catalog, "more A", "more B"), experts)


class TestDeliberations:
    def test_fills_worklist(self, catalog, experts):
        draft, worklist = merge_expert_networks(experts, catalog)
        decisions = {link: 2 for link in worklist}
        cred = apply_deliberations(draft, decisions)
        assert cred.is_total()
        for link in worklist:
            assert cred.cs(link) == 2
            assert cred.provenance[link] is Provenance.DELIBERATED

    def test_missing_decision(self, catalog, experts):
        draft, worklist = merge_expert_networks(experts, catalog)
        with pytest.raises(MissingDecision):
            apply_deliberations(draft, {worklist[0]: 1})

    def test_score_out_of_range(self, catalog, experts):
        draft, worklist = merge_expert_networks(experts, catalog)
        with pytest.raises(ScoreOutOfRange):
            apply_deliberations(draft, {link: 5 for link in worklist})

    def test_worklist_score_must_be_one_or_two(self, catalog, experts):
        draft, worklist = merge_expert_networks(experts, catalog)
        with pytest.raises(ScoreOutOfRange):
            apply_deliberations(draft, {link: 3 for link in worklist})

    def test_override_records_deliberated(self, catalog, experts):
        draft, worklist = merge_expert_networks(experts, catalog)
        decisions = {link: 1 for link in worklist}
        demoted = L(catalog, "more A", "more B")  # present in all experts
        decisions[demoted] = 2
        cred = apply_deliberations(draft, decisions)
        assert cred.cs(demoted) == 2
        assert cred.provenance[demoted] is Provenance.DELIBERATED
