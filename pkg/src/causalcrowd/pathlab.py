"""Contingency mathematics and causal-chain quantification.

delta_p works on 2x2 trial matrices; the chain tooling enumerates simple
directed paths through the voted aggregate network and compares the support
for a bogus direct cause against the best multi-hop chain from the true
cause, under either a weakest-link or an average-link criterion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional

from .core import CausalLink, TrendedAttribute
from .metrics import AggregatedNetwork


class PartialMatrix(ValueError):
    pass


class ZeroRow(ZeroDivisionError):
    pass


class NoTruePath(ValueError):
    pass


@dataclass(frozen=True)
class TrialMatrix:
    """2x2 contingency counts: rows cause present/absent, columns outcome
    present/absent. Cells may be unknown; the crowdsourced pipeline only
    ever fills the upper-left magnitude."""

    cause_label: str
    outcome_label: str
    o_given_c: Rational = 0
    not_o_given_c: Rational = 0
    o_given_not_c: Rational = 0
    not_o_given_not_c: Rational = 0
    known: tuple[bool, bool, bool, bool] = (True, True, True, True)

    @staticmethod
    def full(a, b, c, d, cause_label="cause", outcome_label="outcome"):
        return TrialMatrix(cause_label, outcome_label, a, b, c, d)

    @staticmethod
    def upper_left_only(value, cause_label="cause", outcome_label="outcome"):
        return TrialMatrix(
            cause_label,
            outcome_label,
            o_given_c=value,
            known=(True, False, False, False),
        )

    @property
    def is_complete(self) -> bool:
        return all(self.known)

    def row_swapped(self) -> "TrialMatrix":
        return TrialMatrix(
            self.cause_label,
            self.outcome_label,
            self.o_given_not_c,
            self.not_o_given_not_c,
            self.o_given_c,
            self.not_o_given_c,
            (self.known[2], self.known[3], self.known[0], self.known[1]),
        )


def delta_p(m: TrialMatrix) -> Fraction:
    """P(O|C) - P(O|not C), exact."""
    if not m.is_complete:
        raise PartialMatrix("delta_p needs all four cells")
    row_c = m.o_given_c + m.not_o_given_c
    row_not_c = m.o_given_not_c + m.not_o_given_not_c
    if row_c == 0 or row_not_c == 0:
        raise ZeroRow("both rows need a positive sum")
    return Fraction(m.o_given_c, row_c) - Fraction(m.o_given_not_c, row_not_c)


class SupportCriterion(str, Enum):
    WEAKEST = "weakest"
    AVERAGE = "average"


@dataclass(frozen=True)
class PathSupport:
    """A simple directed path with its per-link votes."""

    path: tuple[TrendedAttribute, ...]
    link_votes: tuple[int, ...]

    @property
    def hops(self) -> int:
        return len(self.link_votes)

    @property
    def weakest(self) -> int:
        return min(self.link_votes)

    @property
    def average(self) -> Fraction:
        return Fraction(sum(self.link_votes), len(self.link_votes))

    def support(self, criterion: SupportCriterion):
        if criterion is SupportCriterion.WEAKEST:
            return Fraction(self.weakest)
        return self.average

    def displays(self) -> tuple[str, ...]:
        return tuple(node.display for node in self.path)


def enumerate_paths(
    agg: AggregatedNetwork,
    sources: Iterable[TrendedAttribute],
    targets: Iterable[TrendedAttribute],
    max_hops: int,
) -> list[PathSupport]:
    """All simple directed paths of 1..max_hops hops from sources to targets.

    Only links with at least one vote are traversed. Sorted by hop count
    ascending then weakest support descending, ties broken by the display
    sequence.
    """
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    sources = list(dict.fromkeys(sources))
    target_set = set(targets)
    adjacency: dict[TrendedAttribute, list[tuple[TrendedAttribute, int]]] = {}
    for link, count in agg.votes.items():
        if count >= 1:
            adjacency.setdefault(link.cause, []).append((link.effect, count))
    for nbrs in adjacency.values():
        nbrs.sort(key=lambda item: item[0].display)

    results: list[PathSupport] = []

    def walk(node, path, votes):
        if len(votes) >= 1 and node in target_set:
            results.append(PathSupport(tuple(path), tuple(votes)))
        if len(votes) == max_hops:
            return
        for nbr, count in adjacency.get(node, ()):
            if nbr in path:
                continue
            path.append(nbr)
            votes.append(count)
            walk(nbr, path, votes)
            path.pop()
            votes.pop()

    for src in sources:
        walk(src, [src], [])
    results.sort(key=lambda p: (p.hops, -p.weakest, p.displays()))
    return results


@dataclass(frozen=True)
class IllusionQuery:
    """A bogus-vs-true comparison toward an outcome synonym set."""

    bogus_causes: frozenset[TrendedAttribute]
    true_cause: TrendedAttribute
    outcomes: frozenset[TrendedAttribute]
    max_hops: int = 4

    def __post_init__(self):
        if self.max_hops < 1:
            raise ValueError("max_hops must be >= 1")
        groups = [set(self.bogus_causes), {self.true_cause}, set(self.outcomes)]
        for i in range(3):
            for j in range(i + 1, 3):
                if groups[i] & groups[j]:
                    raise ValueError("bogus, true, and outcome sets must be disjoint")


def bogus_votes(agg: AggregatedNetwork, query: IllusionQuery) -> int:
    """Votes for direct links from any bogus cause to any outcome synonym."""
    total = 0
    for link, count in agg.votes.items():
        if link.cause in query.bogus_causes and link.effect in query.outcomes:
            total += count
    return total


def best_path_per_hop(
    paths: list[PathSupport], criterion: SupportCriterion
) -> dict[int, PathSupport]:
    """Strongest path at each hop count; ties go to the lexicographically
    smallest display sequence."""
    best: dict[int, PathSupport] = {}
    for path in paths:
        incumbent = best.get(path.hops)
        if (
            incumbent is None
            or path.support(criterion) > incumbent.support(criterion)
            or (
                path.support(criterion) == incumbent.support(criterion)
                and path.displays() < incumbent.displays()
            )
        ):
            best[path.hops] = path
    return best


@dataclass(frozen=True)
class IllusionReport:
    query: IllusionQuery
    criterion: SupportCriterion
    bogus_votes: int
    ratio: Fraction
    best_path: PathSupport
    best_per_hop: dict[int, PathSupport] = field(hash=False, default_factory=dict)


def illusion_ratio(
    agg: AggregatedNetwork,
    query: IllusionQuery,
    criterion: SupportCriterion = SupportCriterion.AVERAGE,
) -> IllusionReport:
    """Ratio of bogus-cause votes to the support of the deepest best chain.

    The defining chain is the strongest path at the deepest available hop
    count (up to max_hops) from the true cause to the outcome set, judged
    by the chosen criterion. Zero bogus votes give ratio 0; no true path
    at all raises NoTruePath.
    """
    paths = enumerate_paths(agg, [query.true_cause], query.outcomes, query.max_hops)
    if not paths:
        raise NoTruePath(
            f"no voted path from {query.true_cause.display} to the outcome set"
        )
    per_hop = best_path_per_hop(paths, criterion)
    deepest = max(per_hop)
    best = per_hop[deepest]
    bogus = bogus_votes(agg, query)
    return IllusionReport(
        query=query,
        criterion=criterion,
        bogus_votes=bogus,
        ratio=Fraction(bogus) / best.support(criterion),
        best_path=best,
        best_per_hop=per_hop,
    )


def build_trial_matrices(
    agg: AggregatedNetwork,
    query: IllusionQuery,
    criterion: SupportCriterion = SupportCriterion.AVERAGE,
) -> tuple[TrialMatrix, TrialMatrix]:
    """Partial (bogus, true) matrices with only the upper-left magnitudes.

    The bogus magnitude is the direct vote total; the true magnitude is the
    best chain support under the chosen criterion (0 when no path exists).
    """
    outcome_label = " / ".join(
        sorted(node.display for node in query.outcomes)
    )
    bogus_label = " / ".join(
        sorted(node.display for node in query.bogus_causes)
    )
    bogus = TrialMatrix.upper_left_only(
        bogus_votes(agg, query), cause_label=bogus_label, outcome_label=outcome_label
    )
    try:
        support = illusion_ratio(agg, query, criterion).best_path.support(criterion)
    except NoTruePath:
        support = Fraction(0)
    true = TrialMatrix.upper_left_only(
        support, cause_label=query.true_cause.display, outcome_label=outcome_label
    )
    return bogus, true
