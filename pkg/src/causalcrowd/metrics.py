"""Aggregation of accepted worker networks and summary statistics."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from scipy import stats as _scipy_stats

from .core import (
    AttributeCatalog,
    CausalLink,
    NetworkStatus,
    TrendedAttribute,
    WorkerNetwork,
)
from .groundtruth import CredibilityMap


class EmptyNetwork(ValueError):
    pass


class EmptyAggregate(ValueError):
    pass


class ConstantVector(ValueError):
    pass


class TooFewPairs(ValueError):
    pass


@dataclass
class AggregatedNetwork:
    """Vote counts and per-link confidences over all accepted networks."""

    votes: dict[CausalLink, int] = field(default_factory=dict)
    link_confidences: dict[CausalLink, list[int]] = field(default_factory=dict)
    contributing_networks: int = 0

    def total_votes(self) -> int:
        return sum(self.votes.values())

    def confidence_for(self, link: CausalLink) -> list[int]:
        return self.link_confidences.get(link, [])


def aggregate(nets: Iterable[WorkerNetwork]) -> AggregatedNetwork:
    """Combine networks by counting the votes for each causal link."""
    agg = AggregatedNetwork()
    for net in nets:
        if net.status is not NetworkStatus.ACCEPTED:
            raise ValueError(
                f"network {net.worker_id!r} is {net.status.value}, not accepted"
            )
        agg.contributing_networks += 1
        for link in net.links:
            agg.votes[link] = agg.votes.get(link, 0) + 1
            if net.confidence is not None:
                agg.link_confidences.setdefault(link, []).append(net.confidence)
    return agg


def anc(net: WorkerNetwork, cred: CredibilityMap) -> Fraction:
    """Average network credibility: mean credibility over the net's links."""
    if not net.links:
        raise EmptyNetwork("ANC of an empty network is undefined")
    return Fraction(sum(cred.cs(link) for link in net.links), len(net.links))


def link_average_confidence(
    agg: AggregatedNetwork, link: CausalLink
) -> Optional[Fraction]:
    """Mean self-reported confidence over the link's votes; None if unvoted."""
    confidences = agg.link_confidences.get(link)
    if not confidences:
        return None
    return Fraction(sum(confidences), len(confidences))


def pearson_votes_vs_credibility(
    agg: AggregatedNetwork, cred: CredibilityMap
) -> tuple[float, float]:
    """Pearson r between vote counts and credibility over ALL ordered pairs.

    Zero-vote links enter with vote 0. The two-sided p-value comes from the
    t distribution with n-2 degrees of freedom.
    """
    links = sorted(cred.links(), key=lambda l: (l.cause.display, l.effect.display))
    xs = [float(agg.votes.get(link, 0)) for link in links]
    ys = [float(cred.cs(link)) for link in links]
    return pearson(xs, ys)


def pearson(xs: list[float], ys: list[float]) -> tuple[float, float]:
    """Pearson correlation with two-sided t-distribution p-value."""
    n = len(xs)
    if n < 3 or len(ys) != n:
        raise TooFewPairs(f"need at least 3 pairs, got {n}")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    ssx = sum(d * d for d in dx)
    ssy = sum(d * d for d in dy)
    if ssx == 0.0 or ssy == 0.0:
        raise ConstantVector("correlation undefined for a constant vector")
    r = sum(a * b for a, b in zip(dx, dy)) / math.sqrt(ssx * ssy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * _scipy_stats.t.sf(abs(t), df=n - 2)
    return r, float(p)


@dataclass
class ExplorationStats:
    """How often each catalog attribute was used, and by how many workers."""

    appearance_count: dict[TrendedAttribute, int]
    worker_count: dict[TrendedAttribute, int]

    def unexplored(self) -> list[TrendedAttribute]:
        return [a for a, c in self.worker_count.items() if c == 0]


def exploration_stats(
    nets: Iterable[WorkerNetwork], catalog: AttributeCatalog
) -> ExplorationStats:
    appearances: Counter = Counter()
    workers: dict[TrendedAttribute, set[str]] = {a: set() for a in catalog}
    for net in nets:
        for link in net.links:
            for node in (link.cause, link.effect):
                appearances[node] += 1
                workers.setdefault(node, set()).add(net.worker_id)
    return ExplorationStats(
        appearance_count={a: appearances.get(a, 0) for a in catalog},
        worker_count={a: len(workers[a]) for a in catalog},
    )


@dataclass(frozen=True)
class SaturationResult:
    saturated: bool
    delta: Fraction


DEFAULT_SATURATION_EPSILON = Fraction(1, 20)


def saturation(
    prev: AggregatedNetwork,
    curr: AggregatedNetwork,
    catalog: AttributeCatalog,
    epsilon: Fraction = DEFAULT_SATURATION_EPSILON,
) -> SaturationResult:
    """Cohort stopping check.

    delta is the L1 distance between the vote distributions of the two
    aggregates after normalizing each to sum 1. Saturated means delta is
    below epsilon AND every catalog attribute appears in some voted link
    of the current aggregate (the exploration gate).
    """
    prev_total = prev.total_votes()
    curr_total = curr.total_votes()
    if prev_total == 0 or curr_total == 0:
        raise EmptyAggregate("cannot assess saturation of an empty aggregate")
    delta = Fraction(0)
    for link in set(prev.votes) | set(curr.votes):
        delta += abs(
            Fraction(prev.votes.get(link, 0), prev_total)
            - Fraction(curr.votes.get(link, 0), curr_total)
        )
    explored = set()
    for link, count in curr.votes.items():
        if count > 0:
            explored.add(link.cause)
            explored.add(link.effect)
    gate = all(attr in explored for attr in catalog)
    return SaturationResult(saturated=delta < epsilon and gate, delta=delta)
