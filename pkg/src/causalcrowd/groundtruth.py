"""Expert credibility scoring: merge expert networks, deliberate, score.

Experts first draw their own networks independently. Links absent from every
expert network score 0 and links present in all of them score 3; everything
in between goes onto a deliberation worklist and receives 1 or 2 from the
expert meeting, guided by how many mediating attributes sit between cause
and effect in the union graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

from .core import AttributeCatalog, CausalLink, TrendedAttribute


class TooFewExperts(ValueError):
    pass


class CatalogMiss(KeyError):
    pass


class NotOnWorklist(ValueError):
    pass


class MissingDecision(ValueError):
    pass


class ScoreOutOfRange(ValueError):
    pass


class Provenance(str, Enum):
    ABSENT_ALL = "absent_all"
    PRESENT_ALL = "present_all"
    DELIBERATED = "deliberated"


MIN_EXPERTS = 3


@dataclass(frozen=True)
class ExpertNetwork:
    """One expert's independently drawn causal network (need not be a tree)."""

    expert_id: str
    links: frozenset[CausalLink]
    references: Mapping[CausalLink, str] = field(default_factory=dict)


@dataclass
class CredibilityMap:
    """Credibility score cs in {0,1,2,3} for every valid ordered pair."""

    scores: dict[CausalLink, Optional[int]]
    provenance: dict[CausalLink, Provenance]

    def __contains__(self, link: CausalLink) -> bool:
        return link in self.scores

    def cs(self, link: CausalLink) -> int:
        score = self.scores[link]
        if score is None:
            raise MissingDecision(f"link {link} awaits deliberation")
        return score

    def is_total(self) -> bool:
        return all(score is not None for score in self.scores.values())

    def links(self):
        return self.scores.keys()


def merge_expert_networks(
    experts: list[ExpertNetwork], catalog: AttributeCatalog
) -> tuple[CredibilityMap, list[CausalLink]]:
    """Build the draft map from the appearance rule.

    Returns the draft (worklist links carry score None) and the worklist of
    links present in some but not all expert networks.
    """
    if len(experts) < MIN_EXPERTS:
        raise TooFewExperts(
            f"need at least {MIN_EXPERTS} experts, got {len(experts)}"
        )
    for expert in experts:
        for link in expert.links:
            if link.cause not in catalog or link.effect not in catalog:
                raise CatalogMiss(f"{expert.expert_id}: {link} not in catalog")

    scores: dict[CausalLink, Optional[int]] = {}
    provenance: dict[CausalLink, Provenance] = {}
    worklist: list[CausalLink] = []
    n = len(experts)
    for link in catalog.valid_ordered_pairs():
        appearances = sum(1 for expert in experts if link in expert.links)
        if appearances == 0:
            scores[link] = 0
            provenance[link] = Provenance.ABSENT_ALL
        elif appearances == n:
            scores[link] = 3
            provenance[link] = Provenance.PRESENT_ALL
        else:
            scores[link] = None
            provenance[link] = Provenance.DELIBERATED
            worklist.append(link)
    worklist.sort(key=lambda l: (l.cause.display, l.effect.display))
    return CredibilityMap(scores, provenance), worklist


def _shortest_mediated_path(
    link: CausalLink, experts: list[ExpertNetwork]
) -> Optional[int]:
    """Shortest directed path length cause -> effect in the union graph,
    ignoring the direct link itself. None when no mediated path exists."""
    union = set()
    for expert in experts:
        union.update(expert.links)
    union.discard(link)
    adjacency: dict[TrendedAttribute, list[TrendedAttribute]] = {}
    for edge in union:
        adjacency.setdefault(edge.cause, []).append(edge.effect)
    queue = deque([(link.cause, 0)])
    seen = {link.cause}
    while queue:
        node, dist = queue.popleft()
        for nbr in adjacency.get(node, ()):
            if nbr == link.effect:
                return dist + 1
            if nbr not in seen:
                seen.add(nbr)
                queue.append((nbr, dist + 1))
    return None


def suggest_deliberation_score(
    link: CausalLink, experts: list[ExpertNetwork]
) -> int:
    """Suggest 1 or 2 from the mediator count in the union expert graph.

    One mediator suggests 2, two or more suggest 1, no mediated path falls
    back to 1. The deliberation file has the final word.
    """
    appearances = sum(1 for expert in experts if link in expert.links)
    if appearances == 0 or appearances == len(experts):
        raise NotOnWorklist(f"{link} is not a deliberation case")
    length = _shortest_mediated_path(link, experts)
    if length is None:
        return 1
    mediators = length - 1
    return 2 if mediators == 1 else 1


def apply_deliberations(
    draft: CredibilityMap, decisions: Mapping[CausalLink, int]
) -> CredibilityMap:
    """Fill the worklist from the deliberation decisions.

    Worklist links must receive 1 or 2. Decisions may also override the
    0/3 defaults (any score in 0..3); overrides are recorded as
    deliberated.
    """
    scores = dict(draft.scores)
    provenance = dict(draft.provenance)
    for link, score in decisions.items():
        if link not in scores:
            raise CatalogMiss(f"decision for unknown link {link}")
        if not isinstance(score, int) or not 0 <= score <= 3:
            raise ScoreOutOfRange(f"score {score!r} for {link} not in 0..3")
        if scores[link] is None and score not in (1, 2):
            raise ScoreOutOfRange(
                f"worklist link {link} must deliberate to 1 or 2, got {score}"
            )
        scores[link] = score
        provenance[link] = Provenance.DELIBERATED
    missing = [link for link, score in scores.items() if score is None]
    if missing:
        missing.sort(key=lambda l: (l.cause.display, l.effect.display))
        raise MissingDecision(
            "no deliberation decision for: "
            + "; ".join(str(link) for link in missing[:10])
            + ("; ..." if len(missing) > 10 else "")
        )
    return CredibilityMap(scores, provenance)
