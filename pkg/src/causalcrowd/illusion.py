"""Crowd scores, discrepancy networks, and DOT export.

The crowd score cr compresses raw vote counts into the same 0..3 range as
the expert credibility score cs, using modified equal-frequency binning:
unvoted links stay at 0, voted links split into three ascending tiers, and
tie groups that straddle a tier boundary are pulled entirely into the lower
tier so equal votes always earn equal cr. The discrepancy cs - cr classifies
each link as misinformed (negative), correct (zero), or oblivious (positive).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional

from .core import CausalLink
from .groundtruth import CredibilityMap
from .metrics import AggregatedNetwork


class MissingCredibility(KeyError):
    pass


DEFAULT_SIGNIFICANCE_THRESHOLD = 4


class LinkClass(str, Enum):
    MISINFORMED = "misinformed"
    CORRECT = "correct"
    OBLIVIOUS = "oblivious"


def crowd_scores(votes: Mapping[CausalLink, int]) -> dict[CausalLink, int]:
    """Assign cr in {0..3} to every link in the mapping.

    Links with zero votes get 0. Fewer than three distinct voted links
    cannot be split into three tiers and all land in tier 1.
    """
    scores = {link: 0 for link in votes}
    voted = sorted(
        (link for link, count in votes.items() if count > 0),
        key=lambda l: (votes[l], l.cause.display, l.effect.display),
    )
    n = len(voted)
    if n == 0:
        return scores
    if n < 3:
        for link in voted:
            scores[link] = 1
        return scores
    # nominal equal-frequency tier for sorted position i is i*3//n + 1;
    # a tie group takes the lowest nominal tier any of its members holds
    group_start = 0
    for i in range(n + 1):
        if i == n or votes[voted[i]] != votes[voted[group_start]]:
            tier = group_start * 3 // n + 1
            for j in range(group_start, i):
                scores[voted[j]] = tier
            group_start = i
    return scores


@dataclass(frozen=True)
class DiscrepancyEntry:
    link: CausalLink
    votes: int
    cr: int
    cs: int
    discrepancy: int
    link_class: LinkClass
    visible: bool

    @staticmethod
    def build(
        link: CausalLink,
        votes: int,
        cr: int,
        cs: int,
        threshold: int = DEFAULT_SIGNIFICANCE_THRESHOLD,
    ) -> "DiscrepancyEntry":
        discrepancy = cs - cr
        if discrepancy < 0:
            link_class = LinkClass.MISINFORMED
        elif discrepancy > 0:
            link_class = LinkClass.OBLIVIOUS
        else:
            link_class = LinkClass.CORRECT
        return DiscrepancyEntry(
            link=link,
            votes=votes,
            cr=cr,
            cs=cs,
            discrepancy=discrepancy,
            link_class=link_class,
            visible=votes >= threshold,
        )

    @property
    def grey_level(self) -> Optional[int]:
        """Shade index for correct links: cs itself, darkest at 3."""
        return self.cs if self.link_class is LinkClass.CORRECT else None


@dataclass
class DiscrepancyNetwork:
    entries: tuple[DiscrepancyEntry, ...]
    threshold: int = DEFAULT_SIGNIFICANCE_THRESHOLD

    def visible_entries(self) -> list[DiscrepancyEntry]:
        return [e for e in self.entries if e.visible]

    def by_class(self, link_class: LinkClass) -> list[DiscrepancyEntry]:
        return [e for e in self.entries if e.link_class is link_class]


def build_discrepancy(
    agg: AggregatedNetwork,
    cred: CredibilityMap,
    threshold: int = DEFAULT_SIGNIFICANCE_THRESHOLD,
) -> DiscrepancyNetwork:
    """Score every link of the credibility map's pair universe."""
    for link in agg.votes:
        if link not in cred:
            raise MissingCredibility(f"no credibility score for {link}")
    votes = {link: agg.votes.get(link, 0) for link in cred.links()}
    cr = crowd_scores(votes)
    entries = tuple(
        DiscrepancyEntry.build(link, votes[link], cr[link], cred.cs(link), threshold)
        for link in sorted(
            votes, key=lambda l: (l.cause.display, l.effect.display)
        )
    )
    return DiscrepancyNetwork(entries=entries, threshold=threshold)


@dataclass(frozen=True)
class HistogramRow:
    link_class: LinkClass
    score: int
    cs: Optional[int]  # set only for the correct-link rows
    count_all: int
    count_visible: int

    @property
    def score_label(self) -> str:
        if self.cs is not None:
            return f"{self.score} (cs = {self.cs})"
        return str(self.score)


def discrepancy_histogram(d: DiscrepancyNetwork) -> list[HistogramRow]:
    """Counts per discrepancy score, correct links split further by cs."""
    rows = []
    for score in (-3, -2, -1):
        rows.append(_row(d, LinkClass.MISINFORMED, score, None))
    for cs in (3, 2, 1, 0):
        rows.append(_row(d, LinkClass.CORRECT, 0, cs))
    for score in (1, 2, 3):
        rows.append(_row(d, LinkClass.OBLIVIOUS, score, None))
    return rows


def _row(
    d: DiscrepancyNetwork, link_class: LinkClass, score: int, cs: Optional[int]
) -> HistogramRow:
    matches = [
        e
        for e in d.entries
        if e.discrepancy == score and (cs is None or e.cs == cs)
    ]
    return HistogramRow(
        link_class=link_class,
        score=score,
        cs=cs,
        count_all=len(matches),
        count_visible=sum(1 for e in matches if e.visible),
    )


# Legend colors: misinformed reds/oranges/yellows, correct greys shaded by
# cs (darkest at cs=3), oblivious blues light to dark.
EDGE_COLORS = {
    -3: "#8B0000",
    -2: "#FF8C00",
    -1: "#FFD700",
    1: "#ADD8E6",
    2: "#4682B4",
    3: "#00008B",
}
GREY_SHADES = {3: "#404040", 2: "#707070", 1: "#A9A9A9", 0: "#DCDCDC"}


def edge_color(entry: DiscrepancyEntry) -> str:
    if entry.discrepancy == 0:
        return GREY_SHADES[entry.cs]
    return EDGE_COLORS[entry.discrepancy]


def export_discrepancy_dot(
    d: DiscrepancyNetwork, mode: Optional[LinkClass] = None
) -> str:
    """DOT digraph of the visible links of one class (or all when None)."""
    entries = [
        e
        for e in d.visible_entries()
        if mode is None or e.link_class is mode
    ]
    entries.sort(key=lambda e: (e.link.cause.display, e.link.effect.display))
    nodes = []
    for entry in entries:
        for node in (entry.link.cause, entry.link.effect):
            if node not in nodes:
                nodes.append(node)
    nodes.sort(key=lambda n: n.display)
    name = mode.value if mode is not None else "all"
    lines = [f'digraph "discrepancy_{name}" {{']
    for node in nodes:
        lines.append(f'  "{node.display}";')
    for entry in entries:
        lines.append(
            f'  "{entry.link.cause.display}" -> "{entry.link.effect.display}"'
            f' [color="{edge_color(entry)}" label="{entry.discrepancy:+d}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
