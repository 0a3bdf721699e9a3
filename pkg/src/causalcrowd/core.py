"""Domain model: trended attributes, causal links, worker networks.

Worker networks are built one link per round. The round rule (first link may
use any two attributes, later links must join exactly one new attribute to
the existing network) structurally guarantees the network is a tree with
node count = link count + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional


class Trend(str, Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class TrendedAttribute:
    """A base attribute fused with a trend term, e.g. "increasing CO2"."""

    base: str
    trend: Trend
    display: str

    def __post_init__(self):
        if not self.base:
            raise ValueError("empty base attribute")
        if not self.display.endswith(self.base) or self.display == self.base:
            raise ValueError(
                f"display {self.display!r} must be '<trend term> {self.base}'"
            )

    def __str__(self):
        return self.display


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class AttributeCatalog:
    """The fixed vocabulary of trended attributes for a study."""

    attributes: tuple[TrendedAttribute, ...]
    version: str = "unversioned"

    def __post_init__(self):
        if len(self.attributes) % 2 != 0:
            raise CatalogError("catalog must contain an even count of attributes")
        seen = {}
        for attr in self.attributes:
            key = (attr.base, attr.trend)
            if key in seen:
                raise CatalogError(f"duplicate (base, trend) pair: {key}")
            seen[key] = attr
        for attr in self.attributes:
            other = Trend.DOWN if attr.trend is Trend.UP else Trend.UP
            if (attr.base, other) not in seen:
                raise CatalogError(
                    f"base {attr.base!r} must appear with exactly two trends"
                )
        displays = [a.display for a in self.attributes]
        if len(set(displays)) != len(displays):
            raise CatalogError("attribute displays must be unique")

    def __iter__(self):
        return iter(self.attributes)

    def __len__(self):
        return len(self.attributes)

    def __contains__(self, attr):
        return attr in self.attributes

    def by_display(self, display: str) -> TrendedAttribute:
        for attr in self.attributes:
            if attr.display == display:
                return attr
        raise KeyError(display)

    def valid_ordered_pairs(self):
        """All ordered (cause, effect) pairs allowed by the link invariants.

        Pairs joining the two trends of one base are excluded, so the
        universe size is n*(n-2) for n catalog attributes.
        """
        for cause in self.attributes:
            for effect in self.attributes:
                if cause != effect and cause.base != effect.base:
                    yield CausalLink(cause, effect)


@dataclass(frozen=True)
class CausalLink:
    """A directed cause -> effect relation between two trended attributes."""

    cause: TrendedAttribute
    effect: TrendedAttribute

    def __post_init__(self):
        if self.cause == self.effect:
            raise ValueError("cause and effect must differ")
        if self.cause.base == self.effect.base:
            raise ValueError(
                "links between two trends of the same base are not allowed"
            )

    def reversed(self) -> "CausalLink":
        return CausalLink(self.effect, self.cause)

    def __str__(self):
        return f"{self.cause.display} -> {self.effect.display}"


class NetworkStatus(str, Enum):
    PENDING = "pending"
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    FLAGGED = "flagged"


@dataclass(frozen=True)
class WorkerNetwork:
    """One worker's small causal network (a tree of at most L links)."""

    worker_id: str
    links: tuple[CausalLink, ...] = ()
    confidence: Optional[int] = None
    status: NetworkStatus = NetworkStatus.PENDING

    def __post_init__(self):
        if self.confidence is not None and not 1 <= self.confidence <= 5:
            raise ValueError("confidence must be in 1..5")

    def nodes(self) -> tuple[TrendedAttribute, ...]:
        """Nodes in order of first appearance over the link list."""
        out = []
        for link in self.links:
            for node in (link.cause, link.effect):
                if node not in out:
                    out.append(node)
        return tuple(out)

    def with_link(self, link: CausalLink) -> "WorkerNetwork":
        return replace(self, links=self.links + (link,))

    def with_links(self, links: Iterable[CausalLink]) -> "WorkerNetwork":
        return replace(self, links=tuple(links))

    def with_confidence(self, confidence: int) -> "WorkerNetwork":
        return replace(self, confidence=confidence)

    def with_status(self, status: NetworkStatus) -> "WorkerNetwork":
        return replace(self, status=status)

    def is_tree(self) -> bool:
        """Node count = link count + 1 and the undirected skeleton connected."""
        if not self.links:
            return True
        nodes = self.nodes()
        if len(nodes) != len(self.links) + 1:
            return False
        adjacency = {n: set() for n in nodes}
        for link in self.links:
            adjacency[link.cause].add(link.effect)
            adjacency[link.effect].add(link.cause)
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            for nbr in adjacency[stack.pop()]:
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        return len(seen) == len(nodes)


class Violation(str, Enum):
    """Reasons validate_next_link can refuse a candidate link."""

    DUPLICATE_LINK = "DuplicateLink"
    REVERSE_DUPLICATE = "ReverseDuplicate"
    SELF_BASE = "SelfBase"
    BOTH_ENDPOINTS_NEW = "BothEndpointsNew"
    BOTH_ENDPOINTS_OLD = "BothEndpointsOld"
    CATALOG_MISS = "CatalogMiss"


def validate_next_link(
    current: WorkerNetwork,
    cause: TrendedAttribute,
    effect: TrendedAttribute,
    catalog: Optional[AttributeCatalog] = None,
) -> Optional[Violation]:
    """Check a candidate (cause, effect) against the round rule.

    Returns None on acceptance, otherwise the violation naming the broken
    rule. The first round accepts any two distinct new attributes; later
    rounds require exactly one endpoint already in the network.
    """
    if catalog is not None and (cause not in catalog or effect not in catalog):
        return Violation.CATALOG_MISS
    if cause == effect or cause.base == effect.base:
        return Violation.SELF_BASE
    candidate = CausalLink(cause, effect)
    if candidate in current.links:
        return Violation.DUPLICATE_LINK
    if candidate.reversed() in current.links:
        return Violation.REVERSE_DUPLICATE
    nodes = current.nodes()
    cause_old = cause in nodes
    effect_old = effect in nodes
    if not current.links:
        return None  # round 1: both endpoints are necessarily new
    if cause_old and effect_old:
        return Violation.BOTH_ENDPOINTS_OLD
    if not cause_old and not effect_old:
        return Violation.BOTH_ENDPOINTS_NEW
    return None


class Alteration(str, Enum):
    CHANGE_DIRECTION = "change_direction"
    DELETE = "delete"
    NOOP = "noop"


@dataclass(frozen=True)
class AlterationAction:
    link_index: int
    action: Alteration


@dataclass(frozen=True)
class ProtocolProfile:
    """Study-level protocol constants.

    The final profile is the default: one network of five links per
    session, no link deletion, randomized attribute order.
    """

    name: str
    links_per_network: int = 5
    networks_per_session: int = 1
    allow_delete: bool = False
    randomize_attribute_order: bool = True

    @property
    def flag_threshold(self) -> int:
        """Zero-credibility link count that triggers a fraud flag (3-of-5)."""
        return math.ceil(3 * self.links_per_network / 5)


FINAL_PROFILE = ProtocolProfile(name="final")
FORMATIVE_PROFILE = ProtocolProfile(
    name="formative",
    networks_per_session=3,
    allow_delete=True,
    randomize_attribute_order=False,
)


class IndexOutOfRange(IndexError):
    pass


class ActionDisabledByProfile(ValueError):
    pass


def apply_alteration(
    net: WorkerNetwork,
    action: AlterationAction,
    profile: ProtocolProfile = FINAL_PROFILE,
) -> WorkerNetwork:
    """Apply one alteration; all other links are untouched."""
    if not 0 <= action.link_index < len(net.links):
        raise IndexOutOfRange(f"link index {action.link_index} out of range")
    if action.action is Alteration.DELETE and not profile.allow_delete:
        raise ActionDisabledByProfile(
            f"profile {profile.name!r} does not allow link deletion"
        )
    if action.action is Alteration.NOOP:
        return net
    links = list(net.links)
    if action.action is Alteration.CHANGE_DIRECTION:
        links[action.link_index] = links[action.link_index].reversed()
    else:
        del links[action.link_index]
    return net.with_links(links)


class EmptyNetwork(ValueError):
    pass


def generate_narrative(net: WorkerNetwork) -> str:
    """Render the network as deterministic English text.

    Traversal starts from roots (nodes with no incoming link) in insertion
    order and walks depth-first, visiting outgoing links in insertion order.
    Consecutive links are merged into chains: "a leads to b, which leads
    to c". Sentences are joined by ". ".
    """
    if not net.links:
        raise EmptyNetwork("cannot narrate an empty network")
    nodes = net.nodes()
    outgoing = {n: [] for n in nodes}
    has_incoming = set()
    for link in net.links:
        outgoing[link.cause].append(link)
        has_incoming.add(link.effect)
    roots = [n for n in nodes if n not in has_incoming]
    if not roots:
        roots = [nodes[0]]  # defensive: trees always have a root

    sentences: list[str] = []
    emitted: set[CausalLink] = set()
    prev_effect: Optional[TrendedAttribute] = None

    def visit(node: TrendedAttribute):
        nonlocal prev_effect
        for link in outgoing[node]:
            if link in emitted:
                continue
            emitted.add(link)
            if prev_effect == link.cause and sentences:
                sentences[-1] += f", which leads to {link.effect.display}"
            else:
                sentences.append(
                    f"{link.cause.display} leads to {link.effect.display}"
                )
            prev_effect = link.effect
            visit(link.effect)

    for root in roots:
        visit(root)
    for node in nodes:  # defensive sweep for non-tree inputs
        visit(node)
    return ". ".join(sentences)
