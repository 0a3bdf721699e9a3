"""Post-hoc quality control: credibility-pattern flagging and manual review.

A network with too many zero-credibility links (3 or more of 5 by default)
is flagged for manual review; everything else is accepted automatically.
Review decisions are final and append-only.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional

from .core import NetworkStatus, WorkerNetwork
from .groundtruth import CredibilityMap
from .illusion import MissingCredibility


class AlreadyDecided(ValueError):
    pass


class Decision(str, Enum):
    PENDING = "pending"
    ACCEPT = "accept"
    REJECT = "reject"


@dataclass(frozen=True)
class ReviewRecord:
    worker_id: str
    network: WorkerNetwork
    zero_cs_count: int
    auto_flagged: bool
    decision: Decision = Decision.PENDING
    reviewer_note: str = ""
    decided_at: Optional[float] = None


def default_flag_threshold(links_per_network: int) -> int:
    """The 3-of-5 rule scaled to other network sizes."""
    return math.ceil(3 * links_per_network / 5)


def flag_networks(
    nets: Iterable[WorkerNetwork],
    cred: CredibilityMap,
    threshold: Optional[int] = 3,
) -> list[ReviewRecord]:
    """Flag networks whose zero-credibility link count reaches the threshold.

    Unflagged networks are auto-accepted; flagged ones wait for manual
    review. Pass threshold=None to scale the 3-of-5 rule per network size.
    """
    records = []
    for net in nets:
        try:
            zero_count = sum(1 for link in net.links if cred.cs(link) == 0)
        except KeyError as exc:
            raise MissingCredibility(str(exc)) from exc
        limit = threshold if threshold is not None else default_flag_threshold(
            len(net.links)
        )
        flagged = zero_count >= limit
        if flagged:
            records.append(
                ReviewRecord(
                    worker_id=net.worker_id,
                    network=net.with_status(NetworkStatus.FLAGGED),
                    zero_cs_count=zero_count,
                    auto_flagged=True,
                )
            )
        else:
            records.append(
                ReviewRecord(
                    worker_id=net.worker_id,
                    network=net.with_status(NetworkStatus.ACCEPTED),
                    zero_cs_count=zero_count,
                    auto_flagged=False,
                    decision=Decision.ACCEPT,
                    reviewer_note="auto-accepted",
                    decided_at=time.time(),
                )
            )
    return records


def apply_review(
    record: ReviewRecord, decision: Decision, note: str = ""
) -> ReviewRecord:
    """Record a manual accept/reject; transitions only happen once."""
    if record.decision is not Decision.PENDING:
        raise AlreadyDecided(
            f"{record.worker_id} already decided: {record.decision.value}"
        )
    if decision is Decision.PENDING:
        raise ValueError("review decision must be accept or reject")
    status = (
        NetworkStatus.ACCEPTED
        if decision is Decision.ACCEPT
        else NetworkStatus.REJECTED
    )
    return replace(
        record,
        decision=decision,
        reviewer_note=note,
        decided_at=time.time(),
        network=record.network.with_status(status),
    )


class ReviewQueue:
    """Shared review store; per-record transitions are atomic."""

    def __init__(self, records: Iterable[ReviewRecord] = ()):
        self._records: dict[str, ReviewRecord] = {}
        self._lock = threading.Lock()
        for record in records:
            self._records[record.worker_id] = record

    def add(self, record: ReviewRecord) -> None:
        with self._lock:
            self._records[record.worker_id] = record

    def get(self, worker_id: str) -> ReviewRecord:
        return self._records[worker_id]

    def records(self) -> list[ReviewRecord]:
        return sorted(self._records.values(), key=lambda r: r.worker_id)

    def pending(self) -> list[ReviewRecord]:
        return [r for r in self.records() if r.decision is Decision.PENDING]

    def decide(self, worker_id: str, decision: Decision, note: str = "") -> ReviewRecord:
        with self._lock:
            updated = apply_review(self._records[worker_id], decision, note)
            self._records[worker_id] = updated
            return updated

    def accepted_networks(self) -> list[WorkerNetwork]:
        """Networks cleared for analysis; pending and rejected are excluded."""
        return [
            r.network for r in self.records() if r.decision is Decision.ACCEPT
        ]
