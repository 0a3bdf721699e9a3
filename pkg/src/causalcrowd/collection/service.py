"""Per-session state machine for the staged collection protocol.

Stages advance monotonically: instructions/gate test, demographics plus the
attitude survey, five rounds of link creation, alteration, confidence,
usability ratings, and finally a verification code. Every mutation is
validated against the current stage; a mismatch leaves the session
untouched and reports WrongStage.
"""

from __future__ import annotations

import random
import secrets
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .. import core
from ..core import (
    Alteration,
    AlterationAction,
    AttributeCatalog,
    NetworkStatus,
    ProtocolProfile,
    WorkerNetwork,
    FINAL_PROFILE,
)
from ..groundtruth import CredibilityMap
from .. import metrics, qualitycontrol
from .sassy import MalformedAnswers, SassyTable, Segment
from .store import JournalStore


class Stage(str, Enum):
    INSTRUCTIONS = "instructions"
    TEST = "test"
    DEMOGRAPHICS = "demographics"
    CREATION = "creation"
    ALTERATION = "alteration"
    EVALUATION = "evaluation"
    USABILITY = "usability"
    COMPLETE = "complete"


STAGE_ORDER = list(Stage)

VERIFICATION_ALPHABET = (
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_"
)
VERIFICATION_CODE_LENGTH = 12

DEMOGRAPHICS_QUESTIONS = 8
USABILITY_STATEMENTS = 7
DECLINE_ANSWER = "decline"


class ServiceError(Exception):
    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(message or code)


class WrongStage(ServiceError):
    def __init__(self, expected: Stage, actual: Stage):
        super().__init__(
            "WrongStage", f"expected stage {expected.value}, session is at {actual.value}"
        )


class UnknownSession(ServiceError):
    def __init__(self, session_id: str):
        super().__init__("UnknownSession", f"no session {session_id!r}")


class CohortClosed(ServiceError):
    def __init__(self):
        super().__init__("CohortClosed", "the study is closed to new sessions")


class CohortOpen(ServiceError):
    def __init__(self, cohort: int):
        super().__init__("CohortOpen", f"cohort {cohort} is still open")


@dataclass
class Session:
    id: str
    cohort: int
    profile_name: str
    attribute_order: tuple[str, ...]
    stage: Stage = Stage.INSTRUCTIONS
    network: WorkerNetwork = None
    demographics: Optional[list[str]] = None
    sassy_answers: Optional[list[int]] = None
    segment: Optional[Segment] = None
    usability: Optional[list[int]] = None
    verification_code: Optional[str] = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def snapshot(self) -> dict:
        """Canonical JSON-serializable state (lock excluded)."""
        return {
            "id": self.id,
            "cohort": self.cohort,
            "profile": self.profile_name,
            "attribute_order": list(self.attribute_order),
            "stage": self.stage.value,
            "links": [
                {"cause": l.cause.display, "effect": l.effect.display}
                for l in self.network.links
            ],
            "confidence": self.network.confidence,
            "status": self.network.status.value,
            "demographics": self.demographics,
            "sassy_answers": self.sassy_answers,
            "segment": self.segment.value if self.segment else None,
            "usability": self.usability,
            "verification_code": self.verification_code,
        }


@dataclass
class ServiceConfig:
    catalog: AttributeCatalog
    gate_cause: str
    gate_effect: str
    sassy_table: SassyTable
    profile: ProtocolProfile = FINAL_PROFILE
    data_dir: Optional[str] = None
    credibility: Optional[CredibilityMap] = None
    demographics_questions: int = DEMOGRAPHICS_QUESTIONS
    usability_statements: int = USABILITY_STATEMENTS
    rng: Optional[random.Random] = None


def network_dot(net: WorkerNetwork) -> str:
    """DOT rendering of a worker network for the client's graph view."""
    lines = ["digraph worker_network {", "  rankdir=LR;"]
    for node in net.nodes():
        lines.append(f'  "{node.display}";')
    for link in net.links:
        lines.append(
            f'  "{link.cause.display}" -> "{link.effect.display}";'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


class StudyService:
    """All protocol operations; each session's transitions are serialized
    by a per-session lock, admin state by its own lock."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.catalog = config.catalog
        self.profile = config.profile
        self._rng = config.rng or random.SystemRandom()
        self._store = JournalStore(config.data_dir)
        self._admin_lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._codes: set[str] = set()
        self.open_cohort = 0
        self.study_open = True
        self.review_queue = qualitycontrol.ReviewQueue()
        self._restore()

    # -- persistence ----------------------------------------------------------

    def _restore(self) -> None:
        snapshots, admin = self._store.replay()
        for state in snapshots.values():
            session = self._session_from_snapshot(state)
            self._sessions[session.id] = session
            if session.verification_code:
                self._codes.add(session.verification_code)
            if session.stage is Stage.COMPLETE:
                self._enqueue_for_review(session)
        if admin is not None:
            self.open_cohort = admin["open_cohort"]
            self.study_open = admin["study_open"]

    def _session_from_snapshot(self, state: dict) -> Session:
        links = tuple(
            core.CausalLink(
                self.catalog.by_display(item["cause"]),
                self.catalog.by_display(item["effect"]),
            )
            for item in state["links"]
        )
        return Session(
            id=state["id"],
            cohort=state["cohort"],
            profile_name=state["profile"],
            attribute_order=tuple(state["attribute_order"]),
            stage=Stage(state["stage"]),
            network=WorkerNetwork(
                worker_id=state["id"],
                links=links,
                confidence=state["confidence"],
                status=NetworkStatus(state["status"]),
            ),
            demographics=state["demographics"],
            sassy_answers=state["sassy_answers"],
            segment=Segment(state["segment"]) if state["segment"] else None,
            usability=state["usability"],
            verification_code=state["verification_code"],
        )

    def _record(self, session: Session) -> None:
        self._store.append({"type": "session", "state": session.snapshot()})

    def _record_admin(self) -> None:
        self._store.append(
            {
                "type": "admin",
                "state": {
                    "open_cohort": self.open_cohort,
                    "study_open": self.study_open,
                },
            }
        )

    # -- session lifecycle ----------------------------------------------------

    def create_session(self) -> Session:
        with self._admin_lock:
            if not self.study_open:
                raise CohortClosed()
            cohort = self.open_cohort
        if self.profile.randomize_attribute_order:
            order = [a.display for a in self.catalog]
            self._rng.shuffle(order)
        else:
            order = [a.display for a in self.catalog]
        session_id = secrets.token_hex(16)
        session = Session(
            id=session_id,
            cohort=cohort,
            profile_name=self.profile.name,
            attribute_order=tuple(order),
            network=WorkerNetwork(worker_id=session_id),
        )
        self._sessions[session_id] = session
        self._record(session)
        return session

    def get_session(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None

    def _require_stage(self, session: Session, *stages: Stage) -> None:
        if session.stage not in stages:
            raise WrongStage(stages[0], session.stage)

    def _attr(self, display: str):
        try:
            return self.catalog.by_display(display)
        except KeyError:
            raise ServiceError("CatalogMiss", f"unknown attribute {display!r}")

    def submit_test(self, session_id: str, cause: str, effect: str) -> bool:
        """Gate test: pass advances to demographics, fail allows retries."""
        session = self.get_session(session_id)
        with session.lock:
            self._require_stage(session, Stage.INSTRUCTIONS, Stage.TEST)
            passed = (
                cause == self.config.gate_cause
                and effect == self.config.gate_effect
            )
            session.stage = Stage.DEMOGRAPHICS if passed else Stage.TEST
            self._record(session)
            return passed

    def submit_demographics(
        self, session_id: str, demographics: list[str], sassy_answers: list[int]
    ) -> Segment:
        session = self.get_session(session_id)
        with session.lock:
            self._require_stage(session, Stage.DEMOGRAPHICS)
            if len(demographics) != self.config.demographics_questions:
                raise ServiceError(
                    "MalformedAnswers",
                    f"expected {self.config.demographics_questions} demographic "
                    f"answers, got {len(demographics)}",
                )
            if not all(isinstance(a, str) and a for a in demographics):
                raise ServiceError(
                    "MalformedAnswers",
                    f"demographic answers must be non-empty strings "
                    f"({DECLINE_ANSWER!r} is always available)",
                )
            try:
                segment = self.config.sassy_table.score(sassy_answers)
            except MalformedAnswers as exc:
                raise ServiceError("MalformedAnswers", str(exc)) from exc
            session.demographics = list(demographics)
            session.sassy_answers = list(sassy_answers)
            session.segment = segment
            session.stage = Stage.CREATION
            self._record(session)
            return segment

    def submit_link(self, session_id: str, cause: str, effect: str) -> dict:
        session = self.get_session(session_id)
        with session.lock:
            self._require_stage(session, Stage.CREATION)
            cause_attr = self._attr(cause)
            effect_attr = self._attr(effect)
            violation = core.validate_next_link(
                session.network, cause_attr, effect_attr, self.catalog
            )
            if violation is not None:
                raise ServiceError(violation.value, f"link rejected: {violation.value}")
            session.network = session.network.with_link(
                core.CausalLink(cause_attr, effect_attr)
            )
            remaining = self.profile.links_per_network - len(session.network.links)
            if remaining == 0:
                session.stage = Stage.ALTERATION
            self._record(session)
            return {"remaining_rounds": remaining, "stage": session.stage.value}

    def submit_alteration(
        self, session_id: str, actions: list[AlterationAction]
    ) -> None:
        """Apply one pass of alterations, then advance to evaluation."""
        session = self.get_session(session_id)
        with session.lock:
            self._require_stage(session, Stage.ALTERATION)
            network = session.network
            try:
                for action in actions:
                    network = core.apply_alteration(network, action, self.profile)
            except core.IndexOutOfRange as exc:
                raise ServiceError("IndexOutOfRange", str(exc)) from exc
            except core.ActionDisabledByProfile as exc:
                raise ServiceError("ActionDisabledByProfile", str(exc)) from exc
            session.network = network
            session.stage = Stage.EVALUATION
            self._record(session)

    def submit_confidence(self, session_id: str, confidence: int) -> None:
        session = self.get_session(session_id)
        with session.lock:
            self._require_stage(session, Stage.EVALUATION)
            if not isinstance(confidence, int) or not 1 <= confidence <= 5:
                raise ServiceError("OutOfRange", "confidence must be in 1..5")
            session.network = session.network.with_confidence(confidence)
            session.stage = Stage.USABILITY
            self._record(session)

    def submit_usability(self, session_id: str, ratings: list[int]) -> None:
        session = self.get_session(session_id)
        with session.lock:
            self._require_stage(session, Stage.USABILITY)
            if len(ratings) != self.config.usability_statements:
                raise ServiceError(
                    "OutOfRange",
                    f"expected {self.config.usability_statements} ratings",
                )
            if not all(isinstance(r, int) and 1 <= r <= 5 for r in ratings):
                raise ServiceError("OutOfRange", "ratings must be in 1..5")
            session.usability = list(ratings)
            session.stage = Stage.COMPLETE
            session.verification_code = self._new_code()
            session.network = session.network.with_status(NetworkStatus.PENDING)
            self._enqueue_for_review(session)
            self._record(session)

    def complete_session(self, session_id: str) -> str:
        """Return the verification code of a completed session."""
        session = self.get_session(session_id)
        with session.lock:
            self._require_stage(session, Stage.COMPLETE)
            return session.verification_code

    def _new_code(self) -> str:
        while True:
            code = "".join(
                secrets.choice(VERIFICATION_ALPHABET)
                for _ in range(VERIFICATION_CODE_LENGTH)
            )
            with self._admin_lock:
                if code not in self._codes:
                    self._codes.add(code)
                    return code

    def _enqueue_for_review(self, session: Session) -> None:
        net = session.network
        if net.status is not NetworkStatus.PENDING:
            # journal replay of an already reviewed network
            records = qualitycontrol.flag_networks(
                [net.with_status(NetworkStatus.PENDING)],
                self.config.credibility,
                threshold=self.profile.flag_threshold,
            ) if self.config.credibility is not None else []
            record = (
                records[0]
                if records
                else qualitycontrol.ReviewRecord(
                    worker_id=net.worker_id,
                    network=net,
                    zero_cs_count=0,
                    auto_flagged=False,
                )
            )
            decision = (
                qualitycontrol.Decision.ACCEPT
                if net.status is NetworkStatus.ACCEPTED
                else qualitycontrol.Decision.REJECT
            )
            from dataclasses import replace

            self.review_queue.add(
                replace(record, network=net, decision=decision)
            )
            return
        if self.config.credibility is None:
            # no credibility map configured: accept everything up front
            accepted = net.with_status(NetworkStatus.ACCEPTED)
            session.network = accepted
            self.review_queue.add(
                qualitycontrol.ReviewRecord(
                    worker_id=net.worker_id,
                    network=accepted,
                    zero_cs_count=0,
                    auto_flagged=False,
                    decision=qualitycontrol.Decision.ACCEPT,
                    reviewer_note="auto-accepted (no credibility map)",
                )
            )
            return
        record = qualitycontrol.flag_networks(
            [net], self.config.credibility, threshold=self.profile.flag_threshold
        )[0]
        session.network = record.network
        self.review_queue.add(record)

    # -- review ---------------------------------------------------------------

    def review(self, worker_id: str, decision: qualitycontrol.Decision, note: str):
        record = self.review_queue.decide(worker_id, decision, note)
        session = self._sessions.get(worker_id)
        if session is not None:
            session.network = record.network
            self._record(session)
        return record

    # -- admin ----------------------------------------------------------------

    def close_cohort(self) -> int:
        with self._admin_lock:
            self.open_cohort += 1
            self._record_admin()
            return self.open_cohort

    def close_study(self) -> None:
        with self._admin_lock:
            self.study_open = False
            self._record_admin()

    def accepted_networks(self, max_cohort: Optional[int] = None) -> list[WorkerNetwork]:
        out = []
        for record in self.review_queue.records():
            if record.decision is not qualitycontrol.Decision.ACCEPT:
                continue
            session = self._sessions.get(record.worker_id)
            if session is None:
                continue
            if max_cohort is not None and session.cohort > max_cohort:
                continue
            out.append(record.network)
        return out

    def cohort_report(self, cohort: int) -> dict:
        """Aggregate, saturation vs the previous cohort, exploration, and
        the attitude-segment histogram over cohorts <= cohort."""
        if cohort >= self.open_cohort and self.study_open:
            raise CohortOpen(cohort)
        nets = self.accepted_networks(max_cohort=cohort)
        agg = metrics.aggregate(nets)
        exploration = metrics.exploration_stats(nets, self.catalog)
        sat: Optional[metrics.SaturationResult] = None
        if cohort > 0:
            prev_nets = self.accepted_networks(max_cohort=cohort - 1)
            prev_agg = metrics.aggregate(prev_nets)
            try:
                sat = metrics.saturation(prev_agg, agg, self.catalog)
            except metrics.EmptyAggregate:
                sat = None
        segments = {segment.value: 0 for segment in Segment}
        for session in self._sessions.values():
            if session.cohort <= cohort and session.segment is not None:
                segments[session.segment.value] += 1
        return {
            "cohort": cohort,
            "contributing_networks": agg.contributing_networks,
            "votes": {
                str(link): count
                for link, count in sorted(
                    agg.votes.items(),
                    key=lambda kv: (kv[0].cause.display, kv[0].effect.display),
                )
            },
            "saturation": None
            if sat is None
            else {"saturated": sat.saturated, "delta": float(sat.delta)},
            "unexplored_attributes": [
                a.display for a in exploration.unexplored()
            ],
            "segment_histogram": segments,
            "all_segments_present": all(count > 0 for count in segments.values()),
        }

    def close(self) -> None:
        self._store.close()
