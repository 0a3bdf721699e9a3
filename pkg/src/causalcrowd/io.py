"""File formats for catalogs, networks, scores, and reports.

Links are serialized by attribute display name; loading therefore needs the
catalog. All writers emit deterministic, canonically ordered output.
"""

from __future__ import annotations

import csv
import io as _io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from .core import (
    AttributeCatalog,
    CausalLink,
    NetworkStatus,
    Trend,
    TrendedAttribute,
    WorkerNetwork,
)
from .groundtruth import CredibilityMap, ExpertNetwork, Provenance
from .metrics import AggregatedNetwork
from .illusion import HistogramRow
from .pathlab import IllusionQuery
from .qualitycontrol import Decision, ReviewRecord


def atomic_write_text(path: Path, text: str) -> None:
    """Write via a temp file + rename so failures leave no partial output."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- attribute catalog --------------------------------------------------------

def load_catalog(path: Path) -> AttributeCatalog:
    with open(path) as handle:
        payload = json.load(handle)
    attributes = tuple(
        TrendedAttribute(
            base=item["base"],
            trend=Trend(item["trend"]),
            display=item["display"],
        )
        for item in payload["attributes"]
    )
    return AttributeCatalog(attributes=attributes, version=payload["version"])


def dump_catalog(catalog: AttributeCatalog) -> str:
    payload = {
        "version": catalog.version,
        "attributes": [
            {"base": a.base, "trend": a.trend.value, "display": a.display}
            for a in catalog
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def parse_link(
    catalog: AttributeCatalog, cause_display: str, effect_display: str
) -> CausalLink:
    return CausalLink(
        catalog.by_display(cause_display), catalog.by_display(effect_display)
    )


# -- worker networks (JSON lines) --------------------------------------------

def network_to_dict(net: WorkerNetwork) -> dict:
    return {
        "worker_id": net.worker_id,
        "links": [
            {"cause": l.cause.display, "effect": l.effect.display}
            for l in net.links
        ],
        "confidence": net.confidence,
        "status": net.status.value,
    }


def network_from_dict(payload: dict, catalog: AttributeCatalog) -> WorkerNetwork:
    return WorkerNetwork(
        worker_id=payload["worker_id"],
        links=tuple(
            parse_link(catalog, item["cause"], item["effect"])
            for item in payload["links"]
        ),
        confidence=payload.get("confidence"),
        status=NetworkStatus(payload.get("status", "pending")),
    )


def load_networks(path: Path, catalog: AttributeCatalog) -> list[WorkerNetwork]:
    networks = []
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if line:
                networks.append(network_from_dict(json.loads(line), catalog))
    return networks


def dump_networks(nets: Iterable[WorkerNetwork]) -> str:
    return "".join(json.dumps(network_to_dict(n)) + "\n" for n in nets)


# -- expert networks ----------------------------------------------------------

def load_expert_network(path: Path, catalog: AttributeCatalog) -> ExpertNetwork:
    with open(path) as handle:
        payload = json.load(handle)
    links = frozenset(
        parse_link(catalog, item["cause"], item["effect"])
        for item in payload["links"]
    )
    references = {
        parse_link(catalog, item["cause"], item["effect"]): item["reference"]
        for item in payload.get("references", [])
    }
    return ExpertNetwork(
        expert_id=payload["expert_id"], links=links, references=references
    )


def dump_expert_network(expert: ExpertNetwork) -> str:
    links = sorted(
        expert.links, key=lambda l: (l.cause.display, l.effect.display)
    )
    payload = {
        "expert_id": expert.expert_id,
        "links": [
            {"cause": l.cause.display, "effect": l.effect.display} for l in links
        ],
        "references": [
            {
                "cause": l.cause.display,
                "effect": l.effect.display,
                "reference": ref,
            }
            for l, ref in sorted(
                expert.references.items(),
                key=lambda kv: (kv[0].cause.display, kv[0].effect.display),
            )
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


# -- deliberations (CSV: cause,effect,score,note) ------------------------------

def load_deliberations(
    path: Path, catalog: AttributeCatalog
) -> dict[CausalLink, int]:
    decisions = {}
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            link = parse_link(catalog, row["cause"], row["effect"])
            decisions[link] = int(row["score"])
    return decisions


def dump_deliberation_worklist(worklist: Iterable[CausalLink]) -> str:
    out = _io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["cause", "effect", "score", "note"])
    for link in worklist:
        writer.writerow([link.cause.display, link.effect.display, "", ""])
    return out.getvalue()


# -- credibility map (CSV: cause,effect,cs,provenance) -------------------------

def dump_credibility(cred: CredibilityMap) -> str:
    out = _io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["cause", "effect", "cs", "provenance"])
    for link in sorted(
        cred.links(), key=lambda l: (l.cause.display, l.effect.display)
    ):
        writer.writerow(
            [
                link.cause.display,
                link.effect.display,
                cred.cs(link),
                cred.provenance[link].value,
            ]
        )
    return out.getvalue()


def load_credibility(path: Path, catalog: AttributeCatalog) -> CredibilityMap:
    scores: dict[CausalLink, Optional[int]] = {}
    provenance: dict[CausalLink, Provenance] = {}
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            link = parse_link(catalog, row["cause"], row["effect"])
            scores[link] = int(row["cs"])
            provenance[link] = Provenance(row["provenance"])
    return CredibilityMap(scores, provenance)


# -- review queue (JSON lines) -------------------------------------------------

def review_record_to_dict(record: ReviewRecord) -> dict:
    return {
        "worker_id": record.worker_id,
        "network": network_to_dict(record.network),
        "zero_cs_count": record.zero_cs_count,
        "auto_flagged": record.auto_flagged,
        "decision": record.decision.value,
        "reviewer_note": record.reviewer_note,
        "decided_at": record.decided_at,
    }


def review_record_from_dict(
    payload: dict, catalog: AttributeCatalog
) -> ReviewRecord:
    return ReviewRecord(
        worker_id=payload["worker_id"],
        network=network_from_dict(payload["network"], catalog),
        zero_cs_count=payload["zero_cs_count"],
        auto_flagged=payload["auto_flagged"],
        decision=Decision(payload["decision"]),
        reviewer_note=payload["reviewer_note"],
        decided_at=payload["decided_at"],
    )


def dump_review_records(records: Iterable[ReviewRecord]) -> str:
    return "".join(
        json.dumps(review_record_to_dict(r)) + "\n" for r in records
    )


def load_review_records(
    path: Path, catalog: AttributeCatalog
) -> list[ReviewRecord]:
    records = []
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(review_record_from_dict(json.loads(line), catalog))
    return records


# -- analysis exports ----------------------------------------------------------

def dump_adjacency_csv(agg: AggregatedNetwork, catalog: AttributeCatalog) -> str:
    """Vote-count adjacency matrix, rows = causes, columns = effects."""
    attrs = list(catalog)
    out = _io.StringIO()
    writer = csv.writer(out)
    writer.writerow([""] + [a.display for a in attrs])
    for cause in attrs:
        row = [cause.display]
        for effect in attrs:
            if cause == effect or cause.base == effect.base:
                row.append("")
            else:
                row.append(agg.votes.get(CausalLink(cause, effect), 0))
        writer.writerow(row)
    return out.getvalue()


def dump_histogram_csv(rows: Iterable[HistogramRow]) -> str:
    out = _io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["type", "score", "count_all", "count_visible"])
    for row in rows:
        writer.writerow(
            [row.link_class.value, row.score_label, row.count_all, row.count_visible]
        )
    return out.getvalue()


# -- illusion queries ----------------------------------------------------------

def load_query(path: Path, catalog: AttributeCatalog) -> IllusionQuery:
    with open(path) as handle:
        payload = json.load(handle)
    return IllusionQuery(
        bogus_causes=frozenset(
            catalog.by_display(d) for d in payload["bogus"]
        ),
        true_cause=catalog.by_display(payload["true"]),
        outcomes=frozenset(catalog.by_display(d) for d in payload["outcome"]),
        max_hops=payload.get("max_hops", 4),
    )


def fraction_repr(value: Fraction) -> dict:
    return {
        "numerator": value.numerator,
        "denominator": value.denominator,
        "value": float(value),
    }
