"""HTTP+JSON API over the study service.

Environment variables consumed by build_default_service: BIND_ADDR,
DATA_DIR, PROFILE, CATALOG_PATH, SASSY_TABLE_PATH, STUDY_CONFIG_PATH,
CREDIBILITY_PATH, CORS_ORIGIN. See docs/api.md for request/response
schemas.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .. import io as ccio
from ..core import Alteration, AlterationAction, FINAL_PROFILE, FORMATIVE_PROFILE
from ..qualitycontrol import AlreadyDecided, Decision
from .sassy import SassyTable
from .service import (
    ServiceConfig,
    ServiceError,
    Stage,
    StudyService,
    network_dot,
)
from ..core import EmptyNetwork, generate_narrative

ERROR_STATUS = {
    "UnknownSession": 404,
    "WrongStage": 409,
    "CohortClosed": 403,
    "CohortOpen": 409,
    "AlreadyDecided": 409,
}
DATA_ROOT = Path(__file__).resolve().parents[3] / "data"


class TestAnswer(BaseModel):
    cause: str
    effect: str


class DemographicsPayload(BaseModel):
    demographics: list[str]
    sassy: list[int]


class LinkPayload(BaseModel):
    cause: str
    effect: str


class AlterationItem(BaseModel):
    link_index: int
    action: Alteration


class AlterationPayload(BaseModel):
    actions: list[AlterationItem] = Field(default_factory=list)


class ConfidencePayload(BaseModel):
    confidence: int


class UsabilityPayload(BaseModel):
    ratings: list[int]


class ReviewPayload(BaseModel):
    note: str = ""


def session_view(service: StudyService, session) -> dict:
    """Client-facing session state: snapshot plus derived rendering data."""
    state = session.snapshot()
    net = session.network
    state["remaining_rounds"] = max(
        0, service.profile.links_per_network - len(net.links)
    )
    state["selected_nodes"] = [n.display for n in net.nodes()]
    state["allow_delete"] = service.profile.allow_delete
    state["dot"] = network_dot(net) if net.links else None
    try:
        state["narrative"] = generate_narrative(net)
    except EmptyNetwork:
        state["narrative"] = None
    return state


def create_app(service: StudyService) -> FastAPI:
    app = FastAPI(title="causalcrowd collection service")
    origin = os.environ.get("CORS_ORIGIN", "*")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=ERROR_STATUS.get(exc.code, 422),
            content={"error": exc.code, "detail": str(exc)},
        )

    @app.exception_handler(AlreadyDecided)
    async def already_decided_handler(request: Request, exc: AlreadyDecided):
        return JSONResponse(
            status_code=409, content={"error": "AlreadyDecided", "detail": str(exc)}
        )

    @app.post("/sessions", status_code=201)
    def create_session():
        session = service.create_session()
        return session_view(service, session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_view(service, service.get_session(session_id))

    @app.post("/sessions/{session_id}/test")
    def submit_test(session_id: str, payload: TestAnswer):
        passed = service.submit_test(session_id, payload.cause, payload.effect)
        return {
            "passed": passed,
            "stage": service.get_session(session_id).stage.value,
        }

    @app.post("/sessions/{session_id}/demographics")
    def submit_demographics(session_id: str, payload: DemographicsPayload):
        segment = service.submit_demographics(
            session_id, payload.demographics, payload.sassy
        )
        return {"segment": segment.value, "stage": Stage.CREATION.value}

    @app.post("/sessions/{session_id}/links")
    def submit_link(session_id: str, payload: LinkPayload):
        result = service.submit_link(session_id, payload.cause, payload.effect)
        result.update(session_view(service, service.get_session(session_id)))
        return result

    @app.post("/sessions/{session_id}/alterations")
    def submit_alterations(session_id: str, payload: AlterationPayload):
        service.submit_alteration(
            session_id,
            [
                AlterationAction(item.link_index, item.action)
                for item in payload.actions
            ],
        )
        return session_view(service, service.get_session(session_id))

    @app.post("/sessions/{session_id}/confidence")
    def submit_confidence(session_id: str, payload: ConfidencePayload):
        service.submit_confidence(session_id, payload.confidence)
        return {"stage": Stage.USABILITY.value}

    @app.post("/sessions/{session_id}/usability")
    def submit_usability(session_id: str, payload: UsabilityPayload):
        service.submit_usability(session_id, payload.ratings)
        return {
            "stage": Stage.COMPLETE.value,
            "verification_code": service.complete_session(session_id),
        }

    @app.post("/sessions/{session_id}/complete")
    def complete_session(session_id: str):
        return {"verification_code": service.complete_session(session_id)}

    @app.get("/sessions/{session_id}/network.dot", response_class=PlainTextResponse)
    def session_dot(session_id: str):
        return network_dot(service.get_session(session_id).network)

    @app.get("/catalog")
    def catalog():
        return json.loads(ccio.dump_catalog(service.catalog))

    @app.get("/admin/review")
    def review_queue():
        return {
            "records": [
                ccio.review_record_to_dict(r)
                for r in service.review_queue.records()
            ]
        }

    @app.post("/admin/review/{worker_id}/accept")
    def review_accept(worker_id: str, payload: ReviewPayload):
        record = service.review(worker_id, Decision.ACCEPT, payload.note)
        return ccio.review_record_to_dict(record)

    @app.post("/admin/review/{worker_id}/reject")
    def review_reject(worker_id: str, payload: ReviewPayload):
        record = service.review(worker_id, Decision.REJECT, payload.note)
        return ccio.review_record_to_dict(record)

    @app.post("/admin/cohorts/close")
    def close_cohort():
        return {"open_cohort": service.close_cohort()}

    @app.post("/admin/study/close")
    def close_study():
        service.close_study()
        return {"study_open": False}

    @app.get("/admin/cohorts/{cohort}")
    def cohort_report(cohort: int):
        return service.cohort_report(cohort)

    return app


def build_default_service() -> StudyService:
    catalog_path = os.environ.get(
        "CATALOG_PATH", str(DATA_ROOT / "catalog_final.json")
    )
    sassy_path = os.environ.get(
        "SASSY_TABLE_PATH", str(DATA_ROOT / "sassy_table.json")
    )
    study_config_path = os.environ.get(
        "STUDY_CONFIG_PATH", str(DATA_ROOT / "study_config.json")
    )
    profile_name = os.environ.get("PROFILE", "final")
    profile = FORMATIVE_PROFILE if profile_name == "formative" else FINAL_PROFILE
    catalog = ccio.load_catalog(Path(catalog_path))
    with open(study_config_path) as handle:
        study_config = json.load(handle)
    credibility = None
    credibility_path = os.environ.get("CREDIBILITY_PATH")
    if credibility_path:
        credibility = ccio.load_credibility(Path(credibility_path), catalog)
    config = ServiceConfig(
        catalog=catalog,
        gate_cause=study_config["gate_link"]["cause"],
        gate_effect=study_config["gate_link"]["effect"],
        sassy_table=SassyTable.load(Path(sassy_path)),
        profile=profile,
        data_dir=os.environ.get("DATA_DIR"),
        credibility=credibility,
    )
    return StudyService(config)


def main() -> None:
    import uvicorn

    bind = os.environ.get("BIND_ADDR", "127.0.0.1:8000")
    host, _, port = bind.partition(":")
    app = create_app(build_default_service())
    uvicorn.run(app, host=host, port=int(port or "8000"))


if __name__ == "__main__":
    main()
