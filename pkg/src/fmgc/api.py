"""HTTP/JSON API over models, matrices and group sessions.

Sessions use optimistic concurrency: every mutating route requires the
client's last-seen ``version`` and returns 409 on mismatch. Mutations are
applied to a working copy and persisted before the response is sent, so a
4xx never leaves partial state behind. Per-session mutations are
serialized with a lock; reads return plain snapshots.
"""

from __future__ import annotations

import copy
import threading
from typing import Annotated, Any, Literal, Union

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, ValidationError

from . import jsonio
from .diagnosis import apply_diagnosis
from .errors import (
    FmgcError,
    KindMismatchError,
    NotFoundError,
    PhaseError,
    StorageError,
)
from .grouprec import recommend_next_constraint
from .model import FeatureModel, Pref, Relation, constraint_importance, iter_tree, parse_model, serialize_model
from .negotiation import (
    AddConstraintChange,
    AddFeatureChange,
    SetPreferenceChange,
    accept,
    generate_patterns,
    propose,
    reconfigure,
    step,
)
from .preferences import (
    InteractionMatrix,
    ItemKind,
    Session,
    load_interactions,
    set_preference,
)
from .storage import DocumentStore


class VersionConflictError(FmgcError):
    code = "version_conflict"


# -- request bodies ---------------------------------------------------------


class CreateModelBody(BaseModel):
    text: str


class CreateSessionBody(BaseModel):
    model_id: str
    members: list[str] = Field(min_length=1)
    matrix_ids: dict[Literal["order", "choice"], str] = Field(default_factory=dict)


class Versioned(BaseModel):
    version: int


class PutPreferenceBody(Versioned):
    value: Literal["include", "exclude", "unstated"]


class ProposalBody(Versioned):
    proposer: str
    value: Literal["include", "exclude"]
    rationale: str = ""


class AcceptBody(Versioned):
    member: str


class SetPreferenceChangeBody(BaseModel):
    kind: Literal["set_preference"]
    member: str
    feature: str
    value: Literal["include", "exclude", "unstated"]


class AddFeatureChangeBody(BaseModel):
    kind: Literal["add_feature"]
    feature: str
    parent: str
    relation: Literal["mandatory", "optional"]


class AddConstraintChangeBody(BaseModel):
    kind: Literal["add_constraint"]
    expr: str


ChangeBody = Union[SetPreferenceChangeBody, AddFeatureChangeBody, AddConstraintChangeBody]


class ReconfigureBody(Versioned):
    changes: list[Annotated[ChangeBody, Field(discriminator="kind")]]


# -- service state ----------------------------------------------------------


class SessionBox:
    """A session plus its storage identity."""

    def __init__(self, session: Session, model_id: str, matrix_ids: dict[str, str], version: int):
        self.session = session
        self.model_id = model_id
        self.matrix_ids = matrix_ids
        self.version = version


class Service:
    def __init__(self, data_dir: str):
        self.store = DocumentStore(data_dir)
        self._sessions: dict[str, SessionBox] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    # -- documents ----------------------------------------------------------

    def load_model(self, model_id: str) -> tuple[FeatureModel, int]:
        doc = self.store.load("model", model_id)
        return jsonio.model_from_payload(doc.payload), doc.version

    def load_matrix(self, matrix_id: str) -> InteractionMatrix:
        doc = self.store.load("matrix", matrix_id)
        return jsonio.matrix_from_payload(doc.payload)

    def get_box(self, session_id: str) -> SessionBox:
        box = self._sessions.get(session_id)
        if box is not None:
            return box
        doc = self.store.load("session", session_id)
        payload = doc.payload
        matrix_ids = payload["matrix_ids"]
        order = self.load_matrix(matrix_ids["order"]) if "order" in matrix_ids else None
        choice = self.load_matrix(matrix_ids["choice"]) if "choice" in matrix_ids else None
        session = jsonio.session_from_payload(payload, order, choice)
        box = SessionBox(session, payload["model_id"], matrix_ids, doc.version)
        self._sessions[session_id] = box
        return box

    def persist(self, box: SessionBox) -> None:
        payload = jsonio.session_to_payload(box.session, box.model_id, box.matrix_ids)
        doc = self.store.save("session", box.session.id, payload)
        box.version = doc.version
        self._sessions[box.session.id] = box


# -- snapshots ---------------------------------------------------------------


def model_view(model: FeatureModel) -> dict[str, Any]:
    return {
        "name": model.name,
        "root": model.root,
        "features": list(model.features),
        "tree": [
            {"feature": f, "parent": parent, "relation": relation}
            for f, parent, relation in iter_tree(model)
        ],
        "groups": [
            {"parent": g.parent, "kind": g.kind.value, "members": list(g.members)}
            for g in model.groups
        ],
        "constraints": [
            {"id": c.id, "text": c.text, "importance": constraint_importance(model, c.id)}
            for c in model.constraints
        ],
        "text": serialize_model(model),
    }


def diagnosis_view(session: Session) -> dict[str, Any]:
    report = session.diagnosis_report
    if report is None:
        return {"complete": None, "diagnoses": []}
    return {
        "complete": report.complete,
        "diagnoses": [
            {
                "retract": [
                    {"feature": d.feature, "value": d.value.value}
                    for d in sorted(diag.retract, key=lambda d: d.feature)
                ],
                "member_adaptations": diag.member_adaptations,
                "group_score": diag.group_score,
            }
            for diag in report.diagnoses
        ],
    }


def conflicts_view(session: Session) -> list[dict[str, Any]]:
    records = sorted(session.conflicts, key=lambda c: c.feature)
    return [jsonio.conflict_to_payload(c) for c in records]


def snapshot(box: SessionBox) -> dict[str, Any]:
    session = box.session
    return {
        "id": session.id,
        "version": box.version,
        "phase": session.phase.value,
        "model_id": box.model_id,
        "matrix_ids": box.matrix_ids,
        "members": list(session.members),
        "model": model_view(session.model),
        "stated": {
            m: {f: v.value for f, v in sorted(session.stated[m].items())}
            for m in session.members
        },
        "predicted": {
            m: dict(sorted(session.predicted[m].items())) for m in session.members
        },
        "visited": {m: list(session.visited_constraints[m]) for m in session.members},
        "decisions": {f: v.value for f, v in sorted(session.group_decisions.items())},
        "conflicts": conflicts_view(session),
        "proposals": [
            jsonio.proposal_to_payload(session.proposals[pid])
            for pid in sorted(session.proposals)
        ],
        "diagnoses": diagnosis_view(session),
        "prediction_threshold": session.prediction_threshold,
    }


# -- app ----------------------------------------------------------------------


def create_app(data_dir: str, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="fmgc", docs_url=None, redoc_url=None)
    service = Service(data_dir)
    app.state.service = service

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"code": "malformed", "message": str(exc.errors()[:3])}
        )

    @app.exception_handler(FmgcError)
    async def domain_error(_request: Request, exc: FmgcError) -> JSONResponse:
        if isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, (PhaseError, VersionConflictError)):
            status = 409
        elif isinstance(exc, StorageError):
            status = 500
        else:
            status = 422
        return JSONResponse(status_code=status, content={"code": exc.code, "message": exc.message})

    def mutate(session_id: str, version: int, operation) -> dict[str, Any]:
        """Run a session mutation under the per-session lock.

        The operation receives a working copy; only a successful run is
        persisted and swapped in, so failed requests leave no trace.
        """
        with service.lock_for(session_id):
            box = service.get_box(session_id)
            if version != box.version:
                raise VersionConflictError(
                    f"version {version} does not match current {box.version}"
                )
            working = SessionBox(
                copy.deepcopy(box.session), box.model_id, dict(box.matrix_ids), box.version
            )
            operation(working.session)
            service.persist(working)
            return snapshot(working)

    # -- models ---------------------------------------------------------------

    @app.post("/api/models", status_code=201)
    def create_model(body: CreateModelBody) -> dict[str, Any]:
        model = parse_model(body.text)
        model_id = service.store.new_id()
        doc = service.store.save("model", model_id, jsonio.model_to_payload(model))
        return {
            "id": model_id,
            "version": doc.version,
            "name": model.name,
            "feature_count": len(model.features),
            "constraint_count": len(model.constraints),
        }

    @app.get("/api/models/{model_id}")
    def get_model(model_id: str) -> dict[str, Any]:
        model, version = service.load_model(model_id)
        return {"id": model_id, "version": version, **model_view(model)}

    # -- matrices ---------------------------------------------------------------

    @app.post("/api/matrices", status_code=201)
    async def create_matrix(
        request: Request, kind: Literal["order", "choice"] = Query()
    ) -> dict[str, Any]:
        text = (await request.body()).decode("utf-8")
        matrix = load_interactions(text, ItemKind(kind))
        matrix_id = service.store.new_id()
        doc = service.store.save("matrix", matrix_id, jsonio.matrix_to_payload(matrix))
        return {
            "id": matrix_id,
            "version": doc.version,
            "kind": kind,
            "member_count": len(matrix.members),
            "item_count": len(matrix.items),
            "rating_count": len(matrix.ratings),
        }

    # -- sessions ---------------------------------------------------------------

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict[str, Any]:
        model, _ = service.load_model(body.model_id)
        matrices: dict[str, InteractionMatrix] = {}
        for slot, matrix_id in body.matrix_ids.items():
            matrix = service.load_matrix(matrix_id)
            expected = ItemKind.CONSTRAINT_ORDER if slot == "order" else ItemKind.FEATURE_CHOICE
            if matrix.item_kind is not expected:
                raise KindMismatchError(
                    f"matrix '{matrix_id}' has kind '{matrix.item_kind.value}', expected '{expected.value}'"
                )
            matrices[slot] = matrix
        try:
            session = Session(
                id=service.store.new_id(),
                model=model,
                members=list(body.members),
                order_matrix=matrices.get("order"),
                choice_matrix=matrices.get("choice"),
            )
        except ValueError as exc:
            raise FmgcError(str(exc)) from exc
        box = SessionBox(session, body.model_id, dict(body.matrix_ids), 0)
        with service.lock_for(session.id):
            service.persist(box)
        return snapshot(box)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str) -> dict[str, Any]:
        with service.lock_for(session_id):
            return snapshot(service.get_box(session_id))

    @app.put("/api/sessions/{session_id}/members/{member}/preferences/{feature}")
    def put_preference(
        session_id: str, member: str, feature: str, body: PutPreferenceBody
    ) -> dict[str, Any]:
        return mutate(
            session_id,
            body.version,
            lambda s: set_preference(s, member, feature, Pref(body.value)),
        )

    @app.post("/api/sessions/{session_id}/step")
    def step_session(session_id: str, body: Versioned) -> dict[str, Any]:
        return mutate(session_id, body.version, step)

    @app.get("/api/sessions/{session_id}/next-constraint")
    def next_constraint(session_id: str) -> dict[str, Any]:
        with service.lock_for(session_id):
            box = service.get_box(session_id)
            session = box.session
            recommendation = recommend_next_constraint(
                session, session.order_matrix, session.neighborhood_size
            )
        base = {"version": box.version, "phase": session.phase.value}
        if recommendation is None:
            return {**base, "constraint": None, "group_score": None, "tie_break_used": None}
        return {
            **base,
            "constraint": recommendation.constraint,
            "group_score": recommendation.group_score,
            "tie_break_used": recommendation.tie_break_used.value,
        }

    @app.get("/api/sessions/{session_id}/conflicts")
    def get_conflicts(session_id: str) -> dict[str, Any]:
        with service.lock_for(session_id):
            box = service.get_box(session_id)
            return {
                "version": box.version,
                "phase": box.session.phase.value,
                "conflicts": conflicts_view(box.session),
            }

    @app.get("/api/sessions/{session_id}/conflicts/{feature}/patterns")
    def get_patterns(session_id: str, feature: str) -> dict[str, Any]:
        with service.lock_for(session_id):
            box = service.get_box(session_id)
            session = box.session
            session.model.require_feature(feature)
            record = session.conflict_for(feature)
            if record is None:
                raise NotFoundError(f"no conflict recorded for feature '{feature}'")
            patterns = generate_patterns(session, record)
        return {
            "version": box.version,
            "phase": session.phase.value,
            "patterns": [
                {
                    "kind": p.kind.value,
                    "feature": p.feature,
                    "alternative": p.alternative,
                    "text": p.text,
                    "evidence": list(p.evidence),
                }
                for p in patterns
            ],
        }

    @app.post("/api/sessions/{session_id}/conflicts/{feature}/proposals", status_code=201)
    def post_proposal(session_id: str, feature: str, body: ProposalBody) -> dict[str, Any]:
        def operation(session: Session) -> None:
            session.model.require_feature(feature)
            record = session.conflict_for(feature)
            if record is None:
                raise NotFoundError(f"no conflict recorded for feature '{feature}'")
            propose(session, record, body.proposer, Pref(body.value), body.rationale)

        return mutate(session_id, body.version, operation)

    @app.post("/api/sessions/{session_id}/proposals/{proposal_id}/accept")
    def accept_proposal(session_id: str, proposal_id: str, body: AcceptBody) -> dict[str, Any]:
        return mutate(session_id, body.version, lambda s: accept(s, proposal_id, body.member))

    @app.get("/api/sessions/{session_id}/diagnoses")
    def get_diagnoses(session_id: str) -> dict[str, Any]:
        with service.lock_for(session_id):
            box = service.get_box(session_id)
            return {
                "version": box.version,
                "phase": box.session.phase.value,
                **diagnosis_view(box.session),
            }

    @app.post("/api/sessions/{session_id}/diagnoses/{index}/apply")
    def apply_diagnosis_route(session_id: str, index: int, body: Versioned) -> dict[str, Any]:
        return mutate(session_id, body.version, lambda s: apply_diagnosis(s, index))

    @app.post("/api/sessions/{session_id}/reconfigure")
    def reconfigure_session(session_id: str, body: ReconfigureBody) -> dict[str, Any]:
        changes = []
        for change in body.changes:
            if isinstance(change, SetPreferenceChangeBody):
                changes.append(
                    SetPreferenceChange(change.member, change.feature, Pref(change.value))
                )
            elif isinstance(change, AddFeatureChangeBody):
                changes.append(
                    AddFeatureChange(change.feature, change.parent, Relation(change.relation))
                )
            else:
                changes.append(AddConstraintChange(change.expr))
        return mutate(session_id, body.version, lambda s: reconfigure(s, changes))

    return app
