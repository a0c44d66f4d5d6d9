"""Canonical JSON payloads for models, matrices and sessions.

Payloads are plain dicts with deterministic content so the storage layer
can guarantee byte-identical round trips. Sessions embed their model as
canonical text (the model may diverge from the originally posted document
after reconfiguration).
"""

from __future__ import annotations

from typing import Any

from .diagnosis import Diagnosis, DiagnosisReport
from .model import Decision, FeatureModel, Pref, parse_model, serialize_model
from .negotiation import Proposal
from .preferences import (
    ConflictRecord,
    ConflictStatus,
    InteractionMatrix,
    ItemKind,
    Provenance,
    Session,
    SessionPhase,
)


def model_to_payload(model: FeatureModel) -> dict[str, Any]:
    return {"name": model.name, "text": serialize_model(model)}


def model_from_payload(payload: dict[str, Any]) -> FeatureModel:
    return parse_model(payload["text"])


def matrix_to_payload(matrix: InteractionMatrix) -> dict[str, Any]:
    return {
        "kind": matrix.item_kind.value,
        "members": list(matrix.members),
        "items": list(matrix.items),
        "ratings": [
            [member, item, matrix.ratings[(member, item)]]
            for member, item in sorted(matrix.ratings)
        ],
    }


def matrix_from_payload(payload: dict[str, Any]) -> InteractionMatrix:
    return InteractionMatrix(
        ItemKind(payload["kind"]),
        tuple(payload["members"]),
        tuple(payload["items"]),
        {(m, i): float(r) for m, i, r in payload["ratings"]},
    )


def _decision_to_payload(decision: Decision) -> dict[str, Any]:
    return {"feature": decision.feature, "value": decision.value.value}


def _decisions_to_payload(decisions) -> list[dict[str, Any]]:
    return [_decision_to_payload(d) for d in sorted(decisions, key=lambda d: d.feature)]


def _decision_from_payload(payload: dict[str, Any]) -> Decision:
    return Decision(payload["feature"], Pref(payload["value"]))


def conflict_to_payload(record: ConflictRecord) -> dict[str, Any]:
    return {
        "feature": record.feature,
        "positions": {m: v.value for m, v in sorted(record.positions.items())},
        "provenance": {m: p.value for m, p in sorted(record.provenance.items())},
        "status": record.status.value,
        "resolved_value": record.resolved_value.value if record.resolved_value else None,
    }


def _conflict_from_payload(payload: dict[str, Any]) -> ConflictRecord:
    return ConflictRecord(
        feature=payload["feature"],
        positions={m: Pref(v) for m, v in payload["positions"].items()},
        provenance={m: Provenance(p) for m, p in payload["provenance"].items()},
        status=ConflictStatus(payload["status"]),
        resolved_value=Pref(payload["resolved_value"]) if payload["resolved_value"] else None,
    )


def proposal_to_payload(proposal: Proposal) -> dict[str, Any]:
    return {
        "id": proposal.id,
        "feature": proposal.feature,
        "value": proposal.value.value,
        "proposer": proposal.proposer,
        "rationale": proposal.rationale,
        "acceptances": sorted(proposal.acceptances),
    }


def _proposal_from_payload(payload: dict[str, Any]) -> Proposal:
    return Proposal(
        id=payload["id"],
        feature=payload["feature"],
        value=Pref(payload["value"]),
        proposer=payload["proposer"],
        rationale=payload["rationale"],
        acceptances=set(payload["acceptances"]),
    )


def _report_to_payload(report: DiagnosisReport) -> dict[str, Any]:
    return {
        "complete": report.complete,
        "ranked": report.ranked,
        "session_revision": report.session_revision,
        "decisions": _decisions_to_payload(report.decisions),
        "diagnoses": [
            {
                "retract": _decisions_to_payload(d.retract),
                "member_adaptations": dict(sorted(d.member_adaptations.items()))
                if d.member_adaptations is not None
                else None,
                "group_score": d.group_score,
            }
            for d in report.diagnoses
        ],
    }


def _report_from_payload(payload: dict[str, Any]) -> DiagnosisReport:
    return DiagnosisReport(
        diagnoses=tuple(
            Diagnosis(
                retract=frozenset(_decision_from_payload(p) for p in d["retract"]),
                member_adaptations=d["member_adaptations"],
                group_score=d["group_score"],
            )
            for d in payload["diagnoses"]
        ),
        complete=payload["complete"],
        decisions=frozenset(_decision_from_payload(p) for p in payload["decisions"]),
        ranked=payload["ranked"],
        session_revision=payload["session_revision"],
    )


def session_to_payload(
    session: Session,
    model_id: str | None = None,
    matrix_ids: dict[str, str] | None = None,
) -> dict[str, Any]:
    return {
        "id": session.id,
        "model_id": model_id,
        "matrix_ids": dict(sorted((matrix_ids or {}).items())),
        "model_text": serialize_model(session.model),
        "members": list(session.members),
        "phase": session.phase.value,
        "revision": session.revision,
        "prediction_threshold": session.prediction_threshold,
        "neighborhood_size": session.neighborhood_size,
        "proposal_seq": session._proposal_seq,
        "stated": {
            m: {f: v.value for f, v in sorted(session.stated[m].items())}
            for m in session.members
        },
        "predicted": {
            m: dict(sorted(session.predicted[m].items())) for m in session.members
        },
        "visited": {m: list(session.visited_constraints[m]) for m in session.members},
        "decisions": {f: v.value for f, v in sorted(session.group_decisions.items())},
        "conflicts": [conflict_to_payload(c) for c in session.conflicts],
        "proposals": [
            proposal_to_payload(session.proposals[pid]) for pid in sorted(session.proposals)
        ],
        "diagnosis_report": _report_to_payload(session.diagnosis_report)
        if session.diagnosis_report
        else None,
    }


def session_from_payload(
    payload: dict[str, Any],
    order_matrix: InteractionMatrix | None = None,
    choice_matrix: InteractionMatrix | None = None,
) -> Session:
    session = Session(
        id=payload["id"],
        model=parse_model(payload["model_text"]),
        members=list(payload["members"]),
        stated={
            m: {f: Pref(v) for f, v in prefs.items()}
            for m, prefs in payload["stated"].items()
        },
        predicted={m: dict(p) for m, p in payload["predicted"].items()},
        visited_constraints={m: list(v) for m, v in payload["visited"].items()},
        group_decisions={f: Pref(v) for f, v in payload["decisions"].items()},
        conflicts=[_conflict_from_payload(c) for c in payload["conflicts"]],
        phase=SessionPhase(payload["phase"]),
        prediction_threshold=payload["prediction_threshold"],
        order_matrix=order_matrix,
        choice_matrix=choice_matrix,
        neighborhood_size=payload["neighborhood_size"],
        revision=payload["revision"],
    )
    session.proposals = {
        p["id"]: _proposal_from_payload(p) for p in payload["proposals"]
    }
    session._proposal_seq = payload["proposal_seq"]
    if payload["diagnosis_report"] is not None:
        session.diagnosis_report = _report_from_payload(payload["diagnosis_report"])
    return session
