"""HTTP facade over labeling sessions.

Serves scatter views to a browser client and accepts polygon selections
back.  View coordinates go out normalized to [-1, 1] per axis (clients
shouldn't care about embedding scale); incoming polygons are mapped back
through the same affine transform before resolution.

True classes never leave the server through /view, /selection, /commit or
/export — only seed labels and the session's own assignments do.  The
/score endpoint is the deliberate exception for experiment harnesses.
"""

import os
import uuid
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import datasets as ds_mod
from .errors import (
    EmptySelectionError,
    InvalidParameter,
    ScatterLabelError,
    SequencingError,
    SessionFinishedError,
    ViewStackError,
)
from .metrics import f1_report
from .session import Session


class CreateSessionBody(BaseModel):
    generator: str
    params: dict = Field(default_factory=dict)
    r_unlabeled: float = 0.9
    split_seed: int = 0
    preprocess: str = "zscore"
    dr_method: str = "pca"
    dr_params: dict = Field(default_factory=dict)
    eta: float = 0.85


class SelectionBody(BaseModel):
    polygon: list
    proposed_class: Optional[int] = None


def _axis_affine(coords):
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    center = (hi + lo) / 2.0
    half = (hi - lo) / 2.0
    half = np.where(half > 0, half, 1.0)
    return center, half


def _view_payload(session):
    view = session.view
    center, half = _axis_affine(view.coords)
    norm = (view.coords - center) / half
    status = session.ledger.status[view.scope]
    labels = session.ledger.label[view.scope]
    return {
        "view_id": int(view.view_id),
        "depth": int(session.depth),
        "n": int(view.scope.size),
        "points": [[float(x), float(y)] for x, y in norm],
        "status": [int(s) for s in status],
        "labels": [int(c) for c in labels],
        "lineage": [[str(op), dict(params), int(size)]
                    for op, params, size in view.lineage],
        "can_go_back": session.depth > 1,
        "class_count": int(session.dataset.class_count),
        "eta": float(session.eta),
        "unlabeled_total": int(session.ledger.unlabeled_count()),
    }


def _denormalize_polygon(session, polygon):
    try:
        poly = np.asarray(polygon, dtype=float)
    except (TypeError, ValueError):
        raise HTTPException(422, "polygon must be a list of [x, y] pairs")
    if poly.ndim != 2 or poly.shape[1] != 2:
        raise HTTPException(422, "polygon must be a list of [x, y] pairs")
    center, half = _axis_affine(session.view.coords)
    return poly * half + center


def create_app(data_dir=None):
    app = FastAPI(title="scatterlabel")
    sessions = {}
    app.state.sessions = sessions
    app.state.data_dir = data_dir

    def get_session(session_id):
        if session_id not in sessions:
            raise HTTPException(404, f"no session {session_id}")
        return sessions[session_id]

    @app.get("/datasets")
    def list_datasets():
        return {
            "generators": [
                {"name": "two_moons", "params": {"n": 200, "noise": 0.08, "seed": 0}},
                {"name": "x_shape", "params": {"n": 200, "noise": 0.05, "seed": 0}},
                {"name": "four_gaussians", "params": {"n_per_class": 100, "seed": 0}},
            ]
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        spec = dict(body.params)
        spec["generator"] = body.generator
        try:
            dataset = ds_mod.generate(spec)
            split = ds_mod.make_split(dataset, body.r_unlabeled, body.split_seed)
            log_path = None
            if data_dir:
                os.makedirs(data_dir, exist_ok=True)
            session_id = uuid.uuid4().hex[:12]
            if data_dir:
                log_path = os.path.join(data_dir, f"session_{session_id}.jsonl")
            session = Session(
                dataset, body.preprocess, body.dr_method, body.dr_params,
                split, eta=body.eta, log_path=log_path,
            )
        except KeyError as exc:
            raise HTTPException(422, f"dataset spec is missing {exc}")
        except ScatterLabelError as exc:
            raise HTTPException(422, str(exc))
        sessions[session_id] = session
        return {"session_id": session_id, "view": _view_payload(session)}

    @app.get("/sessions/{session_id}/view")
    def get_view(session_id: str):
        return {"view": _view_payload(get_session(session_id))}

    @app.post("/sessions/{session_id}/selection")
    def preview_selection(session_id: str, body: SelectionBody):
        session = get_session(session_id)
        poly = _denormalize_polygon(session, body.polygon)
        try:
            members, hist = session.resolve_selection(poly)
        except EmptySelectionError as exc:
            return {"member_count": 0, "histogram": {}, "majority": None,
                    "purity": None, "empty_reason": str(exc)}
        except InvalidParameter as exc:
            raise HTTPException(422, str(exc))
        total = sum(hist.values())
        majority = (min((c for c in hist), key=lambda c: (-hist[c], c))
                    if hist else None)
        return {
            "member_count": int(members.size),
            "histogram": {str(k): int(v) for k, v in hist.items()},
            "majority": majority,
            "purity": (hist[majority] / total) if total else None,
        }

    @app.post("/sessions/{session_id}/commit")
    def commit(session_id: str, body: SelectionBody):
        session = get_session(session_id)
        poly = _denormalize_polygon(session, body.polygon)
        try:
            outcome = session.commit_selection(poly, proposed_class=body.proposed_class)
        except (SessionFinishedError, SequencingError) as exc:
            raise HTTPException(409, str(exc))
        except (EmptySelectionError, InvalidParameter) as exc:
            raise HTTPException(422, str(exc))
        except ScatterLabelError as exc:
            raise HTTPException(422, str(exc))
        return {
            "outcome": outcome.outcome,
            "assigned_class": outcome.assigned_class,
            "member_count": int(outcome.member_indices.size),
            "reason": outcome.reason,
            "override": bool(outcome.override),
            "view": _view_payload(session),
        }

    @app.post("/sessions/{session_id}/back")
    def go_back(session_id: str):
        session = get_session(session_id)
        try:
            session.go_back()
        except (ViewStackError, SessionFinishedError) as exc:
            raise HTTPException(409, str(exc))
        return {"view": _view_payload(session)}

    @app.post("/sessions/{session_id}/finish")
    def finish(session_id: str):
        session = get_session(session_id)
        ledger = session.finish()
        return {
            "finished": True,
            "labeled": int(ledger.labeled_mask().sum()),
            "unlabeled": int(ledger.unlabeled_count()),
        }

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str):
        session = get_session(session_id)
        try:
            idx, labels, status = session.export_labels()
        except SequencingError as exc:
            raise HTTPException(409, str(exc))
        return {
            "indices": [int(i) for i in idx],
            "labels": [int(c) for c in labels],
            "status": [int(s) for s in status],
        }

    @app.get("/sessions/{session_id}/score")
    def score(session_id: str):
        session = get_session(session_id)
        report = f1_report(session.ledger.label, session.dataset.y,
                           session.dataset.class_count)
        return {
            "macro_f1": report.macro_f1,
            "accuracy": report.accuracy,
            "coverage": report.coverage,
            "per_class_f1": report.per_class_f1,
        }

    return app
