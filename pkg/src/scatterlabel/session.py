"""Interactive labeling sessions.

A session owns a label ledger, a stack of 2-D views, and the purity-gated
commit rule: a polygon selection whose labeled evidence is pure enough
labels its unlabeled members; an impure selection triggers reprojection —
the dimensionality reduction is re-fit on just the selected subset, so
directions suppressed by the global fit can emerge.  Every mutating step is
appended to an event log; replaying the log reconstructs the ledger
bit-exactly.
"""

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import datasets as ds_mod
from .datasets import PreprocessSpec
from .embedding import isomap, pca_embedding, tsne
from .errors import (
    ContractViolation,
    EmptySelectionError,
    InvalidParameter,
    SequencingError,
    SessionFinishedError,
    ViewStackError,
)
from .geometry import points_in_polygon, polygon_area, validate_polygon

STATUS_UNLABELED = 0
STATUS_SEED = 1
STATUS_ASSIGNED = 2


@dataclass
class View:
    view_id: int
    scope: np.ndarray
    coords: np.ndarray
    lineage: list
    parent: int


@dataclass
class SelectionRecord:
    selection_id: int
    view_id: int
    polygon: np.ndarray
    proposed_class: int
    member_indices: np.ndarray
    seed_histogram: dict
    outcome: str
    assigned_class: int = None
    override: bool = False
    child_view: int = None
    reason: str = None


class LabelLedger:
    """Per-sample status/label/provenance arrays; seeds are immutable."""

    def __init__(self, n, split, seed_labels):
        self.n = n
        self.status = np.zeros(n, dtype=np.int8)
        self.label = np.full(n, -1, dtype=np.int32)
        self.source = np.full(n, -1, dtype=np.int32)
        self.status[split.labeled] = STATUS_SEED
        self.label[split.labeled] = np.asarray(seed_labels, dtype=np.int32)

    def assign(self, indices, cls, selection_id):
        indices = np.asarray(indices, dtype=np.int64)
        fresh = indices[self.status[indices] == STATUS_UNLABELED]
        self.status[fresh] = STATUS_ASSIGNED
        self.label[fresh] = cls
        self.source[fresh] = selection_id
        return fresh

    def labeled_mask(self):
        return self.status != STATUS_UNLABELED

    def unlabeled_count(self):
        return int(np.sum(self.status == STATUS_UNLABELED))

    def snapshot(self):
        return {
            "status": self.status.copy(),
            "label": self.label.copy(),
            "source": self.source.copy(),
        }


def _dr_view(X, dr_method, dr_params):
    if dr_method == "pca":
        return pca_embedding(X, d=2)
    if dr_method == "isomap":
        k = int(dr_params.get("k", 10))
        return isomap(X, k=k, d=2, on_disconnect=dr_params.get("on_disconnect", "bridge"))
    if dr_method == "tsne":
        perp = dr_params.get("perplexity", 30.0)
        if perp == "auto":
            # shrinks with the view so reprojected subsets stay embeddable
            perp = min(30.0, max(2.0, (X.shape[0] - 1) / 3.5))
        return tsne(
            X,
            perplexity=float(perp),
            iterations=int(dr_params.get("iterations", 500)),
            learning_rate=float(dr_params.get("learning_rate", 200.0)),
            seed=int(dr_params.get("seed", 0)),
        )
    raise InvalidParameter(f"unknown dr_method {dr_method!r}")


class Session:
    """One labeling session over one dataset."""

    def __init__(self, dataset, preprocess_mode, dr_method, dr_params, split,
                 eta=0.85, seed_labels=None, log_path=None,
                 root_coords=None, root_fit_seconds=0.0):
        if not 0.8 <= eta <= 0.9:
            raise InvalidParameter(f"eta must be within [0.8, 0.9], got {eta}")
        if seed_labels is None:
            seed_labels = dataset.y[split.labeled]
        self.dataset = dataset
        self.preprocess_mode = preprocess_mode
        self.dr_method = dr_method
        self.dr_params = dict(dr_params or {})
        self.split = split
        self.eta = float(eta)
        self.ledger = LabelLedger(dataset.n, split, seed_labels)
        self.history = []
        self.finished = False
        self.dr_seconds = 0.0
        self._views = []
        self._stack = []
        self._log_path = log_path
        self._log_fh = open(log_path, "a", encoding="utf-8") if log_path else None
        root = self._build_view(np.arange(dataset.n, dtype=np.int64), parent=-1,
                                precomputed=root_coords, fit_seconds=root_fit_seconds)
        self._stack.append(root.view_id)
        self._log({
            "event": "create",
            "dataset": dataset.provenance,
            "preprocess": preprocess_mode,
            "dr_method": dr_method,
            "dr_params": self.dr_params,
            "eta": self.eta,
            "labeled_indices": [int(i) for i in split.labeled],
            "seed_labels": [int(c) for c in seed_labels],
        })

    # -- view machinery ----------------------------------------------------

    def _build_view(self, scope, parent, precomputed=None, fit_seconds=0.0):
        X = self.dataset.X[scope]
        spec = PreprocessSpec(self.preprocess_mode).fit(X)
        if precomputed is not None:
            # caller already ran the projector on this exact scope
            coords = np.asarray(precomputed, dtype=float)[:, :2]
            if coords.shape[0] != X.shape[0]:
                raise InvalidParameter("precomputed coords do not match the scope")
            self.dr_seconds += float(fit_seconds)
            lineage = [(self.dr_method, dict(self.dr_params), X.shape[0])]
        else:
            t0 = time.perf_counter()
            emb = _dr_view(spec.apply(X), self.dr_method, self.dr_params)
            self.dr_seconds += time.perf_counter() - t0
            coords, lineage = emb.coords[:, :2], emb.lineage
        view = View(
            view_id=len(self._views),
            scope=np.asarray(scope, dtype=np.int64),
            coords=coords,
            lineage=lineage,
            parent=parent,
        )
        self._views.append(view)
        return view

    @property
    def view(self):
        return self._views[self._stack[-1]]

    @property
    def depth(self):
        return len(self._stack)

    def view_by_id(self, view_id):
        return self._views[view_id]

    # -- selection handling -------------------------------------------------

    def _check_mutable(self):
        if self.finished:
            raise SessionFinishedError("session is finished and immutable")

    def resolve_selection(self, polygon):
        """Members (dataset indices) inside the polygon + labeled histogram."""
        poly = validate_polygon(polygon)
        view = self.view
        extent = np.ptp(view.coords, axis=0)
        area_scale = float(extent[0] * extent[1]) or 1.0
        if abs(polygon_area(poly)) < 1e-12 * area_scale:
            raise EmptySelectionError("selection polygon is degenerate (zero area)")
        inside = points_in_polygon(view.coords, poly)
        members = view.scope[inside]
        if members.size == 0:
            raise EmptySelectionError("selection contains no points")
        hist = self._histogram(members)
        return members, hist

    def _histogram(self, members):
        labeled = members[self.ledger.labeled_mask()[members]]
        values, counts = np.unique(self.ledger.label[labeled], return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    @staticmethod
    def _majority(hist):
        """Majority class; ties break toward the lowest class id."""
        best_cls, best_count = None, -1
        for cls in sorted(hist):
            if hist[cls] > best_count:
                best_cls, best_count = cls, hist[cls]
        return best_cls, best_count

    def commit_selection(self, polygon, proposed_class=None):
        """Apply the purity rule to a selection.

        Evidence present: purity ≥ η labels the unlabeled members with the
        majority class (or the caller's proposed class, recorded as an
        override); purity < η reprojects the member subset.  No evidence:
        a proposed class labels (override), otherwise the selection is
        rejected.
        """
        self._check_mutable()
        if proposed_class is not None:
            proposed_class = int(proposed_class)
            if not 0 <= proposed_class < self.dataset.class_count:
                raise InvalidParameter(
                    f"proposed_class {proposed_class} out of range for "
                    f"{self.dataset.class_count} classes"
                )
        members, hist = self.resolve_selection(polygon)
        selection_id = len(self.history)
        record = SelectionRecord(
            selection_id=selection_id,
            view_id=self.view.view_id,
            polygon=np.asarray(polygon, dtype=float),
            proposed_class=proposed_class,
            member_indices=members,
            seed_histogram=hist,
            outcome="",
        )
        labeled_total = sum(hist.values())
        if labeled_total >= 1:
            majority, count = self._majority(hist)
            purity = count / labeled_total
            if purity >= self.eta:
                cls = int(proposed_class) if proposed_class is not None else majority
                record.outcome = "labeled"
                record.assigned_class = cls
                record.override = proposed_class is not None
                self.ledger.assign(members, cls, selection_id)
            else:
                child = self._reproject(members)
                record.outcome = "reprojected"
                record.child_view = child.view_id
        else:
            if proposed_class is not None:
                record.outcome = "labeled"
                record.assigned_class = int(proposed_class)
                record.override = True
                self.ledger.assign(members, int(proposed_class), selection_id)
            else:
                record.outcome = "rejected"
                record.reason = "no evidence"
        self.history.append(record)
        self._log({
            "event": "commit",
            "polygon": [[float(x), float(y)] for x, y in record.polygon],
            "proposed_class": None if proposed_class is None else int(proposed_class),
            "outcome": record.outcome,
        })
        return record

    def reproject_subset(self, members):
        """Explicit reprojection of a member set (also used by commits)."""
        self._check_mutable()
        return self._reproject(np.asarray(members, dtype=np.int64))

    def _reproject(self, members):
        if members.size < 3:
            raise InvalidParameter("reprojection needs at least 3 members")
        child = self._build_view(members, parent=self.view.view_id)
        self._stack.append(child.view_id)
        return child

    def go_back(self):
        self._check_mutable()
        if len(self._stack) <= 1:
            raise ViewStackError("already at the root view")
        self._stack.pop()
        self._log({"event": "back"})
        return self.view

    def finish(self):
        if not self.finished:
            self.finished = True
            self._log({"event": "finish"})
            if self._log_fh:
                self._log_fh.close()
                self._log_fh = None
        return self.ledger

    def export_labels(self):
        """(indices, classes, sources) of every seed or assigned sample."""
        if not self.finished:
            raise SequencingError("export requires a finished session")
        mask = self.ledger.labeled_mask()
        idx = np.where(mask)[0]
        return idx, self.ledger.label[idx].copy(), self.ledger.status[idx].copy()

    # -- persistence ---------------------------------------------------------

    def _log(self, payload):
        if self._log_fh:
            self._log_fh.write(json.dumps(payload, sort_keys=True) + "\n")
            self._log_fh.flush()


def read_event_log(path):
    with open(path, "r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def replay_events(events, dataset=None):
    """Rebuild a session from its event log; returns the replayed session.

    The dataset is regenerated from the logged provenance unless an
    explicit one is supplied (file-backed datasets, tests).
    """
    if not events or events[0].get("event") != "create":
        raise ContractViolation("event log must start with a create record")
    head = events[0]
    if dataset is None:
        dataset = ds_mod.generate(head["dataset"])
    labeled = np.asarray(head["labeled_indices"], dtype=np.int64)
    mask = np.ones(dataset.n, dtype=bool)
    mask[labeled] = False
    split = ds_mod.SeedSplit(labeled=labeled, unlabeled=np.where(mask)[0])
    session = Session(
        dataset,
        head["preprocess"],
        head["dr_method"],
        head["dr_params"],
        split,
        eta=head["eta"],
        seed_labels=np.asarray(head["seed_labels"], dtype=np.int32),
    )
    for ev in events[1:]:
        kind = ev.get("event")
        if kind == "commit":
            session.commit_selection(
                np.asarray(ev["polygon"], dtype=float),
                proposed_class=ev.get("proposed_class"),
            )
        elif kind == "back":
            session.go_back()
        elif kind == "finish":
            session.finish()
        else:
            raise ContractViolation(f"unknown event {kind!r}")
    return session


def replay_log(path, dataset=None):
    return replay_events(read_event_log(path), dataset=dataset)
