"""Scripted annotator: a stand-in for the human in headless experiments.

The annotator segments the current 2-D view into density-linked groups
(points within a radius of each other chain together — the proximity and
continuity cues a person uses), wraps each group in a dilated convex hull
(the closure cue), and drives the session API with those polygons.

Convex hulls of curved shapes over-cover: the hull of one moon contains the
other moon's tip.  A person notices that the lasso caught a foreign clump
and redraws it tighter; the annotator emulates this by previewing each
candidate polygon and, when the resolved members stray outside the group
beyond a small tolerance, splitting the group along its principal axis and
labeling the parts (carrying the group's majority class as the proposal —
the parts are still one perceptual unit to the annotator).
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import EmptySelectionError, ScatterLabelError
from .geometry import convex_hull, dilate_convex, shrink_toward_centroid
from .session import STATUS_SEED, STATUS_UNLABELED


@dataclass
class AnnotatorPolicy:
    link_radius_factor: float = 3.0
    min_group: int = 5
    max_rounds: int = 50
    stance: str = "conservative"     # conservative shrinks hulls 10% before submitting
    allow_reproject: bool = True     # False = single-view labeling only
    foreign_tolerance: float = 0.0   # tolerated fraction of swept-in unlabeled outsiders
    max_split_depth: int = 6


def link_radius(coords, factor):
    """factor × median nearest-neighbor distance of the view."""
    n = coords.shape[0]
    if n < 2:
        return 0.0
    tree = cKDTree(coords)
    nn = tree.query(coords, k=2)[0][:, 1]
    return float(factor * np.median(nn))


def segment_view(coords, policy):
    """Density-linked perceptual groups of a 2-D view.

    Groups are the connected components of the radius graph at the link
    radius; components smaller than min_group are merged into their nearest
    larger group.  Returns (groups, radius) with groups as sorted local
    index arrays, ordered by smallest member.
    """
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[0]
    if n == 0:
        return [], 0.0
    if n == 1:
        return [np.array([0])], 0.0
    radius = link_radius(coords, policy.link_radius_factor)
    if radius > 0:
        tree = cKDTree(coords)
        pairs = tree.query_pairs(radius, output_type="ndarray")
    else:
        pairs = np.empty((0, 2), dtype=np.int64)
    ones = np.ones(pairs.shape[0])
    adj = coo_matrix((ones, (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    count, labels = connected_components(adj, directed=False)
    groups = [np.where(labels == c)[0] for c in range(count)]

    big = [g for g in groups if g.size >= policy.min_group]
    small = [g for g in groups if g.size < policy.min_group]
    if not big:
        big = [max(groups, key=lambda g: (g.size, -g[0]))]
        small = [g for g in groups if g is not big[0]]
    if small:
        # Attach each undersized component to the group with the closest point.
        anchors = [set(map(int, g)) for g in big]
        big_all = np.concatenate(big)
        tree = cKDTree(coords[big_all])
        for g in sorted(small, key=lambda g: (g.size, int(g[0]))):
            _, near = tree.query(coords[g], k=1)
            owner_pts = big_all[near]
            dists = np.linalg.norm(coords[g] - coords[owner_pts], axis=1)
            target_pt = int(owner_pts[np.argmin(dists)])
            for i, anchor in enumerate(anchors):
                if target_pt in anchor:
                    big[i] = np.sort(np.concatenate([big[i], g]))
                    anchor.update(map(int, g))
                    break
    groups = sorted(big, key=lambda g: int(g[0]))
    return groups, radius


def _principal_split(coords, group):
    """Split a group in two along its principal axis at the median."""
    pts = coords[group]
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered
    # Leading eigenvector of a 2×2 symmetric matrix, closed form.
    a, b, c = cov[0, 0], cov[0, 1], cov[1, 1]
    half_trace = (a + c) / 2.0
    det = a * c - b * b
    lam = half_trace + np.sqrt(max(half_trace * half_trace - det, 0.0))
    axis = np.array([b, lam - a]) if abs(b) > 1e-30 else (
        np.array([1.0, 0.0]) if a >= c else np.array([0.0, 1.0])
    )
    norm = np.linalg.norm(axis)
    axis = axis / norm if norm > 0 else np.array([1.0, 0.0])
    proj = centered @ axis
    order = np.argsort(proj, kind="stable")
    half = group.size // 2
    left = np.sort(group[order[:half]])
    right = np.sort(group[order[half:]])
    return left, right


class _Runner:
    def __init__(self, session, policy):
        self.session = session
        self.policy = policy
        self.selections = []
        self.rounds = 0
        self.truncated = False

    def run(self):
        self._label_view()
        self.session.finish()
        steps = sum(1 for s in self.selections if s["action"] == "commit")
        return {
            "selections": self.selections,
            "steps": steps,
            "rounds": self.rounds,
            "truncated": self.truncated,
        }

    # -- one view (and, recursively, its children) --------------------------

    def _label_view(self):
        while True:
            if self.rounds >= self.policy.max_rounds:
                self.truncated = True
                return
            self.rounds += 1
            before = self.session.ledger.status.copy()
            view = self.session.view
            groups, radius = segment_view(view.coords, self.policy)
            for group in groups:
                context = view.scope[group]
                self._process_group(view, group, radius, depth=0,
                                    forced_class=None, context=context)
                if self.truncated:
                    return
            if np.array_equal(before, self.session.ledger.status):
                return

    def _process_group(self, view, group, radius, depth, forced_class, context):
        if self.session.view.view_id != view.view_id:
            return  # view changed under us; the next round re-segments
        ledger = self.session.ledger
        members = view.scope[group]
        if not np.any(ledger.status[members] == STATUS_UNLABELED):
            return
        # Given labels are ground truth to the annotator; its own earlier
        # assignments are only hearsay, consulted when no given label is near.
        evidence = members[ledger.status[members] == STATUS_SEED]
        if not evidence.size:
            evidence = members[ledger.status[members] != STATUS_UNLABELED]
        hist = {}
        if evidence.size:
            values, counts = np.unique(ledger.label[evidence], return_counts=True)
            hist = {int(v): int(c) for v, c in zip(values, counts)}
        if forced_class is None:
            if not hist:
                return  # nothing to anchor a class to; a person would skip it
            majority = min((c for c in hist), key=lambda c: (-hist[c], c))
            purity = hist[majority] / sum(hist.values())
            if purity < self.session.eta:
                if self._reproject_group(view, group, radius):
                    return
                # Reprojection refused (or would reproduce the same picture):
                # work outward from the labels instead, treating each half as
                # its own perceptual unit.
                if depth < self.policy.max_split_depth and group.size >= 2:
                    left, right = _principal_split(view.coords, group)
                    for part in (left, right):
                        if part.size:
                            self._process_group(view, part, radius, depth + 1,
                                                None, context)
                return
        else:
            majority = forced_class
            if hist:
                local = min((c for c in hist), key=lambda c: (-hist[c], c))
                if local != majority:
                    return  # evidence contradicts the parent group; leave it
        self._commit_group(view, group, radius, depth, majority, context)

    def _polygon_for(self, coords):
        hull = convex_hull(coords)
        poly = dilate_convex(hull, self._radius)
        if self.policy.stance == "conservative":
            poly = shrink_toward_centroid(poly, 0.10)
        return poly

    def _commit_group(self, view, group, radius, depth, majority, context):
        self._radius = radius
        poly = self._polygon_for(view.coords[group])
        try:
            preview_members, preview_hist = self.session.resolve_selection(poly)
        except EmptySelectionError:
            return

        def subdivide():
            if depth >= self.policy.max_split_depth or group.size < 2:
                return False
            left, right = _principal_split(view.coords, group)
            for part in (left, right):
                if part.size:
                    self._process_group(view, part, radius, depth + 1,
                                        majority, context)
            return True

        ledger = self.session.ledger
        # Sweeping already-labeled outsiders is cosmetic (assignment never
        # rewrites them); sweeping *unlabeled* outsiders would brand them
        # with this group's class.  That is the mistake a person fixes by
        # redrawing tighter, so any risky sweep forces a split.
        foreign = np.setdiff1d(preview_members, context, assume_unique=False)
        risky = foreign[ledger.status[foreign] == STATUS_UNLABELED]
        tolerated = int(self.policy.foreign_tolerance * group.size)
        if risky.size > tolerated:
            if subdivide():
                return
            if self.policy.stance == "conservative":
                return  # cannot isolate the group; better silent than wrong
        total = sum(preview_hist.values())
        proposed = None
        if total > 0:
            pm = min((c for c in preview_hist), key=lambda c: (-preview_hist[c], c))
            ppurity = preview_hist[pm] / total
            if ppurity < self.session.eta or pm != majority:
                # The lasso swept labeled points that drown out the group's
                # own evidence; splitting sheds them.
                if subdivide():
                    return
                if self.policy.stance == "conservative":
                    return
                proposed = int(majority)
        else:
            proposed = int(majority)
        outcome = self.session.commit_selection(poly, proposed_class=proposed)
        self.selections.append({
            "action": "commit",
            "view": view.view_id,
            "group_size": int(group.size),
            "outcome": outcome.outcome,
            "assigned_class": outcome.assigned_class,
        })
        if outcome.outcome == "reprojected":
            self._label_view()
            if not self.truncated:
                self.session.go_back()

    def _reproject_group(self, view, group, radius):
        """Zoom into a mixed group.  Returns True when a commit was made."""
        if not self.policy.allow_reproject or group.size < 3:
            return False
        self._radius = radius
        poly = self._polygon_for(view.coords[group])
        try:
            members, hist = self.session.resolve_selection(poly)
        except EmptySelectionError:
            return False
        if members.size >= 0.95 * view.scope.size:
            # Zooming into (nearly) the whole picture just redraws it.
            return False
        total = sum(hist.values())
        if not total:
            return False  # evidence fell outside the shrunk lasso
        pm = min((c for c in hist), key=lambda c: (-hist[c], c))
        if hist[pm] / total >= self.session.eta:
            # The polygon reads as pure even though the group's own evidence
            # is mixed — swept-in outsiders dominate the count.  Committing
            # would mass-label a group we believe is mixed; leave it alone.
            return False
        try:
            outcome = self.session.commit_selection(poly)
        except (EmptySelectionError, ScatterLabelError):
            return False
        self.selections.append({
            "action": "commit",
            "view": view.view_id,
            "group_size": int(group.size),
            "outcome": outcome.outcome,
            "assigned_class": outcome.assigned_class,
        })
        if outcome.outcome == "reprojected":
            self._label_view()
            if not self.truncated:
                self.session.go_back()
        return True


def run_headless(session, policy=None):
    """Drive a fresh session to completion; returns (ledger, transcript)."""
    policy = policy or AnnotatorPolicy()
    runner = _Runner(session, policy)
    transcript = runner.run()
    return session.ledger, transcript
