"""Planar geometry for selection handling.

Point-in-polygon uses the even-odd rule with points exactly on the boundary
counting as inside (a selection should never drop a point the user's stroke
touched).  The crossing test is written in cross-product form — no
divisions — so it stays well-behaved near horizontal edges.
"""

import numpy as np

from .errors import ContractViolation, InvalidParameter


def polygon_area(poly):
    """Signed shoelace area (positive for counter-clockwise order)."""
    poly = np.asarray(poly, dtype=float)
    x = poly[:, 0]
    y = poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _cross2(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _proper_intersect(p1, p2, p3, p4):
    """True when segments p1p2 and p3p4 cross at an interior point."""
    d1 = _cross2(p4 - p3, p1 - p3)
    d2 = _cross2(p4 - p3, p2 - p3)
    d3 = _cross2(p2 - p1, p3 - p1)
    d4 = _cross2(p2 - p1, p4 - p1)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def validate_polygon(poly):
    """Checks vertex count, finiteness, and non-self-intersection."""
    poly = np.asarray(poly, dtype=float)
    if poly.ndim != 2 or poly.shape[1] != 2:
        raise InvalidParameter("polygon must be an (m, 2) vertex list")
    if poly.shape[0] < 3:
        raise InvalidParameter("polygon needs at least 3 vertices")
    if not np.all(np.isfinite(poly)):
        raise InvalidParameter("polygon vertices must be finite")
    m = poly.shape[0]
    for a in range(m):
        a2 = (a + 1) % m
        for b in range(a + 1, m):
            b2 = (b + 1) % m
            if a == b or a2 == b or a == b2:
                continue
            if _proper_intersect(poly[a], poly[a2], poly[b], poly[b2]):
                raise ContractViolation(
                    f"polygon self-intersects (edges {a} and {b})"
                )
    return poly


def _on_boundary(points, poly):
    """Boolean mask of points lying exactly on some polygon edge."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    out = np.zeros(n, dtype=bool)
    m = poly.shape[0]
    for a in range(m):
        p1 = poly[a]
        p2 = poly[(a + 1) % m]
        e = p2 - p1
        r = pts - p1
        cross = e[0] * r[:, 1] - e[1] * r[:, 0]
        dot = r[:, 0] * e[0] + r[:, 1] * e[1]
        ee = e[0] * e[0] + e[1] * e[1]
        out |= (cross == 0.0) & (dot >= 0.0) & (dot <= ee)
    return out


def points_in_polygon(points, poly):
    """Even-odd containment for a batch of points; boundary counts inside."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(poly, dtype=float)
    inside = np.zeros(pts.shape[0], dtype=bool)
    m = poly.shape[0]
    px = pts[:, 0]
    py = pts[:, 1]
    for a in range(m):
        x1, y1 = poly[a]
        x2, y2 = poly[(a + 1) % m]
        spans = (y1 > py) != (y2 > py)
        if not np.any(spans):
            continue
        # px < x-intersection of the edge at height py, in cross form:
        # sign((x1−px)(y2−py) − (x2−px)(y1−py)) must match sign(y2−y1).
        lhs = (x1 - px) * (y2 - py) - (x2 - px) * (y1 - py)
        crosses = spans & ((lhs > 0) == (y2 > y1)) & (lhs != 0)
        inside ^= crosses
    inside |= _on_boundary(pts, poly)
    return inside


def convex_hull(points):
    """Monotone-chain convex hull, counter-clockwise, collinear points dropped.

    Degenerate inputs (all collinear) return the two extreme points.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def build(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if hull.shape[0] < 3:
        return np.unique(hull, axis=0)
    return hull


def dilate_convex(poly, radius, arc_steps=4):
    """Outward offset of a convex CCW polygon by `radius`.

    Corners are rounded with a few arc samples, which keeps the result a
    simple polygon for any convex input.  Degenerate hulls (segment or
    single point) become capsules/discs around their extent.
    """
    poly = np.asarray(poly, dtype=float)
    if radius < 0:
        raise InvalidParameter("radius must be >= 0")
    if poly.shape[0] == 1:
        t = np.linspace(0, 2 * np.pi, 16, endpoint=False)
        return poly[0] + radius * np.column_stack([np.cos(t), np.sin(t)])
    if poly.shape[0] == 2:
        a, b = poly
        d = b - a
        norm = np.hypot(*d)
        if norm == 0:
            return dilate_convex(poly[:1], radius, arc_steps)
        u = d / norm
        nrm = np.array([-u[1], u[0]])
        quarter = np.linspace(0, np.pi, 8)
        cap_b = [b + radius * (np.cos(t) * nrm - np.sin(t) * (-u)) for t in quarter]
        cap_a = [a + radius * (np.cos(t) * (-nrm) - np.sin(t) * u) for t in quarter]
        return np.array(cap_b + cap_a)
    if radius == 0:
        return poly.copy()
    m = poly.shape[0]
    out = []
    for i in range(m):
        prev = poly[(i - 1) % m]
        cur = poly[i]
        nxt = poly[(i + 1) % m]
        n_prev = _edge_out_normal(prev, cur)
        n_next = _edge_out_normal(cur, nxt)
        angle_a = np.arctan2(n_prev[1], n_prev[0])
        angle_b = np.arctan2(n_next[1], n_next[0])
        sweep = (angle_b - angle_a) % (2 * np.pi)
        steps = max(1, int(np.ceil(sweep / (np.pi / arc_steps))))
        for s in range(steps + 1):
            ang = angle_a + sweep * s / steps
            out.append(cur + radius * np.array([np.cos(ang), np.sin(ang)]))
    return np.array(out)


def _edge_out_normal(a, b):
    d = b - a
    norm = np.hypot(*d)
    if norm == 0:
        return np.array([0.0, 0.0])
    return np.array([d[1] / norm, -d[0] / norm])


def shrink_toward_centroid(poly, fraction):
    """Scale a polygon toward its vertex centroid by (1 − fraction)."""
    poly = np.asarray(poly, dtype=float)
    centroid = poly.mean(axis=0)
    return centroid + (poly - centroid) * (1.0 - fraction)
