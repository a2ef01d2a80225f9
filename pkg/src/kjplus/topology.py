"""Planar topology of closed polylines.

A polyline is treated as a generic immersion: its self-intersections are
located, the complement is decomposed into faces through a half-edge
structure on the 4-valent crossing graph, face winding numbers are
propagated across strands, and Arnold's J+ is assembled with Viro's
formula ``J+ = 1 + n - sum_C w_C^2 + sum_p ind_p^2``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from kjplus.curve import Point2, PolylineCurve

TRANSVERSALITY = 1e-4
DEDUP_RELATIVE = 1e-9


class TopologyError(RuntimeError):
    """The polyline is not a generic immersion at the working resolution."""


class TangencyError(TopologyError):
    def __init__(self, location: Point2, sine: float) -> None:
        self.location = location
        self.sine = sine
        super().__init__(
            f"near-tangential crossing at ({location[0]:.6g}, {location[1]:.6g}) "
            f"with |sin angle| = {sine:.2e}; refine sampling or move away from a self-tangency"
        )


@dataclass
class DoublePoint:
    location: Point2
    # curve parameters in vertex units: segment index plus fraction along it
    arc_params: tuple[float, float]
    sine: float
    index: int | None = None


@dataclass(frozen=True)
class Face:
    id: int
    winding: int
    representative_point: Point2
    is_unbounded: bool
    area: float


@dataclass
class Arrangement:
    curve: PolylineCurve
    double_points: list[DoublePoint]
    faces: list[Face]
    # per double point, the ids of the four incident faces in counterclockwise order
    adjacency: list[tuple[int, int, int, int]] = field(default_factory=list)

    @property
    def n_double_points(self) -> int:
        return len(self.double_points)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def windings(self) -> list[int]:
        return [f.winding for f in self.faces]

    def indices(self) -> list[int]:
        return [int(d.index) for d in self.double_points]

    def summary(self) -> dict:
        return {
            "double_points": self.n_double_points,
            "faces": self.n_faces,
            "windings": sorted(self.windings()),
            "indices": sorted(self.indices()),
        }


def _segments(curve: PolylineCurve) -> tuple[np.ndarray, np.ndarray]:
    p = curve.vertices
    d = np.roll(p, -1, axis=0) - p
    return p, d


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def find_double_points(
    curve: PolylineCurve,
    tol: float | None = None,
    *,
    transversality: float = TRANSVERSALITY,
) -> list[DoublePoint]:
    """All transverse self-intersections of ``curve``.

    Candidate segment pairs come from a k-d tree over segment midpoints:
    two segments can only meet if their midpoints are closer than the
    longest segment.
    """
    p, d = _segments(curve)
    n = len(p)
    if tol is None:
        tol = DEDUP_RELATIVE * curve.diameter
    lengths = np.hypot(d[:, 0], d[:, 1])
    mids = p + 0.5 * d
    tree = cKDTree(mids)
    pairs = tree.query_pairs(r=float(lengths.max()) * (1 + 1e-9), output_type="ndarray")
    if len(pairs) == 0:
        return []
    i, j = pairs[:, 0], pairs[:, 1]
    swap = i > j
    i, j = np.where(swap, j, i), np.where(swap, i, j)
    keep = (j - i != 1) & ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]

    r, s = d[i], d[j]
    qp = p[j] - p[i]
    denom = _cross(r, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(qp, s) / denom
        u = _cross(qp, r) / denom
    hit = (denom != 0) & (t >= 0) & (t < 1) & (u >= 0) & (u < 1)

    # parallel overlapping segments are tangencies at any resolution
    par = denom == 0
    if np.any(par):
        colinear = par & (np.abs(_cross(qp, r)) <= tol * lengths[i])
        if np.any(colinear):
            for a, b in zip(i[colinear], j[colinear]):
                lo = max(np.dot(p[b] - p[a], d[a]), np.dot(p[b] + d[b] - p[a], d[a]))
                hi = min(np.dot(p[b] - p[a], d[a]), np.dot(p[b] + d[b] - p[a], d[a]))
                if lo >= 0 and hi <= lengths[a] ** 2:
                    loc = tuple(map(float, p[a]))
                    raise TangencyError(loc, 0.0)

    i, j, t, u = i[hit], j[hit], t[hit], u[hit]
    loc = p[i] + t[:, None] * d[i]
    sine = np.abs(denom[hit]) / (lengths[i] * lengths[j])
    order = np.lexsort((j, i))
    i, j, t, u, loc, sine = i[order], j[order], t[order], u[order], loc[order], sine[order]

    out: list[DoublePoint] = []
    for a, b, ta, ub, xy, sn in zip(i, j, t, u, loc, sine):
        point = (float(xy[0]), float(xy[1]))
        if any(
            np.hypot(point[0] - q.location[0], point[1] - q.location[1]) <= tol
            and _close_param(q.arc_params[0], a + ta, n)
            and _close_param(q.arc_params[1], b + ub, n)
            for q in out[-4:]
        ):
            continue
        if sn < transversality:
            raise TangencyError(point, float(sn))
        out.append(DoublePoint(point, (float(a + ta), float(b + ub)), float(sn)))
    return out


def _close_param(x: float, y: float, n: int) -> bool:
    gap = abs(x - y) % n
    return min(gap, n - gap) <= 1.0


def winding_at(curve: PolylineCurve, p: Point2, tol: float | None = None) -> int:
    """Winding number of ``curve`` around the point ``p``."""
    z = curve.as_complex() - complex(*p)
    if tol is None:
        tol = DEDUP_RELATIVE * curve.diameter
    if distance_to_curve(curve, p) <= tol:
        raise TopologyError(f"point {p} lies within {tol:.3g} of the curve")
    total = np.sum(np.angle(np.roll(z, -1) / z))
    return int(round(total / (2 * np.pi)))


def distance_to_curve(curve: PolylineCurve, p: Point2) -> float:
    a, d = _segments(curve)
    w = np.asarray(p, dtype=float) - a
    dd = np.einsum("ij,ij->i", d, d)
    s = np.clip(np.einsum("ij,ij->i", w, d) / dd, 0.0, 1.0)
    diff = w - s[:, None] * d
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", diff, diff))))


def rotation_number(curve: PolylineCurve, residual: float = 0.01) -> int:
    """Whitney index: total turning of the tangent divided by ``2 pi``."""
    _, d = _segments(curve)
    z = d[:, 0] + 1j * d[:, 1]
    turns = np.sum(np.angle(np.roll(z, -1) / z)) / (2 * np.pi)
    rounded = int(round(turns))
    if abs(turns - rounded) > residual:
        raise TopologyError(f"total turning {turns:.4f} is not near an integer; curve under-sampled")
    return rounded


def _polygon_winding(poly: np.ndarray, point: np.ndarray) -> int:
    z = (poly[:, 0] - point[0]) + 1j * (poly[:, 1] - point[1])
    if np.any(z == 0):
        return 0
    return int(round(np.sum(np.angle(np.roll(z, -1) / z)) / (2 * np.pi)))


def _signed_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def build_arrangement(
    curve: PolylineCurve,
    doubles: list[DoublePoint] | None = None,
    *,
    validate_points: bool = True,
) -> Arrangement:
    """Faces of the complement of ``curve``, their windings, and crossing indices."""
    if doubles is None:
        doubles = find_double_points(curve)
    p, d = _segments(curve)
    n = len(p)
    V = len(doubles)
    tol = DEDUP_RELATIVE * curve.diameter

    if V == 0:
        area = curve.signed_area()
        inner = int(np.sign(area))
        if inner == 0:
            raise TopologyError("degenerate closed curve with zero area")
        faces = [
            Face(0, 0, _outside_point(curve), True, -abs(area)),
            Face(1, inner, _interior_point(curve.vertices[:: inner], curve, tol), False, abs(area)),
        ]
        arr = Arrangement(curve, [], faces, [])
        if validate_points:
            _validate_faces(arr, tol)
        return arr

    # each double point is passed twice; sort the passes along the curve
    params = np.array([dp.arc_params for dp in doubles], dtype=float).ravel()
    owner = np.repeat(np.arange(V), 2)
    order = np.argsort(params, kind="stable")
    params, owner = params[order], owner[order]
    P = 2 * V  # passes == edges
    seg = np.floor(params).astype(int) % n
    frac = params - np.floor(params)
    locs = np.array([doubles[o].location for o in owner])

    # chain of points along edge m: from pass m to pass m+1
    chains: list[np.ndarray] = []
    for m in range(P):
        a, b = params[m], params[(m + 1) % P]
        bb = b if m + 1 < P else b + n
        first = int(np.floor(a)) + 1
        last = int(np.floor(bb)) - (1 if bb == np.floor(bb) else 0)
        idx = np.arange(first, last + 1) % n if last >= first else np.array([], dtype=int)
        pts = [locs[m][None, :]]
        if len(idx):
            pts.append(p[idx])
        pts.append(locs[(m + 1) % P][None, :])
        chains.append(np.vstack(pts))

    # outgoing directions: forward half-edge 2m leaves pass m, backward 2m+1 leaves pass m+1
    out_dirs = np.empty((2 * P, 2))
    origin_pass = np.empty(2 * P, dtype=int)
    for m in range(P):
        out_dirs[2 * m] = d[seg[m]]
        origin_pass[2 * m] = m
        nxt = (m + 1) % P
        prev_seg = seg[nxt] if frac[nxt] > 0 else (seg[nxt] - 1) % n
        out_dirs[2 * m + 1] = -d[prev_seg]
        origin_pass[2 * m + 1] = nxt

    vertex_of_he = owner[origin_pass]
    around: list[list[int]] = [[] for _ in range(V)]
    for h in range(2 * P):
        around[vertex_of_he[h]].append(h)
    ang = np.arctan2(out_dirs[:, 1], out_dirs[:, 0])
    pos_in_vertex = np.empty(2 * P, dtype=int)
    for v in range(V):
        hs = sorted(around[v], key=lambda h: ang[h])
        if len(hs) != 4:
            raise TopologyError(f"double point {v} has valence {len(hs)}")
        around[v] = hs
        for q, h in enumerate(hs):
            pos_in_vertex[h] = q

    twin = np.arange(2 * P) ^ 1
    nxt_he = np.empty(2 * P, dtype=int)
    for h in range(2 * P):
        t_h = twin[h]
        v = vertex_of_he[t_h]
        q = pos_in_vertex[t_h]
        nxt_he[h] = around[v][(q - 1) % 4]

    face_of = -np.ones(2 * P, dtype=int)
    cycles: list[list[int]] = []
    for h0 in range(2 * P):
        if face_of[h0] >= 0:
            continue
        cyc = []
        h = h0
        while face_of[h] < 0:
            face_of[h] = len(cycles)
            cyc.append(h)
            h = nxt_he[h]
        if h != h0:
            raise TopologyError("half-edge cycles are inconsistent")
        cycles.append(cyc)

    F = len(cycles)
    if F != V + 2:
        raise TopologyError(f"Euler check failed: {F} faces for {V} double points")

    polys = []
    for cyc in cycles:
        parts = []
        for h in cyc:
            ch = chains[h // 2]
            parts.append(ch[:-1] if h % 2 == 0 else ch[::-1][:-1])
        polys.append(np.vstack(parts))
    areas = np.array([_signed_area(pg) for pg in polys])
    unbounded = np.flatnonzero(areas < 0)
    if len(unbounded) != 1:
        raise TopologyError(f"expected one clockwise (unbounded) face cycle, found {len(unbounded)}")
    ub = int(unbounded[0])

    # the face left of a forward strand winds once more than the face to its right
    wind: list[int | None] = [None] * F
    wind[ub] = 0
    adj: list[list[tuple[int, int]]] = [[] for _ in range(F)]
    for m in range(P):
        left, right = face_of[2 * m], face_of[2 * m + 1]
        adj[right].append((left, +1))
        adj[left].append((right, -1))
    queue = deque([ub])
    while queue:
        f = queue.popleft()
        for g, step in adj[f]:
            w = wind[f] + step
            if wind[g] is None:
                wind[g] = w
                queue.append(g)
            elif wind[g] != w:
                raise TopologyError("face windings are inconsistent across a strand")

    faces = []
    for f in range(F):
        if f == ub:
            rep = _outside_point(curve)
        else:
            rep = _interior_point(polys[f], curve, tol)
        faces.append(Face(f, int(wind[f]), rep, f == ub, float(areas[f])))

    adjacency = []
    for v, dp in enumerate(doubles):
        inc = tuple(int(face_of[h]) for h in around[v])
        ws = sorted(int(wind[f]) for f in inc)
        m_ = ws[1]
        if ws != [m_ - 1, m_, m_, m_ + 1]:
            raise TopologyError(f"windings {ws} around double point {v} are not of the form m-1, m, m, m+1")
        total = sum(ws)
        if total % 4:
            raise TopologyError("double point index is not an integer")
        dp.index = total // 4
        adjacency.append(inc)  # type: ignore[arg-type]

    arr = Arrangement(curve, list(doubles), faces, adjacency)
    if validate_points:
        _validate_faces(arr, tol)
    return arr


def _outside_point(curve: PolylineCurve) -> Point2:
    hi = curve.vertices.max(axis=0)
    return (float(hi[0] + 1.0 + curve.diameter), float(hi[1] + 1.0 + curve.diameter))


def _interior_point(poly: np.ndarray, curve: PolylineCurve, tol: float) -> Point2:
    """A point strictly inside the counterclockwise face boundary ``poly``.

    Starts from the midpoints of the longest boundary segments and steps to
    their left until the point is inside the face and clear of the curve.
    """
    seg = np.roll(poly, -1, axis=0) - poly
    lens = np.hypot(seg[:, 0], seg[:, 1])
    for s in np.argsort(-lens)[:8]:
        if lens[s] == 0:
            continue
        mid = poly[s] + 0.5 * seg[s]
        normal = np.array([-seg[s, 1], seg[s, 0]]) / lens[s]
        delta = 0.25 * lens[s]
        for _ in range(40):
            cand = mid + delta * normal
            if _polygon_winding(poly, cand) == 1 and distance_to_curve(curve, tuple(cand)) > 10 * tol:
                return (float(cand[0]), float(cand[1]))
            delta *= 0.5
    raise TopologyError("could not place a representative point inside a face")


def _validate_faces(arr: Arrangement, tol: float) -> None:
    for f in arr.faces:
        w = winding_at(arr.curve, f.representative_point, tol)
        if w != f.winding:
            raise TopologyError(
                f"face {f.id}: propagated winding {f.winding} but direct winding {w} at {f.representative_point}"
            )


def j_plus(arr: Arrangement) -> int:
    """Arnold's J+ by Viro's formula."""
    n = arr.n_double_points
    value = 1 + n - sum(f.winding**2 for f in arr.faces) + sum(i * i for i in arr.indices())
    if value % 2:
        raise TopologyError(f"J+ came out odd ({value})")
    return value


def curve_j_plus(curve: PolylineCurve) -> int:
    return j_plus(build_arrangement(curve))
