"""Search for 2-vertex quasigeodesics that run along an edge.

Such a curve is an edge ``uv`` closed up by a geodesic arc from ``v`` back
to ``u`` that avoids every vertex.  The arc crosses some sequence of faces;
developing that sequence into the plane turns it into a straight segment.
We enumerate face sequences depth-first, keeping the angular window of
directions from ``v`` that still pass through every edge crossed so far,
and test each sequence that ends on a face containing ``u``.

The search is bounded by ``max_faces``; a negative answer only means no
such arc crosses that many faces or fewer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import (
    FACES,
    FaceId,
    GeometryError,
    Tetrahedron,
    VertexId,
    face_angles,
    faces_at,
)

CROSS_TOL = 1e-9  # crossings must sit this far inside an edge (as a fraction of it)
SIDE_TOL = 1e-9
_WINDOW_TOL = 1e-13
DEFAULT_MAX_FACES = 12


class InvalidSequence(GeometryError):
    pass


class InvalidEdge(GeometryError):
    pass


class DirectionNotTangent(GeometryError):
    pass


def _cross(p: np.ndarray, q: np.ndarray) -> float:
    return float(p[0] * q[1] - p[1] * q[0])


def _place(t: Tetrahedron, p: VertexId, q: VertexId, w: VertexId, P, Q, side: float) -> np.ndarray:
    """Image of ``w`` given images ``P``, ``Q`` of ``p``, ``q``; ``side`` picks the half-plane."""
    pq = t[q] - t[p]
    pw = t[w] - t[p]
    s = float(pw @ pq) / float(pq @ pq)
    h = float(np.linalg.norm(pw - s * pq))
    d = Q - P
    normal = np.array([-d[1], d[0]]) / float(np.linalg.norm(d))
    return P + s * d + side * h * normal


@dataclass(frozen=True)
class UnfoldedStrip:
    faces: tuple[FaceId, ...]
    images: tuple[dict[VertexId, np.ndarray], ...]
    # per junction: the shared edge's vertices and their planar images
    junctions: tuple[tuple[VertexId, VertexId, np.ndarray, np.ndarray], ...]


def _shared(f: FaceId, g: FaceId) -> tuple[VertexId, VertexId]:
    p, q = (v for v in f.vertices if v is not g.opposite)
    return p, q


def _check_sequence(seq: Sequence) -> tuple[FaceId, ...]:
    try:
        faces = tuple(FaceId(f) for f in seq)
    except ValueError as exc:
        raise InvalidSequence(str(exc)) from None
    if not faces:
        raise InvalidSequence("empty face sequence")
    for f, g in zip(faces, faces[1:]):
        if f is g:
            raise InvalidSequence(f"face {f} repeated consecutively")
    return faces


def unfold_strip(t: Tetrahedron, seq: Sequence) -> UnfoldedStrip:
    """Develop a sequence of edge-adjacent faces into the plane.

    The first face is laid down with its first shared edge (or, for a
    single face, its first edge) on the positive x-axis and the rest of the
    face above it; each later face is hinged across the edge it shares
    with its predecessor.
    """
    faces = _check_sequence(seq)
    f0 = faces[0]
    if len(faces) > 1:
        p, q = _shared(f0, faces[1])
    else:
        p, q = f0.vertices[:2]
    (w,) = (x for x in f0.vertices if x not in (p, q))
    P = np.zeros(2)
    Q = np.array([t.edge_length(p, q), 0.0])
    images = [{p: P, q: Q, w: _place(t, p, q, w, P, Q, 1.0)}]
    junctions = []
    for prev, f in zip(faces, faces[1:]):
        img = images[-1]
        p, q = _shared(prev, f)
        (back,) = (x for x in prev.vertices if x not in (p, q))
        (w,) = (x for x in f.vertices if x not in (p, q))
        P, Q = img[p], img[q]
        side = -math.copysign(1.0, _cross(Q - P, img[back] - P))
        images.append({p: P, q: Q, w: _place(t, p, q, w, P, Q, side)})
        junctions.append((p, q, P, Q))
    return UnfoldedStrip(faces, tuple(images), tuple(junctions))


def _angle(x: np.ndarray, y: np.ndarray) -> float:
    return math.atan2(float(np.linalg.norm(np.cross(x, y))), float(x @ y))


def _cone_position(t: Tetrahedron, vertex: VertexId, direction: np.ndarray, table) -> float:
    """Angle of ``direction`` measured around ``vertex`` through its faces in turn."""
    p, q, r = (x for x in (VertexId.a, VertexId.b, VertexId.c, VertexId.d) if x is not vertex)
    origin = t[vertex]
    d = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(d))
    if not norm > 0:
        raise DirectionNotTangent("zero direction")
    d = d / norm
    start = 0.0
    for x, y in ((p, q), (q, r), (r, p)):
        (face,) = (f for f in faces_at(vertex) if f.opposite not in (x, y))
        ex = t[x] - origin
        ey = t[y] - origin
        n = np.cross(ex, ey)
        n /= float(np.linalg.norm(n))
        alpha = _angle(d, ex)
        beta = _angle(d, ey)
        width = table[vertex, face]
        if abs(float(d @ n)) <= 1e-8 and abs(alpha + beta - width) <= 1e-8:
            return start + alpha
        start += width
    raise DirectionNotTangent(f"direction {direction!r} does not lie on a face at {vertex}")


def vertex_side_angles(
    t: Tetrahedron, vertex: VertexId, dir_edge, dir_arc, table=None
) -> tuple[float, float]:
    """Split the total angle at ``vertex`` by two tangent directions.

    Returns the surface angle swept from one direction to the other and the
    remainder, so the pair sums to the angle sum at ``vertex``.
    """
    vertex = VertexId(vertex)
    table = table if table is not None else face_angles(t)
    total = table.vertex_sum(vertex)
    a = _cone_position(t, vertex, dir_edge, table)
    b = _cone_position(t, vertex, dir_arc, table)
    swept = abs(a - b)
    return swept, total - swept


@dataclass(frozen=True)
class EdgeArc:
    faces: tuple[FaceId, ...]
    crossings: tuple[np.ndarray, ...]  # 3D points, in order from the start vertex
    edge_params: tuple[float, ...]  # where each crossing sits along its edge, in (0, 1)
    length: float
    sides_start: tuple[float, float]
    sides_end: tuple[float, float]

    @property
    def margin(self) -> float:
        """pi minus the largest side angle at either endpoint."""
        return math.pi - max(*self.sides_start, *self.sides_end)


@dataclass(frozen=True)
class EdgeQGResult:
    edge: tuple[VertexId, VertexId]
    max_faces: int
    arc: Optional[EdgeArc]

    @property
    def found(self) -> bool:
        return self.arc is not None

    def to_json(self) -> dict:
        u, v = self.edge
        out: dict = {
            "edge": f"{u}{v}",
            "outcome": "Found" if self.arc else "NotFoundUpTo",
            "depth": self.max_faces,
        }
        if self.arc:
            a = self.arc
            out.update(
                faces=[f.value for f in a.faces],
                crossings=[[float(x) for x in p] for p in a.crossings],
                length=a.length,
                sides_rad={str(v): list(a.sides_start), str(u): list(a.sides_end)},
                sides_deg={
                    str(v): [math.degrees(x) for x in a.sides_start],
                    str(u): [math.degrees(x) for x in a.sides_end],
                },
            )
        return out


def _segments_meet(p1, p2, q1, q2, tol: float) -> bool:
    """Closed-segment intersection in the plane, with a little slack."""
    d1 = p2 - p1
    d2 = q2 - q1
    den = _cross(d1, d2)
    scale = max(float(np.linalg.norm(d1)), float(np.linalg.norm(d2)), 1e-300)
    if abs(den) <= tol * scale * scale:
        # parallel: meet only if collinear and overlapping
        if abs(_cross(d1, q1 - p1)) > tol * scale * scale:
            return False
        length = float(d1 @ d1)
        s0 = float((q1 - p1) @ d1) / length
        s1 = float((q2 - p1) @ d1) / length
        return max(s0, s1) >= -tol and min(s0, s1) <= 1 + tol
    s = _cross(q1 - p1, d2) / den
    r = _cross(q1 - p1, d1) / den
    return -tol <= s <= 1 + tol and -tol <= r <= 1 + tol


def _check_candidate(t, table, strip: UnfoldedStrip, start: VertexId, end: VertexId) -> Optional[EdgeArc]:
    V = strip.images[0][start]
    U = strip.images[-1][end]
    D = U - V
    params_seg = []
    params_edge = []
    points3 = []
    for p, q, P, Q in strip.junctions:
        if {p, q} == {start, end}:
            return None
        E = Q - P
        den = _cross(D, E)
        if abs(den) < 1e-300:
            return None
        s = _cross(P - V, E) / den
        r = _cross(P - V, D) / den
        if not (CROSS_TOL < r < 1 - CROSS_TOL and 0 < s < 1):
            return None
        if params_seg and s <= params_seg[-1]:
            return None
        params_seg.append(s)
        params_edge.append(r)
        points3.append(t[p] + r * (t[q] - t[p]))

    # each piece lies in one face; pieces sharing a face must not touch
    planar = [V] + [V + s * D for s in params_seg] + [U]
    pieces = list(range(len(strip.faces)))
    for i in pieces:
        for j in pieces[i + 2 :]:
            if strip.faces[i] is not strip.faces[j]:
                continue
            # express piece j in piece i's copy of the face
            fi, fj = strip.images[i], strip.images[j]
            a = _to_copy(planar[j], fj, fi)
            b = _to_copy(planar[j + 1], fj, fi)
            if _segments_meet(planar[i], planar[i + 1], a, b, 1e-12):
                return None

    sides_start = vertex_side_angles(t, start, t[end] - t[start], points3[0] - t[start], table)
    sides_end = vertex_side_angles(t, end, t[start] - t[end], points3[-1] - t[end], table)
    if max(*sides_start, *sides_end) > math.pi + SIDE_TOL:
        return None
    if min(*sides_start, *sides_end) <= SIDE_TOL:
        return None
    return EdgeArc(
        strip.faces,
        tuple(points3),
        tuple(params_edge),
        float(np.linalg.norm(D)),
        sides_start,
        sides_end,
    )


def _to_copy(x: np.ndarray, src: dict, dst: dict) -> np.ndarray:
    """Map a point between two planar copies of the same face (barycentric)."""
    p, q, r = sorted(src)
    m = np.column_stack([src[q] - src[p], src[r] - src[p]])
    lam = np.linalg.solve(m, x - src[p])
    return dst[p] + lam[0] * (dst[q] - dst[p]) + lam[1] * (dst[r] - dst[p])


def _normalise_edge(edge) -> tuple[VertexId, VertexId]:
    try:
        u, v = (VertexId(x) for x in edge)
    except (ValueError, TypeError):
        raise InvalidEdge(f"not a vertex pair: {edge!r}") from None
    if u is v:
        raise InvalidEdge("edge endpoints must differ")
    return u, v


def search_edge_quasigeodesic(
    t: Tetrahedron, edge, max_faces: int = DEFAULT_MAX_FACES
) -> EdgeQGResult:
    """Shortest-sequence arc closing edge ``(u, v)`` into a quasigeodesic.

    The arc runs from ``v`` to ``u``.  Among valid arcs the one crossing the
    fewest faces is returned, ties broken by the face labels in order.
    """
    u, v = _normalise_edge(edge)
    if max_faces < 1:
        raise InvalidEdge("max_faces must be at least 1")
    table = face_angles(t)
    best: Optional[tuple[int, tuple, EdgeArc]] = None

    def visit(seq: list[FaceId], strip_images, junctions, left, right):
        nonlocal best
        face = seq[-1]
        if len(seq) >= 2 and u in face.vertices:
            strip = UnfoldedStrip(tuple(seq), tuple(strip_images), tuple(junctions))
            arc = _check_candidate(t, table, strip, v, u)
            if arc is not None:
                key = (len(seq), tuple(f.value for f in seq))
                if best is None or key < best[:2]:
                    best = (key[0], key[1], arc)
        if len(seq) == max_faces:
            return
        if best is not None and len(seq) + 1 > best[0]:
            return
        V = strip_images[0][v]
        for g in FACES:
            if g is face or (len(seq) >= 2 and g is seq[-2]):
                continue
            p, q = _shared(face, g)
            img = strip_images[-1]
            P, Q = img[p], img[q]
            dp, dq = P - V, Q - V
            c = _cross(dp, dq)
            if abs(c) <= _WINDOW_TOL * float(dp @ dp + dq @ dq):
                continue
            if c < 0:
                dp, dq = dq, dp
            lo = dp if left is None or _cross(left, dp) > 0 else left
            hi = dq if right is None or _cross(dq, right) > 0 else right
            if _cross(lo, hi) <= _WINDOW_TOL * float(np.linalg.norm(lo) * np.linalg.norm(hi)):
                continue
            (back,) = (x for x in face.vertices if x not in (p, q))
            (w,) = (x for x in g.vertices if x not in (p, q))
            side = -math.copysign(1.0, _cross(Q - P, img[back] - P))
            new = {p: P, q: Q, w: _place(t, p, q, w, P, Q, side)}
            seq.append(g)
            visit(seq, strip_images + [new], junctions + [(p, q, P, Q)], lo, hi)
            seq.pop()

    for f0 in FACES:
        if v not in f0.vertices:
            continue
        # lay out f0 as unfold_strip would for a single face
        strip = unfold_strip(t, [f0])
        visit([f0], [strip.images[0]], [], None, None)

    return EdgeQGResult((u, v), max_faces, best[2] if best else None)
