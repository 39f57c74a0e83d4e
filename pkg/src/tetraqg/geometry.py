"""Face angles, curvature and face-boundary quasigeodesics of a tetrahedron.

Vertices are labelled ``a, b, c, d`` and each face carries the upper-case
label of the vertex it omits, so ``A = bcd``, ``B = acd`` and so on.  The
angle of face ``F`` at vertex ``v`` is written ``vF`` (``aB``, ``bC``, ...),
which gives the twelve face angles of a tetrahedron.

All angles here are in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

#: |det| must exceed this times (longest edge)**3.
DEGENERACY_REL = 1e-12
#: A face fails at a vertex only when its exterior angle exceeds pi by more than this.
CLASSIFY_TOL = 1e-9
#: Residual allowed in face sums, Gauss-Bonnet and oracle comparisons.
ANGLE_TOL = 1e-9


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DegenerateInput(GeometryError):
    """The four points are (nearly) coplanar."""


class NonFiniteInput(GeometryError):
    """A coordinate is NaN or infinite."""


class InvalidLengths(GeometryError):
    """Edge lengths that cannot form the faces of a tetrahedron."""


class VertexNotOnFace(GeometryError):
    """A vertex was paired with the face opposite to it."""


class VertexId(str, Enum):
    a = "a"
    b = "b"
    c = "c"
    d = "d"

    def __str__(self) -> str:
        return self.value

    @property
    def opposite(self) -> "FaceId":
        return _FACE_OPPOSITE[self]

    @property
    def index(self) -> int:
        return _INDEX[self]


class FaceId(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"

    def __str__(self) -> str:
        return self.value

    @property
    def opposite(self) -> VertexId:
        return _VERTEX_OPPOSITE[self]

    @property
    def vertices(self) -> tuple[VertexId, VertexId, VertexId]:
        return _FACE_VERTICES[self]

    @property
    def index(self) -> int:
        return _INDEX[self]


VERTICES: tuple[VertexId, ...] = tuple(VertexId)
FACES: tuple[FaceId, ...] = tuple(FaceId)
_INDEX = {**{v: i for i, v in enumerate(VERTICES)}, **{f: i for i, f in enumerate(FACES)}}
_FACE_OPPOSITE = dict(zip(VERTICES, FACES))
_VERTEX_OPPOSITE = dict(zip(FACES, VERTICES))
_FACE_VERTICES = {f: tuple(v for v in VERTICES if v is not _VERTEX_OPPOSITE[f]) for f in FACES}
_FACES_AT = {v: tuple(f for f in FACES if _VERTEX_OPPOSITE[f] is not v) for v in VERTICES}
# (v, F) pairs with v on F, ordered aB, aC, aD, bA, bC, ...
ANGLE_KEYS: tuple[tuple[VertexId, FaceId], ...] = tuple(
    (v, f) for v in VERTICES for f in FACES if f.opposite is not v
)
ANGLE_NAMES: tuple[str, ...] = tuple(f"{v.value}{f.value}" for v, f in ANGLE_KEYS)
_KEY_INDEX = {key: i for i, key in enumerate(ANGLE_KEYS)}
_NAME_INDEX = {name: i for i, name in enumerate(ANGLE_NAMES)}

EDGES: tuple[tuple[VertexId, VertexId], ...] = tuple(combinations(VERTICES, 2))
_EDGE_KEYS = {frozenset(e): frozenset(e) for e in EDGES}
_CANON = {**{v: v for v in VERTICES}, **{f: f for f in FACES}}


def _vertex(x) -> VertexId:
    v = _CANON.get(x)
    if not isinstance(v, VertexId):
        raise ValueError(f"{x!r} is not a vertex label")
    return v


def _face(x) -> FaceId:
    f = _CANON.get(x)
    if not isinstance(f, FaceId):
        raise ValueError(f"{x!r} is not a face label")
    return f


def faces_at(v: VertexId) -> tuple[FaceId, FaceId, FaceId]:
    """The three faces incident to ``v``, in label order."""
    return _FACES_AT[_vertex(v)]


def faces_on_edge(u: VertexId, v: VertexId) -> tuple[FaceId, FaceId]:
    """The two faces sharing edge ``uv``."""
    return tuple(f for f in FACES if f.opposite not in (u, v))  # type: ignore[return-value]


def angle_name(v: VertexId, f: FaceId) -> str:
    return f"{_vertex(v).value}{_face(f).value}"


def _other_vertices(v: VertexId, f: FaceId) -> tuple[VertexId, VertexId]:
    p, q = (w for w in f.vertices if w is not v)
    return p, q


def _check_on_face(f: FaceId, v: VertexId) -> None:
    if _face(f).opposite is _vertex(v):
        raise VertexNotOnFace(f"vertex {v} is not on face {f}")


@dataclass(frozen=True, eq=False)
class Tetrahedron:
    """Four labelled points in space.  Build with :func:`validate_tetrahedron`."""

    positions: np.ndarray  # shape (4, 3), rows a, b, c, d

    def __getitem__(self, v: Union[VertexId, str]) -> np.ndarray:
        return self.positions[_INDEX[_vertex(v)]]

    def edge_length(self, u: VertexId, v: VertexId) -> float:
        return float(np.linalg.norm(self[u] - self[v]))

    def edge_lengths(self) -> dict[frozenset, float]:
        """Six lengths keyed by ``frozenset({u, v})``."""
        diff = self.positions[_EDGE_I] - self.positions[_EDGE_J]
        lengths = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        return dict(zip(_EDGE_KEYS, lengths.tolist()))

    def to_dict(self) -> dict:
        return {"vertices": {v.value: [float(x) for x in self[v]] for v in VERTICES}}


def validate_tetrahedron(
    coords: Union[Sequence[Sequence[float]], Mapping[str, Sequence[float]]],
    rel_threshold: float | None = DEGENERACY_REL,
) -> Tetrahedron:
    """Check four points and wrap them as a :class:`Tetrahedron`.

    ``coords`` is either four triples in ``a, b, c, d`` order or a mapping
    from vertex label to triple.  Passing ``rel_threshold=None`` skips the
    volume check so that flat configurations can be studied.
    """
    if isinstance(coords, Mapping):
        try:
            rows = [coords[v.value] for v in VERTICES]
        except KeyError as exc:
            raise GeometryError(f"missing vertex {exc.args[0]!r}") from None
    else:
        rows = list(coords)
    try:
        pts = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise GeometryError(f"coordinates are not numeric: {exc}") from None
    if pts.shape != (4, 3):
        raise GeometryError(f"expected four 3-vectors, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise NonFiniteInput("coordinates must be finite")

    if rel_threshold is not None:
        with np.errstate(all="ignore"):
            det = float(np.linalg.det(pts[1:] - pts[0]))
        diff = pts[_EDGE_I] - pts[_EDGE_J]
        longest = math.sqrt(float(np.einsum("ij,ij->i", diff, diff).max()))
        if abs(det) <= rel_threshold * longest**3:
            raise DegenerateInput(
                f"points are coplanar or coincident (|det|={abs(det):.3g}, longest edge={longest:.3g})"
            )
    pts.setflags(write=False)
    return Tetrahedron(pts)


@dataclass(frozen=True)
class AngleTable:
    """The twelve face angles, stored in :data:`ANGLE_KEYS` order."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != 12:
            raise ValueError("an angle table has exactly 12 entries")

    def __getitem__(self, key: Union[str, tuple]) -> float:
        # str-valued enums hash and compare like their values, so ("a", "B") works too
        try:
            if isinstance(key, str):
                return self.values[_NAME_INDEX[key]]
            return self.values[_KEY_INDEX[key]]
        except KeyError:
            v, f = key
            _check_on_face(f, v)
            raise

    def items(self) -> Iterable[tuple[str, float]]:
        return zip(ANGLE_NAMES, self.values)

    def as_dict(self) -> dict[str, float]:
        return dict(self.items())

    def face_sum(self, f: FaceId) -> float:
        return sum(self[v, f] for v in _face(f).vertices)

    def vertex_sum(self, v: VertexId) -> float:
        return sum(self[v, f] for f in faces_at(v))


_EDGE_I = np.array([u.index for u, _ in EDGES])
_EDGE_J = np.array([v.index for _, v in EDGES])
_ANGLE_IDX = np.array([[v.index for v, _ in ANGLE_KEYS]])
_P_IDX = np.array([_other_vertices(v, f)[0].index for v, f in ANGLE_KEYS])
_Q_IDX = np.array([_other_vertices(v, f)[1].index for v, f in ANGLE_KEYS])


def face_angles(t: Tetrahedron) -> AngleTable:
    """All twelve face angles from the vertex positions."""
    pts = t.positions
    apex = pts[_ANGLE_IDX[0]]
    u = pts[_P_IDX] - apex
    w = pts[_Q_IDX] - apex
    cos = np.einsum("ij,ij->i", u, w) / (np.linalg.norm(u, axis=1) * np.linalg.norm(w, axis=1))
    return AngleTable(tuple(float(x) for x in np.arccos(np.clip(cos, -1.0, 1.0))))


def _pair(key) -> frozenset:
    try:
        return _EDGE_KEYS[frozenset(key)]
    except (KeyError, TypeError):
        raise InvalidLengths(f"bad edge key {key!r}") from None


def angles_from_edge_lengths(lengths: Mapping) -> AngleTable:
    """Face angles from the six edge lengths by the law of cosines.

    Each face is checked only for the planar triangle inequality; whether
    the six lengths actually embed as a tetrahedron is not tested, so this
    is suitable as a per-face cross-check and nothing more.
    """
    table = {_pair(k): float(x) for k, x in lengths.items()}
    if set(table) != {frozenset(e) for e in EDGES}:
        raise InvalidLengths("need exactly the six edge lengths")
    for pair, x in table.items():
        if not (math.isfinite(x) and x > 0):
            raise InvalidLengths(f"edge {''.join(sorted(p.value for p in pair))} has length {x}")
    for f in FACES:
        p, q, r = f.vertices
        x, y, z = table[frozenset((p, q))], table[frozenset((q, r))], table[frozenset((p, r))]
        if not (x < y + z and y < x + z and z < x + y):
            raise InvalidLengths(f"face {f} violates the triangle inequality ({x}, {y}, {z})")

    out = []
    for e1, e2, e3 in _LAW_OF_COSINES:
        s1, s2, opp = table[e1], table[e2], table[e3]
        cos = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2)
        out.append(math.acos(min(1.0, max(-1.0, cos))))
    return AngleTable(tuple(out))


# per angle: the two edges at the apex, then the opposite edge
_LAW_OF_COSINES = [
    (frozenset((v, p)), frozenset((v, q)), frozenset((p, q)))
    for v, f in ANGLE_KEYS
    for p, q in [_other_vertices(v, f)]
]


_EXTERIOR = {
    (f, v): tuple(_KEY_INDEX[v, g] for g in _FACES_AT[v] if g is not f)
    for v, f in ANGLE_KEYS
}


def curvature(tab: AngleTable, v: VertexId) -> float:
    """Angle defect 2*pi minus the angles meeting at ``v``."""
    return 2.0 * math.pi - tab.vertex_sum(v)


def exterior_angle(tab: AngleTable, f: FaceId, v: VertexId) -> float:
    """Sum of the two angles at ``v`` that do not belong to ``f``."""
    try:
        i, j = _EXTERIOR[f, v]
    except KeyError:
        _check_on_face(f, v)
        raise
    return tab.values[i] + tab.values[j]


@dataclass(frozen=True)
class FailureReport:
    face: FaceId
    vertex: VertexId
    exterior_sum: float
    fails: bool
    margin: float  # exterior_sum - pi


def fails_at(tab: AngleTable, f: FaceId, v: VertexId, tol: float = CLASSIFY_TOL) -> FailureReport:
    """Whether ``f`` fails at ``v``: its exterior angle there exceeds pi."""
    ext = exterior_angle(tab, f, v)
    margin = ext - math.pi
    return FailureReport(_CANON[f], _CANON[v], ext, margin > tol, margin)


@dataclass(frozen=True)
class FaceClassification:
    """Which face boundaries are quasigeodesics, with every per-vertex report."""

    faces: tuple[FaceId, ...]
    reports: dict[FaceId, tuple[FailureReport, ...]] = field(repr=False)

    def slack(self, f: FaceId) -> float:
        """pi minus the largest exterior angle of ``f``; >= -tol iff ``f`` qualifies."""
        return -max(r.margin for r in self.reports[_face(f)])

    @property
    def best_slack(self) -> float:
        """Slack of the most comfortably quasigeodesic face."""
        return max(self.slack(f) for f in FACES)

    @property
    def bitmask(self) -> int:
        return sum(1 << f.index for f in self.faces)


def quasigeodesic_faces(tab: AngleTable, tol: float = CLASSIFY_TOL) -> FaceClassification:
    """Faces whose boundary is a simple closed quasigeodesic.

    A face boundary turns only at its three vertices, and on the face side
    the angle there is a face angle (< pi), so the boundary qualifies
    exactly when the face fails at none of its vertices.
    """
    reports = {f: tuple(fails_at(tab, f, v, tol) for v in f.vertices) for f in FACES}
    faces = tuple(f for f in FACES if not any(r.fails for r in reports[f]))
    return FaceClassification(faces, reports)


def triangle_inequality_margins(tab: AngleTable, v: VertexId) -> tuple[float, float, float]:
    """``(sum of the other two) - angle`` for each angle at ``v``, in face order.

    All three are non-negative on a real tetrahedron; a zero marks a vertex
    that has been flattened.
    """
    v = _vertex(v)
    angles = [tab[v, f] for f in faces_at(v)]
    total = sum(angles)
    return tuple(total - 2.0 * x for x in angles)  # type: ignore[return-value]
