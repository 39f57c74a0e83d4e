"""Exhaustive check that no tetrahedron has all four faces failing.

Every way of blaming one vertex per face is a :class:`WitnessAssignment`
(3**4 = 81 of them).  Each becomes a linear system over the twelve face
angles measured in units of pi: faces sum to 1, angles are positive, the
blamed vertex of every face has exterior angle > 1, and the angles at each
vertex obey the triangle inequality.  Showing all 81 systems infeasible,
each with a certificate that is re-checked independently, proves that some
face boundary is always a quasigeodesic.

The five-way case split (1, 2a, 2b, 3a, 3b) is used only to group the
report; no symmetry reduction is relied upon.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from .geometry import ANGLE_KEYS, ANGLE_NAMES, FACES, VERTICES, FaceId, VertexId, angle_name, faces_at
from .lp import (
    Feasible,
    FeasibilityOutcome,
    Infeasible,
    RationalLinearSystem,
    Row,
    solve_feasibility,
    verify_certificate,
)


class CaseLabel(str, enum.Enum):
    Case1 = "Case1"
    Case2a = "Case2a"
    Case2b = "Case2b"
    Case3a = "Case3a"
    Case3b = "Case3b"

    def __str__(self) -> str:
        return self.value


class TriangleMode(str, enum.Enum):
    strict = "strict"
    weak = "weak"
    equality = "equality"


@dataclass(frozen=True)
class WitnessAssignment:
    """For each face, the vertex at which it is assumed to fail."""

    witness: tuple[VertexId, VertexId, VertexId, VertexId]  # faces A, B, C, D

    def __post_init__(self) -> None:
        if len(self.witness) != 4:
            raise ValueError("need one witness per face")
        for f, v in zip(FACES, self.witness):
            if v is f.opposite:
                raise ValueError(f"face {f} does not contain vertex {v}")

    @classmethod
    def of(cls, mapping: Mapping) -> "WitnessAssignment":
        m = {FaceId(k): VertexId(v) for k, v in mapping.items()}
        return cls(tuple(m[f] for f in FACES))  # type: ignore[arg-type]

    @classmethod
    def parse(cls, key: str) -> "WitnessAssignment":
        """Inverse of :attr:`key`, e.g. ``"A-b_B-a_C-d_D-c"``."""
        return cls.of(dict(part.split("-") for part in key.split("_")))

    def __getitem__(self, f) -> VertexId:
        return self.witness[FaceId(f).index]

    def items(self):
        return zip(FACES, self.witness)

    @property
    def key(self) -> str:
        return "_".join(f"{f}-{v}" for f, v in self.items())

    def __str__(self) -> str:
        return "{" + ", ".join(f"{f}->{v}" for f, v in self.items()) + "}"


def enumerate_assignments() -> list[WitnessAssignment]:
    """All 81 witness assignments, lexicographic by face then vertex."""
    return [WitnessAssignment(w) for w in itertools.product(*(f.vertices for f in FACES))]


def classify_case(w: WitnessAssignment) -> CaseLabel:
    counts = {v: sum(1 for x in w.witness if x is v) for v in set(w.witness)}
    if len(counts) == 4:
        return CaseLabel.Case1
    if len(counts) == 2:
        return CaseLabel.Case2a if 3 in counts.values() else CaseLabel.Case2b
    if len(counts) == 3:
        doubled = next(v for v, k in counts.items() if k == 2)
        unused = next(v for v in VERTICES if v not in counts)
        # the three witnesses span the face opposite the unused vertex
        spanned = unused.opposite
        failing_at_doubled = [f for f, v in w.items() if v is doubled]
        return CaseLabel.Case3b if spanned in failing_at_doubled else CaseLabel.Case3a
    raise AssertionError(f"impossible witness pattern {w}")


# -- systems ---------------------------------------------------------------

#: A flat pattern maps each flattened vertex to the face holding its big angle.
FlatPattern = Mapping[VertexId, FaceId]


def enumerate_flat_patterns() -> list[dict[VertexId, FaceId]]:
    """Every non-empty set of flat vertices with every choice of big angle (255)."""
    out = []
    for k in range(1, 5):
        for subset in itertools.combinations(VERTICES, k):
            for faces in itertools.product(*(faces_at(v) for v in subset)):
                out.append(dict(zip(subset, faces)))
    return out


def flat_pattern_key(pattern: FlatPattern) -> str:
    return ",".join(f"{v}:{angle_name(v, f)}" for v, f in sorted(pattern.items()))


# rows are immutable, so systems share them


@functools.lru_cache(maxsize=None)
def _face_row(f: FaceId) -> Row:
    return Row.make({angle_name(v, f): 1 for v in f.vertices}, "=", 1, f"face {f}")


@functools.lru_cache(maxsize=None)
def _positive_row(v: VertexId, f: FaceId) -> Row:
    return Row.make({angle_name(v, f): 1}, ">", 0, f"pos {angle_name(v, f)}")


@functools.lru_cache(maxsize=None)
def _failure_row(f: FaceId, v: VertexId) -> Row:
    outside = [g for g in faces_at(v) if g is not f]
    return Row.make({angle_name(v, g): 1 for g in outside}, ">", 1, f"{f} fails at {v}")


@functools.lru_cache(maxsize=None)
def _triangle_row(v: VertexId, f: FaceId, rel: str) -> Row:
    # angle(v, f) <= sum of the other two angles at v
    coeffs = {angle_name(v, g): 1 for g in faces_at(v) if g is not f}
    coeffs[angle_name(v, f)] = -1
    return Row.make(coeffs, rel, 0, f"tri {angle_name(v, f)}")


def build_system(
    w: WitnessAssignment,
    triangle_mode: TriangleMode | str = TriangleMode.strict,
    flat: Optional[FlatPattern] = None,
) -> RationalLinearSystem:
    """Linear system in pi-units saying every face of some tetrahedron fails.

    Row order is fixed: four face sums, twelve positivity rows, the four
    failure rows, then three triangle rows per vertex.  In ``equality``
    mode ``flat`` names the flattened vertices and, for each, the face whose
    angle equals the sum of the other two; triangle rows elsewhere are weak.
    """
    mode = TriangleMode(triangle_mode)
    if mode is TriangleMode.equality and not flat:
        raise ValueError("equality mode needs a flat pattern")
    if mode is not TriangleMode.equality and flat:
        raise ValueError("a flat pattern only applies in equality mode")
    flat = {VertexId(v): FaceId(f) for v, f in (flat or {}).items()}

    s = RationalLinearSystem(ANGLE_NAMES)
    for f in FACES:
        s.append(_face_row(f))
    for v, f in ANGLE_KEYS:
        s.append(_positive_row(v, f))
    for f, v in w.items():
        s.append(_failure_row(f, v))
    for v in VERTICES:
        for f in faces_at(v):
            if mode is TriangleMode.strict:
                rel = ">"
            elif flat.get(v) is f:
                rel = "="
            else:
                rel = ">="
            s.append(_triangle_row(v, f, rel))
    return s


# -- whole-theorem run -----------------------------------------------------


@dataclass(frozen=True)
class CaseResult:
    assignment: WitnessAssignment
    case: CaseLabel
    mode: TriangleMode
    outcome: FeasibilityOutcome
    certificate_ok: Optional[bool]  # None when feasible
    flat: Optional[str] = None

    @property
    def infeasible(self) -> bool:
        return isinstance(self.outcome, Infeasible)

    @property
    def verified(self) -> bool:
        return self.infeasible and bool(self.certificate_ok)


def check_assignment(
    w: WitnessAssignment,
    mode: TriangleMode | str = TriangleMode.strict,
    flat: Optional[FlatPattern] = None,
) -> tuple[RationalLinearSystem, CaseResult]:
    mode = TriangleMode(mode)
    system = build_system(w, mode, flat)
    outcome = solve_feasibility(system)
    if isinstance(outcome, Infeasible):
        ok: Optional[bool] = verify_certificate(system, outcome.certificate)
    else:
        ok = None
    return system, CaseResult(
        w, classify_case(w), mode, outcome, ok, flat_pattern_key(flat) if flat else None
    )


@dataclass
class TheoremReport:
    results: list[CaseResult]

    def of_mode(self, mode: TriangleMode | str) -> list[CaseResult]:
        mode = TriangleMode(mode)
        return [r for r in self.results if r.mode is mode]

    def summary(self, mode: TriangleMode | str) -> tuple[int, int]:
        rs = self.of_mode(mode)
        return sum(r.verified for r in rs), len(rs)

    def mode_verified(self, mode: TriangleMode | str) -> bool:
        done, total = self.summary(mode)
        return total > 0 and done == total

    @property
    def theorem_verified(self) -> bool:
        """All strict systems infeasible with passing certificates."""
        return self.mode_verified(TriangleMode.strict)

    @property
    def all_verified(self) -> bool:
        """Every mode that was run came out fully certified."""
        modes = {r.mode for r in self.results}
        return bool(modes) and all(self.mode_verified(m) for m in modes)

    def by_case(self, mode: TriangleMode | str) -> dict[CaseLabel, list[CaseResult]]:
        groups: dict[CaseLabel, list[CaseResult]] = {c: [] for c in CaseLabel}
        for r in self.of_mode(mode):
            groups[r.case].append(r)
        return groups

    def to_json(self) -> dict:
        out: dict = {"theorem_verified": self.theorem_verified, "modes": {}}
        for mode in TriangleMode:
            rs = self.of_mode(mode)
            if not rs:
                continue
            done, total = self.summary(mode)
            out["modes"][mode.value] = {
                "infeasible_verified": done,
                "systems": total,
                "by_case": {
                    c.value: {"systems": len(g), "verified": sum(r.verified for r in g)}
                    for c, g in self.by_case(mode).items()
                },
                "results": [_result_json(r) for r in rs],
            }
        return out

    def table(self) -> str:
        lines = []
        for mode in TriangleMode:
            rs = self.of_mode(mode)
            if not rs:
                continue
            done, total = self.summary(mode)
            label = "flat" if mode is TriangleMode.equality else mode.value
            lines.append(f"mode {label}: {done}/{total} infeasible")
            lines.append(f"  {'case':<8}{'systems':>9}{'verified':>10}")
            for c, g in self.by_case(mode).items():
                lines.append(f"  {c.value:<8}{len(g):>9}{sum(r.verified for r in g):>10}")
        return "\n".join(lines)


def _result_json(r: CaseResult) -> dict:
    d = {
        "assignment": r.assignment.key,
        "case": r.case.value,
        "infeasible": r.infeasible,
        "certificate_ok": r.certificate_ok,
    }
    if r.flat:
        d["flat"] = r.flat
    if isinstance(r.outcome, Feasible):
        d["point"] = {k: str(v) for k, v in r.outcome.point.items()}
    return d


def iter_checks(modes=(TriangleMode.strict, TriangleMode.weak), flat: bool = True) -> Iterator[
    tuple[RationalLinearSystem, CaseResult]
]:
    for mode in modes:
        for w in enumerate_assignments():
            yield check_assignment(w, mode)
    if flat:
        for pattern in enumerate_flat_patterns():
            for w in enumerate_assignments():
                yield check_assignment(w, TriangleMode.equality, pattern)


def verify_theorem(
    modes=(TriangleMode.strict, TriangleMode.weak), flat: bool = True
) -> TheoremReport:
    """Solve and certify every witness assignment in each requested mode."""
    return TheoremReport([r for _, r in iter_checks(modes, flat)])
