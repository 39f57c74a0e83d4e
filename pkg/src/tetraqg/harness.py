"""Seeded random tetrahedra and bulk property trials.

Trial ``i`` of a run with seed ``s`` draws from its own generator seeded
with ``(s, i)``, so a run can be split across processes in any way and
still reproduce the serial result exactly.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .geometry import (
    ANGLE_NAMES,
    ANGLE_TOL,
    CLASSIFY_TOL,
    FACES,
    VERTICES,
    DegenerateInput,
    Tetrahedron,
    angles_from_edge_lengths,
    curvature,
    face_angles,
    quasigeodesic_faces,
    triangle_inequality_margins,
    validate_tetrahedron,
)

REJECTION_LIMIT = 1000
SLIVER_SCALE = 1e-3
FLAT_LIFT = 1e-3
CSV_COLUMNS = (
    ["seed", "index"]
    + list(ANGLE_NAMES)
    + [f"omega_{v}" for v in VERTICES]
    + ["qg_mask", "min_margin"]
)


class Distribution(str, enum.Enum):
    unit_cube_uniform = "unit_cube_uniform"
    thin_sliver = "thin_sliver"
    near_flat = "near_flat"


class RejectionLimitExceeded(RuntimeError):
    pass


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, index])


def _draw(rng: np.random.Generator, dist: Distribution) -> np.ndarray:
    if dist is Distribution.unit_cube_uniform:
        return rng.random((4, 3))
    if dist is Distribution.thin_sliver:
        pts = rng.random((4, 3))
        pts[:, 2] *= SLIVER_SCALE
        return pts
    # near_flat: a random point dropped onto the plane of the first three, then lifted
    pts = rng.random((4, 3))
    n = np.cross(pts[1] - pts[0], pts[2] - pts[0])
    norm = float(np.linalg.norm(n))
    if norm == 0.0:
        return pts
    n /= norm
    pts[3] -= float((pts[3] - pts[0]) @ n) * n
    pts[3] += FLAT_LIFT * n
    return pts


def random_tetrahedron(rng: np.random.Generator, distribution: Distribution | str) -> Tetrahedron:
    dist = Distribution(distribution)
    for _ in range(REJECTION_LIMIT):
        try:
            return validate_tetrahedron(_draw(rng, dist))
        except DegenerateInput:
            continue
    raise RejectionLimitExceeded(f"{REJECTION_LIMIT} degenerate draws in a row from {dist.value}")


@dataclass(frozen=True)
class TrialConfig:
    count: int
    seed: int = 0
    distribution: Distribution = Distribution.unit_cube_uniform
    angle_tol: float = ANGLE_TOL
    classify_tol: float = CLASSIFY_TOL

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("count must be at least 1")
        object.__setattr__(self, "distribution", Distribution(self.distribution))


@dataclass(frozen=True)
class Violation:
    index: int
    kind: str
    detail: str
    coords: tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class TrialRecord:
    index: int
    angles: tuple[float, ...]
    curvatures: tuple[float, ...]
    qg_mask: int
    margin: float  # slack of the best face
    n_faces: int
    gb_residual: float
    face_sum_residual: float
    oracle_diff: float
    min_triangle_margin: float
    violations: tuple[Violation, ...]


def evaluate(t: Tetrahedron, index: int = 0, cfg: Optional[TrialConfig] = None) -> TrialRecord:
    """Compute one trial's angles and check every property on them."""
    angle_tol = cfg.angle_tol if cfg else ANGLE_TOL
    classify_tol = cfg.classify_tol if cfg else CLASSIFY_TOL
    tab = face_angles(t)
    oracle = angles_from_edge_lengths(t.edge_lengths())
    curv = tuple(curvature(tab, v) for v in VERTICES)
    cls = quasigeodesic_faces(tab, classify_tol)
    tri = [m for v in VERTICES for m in triangle_inequality_margins(tab, v)]

    gb = abs(sum(curv) - 4 * math.pi)
    fs = max(abs(tab.face_sum(f) - math.pi) for f in FACES)
    od = max(abs(x - y) for x, y in zip(tab.values, oracle.values))

    bad = []
    if not cls.faces:
        bad.append(("theorem", f"no quasigeodesic face; best slack {cls.best_slack!r}"))
    if min(tri) < -angle_tol:
        bad.append(("triangle_inequality", f"triangle margin {min(tri)!r}"))
    for f in FACES:
        for r in cls.reports[f]:
            if r.fails and curv[r.vertex.index] >= math.pi + angle_tol:
                bad.append(("failure_curvature", f"{f} fails at {r.vertex} with curvature {curv[r.vertex.index]!r}"))
    if gb > angle_tol:
        bad.append(("gauss_bonnet", f"residual {gb!r}"))
    if fs > angle_tol:
        bad.append(("face_sum", f"residual {fs!r}"))
    if od > angle_tol:
        bad.append(("oracle", f"max difference {od!r}"))
    coords = tuple(tuple(float(x) for x in row) for row in t.positions)

    return TrialRecord(
        index=index,
        angles=tab.values,
        curvatures=curv,
        qg_mask=cls.bitmask,
        margin=cls.best_slack,
        n_faces=len(cls.faces),
        gb_residual=gb,
        face_sum_residual=fs,
        oracle_diff=od,
        min_triangle_margin=min(tri),
        violations=tuple(Violation(index, k, d, coords) for k, d in bad),
    )


@dataclass
class TrialReport:
    trials: int = 0
    violations: list[Violation] = field(default_factory=list)
    histogram: dict[int, int] = field(default_factory=lambda: {k: 0 for k in range(5)})
    min_margin: float = math.inf
    gb_max_residual: float = 0.0
    face_sum_max_residual: float = 0.0
    oracle_max_diff: float = 0.0
    min_triangle_margin: float = math.inf

    def add(self, rec: TrialRecord) -> None:
        self.trials += 1
        self.violations.extend(rec.violations)
        self.histogram[rec.n_faces] += 1
        self.min_margin = min(self.min_margin, rec.margin)
        self.gb_max_residual = max(self.gb_max_residual, rec.gb_residual)
        self.face_sum_max_residual = max(self.face_sum_max_residual, rec.face_sum_residual)
        self.oracle_max_diff = max(self.oracle_max_diff, rec.oracle_diff)
        self.min_triangle_margin = min(self.min_triangle_margin, rec.min_triangle_margin)

    def merge(self, other: "TrialReport") -> "TrialReport":
        out = TrialReport()
        out.trials = self.trials + other.trials
        out.violations = sorted(self.violations + other.violations, key=lambda v: (v.index, v.kind))
        out.histogram = {k: self.histogram.get(k, 0) + other.histogram.get(k, 0) for k in range(5)}
        out.min_margin = min(self.min_margin, other.min_margin)
        out.gb_max_residual = max(self.gb_max_residual, other.gb_max_residual)
        out.face_sum_max_residual = max(self.face_sum_max_residual, other.face_sum_max_residual)
        out.oracle_max_diff = max(self.oracle_max_diff, other.oracle_max_diff)
        out.min_triangle_margin = min(self.min_triangle_margin, other.min_triangle_margin)
        return out

    def count(self, kind: str) -> int:
        return sum(1 for v in self.violations if v.kind == kind)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "violations": len(self.violations),
            "violation_counts": {
                k: self.count(k)
                for k in ("theorem", "triangle_inequality", "failure_curvature", "gauss_bonnet", "face_sum", "oracle")
            },
            "histogram": {str(k): n for k, n in self.histogram.items() if k},
            "min_margin_rad": self.min_margin,
            "min_margin_deg": math.degrees(self.min_margin),
            "gauss_bonnet_max_residual": self.gb_max_residual,
            "face_sum_max_residual": self.face_sum_max_residual,
            "oracle_max_diff": self.oracle_max_diff,
            "min_triangle_margin": self.min_triangle_margin,
            "counterexamples": [
                {"index": v.index, "kind": v.kind, "detail": v.detail, "coords": v.coords}
                for v in self.violations[:20]
            ],
        }


def _records(cfg: TrialConfig, start: int, stop: int) -> list[TrialRecord]:
    out = []
    for i in range(start, stop):
        t = random_tetrahedron(trial_rng(cfg.seed, i), cfg.distribution)
        out.append(evaluate(t, i, cfg))
    return out


def iter_records(
    cfg: TrialConfig,
    tetrahedra: Optional[Sequence[Tetrahedron]] = None,
    workers: int = 1,
    chunk: int = 2000,
) -> Iterator[TrialRecord]:
    """Records in index order.  ``tetrahedra`` replaces the random draws."""
    if tetrahedra is not None:
        for i, t in enumerate(tetrahedra):
            yield evaluate(t, i, cfg)
        return
    bounds = [(s, min(s + chunk, cfg.count)) for s in range(0, cfg.count, chunk)]
    if workers <= 1:
        for s, e in bounds:
            yield from _records(cfg, s, e)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for recs in pool.map(_records, [cfg] * len(bounds), *zip(*bounds)):
            yield from recs


def run_theorem_trials(
    cfg: TrialConfig,
    tetrahedra: Optional[Sequence[Tetrahedron]] = None,
    workers: int = 1,
    csv_out: Optional[io.TextIOBase] = None,
) -> TrialReport:
    """Generate ``cfg.count`` tetrahedra and check every property on each.

    Violations are collected, never raised.  When ``csv_out`` is given a row
    per trial is written to it.
    """
    report = TrialReport()
    writer = None
    if csv_out is not None:
        writer = csv.writer(csv_out, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
    for rec in iter_records(cfg, tetrahedra, workers):
        report.add(rec)
        if writer is not None:
            writer.writerow(_csv_row(cfg.seed, rec))
    return report


def _csv_row(seed: int, rec: TrialRecord) -> list[str]:
    return (
        [str(seed), str(rec.index)]
        + [repr(x) for x in rec.angles]
        + [repr(x) for x in rec.curvatures]
        + [str(rec.qg_mask), repr(rec.margin)]
    )


def combined_report(reports: Iterable[TrialReport]) -> TrialReport:
    total = TrialReport()
    for r in reports:
        total = total.merge(r)
    return total
