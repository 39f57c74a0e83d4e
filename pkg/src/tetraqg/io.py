"""JSON readers and report builders shared by the command line."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Union

from .geometry import (
    FACES,
    VERTICES,
    GeometryError,
    Tetrahedron,
    curvature,
    face_angles,
    quasigeodesic_faces,
    triangle_inequality_margins,
    validate_tetrahedron,
)


def tetrahedron_from_json(obj: dict) -> Tetrahedron:
    """Parse ``{"vertices": {"a": [x, y, z], ...}}``."""
    if not isinstance(obj, dict) or not isinstance(obj.get("vertices"), dict):
        raise GeometryError('expected an object with a "vertices" mapping')
    return validate_tetrahedron(obj["vertices"])


def load_tetrahedron(path: Union[str, Path]) -> Tetrahedron:
    with open(path) as fh:
        return tetrahedron_from_json(json.load(fh))


def angle_report(t: Tetrahedron) -> dict:
    tab = face_angles(t)
    cls = quasigeodesic_faces(tab)
    return {
        "vertices": t.to_dict()["vertices"],
        "angles_rad": tab.as_dict(),
        "angles_deg": {k: math.degrees(x) for k, x in tab.items()},
        "curvature_rad": {v.value: curvature(tab, v) for v in VERTICES},
        "triangle_margins_rad": {
            v.value: list(triangle_inequality_margins(tab, v)) for v in VERTICES
        },
        "failures": [
            {
                "face": r.face.value,
                "vertex": r.vertex.value,
                "exterior_rad": r.exterior_sum,
                "exterior_deg": math.degrees(r.exterior_sum),
                "margin_rad": r.margin,
                "fails": r.fails,
            }
            for f in FACES
            for r in cls.reports[f]
        ],
        "quasigeodesic_faces": [f.value for f in cls.faces],
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2)
