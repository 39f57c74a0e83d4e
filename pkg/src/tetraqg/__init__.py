"""Quasigeodesic face boundaries of tetrahedra."""

from .cases import (
    CaseLabel,
    TheoremReport,
    TriangleMode,
    WitnessAssignment,
    build_system,
    classify_case,
    enumerate_assignments,
    verify_theorem,
)
from .geometry import (
    AngleTable,
    FaceId,
    Tetrahedron,
    VertexId,
    angles_from_edge_lengths,
    curvature,
    exterior_angle,
    face_angles,
    fails_at,
    quasigeodesic_faces,
    triangle_inequality_margins,
    validate_tetrahedron,
)
from .lp import (
    Feasible,
    Infeasible,
    InfeasibilityCertificate,
    RationalLinearSystem,
    solve_feasibility,
    verify_certificate,
)
from .unfolding import search_edge_quasigeodesic, unfold_strip, vertex_side_angles

__version__ = "0.1.0"
