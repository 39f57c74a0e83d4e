import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import ONEQ3, REGULAR
from tetraqg.geometry import (
    ANGLE_KEYS,
    ANGLE_NAMES,
    FACES,
    VERTICES,
    AngleTable,
    DegenerateInput,
    FaceId,
    GeometryError,
    InvalidLengths,
    NonFiniteInput,
    VertexId,
    VertexNotOnFace,
    angles_from_edge_lengths,
    curvature,
    exterior_angle,
    face_angles,
    faces_at,
    faces_on_edge,
    fails_at,
    quasigeodesic_faces,
    triangle_inequality_margins,
    validate_tetrahedron,
)

coord = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
points = st.lists(st.tuples(coord, coord, coord), min_size=4, max_size=4)


def _tetra(pts):
    try:
        return validate_tetrahedron(pts, rel_threshold=1e-6)
    except DegenerateInput:
        assume(False)


# -- labels ----------------------------------------------------------------


def test_labels_and_opposites():
    assert [v.value for v in VERTICES] == ["a", "b", "c", "d"]
    assert [f.value for f in FACES] == ["A", "B", "C", "D"]
    for v in VERTICES:
        assert v.opposite.opposite is v
        assert v not in v.opposite.vertices
        assert len(faces_at(v)) == 3
    assert FaceId.A.vertices == (VertexId.b, VertexId.c, VertexId.d)
    assert set(faces_on_edge(VertexId.a, VertexId.b)) == {FaceId.C, FaceId.D}
    assert ANGLE_NAMES == ("aB", "aC", "aD", "bA", "bC", "bD", "cA", "cB", "cD", "dA", "dB", "dC")


# -- validation ------------------------------------------------------------


def test_unit_orthoscheme_is_valid():
    t = validate_tetrahedron([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert np.allclose(t["d"], [0, 0, 1])


def test_collinear_points_rejected():
    with pytest.raises(DegenerateInput):
        validate_tetrahedron([(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0)])


def test_coincident_points_rejected():
    with pytest.raises(DegenerateInput):
        validate_tetrahedron([(0, 0, 0), (0, 0, 0), (0, 1, 0), (0, 0, 1)])


def test_non_finite_rejected():
    with pytest.raises(NonFiniteInput):
        validate_tetrahedron([(0, 0, 0), (1, 0, 0), (0, math.nan, 0), (0, 0, 1)])
    with pytest.raises(NonFiniteInput):
        validate_tetrahedron([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, math.inf)])


def test_bad_shapes_rejected():
    with pytest.raises(GeometryError):
        validate_tetrahedron([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    with pytest.raises(GeometryError):
        validate_tetrahedron({"a": (0, 0, 0), "b": (1, 0, 0), "c": (0, 1, 0)})
    with pytest.raises(GeometryError):
        validate_tetrahedron([(0, 0, 0), (1, 0, 0), (0, 1, 0), ("x", 0, 1)])


def test_mapping_input_keeps_labels():
    t = validate_tetrahedron({"d": (0, 0, 1), "c": (0, 1, 0), "b": (1, 0, 0), "a": (0, 0, 0)})
    assert np.allclose(t.positions, [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])


def test_threshold_is_scale_invariant():
    base = np.array(ONEQ3, dtype=float)
    for scale in (1e-6, 1.0, 1e6):
        validate_tetrahedron(base * scale)
    flat = np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0.3, 0.3, 1e-13)])
    for scale in (1e-6, 1.0, 1e6):
        with pytest.raises(DegenerateInput):
            validate_tetrahedron(flat * scale)


def test_oneq3_coordinates_are_valid():
    t = validate_tetrahedron(ONEQ3)
    assert t.edge_length("a", "b") == pytest.approx(1.0)


# -- angles ----------------------------------------------------------------


def test_regular_angles(regular):
    tab = face_angles(regular)
    for x in tab.values:
        assert abs(x - math.pi / 3) < 1e-12


def test_oneq3_golden_angles(oneq3):
    tab = face_angles(oneq3)
    for name, deg in {"aC": 125, "aD": 33, "bC": 48, "bD": 140}.items():
        assert abs(math.degrees(tab[name]) - deg) <= 0.5, name


def test_angle_table_lookup(oneq3):
    tab = face_angles(oneq3)
    assert tab["bC"] == tab[VertexId.b, FaceId.C] == tab["b", "C"]
    with pytest.raises(VertexNotOnFace):
        tab[VertexId.a, FaceId.A]
    with pytest.raises(ValueError):
        AngleTable((1.0,) * 11)


def test_edge_length_oracle_matches(oneq3):
    a = face_angles(oneq3)
    b = angles_from_edge_lengths(oneq3.edge_lengths())
    assert max(abs(x - y) for x, y in zip(a.values, b.values)) < 1e-9


def test_edge_length_oracle_accepts_tuple_keys():
    lengths = {("a", "b"): 1, ("a", "c"): 1, ("a", "d"): 1, ("b", "c"): 1, ("b", "d"): 1, ("c", "d"): 1}
    tab = angles_from_edge_lengths(lengths)
    assert all(abs(x - math.pi / 3) < 1e-12 for x in tab.values)


def test_edge_length_oracle_errors():
    good = {frozenset(p): 1.0 for p in itertools.combinations("abcd", 2)}
    bad = dict(good)
    bad[frozenset("ab")] = 2.5  # face C and D break the triangle inequality
    with pytest.raises(InvalidLengths):
        angles_from_edge_lengths(bad)
    bad = dict(good)
    bad[frozenset("cd")] = 0.0
    with pytest.raises(InvalidLengths):
        angles_from_edge_lengths(bad)
    bad = dict(good)
    del bad[frozenset("cd")]
    with pytest.raises(InvalidLengths):
        angles_from_edge_lengths(bad)


def test_edge_length_oracle_skips_embeddability():
    # every face is a valid triangle but the six lengths bound no tetrahedron
    lengths = {frozenset(p): 1.0 for p in itertools.combinations("abcd", 2)}
    lengths[frozenset("cd")] = 1.99
    lengths[frozenset("ab")] = 1.99
    tab = angles_from_edge_lengths(lengths)
    assert all(0 < x < math.pi for x in tab.values)


# -- curvature and failures ------------------------------------------------


def test_regular_curvature_and_exterior(regular):
    tab = face_angles(regular)
    for v in VERTICES:
        assert curvature(tab, v) == pytest.approx(math.pi)
    for f in FACES:
        for v in f.vertices:
            assert exterior_angle(tab, f, v) == pytest.approx(2 * math.pi / 3)
            assert not fails_at(tab, f, v).fails


def test_oneq3_exterior_angles(oneq3):
    tab = face_angles(oneq3)
    assert abs(math.degrees(exterior_angle(tab, "B", "a")) - 159) <= 0.5
    assert abs(math.degrees(exterior_angle(tab, "A", "b")) - 188) <= 0.5
    assert fails_at(tab, "A", "b").fails
    r = fails_at(tab, "B", "a")
    assert not r.fails
    assert r.margin == pytest.approx(r.exterior_sum - math.pi)


def test_vertex_not_on_face(oneq3):
    tab = face_angles(oneq3)
    with pytest.raises(VertexNotOnFace):
        exterior_angle(tab, FaceId.A, VertexId.a)
    with pytest.raises(VertexNotOnFace):
        fails_at(tab, FaceId.C, VertexId.c)


def test_oneq3_classification(oneq3):
    cls = quasigeodesic_faces(face_angles(oneq3))
    assert cls.faces == (FaceId.B,)
    assert cls.bitmask == 0b0010
    assert abs(math.degrees(cls.best_slack) - 21) <= 0.5


def test_regular_classification(regular):
    cls = quasigeodesic_faces(face_angles(regular))
    assert cls.faces == FACES
    assert cls.bitmask == 0b1111


def test_exact_pi_is_not_a_failure():
    tab = AngleTable((math.pi / 2, math.pi / 2, 0.1) + (1.0,) * 9)
    assert exterior_angle(tab, "B", "a") == pytest.approx(math.pi / 2 + 0.1)
    r = fails_at(tab, "D", "a")  # aB + aC = pi exactly
    assert r.exterior_sum == math.pi
    assert not r.fails


def test_regular_margins(regular):
    tab = face_angles(regular)
    for v in VERTICES:
        for m in triangle_inequality_margins(tab, v):
            assert m == pytest.approx(math.pi / 3)


def test_flat_configuration_has_zero_margin():
    t = validate_tetrahedron([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0.3, 0.2, 0)], rel_threshold=None)
    tab = face_angles(t)
    # d lies inside triangle abc, so its three angles sum to 2 pi and none is flat;
    # each of a, b, c sees one angle equal to the sum of the other two
    for v in (VertexId.a, VertexId.b, VertexId.c):
        assert min(abs(m) for m in triangle_inequality_margins(tab, v)) < 1e-9


def test_oneq3_margins_positive(oneq3):
    tab = angles_from_edge_lengths(oneq3.edge_lengths())
    for v in VERTICES:
        assert all(m > 0 for m in triangle_inequality_margins(tab, v))


# -- properties ------------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(points)
def test_angle_table_invariants(pts):
    t = _tetra(pts)
    tab = face_angles(t)
    assert all(0 < x < math.pi for x in tab.values)
    for f in FACES:
        assert abs(tab.face_sum(f) - math.pi) < 1e-9
    assert abs(sum(tab.values) - 4 * math.pi) < 1e-9
    assert abs(sum(curvature(tab, v) for v in VERTICES) - 4 * math.pi) < 1e-9
    for v in VERTICES:
        assert min(triangle_inequality_margins(tab, v)) >= -1e-9


@settings(max_examples=300, deadline=None)
@given(points)
def test_failure_curvature_and_nonempty_classification(pts):
    tab = face_angles(_tetra(pts))
    cls = quasigeodesic_faces(tab)
    assert cls.faces
    for f in FACES:
        for r in cls.reports[f]:
            assert r.fails == (r.margin > 1e-9)
            if r.fails:
                assert curvature(tab, r.vertex) < math.pi + 1e-9


@settings(max_examples=300, deadline=None)
@given(points)
def test_oracle_equivalence(pts):
    t = _tetra(pts)
    a = face_angles(t).values
    b = angles_from_edge_lengths(t.edge_lengths()).values
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-9


@settings(max_examples=100, deadline=None)
@given(points, st.permutations(range(4)))
def test_label_invariance(pts, perm):
    t = _tetra(pts)
    sigma = {VERTICES[i]: VERTICES[perm[i]] for i in range(4)}
    moved = [None] * 4
    for v in VERTICES:
        moved[sigma[v].index] = t[v]
    t2 = validate_tetrahedron(moved, rel_threshold=None)
    tab, tab2 = face_angles(t), face_angles(t2)
    for v, f in ANGLE_KEYS:
        g = sigma[f.opposite].opposite
        assert tab2[sigma[v], g] == pytest.approx(tab[v, f], abs=1e-12)


def test_regular_coordinates_constant():
    assert REGULAR[3][2] == pytest.approx(math.sqrt(2 / 3))
