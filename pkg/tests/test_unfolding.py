import itertools
import math

import numpy as np
import pytest

from conftest import random_tetrahedra
from tetraqg.geometry import EDGES, FACES, VERTICES, FaceId, VertexId, face_angles
from tetraqg.unfolding import (
    DirectionNotTangent,
    InvalidEdge,
    InvalidSequence,
    _check_candidate,
    search_edge_quasigeodesic,
    unfold_strip,
    vertex_side_angles,
)


def _congruent(t, face, image, rel=1e-9):
    for u, v in itertools.combinations(face.vertices, 2):
        d3 = t.edge_length(u, v)
        d2 = float(np.linalg.norm(image[u] - image[v]))
        assert abs(d2 - d3) <= rel * d3


def _side(p, q, x):
    d, e = q - p, x - p
    return d[0] * e[1] - d[1] * e[0]


# -- strips ----------------------------------------------------------------


def test_regular_two_face_strip(regular):
    strip = unfold_strip(regular, ["A", "B"])
    first, second = strip.images
    c, d = VertexId.c, VertexId.d
    assert np.allclose(first[c], second[c]) and np.allclose(first[d], second[d])
    ((p, q, P, Q),) = strip.junctions
    assert {p, q} == {c, d}
    assert _side(P, Q, first[VertexId.b]) * _side(P, Q, second[VertexId.a]) < 0
    for face, img in zip(strip.faces, strip.images):
        _congruent(regular, face, img)


def test_first_face_is_canonical(oneq3):
    strip = unfold_strip(oneq3, ["C", "A", "D"])
    p, q, P, Q = strip.junctions[0]
    assert np.allclose(P, [0, 0]) and Q[1] == 0 and Q[0] > 0
    (w,) = (x for x in FaceId.C.vertices if x not in (p, q))
    assert strip.images[0][w][1] > 0


def test_single_face(oneq3):
    for f in FACES:
        strip = unfold_strip(oneq3, [f])
        assert strip.junctions == ()
        _congruent(oneq3, f, strip.images[0])


def test_oneq3_three_face_strips(oneq3):
    for seq in itertools.product(FACES, repeat=3):
        if seq[0] is seq[1] or seq[1] is seq[2]:
            continue
        strip = unfold_strip(oneq3, seq)
        for i, (p, q, P, Q) in enumerate(strip.junctions):
            for x, X in ((p, P), (q, Q)):
                assert np.linalg.norm(strip.images[i][x] - X) < 1e-9
                assert np.linalg.norm(strip.images[i + 1][x] - X) < 1e-9
            # the two faces fold out to opposite sides of their hinge
            (back,) = (x for x in seq[i].vertices if x not in (p, q))
            (front,) = (x for x in seq[i + 1].vertices if x not in (p, q))
            assert _side(P, Q, strip.images[i][back]) * _side(P, Q, strip.images[i + 1][front]) < 0
        for face, img in zip(strip.faces, strip.images):
            _congruent(oneq3, face, img)


def test_invalid_sequences(oneq3):
    with pytest.raises(InvalidSequence):
        unfold_strip(oneq3, [])
    with pytest.raises(InvalidSequence):
        unfold_strip(oneq3, ["A", "A"])
    with pytest.raises(InvalidSequence):
        unfold_strip(oneq3, ["A", "E"])


# -- side angles ------------------------------------------------------------


def test_regular_side_angles_sum_to_pi(regular):
    for v in VERTICES:
        others = [x for x in VERTICES if x is not v]
        a, b = vertex_side_angles(regular, v, regular[others[0]] - regular[v], regular[others[1]] - regular[v])
        assert a + b == pytest.approx(math.pi, abs=1e-9)
        assert a == pytest.approx(math.pi / 3, abs=1e-9)


def test_oneq3_side_angles(oneq3):
    tab = face_angles(oneq3)
    b = VertexId.b
    # a direction inside face D (abc) and one along edge bd
    inside = 0.5 * (oneq3["a"] + oneq3["c"]) - oneq3[b]
    x, y = vertex_side_angles(oneq3, b, oneq3["d"] - oneq3[b], inside)
    assert x + y == pytest.approx(tab["bA"] + tab["bC"] + tab["bD"], abs=1e-9)
    assert x > 0 and y > 0


def test_same_direction_gives_zero_side(oneq3):
    d = oneq3["c"] - oneq3["a"]
    x, y = vertex_side_angles(oneq3, "a", d, 2 * d)
    assert x == pytest.approx(0, abs=1e-12)
    assert y == pytest.approx(face_angles(oneq3).vertex_sum(VertexId.a), abs=1e-9)


def test_off_surface_direction(oneq3):
    inward = 0.25 * (oneq3["b"] + oneq3["c"] + oneq3["d"]) - oneq3["a"]
    with pytest.raises(DirectionNotTangent):
        vertex_side_angles(oneq3, "a", oneq3["b"] - oneq3["a"], inward)
    with pytest.raises(DirectionNotTangent):
        vertex_side_angles(oneq3, "a", oneq3["b"] - oneq3["a"], np.zeros(3))


# -- search ------------------------------------------------------------------


def test_regular_every_edge_found_at_depth_two(regular):
    for e in EDGES:
        res = search_edge_quasigeodesic(regular, e, 4)
        assert res.found
        arc = res.arc
        assert len(arc.faces) == 2
        assert arc.edge_params[0] == pytest.approx(0.5, abs=1e-9)
        u, v = e
        (p, q) = (x for x in VERTICES if x not in (u, v))
        assert np.allclose(arc.crossings[0], 0.5 * (regular[p] + regular[q]))
        for pair in (arc.sides_start, arc.sides_end):
            assert pair == pytest.approx((math.pi / 2, math.pi / 2), abs=1e-9)


def test_regular_ab_uses_faces_a_and_b(regular):
    res = search_edge_quasigeodesic(regular, ("a", "b"), 4)
    assert res.arc.faces == (FaceId.A, FaceId.B)
    doc = res.to_json()
    assert doc["outcome"] == "Found" and doc["edge"] == "ab" and doc["faces"] == ["A", "B"]


def test_invalid_edges(regular):
    with pytest.raises(InvalidEdge):
        search_edge_quasigeodesic(regular, ("a", "b"), 0)
    with pytest.raises(InvalidEdge):
        search_edge_quasigeodesic(regular, ("a", "a"))
    with pytest.raises(InvalidEdge):
        search_edge_quasigeodesic(regular, ("a", "x"))


def test_no_two_vertex_example(no_two_vertex):
    for e in EDGES:
        res = search_edge_quasigeodesic(no_two_vertex, e, 12)
        assert not res.found
        assert res.to_json() == {"edge": f"{e[0]}{e[1]}", "outcome": "NotFoundUpTo", "depth": 12}


def _check_arc(t, edge, arc):
    u, v = edge
    tab = face_angles(t)
    pts = [t[v], *arc.crossings, t[u]]
    assert arc.length == pytest.approx(
        sum(float(np.linalg.norm(b - a)) for a, b in zip(pts, pts[1:])), rel=1e-9
    )
    for r in arc.edge_params:
        assert 1e-9 < r < 1 - 1e-9
    # every piece lies in the plane of its face
    for face, a, b in zip(arc.faces, pts, pts[1:]):
        p, q, w = (t[x] for x in face.vertices)
        n = np.cross(q - p, w - p)
        n /= np.linalg.norm(n)
        scale = max(1.0, float(np.linalg.norm(q - p)))
        assert abs(float((a - p) @ n)) < 1e-9 * scale
        assert abs(float((b - p) @ n)) < 1e-9 * scale
    for vertex, pair in ((v, arc.sides_start), (u, arc.sides_end)):
        assert sum(pair) == pytest.approx(tab.vertex_sum(vertex), abs=1e-9)
        assert max(pair) <= math.pi + 1e-9


def _brute(t, edge, depth):
    u, v = edge
    tab = face_angles(t)
    for n in range(2, depth + 1):
        for seq in itertools.product(FACES, repeat=n):
            if any(a is b for a, b in zip(seq, seq[1:])):
                continue
            if any(a is c for a, c in zip(seq, seq[2:])):
                continue
            if v not in seq[0].vertices or u not in seq[-1].vertices:
                continue
            arc = _check_candidate(t, tab, unfold_strip(t, seq), v, u)
            if arc is not None:
                return seq
    return None


def test_pruned_search_matches_brute_force():
    found = 0
    for t in random_tetrahedra(12, seed=3):
        for e in EDGES:
            res = search_edge_quasigeodesic(t, e, 6)
            expected = _brute(t, e, 6)
            assert (res.arc.faces if res.found else None) == (tuple(expected) if expected else None)
            found += res.found
            if res.found:
                _check_arc(t, e, res.arc)
    assert found > 0


def test_search_monotone_in_depth():
    for t in random_tetrahedra(10, seed=11):
        for e in EDGES:
            short = search_edge_quasigeodesic(t, e, 5)
            if short.found:
                longer = search_edge_quasigeodesic(t, e, 8)
                assert longer.found
                assert longer.arc.length <= short.arc.length + 1e-12
