"""Polytope predicates, screening, faces, and the JSON schema."""
import itertools
import json
import random
from fractions import Fraction

import pytest

from torikit import polytope as pt
from torikit.errors import DomainError, FormatError


F = Fraction


def test_check_interval_passes():
    report = pt.check_delzant(pt.interval())
    assert report.ok
    assert sorted(report.vertices) == [(F(0),), (F(1),)]
    assert report.bounded


def test_check_square_passes():
    report = pt.check_delzant(pt.square())
    assert report.ok and len(report.vertices) == 4


def test_check_det2_triangle_fails():
    # the vertex where (0,1) and (-1,-2) meet has determinant 2
    bad = pt.DelzantPolytope(2, ((1, 0), (0, 1), (-1, -2)), (F(0), F(0), F(-1)))
    report = pt.check_delzant(bad)
    assert not report.ok
    assert any("determinant" in v for v in report.violations)


def test_check_nonprimitive_normal_fails():
    bad = pt.DelzantPolytope(1, ((2,), (-1,)), (F(0), F(-1)))
    assert any("primitive" in v for v in pt.check_delzant(bad).violations)


def test_check_unbounded_fails_when_compact_expected():
    half = pt.DelzantPolytope(1, ((1,),), (F(0),))
    report = pt.check_delzant(half)
    assert not report.ok
    assert any("unbounded" in v for v in report.violations)


def test_check_orthant_noncompact_flag_skips_boundedness():
    report = pt.check_delzant(pt.orthant(2))
    assert report.ok and report.bounded is None


def test_isotropy_interior_point_is_free():
    assert pt.isotropy_lattice(pt.interval(), (F(1, 2),)) == []


def test_isotropy_endpoint():
    assert pt.isotropy_lattice(pt.interval(), (F(0),)) == [(1,)]


def test_isotropy_projective_vertex():
    C = pt.projective_space(2)
    assert pt.isotropy_lattice(C, (0, 0)) == [(1, 0), (0, 1)]


def test_isotropy_outside_raises():
    with pytest.raises(DomainError):
        pt.isotropy_lattice(pt.interval(), (F(2),))


def test_in_delta_k_examples():
    P = pt.interval()
    assert pt.in_delta_k(P, (0,), (0,))            # zero mode everywhere
    assert not pt.in_delta_k(P, (0,), (2,))        # active normal pairs with k
    C = pt.projective_space(2)
    assert pt.in_delta_k(C, (0, F(1, 2)), (0, 3))  # edge with normal (1,0)


def test_in_u_k_examples():
    P = pt.interval()
    assert pt.in_u_k(P, (F(1, 2),), (1,))
    assert not pt.in_u_k(P, (0,), (1,))
    assert pt.in_u_k(P, (F(5),), (0,))             # vacuous for k = 0


def rational_grid(P, denom):
    los = [min(v[i] for v in pt.vertices(P)) for i in range(P.n)]
    his = [max(v[i] for v in pt.vertices(P)) for i in range(P.n)]
    axes = [
        [F(t, denom) for t in range(int(los[i] * denom) - 2,
                                    int(his[i] * denom) + 3)]
        for i in range(P.n)
    ]
    return itertools.product(*axes)


@pytest.mark.parametrize("factory", [pt.interval, pt.square,
                                     lambda: pt.projective_space(2)])
def test_delta_k_is_delta_cap_u_k(factory):
    # exhaustive rational grid: membership identity and its consequences
    P = factory()
    modes = list(itertools.product(*[(-2, 0, 1)] * P.n))
    for y in rational_grid(P, 4):
        inside = P.contains(y)
        for k in modes:
            assert pt.in_delta_k(P, y, k) == (inside and pt.in_u_k(P, y, k))
        if inside:
            assert pt.in_delta_k(P, y, tuple([0] * P.n))
            if P.is_interior(y):
                assert pt.isotropy_lattice(P, y) == []
                for k in modes:
                    assert pt.in_delta_k(P, y, k)
            else:
                assert pt.isotropy_lattice(P, y) != []


def test_enumerate_faces_counts():
    assert len(pt.enumerate_faces(pt.interval())) == 3
    assert len(pt.enumerate_faces(pt.square())) == 9
    assert len(pt.enumerate_faces(pt.projective_space(2))) == 7


def test_face_samples_match_active_sets():
    for P in (pt.interval(), pt.square(), pt.projective_space(2)):
        for face in pt.enumerate_faces(P):
            assert P.active_set(face.sample) == face.active
            assert face.dim == P.n - len(face.active)


def test_faces_orthant():
    faces = pt.enumerate_faces(pt.orthant(2))
    assert sorted(f.active for f in faces) == [(), (0,), (0, 1), (1,)]
    for face in faces:
        assert pt.orthant(2).active_set(face.sample) == face.active


def test_json_roundtrip(tmp_path):
    P = pt.projective_space(2)
    doc = pt.polytope_to_dict(P)
    assert doc["facets"][2]["offset"] == "-1"
    path = tmp_path / "p.json"
    path.write_text(json.dumps(doc))
    Q = pt.load_polytope(path)
    assert Q == P


def test_json_fractional_offsets():
    doc = {"n": 1, "facets": [{"normal": [1], "offset": "1/3"},
                              {"normal": [-1], "offset": "-2/3"}],
           "compact": True}
    P = pt.polytope_from_dict(doc)
    assert P.offsets == (F(1, 3), F(-2, 3))


def test_json_rejects_float_offsets_and_garbage():
    with pytest.raises(FormatError):
        pt.polytope_from_dict({"n": 1, "facets": [{"normal": [1], "offset": 0.5}]})
    with pytest.raises(FormatError):
        pt.polytope_from_dict({"nope": 1})
    with pytest.raises(FormatError):
        pt.load_polytope("/nonexistent/file.json")


def test_require_delzant_raises_on_bad_input():
    bad = pt.DelzantPolytope(2, ((1, 0), (0, 1), (-1, -2)), (F(0), F(0), F(-1)))
    with pytest.raises(DomainError):
        pt.require_delzant(bad)


def test_product_builder():
    S = pt.square()
    assert S.n == 2 and S.n_facets == 4
    assert set(S.normals) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert len(pt.vertices(S)) == 4
