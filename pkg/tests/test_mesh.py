import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyff import shapes
from polyff.errors import DegenerateChain, InvalidMesh, InvalidPairing, NegativeWinding, NotPlanar
from polyff.mesh import (
    Polygon,
    Polyhedron,
    SymmetryPairing,
    area,
    center_of_gravity,
    check_pairing,
    detect_symmetry,
    dumps,
    edge_midpoint_rep,
    enclosing_radii,
    figure_from_dict,
    figure_to_dict,
    load,
    plane_of,
    save,
    scale,
    transform,
    translate,
    validate_mesh,
    validate_polygon,
    volume,
)

SQUARE = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]


def _fan_volume(mesh):
    c = mesh.vertices.mean(0)
    total = 0.0
    for p in mesh.polygons:
        V = p.vertices
        for j in range(1, len(V) - 1):
            total += np.dot(V[0] - c, np.cross(V[j] - c, V[j + 1] - c)) / 6
    return total


def test_plane_of_square():
    p = plane_of(SQUARE)
    assert np.array_equal(p.normal, [0, 0, 1]) and p.r_perp == 0
    p2 = plane_of(np.array(SQUARE) + [0, 0, 2])
    assert np.allclose(p2.normal, [0, 0, 1]) and p2.r_perp == pytest.approx(2)


def test_plane_of_collinear():
    with pytest.raises(DegenerateChain):
        plane_of([[0, 0, 1], [1, 0, 1], [2, 0, 1]])


def test_validate_polygon():
    d = validate_polygon(SQUARE)
    assert d.area == pytest.approx(1) and d.winding == 1
    lifted = np.array(SQUARE, dtype=float)
    lifted[2, 2] = 1e-3
    with pytest.raises(NotPlanar):
        validate_polygon(lifted)
    with pytest.raises(NegativeWinding):
        validate_polygon(SQUARE[::-1], normal=[0, 0, 1])


def test_strict_mode_detects_bowtie():
    bowtie = [[0, 0, 0], [1, 1, 0], [1, 0, 0], [0, 1, 0]]
    with pytest.raises(DegenerateChain):
        Polygon(bowtie, strict=True)


@pytest.mark.parametrize("J,L,expected", [(4, 1.0, 1.0), (3, 1.0, np.sqrt(3) / 4), (6, 1.0, 3 * np.sqrt(3) / 2)])
def test_area_regular(J, L, expected):
    assert area(shapes.regular_polygon(J, L)) == pytest.approx(expected, rel=1e-14)


def test_edge_midpoint_rep():
    e = edge_midpoint_rep([[2, 0, 0], [0, 1, 0], [0, 0, 0]])
    # edge j runs from V_{j-1} to V_j; edge 0 closes the chain
    assert np.allclose(e.E[0], [1, 0, 0]) and np.allclose(e.R[0], [1, 0, 0])
    sq = edge_midpoint_rep(SQUARE)
    assert np.abs(sq.E.sum(0)).max() <= 1e-13


def test_volume_and_diagnostics():
    cube = shapes.cube()
    assert volume(cube) == pytest.approx(1, rel=1e-15)
    assert all(p.area == pytest.approx(1) and p.r_perp == pytest.approx(0.5) for p in cube.polygons)
    assert volume(shapes.tetrahedron()) == pytest.approx(1 / (6 * np.sqrt(2)), rel=1e-12)
    assert validate_mesh(shapes.icosahedron()).ok


def test_flipped_face_is_rejected():
    cube = shapes.cube()
    faces = list(cube.faces)
    faces[0] = tuple(reversed(faces[0]))
    with pytest.raises(InvalidMesh, match="orientation|partner"):
        Polyhedron(cube.vertices, faces)


def test_missing_face_reported():
    cube = shapes.cube()
    diag = validate_mesh((cube.vertices, cube.faces[1:]))
    assert not diag.ok and any("not closed" in v for v in diag.violations)


def test_inverted_normals_reported():
    cube = shapes.cube()
    diag = validate_mesh((cube.vertices, [f[::-1] for f in cube.faces]))
    assert not diag.ok and any("non-positive volume" in v for v in diag.violations)


def test_enclosing_radii():
    cube = shapes.cube()
    r = enclosing_radii(cube)
    assert r.a == pytest.approx(np.sqrt(3) / 2)
    assert np.allclose(r.b, np.sqrt(2) / 2)
    assert np.all(r.a >= r.b)
    tri = Polygon([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert enclosing_radii(tri).a == 1


def test_center_of_gravity():
    assert np.allclose(center_of_gravity(Polygon(SQUARE)), [0.5, 0.5, 0])
    assert np.allclose(center_of_gravity(shapes.cube()), 0, atol=1e-16)
    assert np.allclose(center_of_gravity(Polygon([[0, 0, 0], [1, 0, 0], [0, 1, 0]])), [1 / 3, 1 / 3, 0])


def test_translate():
    sq = translate(Polygon(SQUARE), [0.5, 0.5, 0])
    assert np.allclose(center_of_gravity(sq), 0)
    same = translate(Polygon(SQUARE), [0, 0, 0])
    assert np.array_equal(same.vertices, np.array(SQUARE, dtype=float))


def test_transform_reflection_keeps_outward_faces():
    mirrored = transform(shapes.pyramid_frustum(3, 1, 70, 0.4), np.diag([1.0, -1.0, 1.0]))
    assert validate_mesh(mirrored).ok and mirrored.volume > 0


def test_detect_symmetry():
    hexagon = detect_symmetry(shapes.regular_polygon(6, 1.0))
    assert hexagon.kind == "S2" and hexagon.half_count == 3
    assert detect_symmetry(shapes.triangle()) is None
    cube = detect_symmetry(shapes.cube())
    assert cube.kind == "Ci" and cube.half_count == 3
    assert len(cube.primary) == 3
    assert detect_symmetry(translate(shapes.cube(), [0.1, 0, 0])) is None


def test_check_pairing_rejects_wrong_pairing():
    cube = shapes.cube()
    with pytest.raises(InvalidPairing):
        check_pairing(cube, SymmetryPairing("Ci", 3, np.arange(6)))
    with pytest.raises(InvalidPairing):
        check_pairing(cube, SymmetryPairing("S2", 3, np.arange(6)))


@pytest.mark.parametrize("s", [0.1, 1.0, 10.0])
def test_scaling_laws(s):
    tri = shapes.triangle()
    assert area(scale(tri, s)) == pytest.approx(s**2 * area(tri), rel=1e-13)
    ico = shapes.icosahedron()
    assert volume(scale(ico, s)) == pytest.approx(s**3 * volume(ico), rel=1e-13)


@pytest.mark.parametrize("name,fig", list(shapes.suite(extended=True).items()))
def test_suite_invariants(name, fig):
    assert fig.volume == pytest.approx(_fan_volume(fig), rel=1e-12)
    assert fig.diagnostics.closure_residual <= 1e-12
    for p in fig.polygons:
        assert np.abs(p.edges.E.sum(0)).max() <= 1e-13 * np.abs(p.vertices).max()


@given(st.integers(0, 5))
def test_plane_invariant_under_cyclic_relabelling(k):
    V = shapes.regular_polygon(6, 1.3).vertices + [0.1, 0.2, 0.3]
    V = V @ np.array([[1, 0, 0], [0, 0.6, -0.8], [0, 0.8, 0.6]]).T
    assert np.allclose(plane_of(np.roll(V, k, axis=0)).normal, plane_of(V).normal, atol=1e-12)


def test_shape_file_round_trip(tmp_path):
    fig = shapes.truncated_cube()
    path = tmp_path / "tc.json"
    save(fig, path)
    back = load(path)
    assert np.array_equal(back.vertices, fig.vertices) and back.faces == fig.faces
    data = json.loads(dumps(fig))
    assert set(data) == {"name", "vertices", "faces"}
    tri = figure_from_dict(figure_to_dict(shapes.triangle()))
    assert isinstance(tri, Polygon)


def test_shape_file_with_bad_mesh(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "x", "vertices": SQUARE, "faces": [[0, 1, 2, 3], [0, 1, 2]]}))
    with pytest.raises(InvalidMesh):
        load(path)
