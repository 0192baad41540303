import numpy as np
import pytest

from polyff import shapes
from polyff.errors import InvalidSpec
from polyff.harness import specialization_suite
from polyff.mesh import Polygon, detect_symmetry, translate, validate_mesh


@pytest.mark.parametrize("name, vol", [
    ("cube", 1.0),
    ("tetrahedron", 1 / (6 * np.sqrt(2))),
    ("octahedron", np.sqrt(2) / 3),
    ("icosahedron", 5 * (3 + np.sqrt(5)) / 12),
    ("dodecahedron", (15 + 7 * np.sqrt(5)) / 4),
    ("cuboctahedron", 5 * np.sqrt(2) / 3),
    ("truncated_cube", (21 + 14 * np.sqrt(2)) / 3),
])
def test_unit_edge_volumes(name, vol):
    # truncated_cube is parameterised by the edge of the cube it is cut from
    fig = shapes.truncated_cube(1 / (np.sqrt(2) - 1)) if name == "truncated_cube" else shapes.make(name)
    assert fig.volume == pytest.approx(vol, rel=1e-13)
    edges = {tuple(sorted((f[j], f[(j + 1) % len(f)]))) for f in fig.faces for j in range(len(f))}
    lengths = [np.linalg.norm(fig.vertices[i] - fig.vertices[k]) for i, k in edges]
    assert np.allclose(lengths, 1.0, rtol=1e-13)
    assert np.allclose(fig.centroid, 0, atol=1e-14)


def test_face_counts():
    counts = {name: len(f.faces) for name, f in shapes.suite(extended=True).items()}
    assert counts == {"frustum_2": 6, "frustum_3": 5, "frustum_4": 6, "frustum_6": 8, "cuboctahedron": 14,
                      "truncated_cube": 14, "dodecahedron": 12, "icosahedron": 20, "cube": 6, "tetrahedron": 4,
                      "octahedron": 8}


@pytest.mark.parametrize("J, L, alpha, H", [(3, 1.0, 72, 0.5), (4, 1.0, 60, 0.6), (6, 0.6, 55, 0.5), (5, 2.0, 80, 1.0)])
def test_frustum_volume(J, L, alpha, H):
    fig = shapes.pyramid_frustum(J, L, alpha, H)
    base = shapes.regular_polygon(J, L).area
    shrink = H / np.tan(np.radians(alpha))
    apothem = L / (2 * np.tan(np.pi / J))
    top = base * (1 - shrink / apothem) ** 2
    assert fig.volume == pytest.approx(H / 3 * (base + top + np.sqrt(base * top)), rel=1e-13)
    assert fig.vertices[:, 2].min() == 0 and fig.vertices[:, 2].max() == H
    validate_mesh(fig)


def test_rectangular_frustum():
    fig = shapes.pyramid_frustum(2, 1.0, 65, 0.4, base_edge2=0.6)
    s = 0.4 / np.tan(np.radians(65))
    # prismatoid rule: the two rectangles are not similar
    A1, Am, A2 = 0.6, (1 - s) * (0.6 - s), (1 - 2 * s) * (0.6 - 2 * s)
    assert fig.volume == pytest.approx(0.4 / 6 * (A1 + 4 * Am + A2), rel=1e-13)


def test_right_frustum_is_cube():
    f = shapes.pyramid_frustum(4, 1.0, 90, 1.0)
    cube = translate(shapes.cube(), [0, 0, -0.5])
    assert specialization_suite(f, cube).delta <= 1e-12


def test_thin_hexagonal_slab():
    slab = shapes.pyramid_frustum(6, 1.0, 90, 1e-3)
    assert slab.volume == pytest.approx(1e-3 * shapes.regular_polygon(6, 1.0).area, rel=1e-13)
    validate_mesh(slab)


def test_prism_is_centrosymmetric_only_for_even_J():
    assert detect_symmetry(shapes.regular_prism(6, 1.0, 2.0)) is not None
    assert detect_symmetry(shapes.regular_prism(5, 1.0, 2.0)) is None
    assert detect_symmetry(shapes.tetrahedron()) is None


def test_regular_polygon_orientation():
    p = shapes.regular_polygon(5, 1.0, "edge_normal_x")
    assert isinstance(p, Polygon)
    xmax = p.vertices[:, 0].max()
    assert np.sum(np.isclose(p.vertices[:, 0], xmax)) == 2
    t = shapes.triangle(2.0)
    assert np.sum(np.isclose(t.vertices[:, 1], t.vertices[:, 1].min())) == 2
    assert t.area == pytest.approx(np.sqrt(3), rel=1e-14)


@pytest.mark.parametrize("call", [
    lambda: shapes.pyramid_frustum(4, 1.0, 30, 2.0),
    lambda: shapes.pyramid_frustum(4, 1.0, 0, 1.0),
    lambda: shapes.pyramid_frustum(1, 1.0, 60, 0.1),
    lambda: shapes.regular_polygon(2),
    lambda: shapes.regular_polygon(4, 1.0, "sideways"),
    lambda: shapes.box(1, 0, 1),
    lambda: shapes.truncated_cube(t=1.5),
    lambda: shapes.make("klein_bottle"),
    lambda: shapes.make("cube", size=3),
])
def test_invalid_specs(call):
    with pytest.raises(InvalidSpec):
        call()


def test_make_and_scaling():
    spec = shapes.ShapeSpec("regular_prism", {"J": 4, "L": 2.0, "H": 1.0})
    assert shapes.make(spec).volume == pytest.approx(4.0, rel=1e-13)
    fig = shapes.scale_to_circumradius(shapes.dodecahedron(), 3.0)
    assert fig.a == pytest.approx(3.0, rel=1e-14)
