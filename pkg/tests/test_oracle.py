import numpy as np
import pytest

from polyff import oracle, shapes
from polyff.errors import BudgetExceeded, NotStarShaped
from polyff.polygon import ff_polygon
from polyff.polyhedron import ff_polyhedron

CUBE = shapes.cube()


def _slab(outline, H=0.5):
    bottom = np.column_stack([outline, np.zeros(len(outline))])
    return shapes._extrusion(bottom, bottom + [0, 0, H], "slab")


L_SLAB = _slab(np.array([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]], float))
U_SLAB = _slab(np.array([[0, 0], [3, 0], [3, 3], [2.8, 3], [2.8, 0.2], [0.2, 0.2], [0.2, 3], [0, 3]], float))


def test_q_zero_gives_measure():
    sq = shapes.regular_polygon(4, 1.0)
    assert oracle.quad_polygon(np.zeros(3), sq).value == pytest.approx(1.0, rel=1e-14)
    assert oracle.quad_polyhedron(np.zeros(3), CUBE).value == pytest.approx(1.0, rel=1e-14)


def test_square_and_cube():
    sq = shapes.regular_polygon(4, 1.0, "edge_normal_x")
    r = oracle.quad_polygon([np.pi, 0, 0], sq)
    assert r.value == pytest.approx(2 / np.pi, rel=1e-12)
    assert r.est_error < 1e-10 and r.evaluations > 0
    assert oracle.quad_polyhedron([np.pi] * 3, CUBE).value == pytest.approx((2 / np.pi) ** 3, rel=1e-10)


def test_complex_q_matches_library():
    tri = shapes.triangle()
    q = np.array([4.0, -3.0, 1.0]) + 0.3j * np.array([1.0, 0.0, -1.0])
    assert oracle.quad_polygon(q, tri).value == pytest.approx(ff_polygon(q, tri).value, rel=1e-11)
    ico = shapes.icosahedron()
    q = np.array([2.0, 1.0, -1.5]) + 0.2j * np.array([0.0, 1.0, 1.0])
    assert oracle.quad_polyhedron(q, ico).value == pytest.approx(ff_polyhedron(q, ico).value, rel=1e-10)


def test_nonconvex_star_shaped():
    q = np.array([1.0, 0.5, 0.3])
    assert oracle.quad_polyhedron(q, L_SLAB).value == pytest.approx(ff_polyhedron(q, L_SLAB).value, rel=1e-11)


def test_not_star_shaped():
    with pytest.raises(NotStarShaped):
        oracle.quad_polyhedron([1.0, 0.0, 0.0], U_SLAB)


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        oracle.quad_polyhedron([500.0, 0, 0], CUBE)
    with pytest.raises(BudgetExceeded):
        oracle.quad_polygon([1e3, 0, 0], shapes.triangle())


@pytest.mark.parametrize("mesh", [CUBE, L_SLAB, U_SLAB], ids=["convex", "L", "U"])
def test_monte_carlo_within_error(mesh):
    q = np.array([1.0, 0.5, 0.3])
    exact = ff_polyhedron(q, mesh).value
    r = oracle.mc_polyhedron(q, mesh, 10**5, seed=3)
    assert abs(r.value - exact) <= 4 * r.est_error


def test_monte_carlo_reproducible_and_scaling():
    q = [2.0, 1.0, 0.0]
    a = oracle.mc_polyhedron(q, CUBE, 10**4, seed=7)
    b = oracle.mc_polyhedron(q, CUBE, 10**4, seed=7)
    assert a == b
    big = oracle.mc_polyhedron(q, CUBE, 10**6, seed=7)
    assert 5 < a.est_error / big.est_error < 20


def test_monte_carlo_minimum_samples():
    with pytest.raises(ValueError):
        oracle.mc_polyhedron([1.0, 0, 0], CUBE, 100)
