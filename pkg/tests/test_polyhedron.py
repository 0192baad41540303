import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyff import shapes
from polyff.errors import InvalidPairing, NotConverged, QZero
from polyff.mesh import SymmetryPairing, detect_symmetry, translate
from polyff.oracle import quad_polyhedron
from polyff.polygon import EvalConfig, Method
from polyff.polyhedron import (
    coeff_Fn,
    evaluate_many,
    ff_polyhedron,
    ff_polyhedron_analytic,
    ff_polyhedron_ci,
    ff_polyhedron_raw,
    ff_polyhedron_series,
    ff_prism,
)

from conftest import random_unit

CUBE = shapes.cube()


def test_cube_known_value():
    assert ff_polyhedron([np.pi] * 3, CUBE).value == pytest.approx((2 / np.pi) ** 3, rel=1e-14)
    assert ff_polyhedron_analytic([np.pi] * 3, CUBE) == pytest.approx((2 / np.pi) ** 3, rel=1e-14)


def test_q_zero():
    r = ff_polyhedron(np.zeros(3), CUBE)
    assert r.value == CUBE.volume and r.method == Method.QZero
    with pytest.raises(QZero):
        ff_polyhedron_analytic(np.zeros(3), CUBE)
    with pytest.raises(QZero):
        ff_polyhedron_raw(np.zeros(3), CUBE)


def test_coefficients_cube():
    t = 0.3
    q = np.array([t, 0, 0])
    assert coeff_Fn(0, q, CUBE) == CUBE.volume
    assert abs(coeff_Fn(1, q, CUBE)) <= 1e-16
    # second moment of the unit cube: t^2 / 12, halved by the 1/2! factor
    assert coeff_Fn(2, q, CUBE) == pytest.approx(t**2 / 24, rel=1e-13)
    assert coeff_Fn(4, q, CUBE) == pytest.approx(t**4 / 1920, rel=1e-12)
    with pytest.raises(ValueError):
        coeff_Fn(-1, q, CUBE)


def test_coefficients_resum(rng):
    fig = shapes.truncated_tetrahedron_fig()
    q = 0.2 / fig.a * random_unit(rng)
    total = sum(1j**n * coeff_Fn(n, q, fig) for n in range(30))
    assert total == pytest.approx(ff_polyhedron_analytic(q, fig), rel=1e-13)


def test_series_small_q():
    ico = shapes.icosahedron()
    for t in (1e-12, 1e-8, 1e-4):
        q = t * np.array([0.3, -0.4, 0.5])
        r = ff_polyhedron(q, ico)
        assert r.method == Method.SeriesFullQ
        assert r.value == pytest.approx(ico.volume, rel=max(1e-15, t))
    assert ff_polyhedron_series(np.zeros(3), ico).value == ico.volume


def test_series_not_converged():
    with pytest.raises(NotConverged):
        ff_polyhedron_series([3.0, 0, 0], CUBE, EvalConfig(max_order=4))


def test_dispatch_switches_at_threshold():
    cfg = EvalConfig()
    d = np.array([1.0, 2.0, 2.0]) / 3
    below = ff_polyhedron(0.99 * cfg.C / CUBE.a * d, CUBE)
    above = ff_polyhedron(1.01 * cfg.C / CUBE.a * d, CUBE)
    assert below.method == Method.SeriesFullQ
    assert above.method == Method.Analytic
    assert above.value == pytest.approx(below.value, rel=1e-2)


def test_ci_path_real_and_consistent(rng):
    dod = shapes.dodecahedron()
    pairing = detect_symmetry(dod)
    assert pairing is not None and pairing.kind == "Ci"
    for _ in range(20):
        q = 10 ** rng.uniform(-6, 1.5) / dod.a * random_unit(rng)
        fast = ff_polyhedron_ci(q, dod, pairing)
        generic = ff_polyhedron(q, dod)
        assert fast.value.imag == 0.0 or abs(fast.value.imag) <= 1e-15 * abs(fast.value)
        assert fast.value == pytest.approx(generic.value, rel=1e-12)


def test_ci_rejects_bad_pairing():
    pairing = detect_symmetry(CUBE)
    bad = SymmetryPairing("Ci", pairing.half_count, np.roll(pairing.partner, 1))
    with pytest.raises(InvalidPairing):
        ff_polyhedron_ci([1.0, 0.2, 0.1], CUBE, bad)
    with pytest.raises(InvalidPairing):
        ff_polyhedron_ci([1.0, 0.2, 0.1], shapes.tetrahedron(), pairing)


def test_prism_factorisation(rng):
    base = shapes.regular_polygon(6, 0.8, "edge_normal_x")
    prism = shapes.regular_prism(6, 0.8, 1.3)
    for _ in range(20):
        q = 10 ** rng.uniform(-5, 1.3) * (random_unit(rng) + 0.05j * random_unit(rng))
        assert ff_prism(q, base, 1.3) == pytest.approx(ff_polyhedron(q, prism).value, rel=1e-11)


def test_raw_degrades_at_small_q():
    fig = shapes.truncated_tetrahedron_fig()
    q = 1e-8 / fig.a * np.array([1.0, 2.0, 3.0]) / np.sqrt(14)
    assert abs(ff_polyhedron_raw(q, fig) - fig.volume) > 1e-3 * fig.volume
    first_order = fig.volume * np.exp(1j * np.dot(q, fig.centroid))
    assert ff_polyhedron(q, fig).value == pytest.approx(first_order, rel=1e-14)


def test_rehoming_far_mesh():
    far = translate(CUBE, [40.0, -25.0, 10.0])
    for q in ([1e-9, 0, 2e-9], [0.5, 0.3, -0.2], [2.0, 1.0, 0.3 + 0.1j]):
        expected = np.exp(-1j * np.dot(q, [40.0, -25.0, 10.0])) * ff_polyhedron(q, CUBE).value
        assert ff_polyhedron(q, far).value == pytest.approx(expected, rel=1e-12)


def test_evaluate_many_matches_scalar(rng):
    fig = shapes.cuboctahedron()
    qs = 10 ** rng.uniform(-6, 1, 30)[:, None] * np.array([random_unit(rng) for _ in range(30)])
    vals, methods, terms, sigs = evaluate_many(qs, fig)
    for q, v, m in zip(qs, vals, methods):
        r = ff_polyhedron(q, fig)
        assert v == r.value and m == r.method
    assert len(sigs) == len(qs)


def test_oracle_agreement():
    fig = shapes.pyramid_frustum(4, 1.0, 60.0, 0.6)
    q = np.array([3.0, -1.0, 2.0]) + 0.2j * np.array([0.1, 0.5, -0.3])
    ref = quad_polyhedron(q, fig, 1e-12)
    assert ff_polyhedron(q, fig).value == pytest.approx(ref.value, rel=1e-10)


@given(st.integers(0, 10**6), st.floats(-6, 1.3))
def test_hermitian_and_bound(seed, log_qa):
    rng = np.random.default_rng(seed)
    figs = list(shapes.suite().values())
    fig = figs[seed % len(figs)]
    q = 10**log_qa / fig.a * random_unit(rng)
    f = ff_polyhedron(q, fig).value
    assert abs(ff_polyhedron(-q, fig).value - np.conj(f)) <= 1e-13 * abs(f)
    assert abs(f) <= fig.volume * (1 + 1e-14)
