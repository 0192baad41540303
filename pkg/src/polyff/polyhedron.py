"""Form factor of a polyhedron as a weighted sum of face form factors."""
from __future__ import annotations

import numpy as np

from . import kernels as K
from .errors import InvalidPairing, NotConverged, QZero
from .linalg import cvec, norm_sq, sinc
from .mesh import Polygon, Polyhedron, SymmetryPairing, check_pairing
from .polygon import DEFAULT_CONFIG, EvalConfig, EvalResult, Method, _homed, ff_polygon

_NO_PRIMARY = np.zeros(0, dtype=np.int64)


def _call(q, mesh: Polyhedron, cfg: EvalConfig, mode: int, primary=_NO_PRIMARY):
    tab = mesh.table
    coeffs = np.zeros(cfg.max_order + 2, dtype=np.complex128)
    out = K.poly_ff(
        cvec(q), tab.geo, cfg.as_tuple(), tab.workspace(cfg.max_order), mesh.volume, mesh.a, primary, mode, coeffs
    )
    return out, coeffs


def _result(out, cfg) -> EvalResult:
    val, method, terms, ok, _ = out
    if not ok:
        raise NotConverged(f"series not converged after {cfg.max_order} orders")
    return EvalResult(complex(val), Method(int(method)), int(terms), True)


def _require_q(q):
    q = cvec(q)
    if norm_sq(q) == 0.0:
        raise QZero("q = 0; the form factor is the volume")
    return q


def ff_polyhedron_analytic(q, mesh: Polyhedron, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Divergence-theorem face sum, each face via the polygon dispatcher."""
    q = _require_q(q)
    (val, *_), _ = _call(q, mesh, cfg, K.ANALYTIC)
    return complex(val)


def ff_polyhedron_raw(q, mesh: Polyhedron) -> complex:
    """Closed form for the body and every face, without any series fallback.

    Loses accuracy as q -> 0; exposed to demonstrate exactly that.
    """
    q = _require_q(q)
    (val, *_), _ = _call(q, mesh, DEFAULT_CONFIG, K.RAW)
    return complex(val)


def coeff_Fn(n: int, q, mesh: Polyhedron, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Coefficient F_n(q) of the small-q power series; F_0 is the volume."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return mesh.volume + 0j
    q = _require_q(q)
    cfg = EvalConfig(cfg.c, cfg.c_par, cfg.C, max(cfg.max_order, n), cfg.epsilon)
    tab = mesh.table
    coeffs = np.zeros(cfg.max_order + 2, dtype=np.complex128)
    K.poly_series(q, tab.geo, cfg.as_tuple(), tab.workspace(cfg.max_order), mesh.volume, n, coeffs)
    return complex(coeffs[n])


def ff_polyhedron_series(q, mesh: Polyhedron, cfg: EvalConfig = DEFAULT_CONFIG, fixed_order: int = 0) -> EvalResult:
    """Power series in q. ``fixed_order`` > 0 sums exactly that many orders."""
    q = cvec(q)
    if norm_sq(q) == 0.0:
        return EvalResult(mesh.volume + 0j, Method.SeriesFullQ, 0, True)
    if fixed_order > 0:
        cfg = EvalConfig(cfg.c, cfg.c_par, cfg.C, max(cfg.max_order, fixed_order), cfg.epsilon)
    tab = mesh.table
    coeffs = np.zeros(cfg.max_order + 2, dtype=np.complex128)
    val, n, ok = K.poly_series(
        q, tab.geo, cfg.as_tuple(), tab.workspace(cfg.max_order), mesh.volume, fixed_order, coeffs
    )
    if not ok:
        raise NotConverged(f"series not converged after {cfg.max_order} orders")
    return EvalResult(complex(val), Method.SeriesFullQ, int(n), True)


def ff_polyhedron(q, mesh: Polyhedron, cfg: EvalConfig = DEFAULT_CONFIG, pairing: SymmetryPairing | None = None) -> EvalResult:
    """Dispatched, numerically stable polyhedron form factor.

    Meshes whose origin lies far outside the body are evaluated about their
    centre of gravity and the translation phase is applied afterwards.
    """
    q = cvec(q)
    if pairing is not None:
        return ff_polyhedron_ci(q, mesh, pairing, cfg)
    target, shift = _homed(mesh)
    out, _ = _call(q, target, cfg, -1)
    res = _result(out, cfg)
    if shift is not None:
        res = EvalResult(res.value * np.exp(1j * np.dot(q, shift)), res.method, res.terms_used, res.converged)
    return res


def ff_polyhedron_ci(q, mesh: Polyhedron, pairing: SymmetryPairing, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    """Form factor of a body with inversion centre at the origin.

    Opposite faces are combined into one antisymmetrised term. Small q still
    goes through the generic power series.
    """
    q = cvec(q)
    check_pairing(mesh, pairing)
    primary = np.ascontiguousarray(pairing.primary, dtype=np.int64)
    if len(primary) != pairing.half_count:
        raise InvalidPairing("pairing does not split the faces in half")
    out, _ = _call(q, mesh, cfg, K.SYMMETRY_PATH, primary)
    return _result(out, cfg)


def evaluate_many(qs, mesh: Polyhedron, cfg: EvalConfig = DEFAULT_CONFIG, pairing: SymmetryPairing | None = None, mode=None):
    """Vectorised evaluation over an (N, 3) array of wavevectors.

    Returns (values, methods, terms, signatures). No re-homing is applied.
    ``mode`` overrides the dispatch (see :func:`polyff.kernels.poly_ff`).
    """
    qs = np.ascontiguousarray(np.atleast_2d(qs), dtype=np.complex128)
    n = len(qs)
    if pairing is not None:
        check_pairing(mesh, pairing)
        primary = np.ascontiguousarray(pairing.primary, dtype=np.int64)
        mode = K.SYMMETRY_PATH if mode is None else mode
    else:
        primary = _NO_PRIMARY
        mode = -1 if mode is None else mode
    vals = np.empty(n, dtype=np.complex128)
    methods = np.empty(n, dtype=np.int64)
    terms = np.empty(n, dtype=np.int64)
    conv = np.empty(n, dtype=np.bool_)
    sigs = np.empty(n, dtype=np.int64)
    tab = mesh.table
    coeffs = np.zeros(cfg.max_order + 2, dtype=np.complex128)
    K.poly_ff_many(
        qs, tab.geo, cfg.as_tuple(), tab.workspace(cfg.max_order), mesh.volume, mesh.a, primary, mode,
        coeffs, vals, methods, terms, conv, sigs,
    )
    if not conv.all():
        raise NotConverged(f"series not converged after {cfg.max_order} orders")
    return vals, methods, terms, sigs


def ff_prism(q, base: Polygon, h: float, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Prism spanning -h/2..h/2 along the base normal, by factorisation.

    ``base`` must contain the origin's foot point in its own plane; only its
    in-plane geometry matters.
    """
    q = cvec(q)
    n = base.normal
    qn = complex(np.dot(q, n))
    q_par = q - qn * n
    # in-plane factor from the base moved into the plane through the origin
    flat = base if base.r_perp == 0.0 else Polygon(base.vertices - base.r_perp * n, name=base.name)
    return complex(h * sinc(qn * h / 2) * ff_polygon(q_par, flat, cfg).value)
