"""Form factor of a planar polygon embedded in 3-D space.

The public entry point is :func:`ff_polygon`, which chooses between the
closed-form edge sum and two power series so that the result stays accurate
across the removable singularity at q_par = 0. The individual paths are
exposed as well, chiefly for testing.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .errors import NotConverged, QParZero, SingularDenominator
from .linalg import EPS, cvec, decompose
from .mesh import Polygon, SymmetryPairing, check_pairing, translate


class Method(enum.IntEnum):
    Analytic = K.ANALYTIC
    SeriesFullQ = K.SERIES_FULL_Q
    SeriesInPlane = K.SERIES_IN_PLANE
    QParZero = K.QPAR_ZERO
    QZero = K.Q_ZERO
    SymmetryPath = K.SYMMETRY_PATH


@dataclass(frozen=True)
class EvalConfig:
    """Switching thresholds and series limits.

    ``c``: full-q polygon series if a|q| < c; ``c_par``: in-plane series if
    a|q_par| < c_par; ``C``: polyhedron series if a|q| < C.
    """

    c: float = 3e-2
    c_par: float = 3e-2
    C: float = 1e-1
    max_order: int = 40
    epsilon: float = EPS

    def __post_init__(self):
        for name in ("c", "c_par", "C"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"threshold {name}={v} outside (0, 1)")
        if self.max_order < 4:
            raise ValueError("max_order must be at least 4")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    def as_tuple(self):
        return (float(self.c), float(self.c_par), float(self.C), int(self.max_order), float(self.epsilon))


DEFAULT_CONFIG = EvalConfig()


@dataclass(frozen=True)
class EvalResult:
    value: complex
    method: Method
    terms_used: int = 0
    converged: bool = True


def _as_polygon(chain) -> Polygon:
    return chain if isinstance(chain, Polygon) else Polygon(chain)


def _face_call(q, chain: Polygon, cfg: EvalConfig, use_s2=False, force=-1):
    tab = chain.table
    return K.face_ff(cvec(q), 0, tab.geo, cfg.as_tuple(), tab.workspace(cfg.max_order), use_s2, force)


def _check(val, method, terms, ok, cfg) -> EvalResult:
    if not ok:
        raise NotConverged(f"series not converged after {cfg.max_order} orders")
    return EvalResult(complex(val), Method(int(method)), int(terms), bool(ok))


def _require_qpar(q, chain: Polygon):
    d = decompose(q, chain.plane)
    if d.q_par_is_zero:
        raise QParZero("in-plane wavevector is zero; use the q_par = 0 limit")
    return d


def ff_polygon_analytic(q, chain) -> complex:
    """Closed-form edge sum; valid but cancellation-prone for small q_par."""
    chain = _as_polygon(chain)
    _require_qpar(q, chain)
    val, *_ = _face_call(q, chain, DEFAULT_CONFIG, force=K.ANALYTIC)
    return complex(val)


def coeff_fn(n: int, q, chain) -> complex:
    """Coefficient f_n(q) of the full-q power series (n = 0 gives the area)."""
    chain = _as_polygon(chain)
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return chain.area + 0j
    d = _require_qpar(q, chain)
    tab = chain.table
    work = tab.workspace(max(n, 4))
    w, ex, rx, ep, rp, g, tp = work
    s = float(np.sqrt(d.norm_sq_q_par))
    q1, q2, qp = K.project(d.q, tab.frame, 0)
    K.edge_tables(q1 / s, q2 / s, tab.E, tab.R, 0, len(tab.E), n + 1, w, ex, rx, ep, rp)
    K.face_series_full(s, qp * tab.rperp[0], tab.area[0], 0, len(tab.E), 0, n, EPS, n, w, ep, rp, g, tp)
    return complex(sum(tp[0, n - m] * g[0, m] for m in range(n + 1)))


def ff_polygon_series_full_q(q, chain, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    chain = _as_polygon(chain)
    q = cvec(q)
    if not np.any(q):
        return EvalResult(chain.area + 0j, Method.SeriesFullQ, 0, True)
    d = decompose(q, chain.plane)
    if d.q_par_is_zero:
        # all in-plane coefficients vanish beyond order 0
        return EvalResult(np.exp(1j * d.q_perp_scalar * chain.r_perp) * chain.area, Method.SeriesFullQ, 0, True)
    return _check(*_face_call(q, chain, cfg, force=K.SERIES_FULL_Q), cfg)


def ff_polygon_series_inplane(q, chain, cfg: EvalConfig = DEFAULT_CONFIG) -> EvalResult:
    chain = _as_polygon(chain)
    q = cvec(q)
    d = decompose(q, chain.plane)
    if d.q_par_is_zero:
        return EvalResult(np.exp(1j * d.q_perp_scalar * chain.r_perp) * chain.area, Method.SeriesInPlane, 0, True)
    return _check(*_face_call(q, chain, cfg, force=K.SERIES_IN_PLANE), cfg)


def needs_rehoming(fig) -> bool:
    """True if the origin lies outside the COG-centred sphere enclosing all vertices."""
    cog = fig.centroid
    radius = np.linalg.norm(fig.vertices - cog, axis=1).max()
    return bool(np.linalg.norm(cog) > radius)


def _homed(fig):
    """(figure to evaluate, origin shift) for the dispatchers."""
    cached = fig.__dict__.get("_homed")
    if cached is None:
        if needs_rehoming(fig):
            v = fig.centroid.copy()
            cached = (translate(fig, v), v)
        else:
            cached = (fig, None)
        fig.__dict__["_homed"] = cached
    return cached


def ff_polygon(q, chain, cfg: EvalConfig = DEFAULT_CONFIG, pairing: SymmetryPairing | None = None) -> EvalResult:
    """Dispatched, numerically stable polygon form factor."""
    chain = _as_polygon(chain)
    q = cvec(q)
    if pairing is not None:
        return EvalResult(ff_polygon_s2(q, chain, pairing), Method.SymmetryPath, 0, True)
    target, shift = _homed(chain)
    res = _check(*_face_call(q, target, cfg), cfg)
    if shift is not None:
        res = EvalResult(res.value * np.exp(1j * np.dot(q, shift)), res.method, res.terms_used, res.converged)
    return res


def ff_polygon_many(qs, chain, cfg: EvalConfig = DEFAULT_CONFIG, use_s2: bool = False):
    """Vectorised :func:`ff_polygon` over an (N, 3) array of wavevectors.

    Returns (values, methods, terms). No re-homing is applied.
    """
    chain = _as_polygon(chain)
    qs = np.ascontiguousarray(np.atleast_2d(qs), dtype=np.complex128)
    n = len(qs)
    vals = np.empty(n, dtype=np.complex128)
    methods = np.empty(n, dtype=np.int64)
    terms = np.empty(n, dtype=np.int64)
    conv = np.empty(n, dtype=np.bool_)
    tab = chain.table
    K.face_ff_many(qs, 0, tab.geo, cfg.as_tuple(), tab.workspace(cfg.max_order), use_s2, -1, vals, methods, terms, conv)
    if not conv.all():
        raise NotConverged(f"series not converged after {cfg.max_order} orders")
    return vals, methods, terms


def ff_polygon_s2(q, chain, pairing: SymmetryPairing) -> complex:
    """Form factor of a centrosymmetric polygon; needs no series expansion."""
    chain = _as_polygon(chain)
    q = cvec(q)
    check_pairing(chain, pairing)
    tab = chain.table
    q1, q2, qp = K.project(q, tab.frame, 0)
    s = float(np.sqrt(abs(q1) ** 2 + abs(q2) ** 2))
    phase = np.exp(1j * qp * chain.r_perp)
    if s == 0.0 or s < EPS * abs(qp):
        return complex(phase * chain.area)
    acc = K.face_s2_sum(s, q1 / s, q2 / s, tab.E, tab.R, 0, pairing.half_count)
    return complex(phase * (4.0 / s) * acc)


def ff_polygon_leemittra(q, chain) -> complex:
    """Literature closed form with per-edge denominators; reference use only."""
    chain = _as_polygon(chain)
    q = cvec(q)
    _require_qpar(q, chain)
    E = chain.edges.E
    V = chain.vertices
    qE = E @ q
    qabs = np.sqrt(np.sum(np.abs(q) ** 2))
    if np.any(np.abs(qE) < 1e-12 * qabs * chain.a):
        raise SingularDenominator("q is orthogonal to an edge")
    Em = np.roll(E, 1, axis=0)
    qEm = np.roll(qE, 1)
    # V_{j-1} is the vertex shared by edges j-1 and j
    shared = np.roll(V, 1, axis=0)
    num = np.cross(Em, E) @ chain.normal
    return complex(np.sum(num / (qEm * qE) * np.exp(1j * (shared @ q))))
