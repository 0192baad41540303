"""Brute-force reference integrals for testing.

The quadrature oracles split the figure into simplices fanned out from its
centre of gravity and apply conical-product Gauss rules (Gauss-Jacobi in
the collapsed directions, Gauss-Legendre otherwise). The rule order is
raised level by level until two successive levels agree. Nothing in the
evaluation path imports this module.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import BudgetExceeded, NotStarShaped
from .linalg import cvec
from .mesh import Polygon, Polyhedron

MAX_NODES = 2**20
MAX_AQ_POLYGON = 200.0
MAX_AQ_POLYHEDRON = 100.0
ORDERS = (4, 8, 12, 16, 20, 24, 28, 32, 40, 48, 56, 64, 80, 96, 128)


@dataclass(frozen=True)
class OracleResult:
    value: complex
    est_error: float
    evaluations: int


@lru_cache(maxsize=None)
def _rule01(n: int, power: int):
    """Nodes and weights on [0, 1] for the weight u**power."""
    x, w = roots_jacobi(n, 0.0, float(power))
    return (x + 1) / 2, w / 2 ** (power + 1)


def _qabs(q) -> float:
    return float(np.sqrt(np.sum(np.abs(q) ** 2)))


def _triangles(chain: Polygon):
    """Fan triangles (apex, V_j, V_{j+1}) from the area centroid."""
    V = chain.vertices
    c = chain.centroid
    A = np.broadcast_to(c, V.shape)
    B, C = V, np.roll(V, -1, axis=0)
    signed = 0.5 * np.cross(B - A, C - A) @ chain.normal
    return A, B, C, signed


def _triangle_nodes(A, B, C, area, n):
    """Conical product rule on a batch of triangles; returns (points, weights)."""
    u, wu = _rule01(n, 1)
    v, wv = _rule01(n, 0)
    U, Vv = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv).ravel()
    U, Vv = U.ravel(), Vv.ravel()
    # x = A + u (B - A) + u v (C - B), Jacobian 2 area u
    pts = (A[:, None, :] + U[None, :, None] * (B - A)[:, None, :]
           + (U * Vv)[None, :, None] * (C - B)[:, None, :])
    return pts, 2 * area[:, None] * W[None, :]


def _tetra_nodes(A, B, C, D, vol, n):
    u, wu = _rule01(n, 2)
    v, wv = _rule01(n, 1)
    t, wt = _rule01(n, 0)
    U, Vv, T = (g.ravel() for g in np.meshgrid(u, v, t, indexing="ij"))
    W = (wu[:, None, None] * wv[None, :, None] * wt[None, None, :]).ravel()
    pts = (A[:, None, :] + U[None, :, None] * (B - A)[:, None, :]
           + (U * Vv)[None, :, None] * (C - B)[:, None, :]
           + (U * Vv * T)[None, :, None] * (D - C)[:, None, :])
    return pts, 6 * vol[:, None] * W[None, :]


def _refine(integrate, nodes_per_level, scale: float, tol: float) -> OracleResult:
    prev = None
    total = 0
    for n in ORDERS:
        count = nodes_per_level(n)
        if count > MAX_NODES:
            break
        val = integrate(n)
        total += count
        if prev is not None:
            err = abs(val - prev)
            if err < tol * (abs(val) + scale):
                return OracleResult(complex(val), float(err), total)
        prev = val
    raise BudgetExceeded(f"quadrature did not reach tol={tol} within {MAX_NODES} nodes per level")


def quad_polygon(q, chain, tol: float = 1e-12) -> OracleResult:
    """Direct integral of exp(i q.r) over a planar polygon."""
    chain = chain if isinstance(chain, Polygon) else Polygon(chain)
    q = cvec(q)
    if chain.a * _qabs(q) > MAX_AQ_POLYGON:
        raise BudgetExceeded(f"a|q| = {chain.a * _qabs(q):.3g} exceeds the oracle guard {MAX_AQ_POLYGON}")
    A, B, C, area = _triangles(chain)
    if np.any(area <= 0):
        raise NotStarShaped("polygon is not star-shaped about its centroid")

    def integrate(n):
        pts, w = _triangle_nodes(A, B, C, area, n)
        return np.sum(w * np.exp(1j * (pts @ q)))

    return _refine(integrate, lambda n: len(area) * n * n, chain.area, tol)


def _tetrahedra(mesh: Polyhedron):
    """Tetrahedra (COG, face centroid, V_j, V_{j+1}) and their signed volumes."""
    cog = mesh.centroid
    As, Bs, Cs, Ds = [], [], [], []
    for poly in mesh.polygons:
        V = poly.vertices
        As.append(np.broadcast_to(cog, V.shape))
        Bs.append(np.broadcast_to(poly.centroid, V.shape))
        Cs.append(V)
        Ds.append(np.roll(V, -1, axis=0))
    A, B, C, D = (np.vstack(x) for x in (As, Bs, Cs, Ds))
    vol = np.einsum("ij,ij->i", B - A, np.cross(C - A, D - A)) / 6
    return A, B, C, D, vol


def quad_polyhedron(q, mesh: Polyhedron, tol: float = 1e-10) -> OracleResult:
    """Direct volume integral of exp(i q.r) over a star-shaped polyhedron."""
    q = cvec(q)
    if mesh.a * _qabs(q) > MAX_AQ_POLYHEDRON:
        raise BudgetExceeded(f"a|q| = {mesh.a * _qabs(q):.3g} exceeds the oracle guard {MAX_AQ_POLYHEDRON}")
    A, B, C, D, vol = _tetrahedra(mesh)
    if np.any(vol <= 0):
        raise NotStarShaped("fan tetrahedralisation from the centre of gravity overlaps itself")

    def integrate(n):
        chunk = max(1, MAX_NODES // (4 * n**3))
        acc = []
        for i in range(0, len(vol), chunk):
            s = slice(i, i + chunk)
            pts, w = _tetra_nodes(A[s], B[s], C[s], D[s], vol[s], n)
            acc.append(np.sum(w * np.exp(1j * (pts @ q)), axis=1))
        return np.sum(np.concatenate(acc))

    return _refine(integrate, lambda n: len(vol) * n**3, mesh.volume, tol)


def _is_convex(mesh: Polyhedron) -> bool:
    V = mesh.vertices
    for poly in mesh.polygons:
        if np.any((V - poly.vertices[0]) @ poly.normal > 1e-12 * mesh.a):
            return False
    return True


def _inside(mesh: Polyhedron, pts: np.ndarray, convex: bool) -> np.ndarray:
    if convex:
        ok = np.ones(len(pts), dtype=bool)
        for poly in mesh.polygons:
            ok &= (pts - poly.vertices[0]) @ poly.normal <= 0
        return ok
    # winding number: total solid angle of the fan-triangulated surface / 4 pi
    omega = np.zeros(len(pts))
    for poly in mesh.polygons:
        V = poly.vertices
        for j in range(1, len(V) - 1):
            a, b, c = V[0] - pts, V[j] - pts, V[j + 1] - pts
            la, lb, lc = (np.linalg.norm(x, axis=1) for x in (a, b, c))
            num = np.einsum("ij,ij->i", a, np.cross(b, c))
            den = (la * lb * lc + np.einsum("ij,ij->i", a, b) * lc
                   + np.einsum("ij,ij->i", b, c) * la + np.einsum("ij,ij->i", c, a) * lb)
            omega += 2 * np.arctan2(num, den)
    return omega > 2 * np.pi


def mc_polyhedron(q, mesh: Polyhedron, n: int = 10**5, seed: int = 0) -> OracleResult:
    """Monte Carlo estimate with uniform sampling of the bounding box."""
    if n < 10**4:
        raise ValueError("Monte Carlo needs n >= 1e4 samples")
    q = cvec(q)
    rng = np.random.default_rng(seed)
    lo, hi = mesh.vertices.min(0), mesh.vertices.max(0)
    box = float(np.prod(hi - lo))
    convex = _is_convex(mesh)
    s1 = 0j
    s2 = 0.0
    chunk = 1 << 16
    done = 0
    while done < n:
        m = min(chunk, n - done)
        pts = lo + rng.random((m, 3)) * (hi - lo)
        vals = np.where(_inside(mesh, pts, convex), np.exp(1j * (pts @ q)), 0)
        s1 += np.sum(vals)
        s2 += float(np.sum(np.abs(vals) ** 2))
        done += m
    mean = s1 / n
    var = max(s2 / n - abs(mean) ** 2, 0.0)
    return OracleResult(complex(box * mean), float(box * np.sqrt(var / (n - 1))), n)
