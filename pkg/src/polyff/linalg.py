"""Complex 3-vector arithmetic and the plane-relative wavevector split.

Vectors are plain numpy arrays of shape (3,). Dot and cross products are
bilinear (no conjugation); conjugation is always explicit, as in
:func:`dot_conjugated` and :func:`norm_sq`.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

EPS = float(np.finfo(float).eps)


def cvec(v) -> np.ndarray:
    """Coerce to a finite complex 3-vector."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    if a.shape != (3,):
        raise ValueError(f"expected 3 components, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector components must be finite")
    return a


def rvec(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise ValueError(f"expected 3 components, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector components must be finite")
    return a


def dot_bilinear(u, v) -> complex:
    return complex(u[0] * v[0] + u[1] * v[1] + u[2] * v[2])


def dot_conjugated(u, v) -> complex:
    """Hermitian pairing sum(conj(u_i) * v_i)."""
    u = np.asarray(u)
    return complex(np.conj(u[0]) * v[0] + np.conj(u[1]) * v[1] + np.conj(u[2]) * v[2])


def cross(u, v) -> np.ndarray:
    return np.array(
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    )


def norm_sq(u) -> float:
    """Squared Hermitian norm; vanishes only for the zero vector."""
    u = np.asarray(u)
    return float(np.sum(u.real**2 + u.imag**2))


def sinc(z: complex) -> complex:
    """sin(z)/z, with sinc(0) = 1.

    Literal evaluation keeps full accuracy near zero because sin itself does.
    """
    if z == 0:
        return 1.0 + 0.0j
    z = complex(z)
    return cmath.sin(z) / z


@dataclass(frozen=True)
class Plane:
    """Oriented plane {r : r . normal = r_perp}."""

    normal: np.ndarray
    r_perp: float

    def __post_init__(self):
        n = rvec(self.normal)
        if abs(np.linalg.norm(n) - 1.0) > 1e-14:
            raise ValueError("plane normal must be a unit vector")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "r_perp", float(self.r_perp))


@dataclass(frozen=True)
class WavevectorDecomposition:
    q: np.ndarray
    q_perp: np.ndarray
    q_par: np.ndarray
    q_cross: np.ndarray
    q_perp_scalar: complex
    norm_sq_q: float
    norm_sq_q_par: float
    q_par_is_zero: bool


def decompose(q, plane: Plane) -> WavevectorDecomposition:
    """Split ``q`` into components normal to and within ``plane``.

    One projection-refinement pass removes the spurious out-of-plane part of
    q_par; a q_par smaller than machine epsilon relative to q_perp is set to
    exactly zero.
    """
    q = cvec(q)
    n = plane.normal
    qn = dot_bilinear(q, n)
    q_perp = qn * n
    q_par = q - q_perp
    q_par = q_par - dot_bilinear(q_par, n) * n
    ns_par = norm_sq(q_par)
    ns_perp = norm_sq(q_perp)
    if ns_par == 0.0 or np.sqrt(ns_par) < EPS * np.sqrt(ns_perp):
        q_par = np.zeros(3, dtype=complex)
        ns_par = 0.0
    q_cross = cross(n.astype(complex), q_par)
    return WavevectorDecomposition(
        q=q,
        q_perp=q_perp,
        q_par=q_par,
        q_cross=q_cross,
        q_perp_scalar=qn,
        norm_sq_q=norm_sq(q),
        norm_sq_q_par=ns_par,
        q_par_is_zero=ns_par == 0.0,
    )


def orthonormal_frame(n) -> np.ndarray:
    """Rows (e1, e2, n) of a right-handed orthonormal frame with e1 x e2 = n."""
    n = rvec(n)
    n = n / np.linalg.norm(n)
    # pick the axis least aligned with n
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(n)))] = 1.0
    e1 = helper - np.dot(helper, n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return np.array([e1, e2, n])


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation by ``angle`` (radians) about ``axis``."""
    k = rvec(axis)
    k = k / np.linalg.norm(k)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K
