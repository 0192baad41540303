"""Hot loops: per-face and per-polyhedron form factor evaluation.

Everything here is written in scalar style over flat arrays so that it runs
unchanged either compiled by numba or as plain Python (see ``_backend``).
Faces are stored in their own orthonormal frame (e1, e2, n): in-plane
coordinates of half-edges E and midpoints R are 2-vectors, and the
wavevector enters only through its components q1 = q.e1, q2 = q.e2 and
qp = q.n. With q_par = s*u (s real, |u| = 1) every series coefficient is
homogeneous, f_m(q_par) = s**m f_m(u), which keeps tiny or huge s free of
under- and overflow.

Method codes are shared with :class:`polyff.polygon.Method`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernel

ANALYTIC = 0
SERIES_FULL_Q = 1
SERIES_IN_PLANE = 2
QPAR_ZERO = 3
Q_ZERO = 4
SYMMETRY_PATH = 5
# polyhedron mode: closed form for the body and for every face, no safeguards
RAW = -2

_SIG_MOD = 2147483647


@dataclass(frozen=True)
class FaceTable:
    """Flat per-face arrays consumed by the kernels."""

    fstart: np.ndarray  # int64[K+1], edge offsets
    frame: np.ndarray  # float64[K, 3, 3], rows e1, e2, n
    rperp: np.ndarray
    area: np.ndarray
    arad: np.ndarray  # max |V| per face
    E: np.ndarray  # float64[Vt, 2]
    R: np.ndarray  # float64[Vt, 2], in-plane part only
    s2half: np.ndarray  # int64[K], 0 if the face lacks S2 symmetry

    @classmethod
    def from_faces(cls, polygons) -> "FaceTable":
        from .mesh import detect_symmetry

        fstart = [0]
        frames, rperp, area, arad, E, R, s2 = [], [], [], [], [], [], []
        for p in polygons:
            fr = p.frame
            edges = p.edges
            frames.append(fr)
            rperp.append(p.r_perp)
            area.append(p.area)
            arad.append(p.a)
            E.append(edges.E @ fr[:2].T)
            R.append(edges.R @ fr[:2].T)
            pair = detect_symmetry(p)
            s2.append(pair.half_count if pair is not None else 0)
            fstart.append(fstart[-1] + len(p.vertices))
        return cls(
            np.array(fstart, dtype=np.int64),
            np.ascontiguousarray(frames, dtype=float),
            np.array(rperp, dtype=float),
            np.array(area, dtype=float),
            np.array(arad, dtype=float),
            np.ascontiguousarray(np.concatenate(E), dtype=float),
            np.ascontiguousarray(np.concatenate(R), dtype=float),
            np.array(s2, dtype=np.int64),
        )

    @property
    def geo(self):
        return (self.fstart, self.frame, self.rperp, self.area, self.arad, self.E, self.R, self.s2half)

    @property
    def n_faces(self) -> int:
        return len(self.area)

    def workspace(self, max_order: int):
        Vt = len(self.E)
        K = len(self.area)
        return (
            np.zeros(Vt, dtype=np.complex128),  # w
            np.zeros(Vt, dtype=np.complex128),  # ex
            np.zeros(Vt, dtype=np.complex128),  # rx
            np.zeros((Vt, max_order // 2 + 3), dtype=np.complex128),  # ep
            np.zeros((Vt, max_order + 3), dtype=np.complex128),  # rp
            np.zeros((K, max_order + 3), dtype=np.complex128),  # g
            np.zeros((K, max_order + 3), dtype=np.complex128),  # tp
        )


@kernel
def csinc(z):
    if z == 0:
        return 1.0 + 0.0j
    return cmath.sin(z) / z


@kernel
def ipow(n):
    r = n % 4
    if r == 0:
        return 1.0 + 0.0j
    if r == 1:
        return 1.0j
    if r == 2:
        return -1.0 + 0.0j
    return -1.0j


@kernel
def project(q, frame, k):
    q1 = q[0] * frame[k, 0, 0] + q[1] * frame[k, 0, 1] + q[2] * frame[k, 0, 2]
    q2 = q[0] * frame[k, 1, 0] + q[1] * frame[k, 1, 1] + q[2] * frame[k, 1, 2]
    qp = q[0] * frame[k, 2, 0] + q[1] * frame[k, 2, 1] + q[2] * frame[k, 2, 2]
    return q1, q2, qp


@kernel
def edge_tables(u1, u2, E, R, j0, j1, order, w, ex, rx, ep, rp):
    """Per-edge weights conj(u_cross).E, dots u.E, u.R and their scaled powers.

    ep[j, l] = (u.E)^(2l) / (2l+1)!, rp[j, k] = (u.R)^k / k!, k <= order + 1.
    """
    cu1 = u1.conjugate()
    cu2 = u2.conjugate()
    for j in range(j0, j1):
        w[j] = -cu2 * E[j, 0] + cu1 * E[j, 1]
        e = u1 * E[j, 0] + u2 * E[j, 1]
        r = u1 * R[j, 0] + u2 * R[j, 1]
        ex[j] = e
        rx[j] = r
        rp[j, 0] = 1.0
        for kk in range(1, order + 2):
            rp[j, kk] = rp[j, kk - 1] * r / kk
        e2 = e * e
        ep[j, 0] = 1.0
        for ll in range(1, (order + 1) // 2 + 1):
            ep[j, ll] = ep[j, ll - 1] * e2 / ((2 * ll) * (2 * ll + 1))


@kernel
def inplane_coeff(m, j0, j1, w, ep, rp):
    """f_m(u) for a unit in-plane direction u, from the edge tables."""
    N = m + 1
    acc = 0.0j
    for j in range(j0, j1):
        s = 0.0j
        for ll in range(N // 2 + 1):
            s += ep[j, ll] * rp[j, N - 2 * ll]
        acc += w[j] * s
    return 2.0 * acc


@kernel
def face_series_full(s, tau, area, j0, j1, k, max_order, eps, fixed, w, ep, rp, g, tp):
    """sum_n i^n f_n(q) with f_n(q) = sum_m tau^(n-m)/(n-m)! s^m f_m(u).

    ``fixed`` > 0 sums exactly that many orders without the termination test.
    Returns (value, last order, converged); g[k, n] keeps s^n f_n(u) and
    tp[k, n] keeps tau^n/n! for callers that want the coefficients.
    """
    g[k, 0] = area
    tp[k, 0] = 1.0
    total = area + 0.0j
    sp = 1.0
    nmax = fixed if fixed > 0 else max_order
    for n in range(1, nmax + 1):
        sp *= s
        g[k, n] = sp * inplane_coeff(n, j0, j1, w, ep, rp) if sp != 0.0 else 0.0j
        tp[k, n] = tp[k, n - 1] * tau / n
        fn = 0.0j
        for m in range(n + 1):
            fn += tp[k, n - m] * g[k, m]
        t = ipow(n) * fn
        total += t
        if fixed <= 0 and n % 2 == 0 and abs(t) < eps * abs(total):
            return total, n, True
    return total, nmax, fixed > 0


@kernel
def face_series_inplane(s, area, j0, j1, k, max_order, eps, fixed, w, ep, rp, g):
    """sum_m i^m s^m f_m(u), i.e. the in-plane form factor, phase excluded."""
    g[k, 0] = area
    total = area + 0.0j
    sp = 1.0
    nmax = fixed if fixed > 0 else max_order
    for m in range(1, nmax + 1):
        sp *= s
        gm = sp * inplane_coeff(m, j0, j1, w, ep, rp) if sp != 0.0 else 0.0j
        g[k, m] = gm
        t = ipow(m) * gm
        total += t
        if fixed <= 0 and m % 2 == 0 and abs(t) < eps * abs(total):
            return total, m, True
    return total, nmax, fixed > 0


@kernel
def face_analytic_sum(s, u1, u2, E, R, j0, j1):
    """sum_j conj(u_cross).E_j sinc(q_par.E_j) exp(i q_par.R_j)."""
    cu1 = u1.conjugate()
    cu2 = u2.conjugate()
    acc = 0.0j
    for j in range(j0, j1):
        wj = -cu2 * E[j, 0] + cu1 * E[j, 1]
        e = u1 * E[j, 0] + u2 * E[j, 1]
        r = u1 * R[j, 0] + u2 * R[j, 1]
        acc += wj * csinc(s * e) * cmath.exp(1j * s * r)
    return acc


@kernel
def face_s2_sum(s, u1, u2, E, R, j0, h):
    """Half-chain sum with sin(q_par.R_j) for centrosymmetric faces."""
    cu1 = u1.conjugate()
    cu2 = u2.conjugate()
    acc = 0.0j
    for j in range(j0, j0 + h):
        wj = -cu2 * E[j, 0] + cu1 * E[j, 1]
        e = u1 * E[j, 0] + u2 * E[j, 1]
        r = u1 * R[j, 0] + u2 * R[j, 1]
        acc += wj * csinc(s * e) * cmath.sin(s * r)
    return acc


@kernel
def face_ff(q, k, geo, cfg, work, use_s2, force):
    """Form factor of face k at q.

    ``force`` selects a method regardless of thresholds: -1 dispatch,
    ANALYTIC, SERIES_FULL_Q or SERIES_IN_PLANE. Returns
    (value, method, terms, converged).
    """
    fstart, frame, rperp, area, arad, E, R, s2half = geo
    c, c_par, C, max_order, eps = cfg
    w, ex, rx, ep, rp, g, tp = work
    q1, q2, qp = project(q, frame, k)
    s = math.sqrt(q1.real**2 + q1.imag**2 + q2.real**2 + q2.imag**2)
    tau = qp * rperp[k]
    phase = cmath.exp(1j * tau)
    j0 = fstart[k]
    j1 = fstart[k + 1]
    if force < 0 or force == SERIES_FULL_Q:
        if s == 0.0 or s < eps * abs(qp):
            return phase * area[k], QPAR_ZERO, 0, True
    if s == 0.0:
        u1 = 1.0 + 0.0j
        u2 = 0.0j
    else:
        u1 = q1 / s
        u2 = q2 / s
    if force < 0 and use_s2 and s2half[k] > 0:
        acc = face_s2_sum(s, u1, u2, E, R, j0, s2half[k])
        return phase * (4.0 / s) * acc, SYMMETRY_PATH, 0, True
    qabs = math.sqrt(s * s + qp.real**2 + qp.imag**2)
    if force == SERIES_FULL_Q or (force < 0 and arad[k] * qabs < c):
        edge_tables(u1, u2, E, R, j0, j1, max_order + 1, w, ex, rx, ep, rp)
        val, n, ok = face_series_full(s, tau, area[k], j0, j1, k, max_order, eps, 0, w, ep, rp, g, tp)
        return val, SERIES_FULL_Q, n, ok
    if force == SERIES_IN_PLANE or (force < 0 and arad[k] * s < c_par):
        edge_tables(u1, u2, E, R, j0, j1, max_order + 1, w, ex, rx, ep, rp)
        val, n, ok = face_series_inplane(s, area[k], j0, j1, k, max_order, eps, 0, w, ep, rp, g)
        return phase * val, SERIES_IN_PLANE, n, ok
    acc = face_analytic_sum(s, u1, u2, E, R, j0, j1)
    return phase * (2.0 / (1j * s)) * acc, ANALYTIC, 0, True


@kernel
def face_ff_anti(q, k, geo, cfg, work, force):
    """f(q, face) - f(-q, face): the combined contribution of an inverted pair."""
    fstart, frame, rperp, area, arad, E, R, s2half = geo
    c, c_par, C, max_order, eps = cfg
    w, ex, rx, ep, rp, g, tp = work
    q1, q2, qp = project(q, frame, k)
    s = math.sqrt(q1.real**2 + q1.imag**2 + q2.real**2 + q2.imag**2)
    tau = qp * rperp[k]
    if s == 0.0 or s < eps * abs(qp):
        return 2j * cmath.sin(tau) * area[k], QPAR_ZERO, 0, True
    u1 = q1 / s
    u2 = q2 / s
    j0 = fstart[k]
    j1 = fstart[k + 1]
    if force == SERIES_IN_PLANE or (force < 0 and arad[k] * s < c_par):
        edge_tables(u1, u2, E, R, j0, j1, max_order + 1, w, ex, rx, ep, rp)
        even = area[k] + 0.0j
        odd = 0.0j
        sp = 1.0
        for m in range(1, max_order + 1):
            sp *= s
            gm = sp * inplane_coeff(m, j0, j1, w, ep, rp) if sp != 0.0 else 0.0j
            t = ipow(m) * gm
            if m % 2 == 0:
                even += t
                if abs(t) < eps * abs(even + odd):
                    return 2j * cmath.sin(tau) * even + 2.0 * cmath.cos(tau) * odd, SERIES_IN_PLANE, m, True
            else:
                odd += t
        return 2j * cmath.sin(tau) * even + 2.0 * cmath.cos(tau) * odd, SERIES_IN_PLANE, max_order, False
    h = s2half[k]
    if h > 0:
        acc = face_s2_sum(s, u1, u2, E, R, j0, h)
        return (8j * cmath.sin(tau) / s) * acc, SYMMETRY_PATH, 0, True
    cu1 = u1.conjugate()
    cu2 = u2.conjugate()
    acc = 0.0j
    for j in range(j0, j1):
        wj = -cu2 * E[j, 0] + cu1 * E[j, 1]
        e = u1 * E[j, 0] + u2 * E[j, 1]
        r = u1 * R[j, 0] + u2 * R[j, 1]
        acc += wj * csinc(s * e) * cmath.cos(tau + s * r)
    return (4.0 / (1j * s)) * acc, ANALYTIC, 0, True


@kernel
def poly_series(q, geo, cfg, work, volume, fixed, coeffs):
    """sum_n i^n F_n(q) with F_0 = volume; coeffs[n] receives F_n(q)."""
    fstart, frame, rperp, area, arad, E, R, s2half = geo
    c, c_par, C, max_order, eps = cfg
    w, ex, rx, ep, rp, g, tp = work
    K = len(area)
    Q = math.sqrt(abs(q[0]) ** 2 + abs(q[1]) ** 2 + abs(q[2]) ** 2)
    coeffs[0] = volume
    if Q == 0.0:
        return volume + 0.0j, 0, True
    qh0 = q[0] / Q
    qh1 = q[1] / Q
    qh2 = q[2] / Q
    qh = np.empty(3, dtype=np.complex128)
    qh[0] = qh0
    qh[1] = qh1
    qh[2] = qh2
    nmax = fixed if fixed > 0 else max_order
    shat = np.zeros(K)
    wgt = np.zeros(K, dtype=np.complex128)
    for k in range(K):
        q1, q2, qp = project(qh, frame, k)
        s = math.sqrt(q1.real**2 + q1.imag**2 + q2.real**2 + q2.imag**2)
        wgt[k] = (
            qh0.conjugate() * frame[k, 2, 0] + qh1.conjugate() * frame[k, 2, 1] + qh2.conjugate() * frame[k, 2, 2]
        )
        g[k, 0] = area[k]
        tp[k, 0] = 1.0
        tp[k, 1] = qp * rperp[k]
        if s == 0.0 or s < eps * abs(qp):
            shat[k] = 0.0
            g[k, 1] = 0.0
        else:
            shat[k] = s
            edge_tables(q1 / s, q2 / s, E, R, fstart[k], fstart[k + 1], nmax + 1, w, ex, rx, ep, rp)
            g[k, 1] = s * inplane_coeff(1, fstart[k], fstart[k + 1], w, ep, rp)
    total = volume + 0.0j
    Qp = 1.0
    for n in range(1, nmax + 1):
        Qp *= Q
        Fn = 0.0j
        m1 = n + 1
        for k in range(K):
            if shat[k] == 0.0:
                g[k, m1] = 0.0
            else:
                g[k, m1] = shat[k] ** m1 * inplane_coeff(m1, fstart[k], fstart[k + 1], w, ep, rp)
            tp[k, m1] = tp[k, n] * tp[k, 1] / m1
            f = 0.0j
            for m in range(m1 + 1):
                f += tp[k, m1 - m] * g[k, m]
            Fn += wgt[k] * f
        coeffs[n] = Qp * Fn
        t = ipow(n) * coeffs[n]
        total += t
        if fixed <= 0 and n % 2 == 0 and abs(t) < eps * abs(total):
            return total, n, True
    return total, nmax, fixed > 0


@kernel
def _top_sig(method, terms):
    # body-level route, offset so that no method maps to zero
    return (method + 3) * 64 + terms


@kernel
def poly_ff(q, geo, cfg, work, volume, a, primary, mode, coeffs):
    """Dispatched polyhedron form factor.

    ``mode``: -1 dispatch generic, SYMMETRY_PATH dispatch with inversion-pair faces
    ``primary`` (one face per pair), ANALYTIC forces the generic face sum,
    RAW additionally forces every face to its closed form, SERIES_FULL_Q
    forces the series. Returns (value, method, terms,
    converged, signature) where the signature fingerprints the per-face
    methods so that callers can detect any change of computation path.
    """
    fstart, frame, rperp, area, arad, E, R, s2half = geo
    c, c_par, C, max_order, eps = cfg
    Q = math.sqrt(abs(q[0]) ** 2 + abs(q[1]) ** 2 + abs(q[2]) ** 2)
    if Q == 0.0 and mode != ANALYTIC and mode != RAW:
        return volume + 0.0j, Q_ZERO, 0, True, _top_sig(Q_ZERO, 0)
    if mode == SERIES_FULL_Q or (mode == -1 or mode == SYMMETRY_PATH) and a * Q < C:
        val, n, ok = poly_series(q, geo, cfg, work, volume, 0, coeffs)
        return val, SERIES_FULL_Q, n, ok, _top_sig(SERIES_FULL_Q, n)
    cq0 = q[0].conjugate() / Q
    cq1 = q[1].conjugate() / Q
    cq2 = q[2].conjugate() / Q
    acc = 0.0j
    sig = _top_sig(SYMMETRY_PATH if mode == SYMMETRY_PATH else ANALYTIC, 0)
    ok = True
    if mode == SYMMETRY_PATH:
        for idx in range(len(primary)):
            k = primary[idx]
            fk, mk, tk, ck = face_ff_anti(q, k, geo, cfg, work, -1)
            acc += (cq0 * frame[k, 2, 0] + cq1 * frame[k, 2, 1] + cq2 * frame[k, 2, 2]) * fk
            sig = (sig * 31 + mk * 64 + tk) % _SIG_MOD
            ok = ok and ck
        return acc / (1j * Q), SYMMETRY_PATH, 0, ok, sig
    face_mode = ANALYTIC if mode == RAW else -1
    for k in range(len(area)):
        fk, mk, tk, ck = face_ff(q, k, geo, cfg, work, False, face_mode)
        acc += (cq0 * frame[k, 2, 0] + cq1 * frame[k, 2, 1] + cq2 * frame[k, 2, 2]) * fk
        sig = (sig * 31 + mk * 64 + tk) % _SIG_MOD
        ok = ok and ck
    return acc / (1j * Q), ANALYTIC, 0, ok, sig


@kernel
def poly_ff_many(qs, geo, cfg, work, volume, a, primary, mode, coeffs, vals, methods, terms, conv, sigs):
    for i in range(qs.shape[0]):
        v, m, t, ok, sg = poly_ff(qs[i], geo, cfg, work, volume, a, primary, mode, coeffs)
        vals[i] = v
        methods[i] = m
        terms[i] = t
        conv[i] = ok
        sigs[i] = sg


@kernel
def face_ff_many(qs, k, geo, cfg, work, use_s2, force, vals, methods, terms, conv):
    for i in range(qs.shape[0]):
        v, m, t, ok = face_ff(qs[i], k, geo, cfg, work, use_s2, force)
        vals[i] = v
        methods[i] = m
        terms[i] = t
        conv[i] = ok
