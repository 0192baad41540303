"""Polygons, polyhedra, and their derived geometry.

A :class:`Polygon` is a planar vertex chain whose orientation defines its
normal (counterclockwise about the normal). A :class:`Polyhedron` is a set of
such faces over a shared vertex list, each face counterclockwise as seen from
outside. Both validate on construction and are immutable afterwards.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateChain,
    InvalidMesh,
    InvalidPairing,
    NegativeWinding,
    NotPlanar,
)
from .linalg import Plane, orthonormal_frame

PLANARITY_TOL = 1e-10
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class EdgeMidpointRep:
    """Half-edge vectors E_j = (V_j - V_{j-1})/2 and midpoints R_j."""

    E: np.ndarray
    R: np.ndarray


@dataclass(frozen=True)
class EnclosingRadii:
    a: float
    b: np.ndarray  # one entry per face


@dataclass(frozen=True)
class PolygonDiagnostics:
    planarity_residual: float
    area: float
    winding: int


@dataclass
class MeshDiagnostics:
    ok: bool
    violations: list = field(default_factory=list)
    volume: float = float("nan")
    closure_residual: float = float("nan")


@dataclass(frozen=True)
class SymmetryPairing:
    """Index map pairing each element with its inverted partner.

    For ``kind == "S2"`` the elements are vertices of a polygon with
    ``partner[j] = (j + half_count) % J``; for ``"Ci"`` they are faces.
    """

    kind: str
    half_count: int
    partner: np.ndarray

    @property
    def primary(self) -> np.ndarray:
        idx = np.arange(len(self.partner))
        return idx[idx < self.partner]


def _newell(V: np.ndarray) -> np.ndarray:
    return np.cross(np.roll(V, 1, axis=0), V).sum(axis=0)


def _diameter(V: np.ndarray) -> float:
    d = V[:, None, :] - V[None, :, :]
    return float(np.sqrt((d**2).sum(-1).max()))


def plane_of(vertices) -> Plane:
    """Oriented plane of a vertex chain, from the summed edge cross products."""
    V = _as_vertices(vertices)
    if len(V) < 3:
        raise DegenerateChain("a vertex chain needs at least 3 vertices")
    N = _newell(V)
    norm = np.linalg.norm(N)
    scale = max(_diameter(V), float(np.abs(V).max()) * 1e-8) ** 2
    if not norm > 1e-14 * scale:
        raise DegenerateChain("vertex chain encloses zero area")
    n = N / norm
    return Plane(n, float(np.mean(V @ n)))


def _as_vertices(vertices) -> np.ndarray:
    if isinstance(vertices, Polygon):
        return vertices.vertices
    V = np.array(vertices, dtype=float)
    if V.ndim != 2 or V.shape[1] != 3:
        raise ValueError("vertices must have shape (J, 3)")
    if not np.all(np.isfinite(V)):
        raise ValueError("vertex coordinates must be finite")
    return V


def _segments_cross(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(p3, p4, p1), orient(p3, p4, p2)
    d3, d4 = orient(p1, p2, p3), orient(p1, p2, p4)
    return d1 * d2 < 0 and d3 * d4 < 0


def validate_polygon(vertices, tol: float = PLANARITY_TOL, normal=None, strict: bool = False):
    """Check planarity, nonzero area, and winding; raise on the first failure.

    ``normal``, if given, is the expected orientation: a chain running
    clockwise about it raises :class:`NegativeWinding`. ``strict`` adds an
    O(J^2) test for self-intersecting edges.
    """
    V = _as_vertices(vertices)
    plane = plane_of(V)
    diam = _diameter(V)
    resid = float(np.abs(V @ plane.normal - plane.r_perp).max())
    if resid > tol * diam:
        raise NotPlanar(f"out-of-plane deviation {resid:.3g} exceeds {tol:g} x diameter {diam:.3g}")
    N = _newell(V)
    winding = 1
    if normal is not None:
        winding = 1 if float(np.dot(N, normal)) > 0 else -1
        if winding < 0:
            raise NegativeWinding("chain runs clockwise about the reference normal")
    if strict:
        xy = V @ orthonormal_frame(plane.normal)[:2].T
        J = len(V)
        for i in range(J):
            for k in range(i + 2, J):
                if i == 0 and k == J - 1:
                    continue
                if _segments_cross(xy[i - 1], xy[i], xy[k - 1], xy[k]):
                    raise DegenerateChain(f"edges {i} and {k} intersect")
    return PolygonDiagnostics(resid / diam, 0.5 * float(np.linalg.norm(N)), winding)


class Polygon:
    """Planar polygon given by a simple vertex chain."""

    def __init__(self, vertices, name: str = "polygon", normal=None, tol: float = PLANARITY_TOL, strict=False):
        V = _as_vertices(vertices)
        V.setflags(write=False)
        self.vertices = V
        self.name = name
        self.diagnostics = validate_polygon(V, tol=tol, normal=normal, strict=strict)

    def __repr__(self):
        return f"Polygon({self.name!r}, J={len(self.vertices)})"

    def __len__(self):
        return len(self.vertices)

    @cached_property
    def plane(self) -> Plane:
        return plane_of(self.vertices)

    @property
    def normal(self) -> np.ndarray:
        return self.plane.normal

    @property
    def r_perp(self) -> float:
        return self.plane.r_perp

    @cached_property
    def area(self) -> float:
        """Surveyor's formula."""
        return 0.5 * float(np.dot(self.normal, _newell(self.vertices)))

    @cached_property
    def edges(self) -> EdgeMidpointRep:
        V = self.vertices
        Vm = np.roll(V, 1, axis=0)
        return EdgeMidpointRep((V - Vm) / 2, (V + Vm) / 2)

    @cached_property
    def a(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).max())

    @cached_property
    def b(self) -> float:
        V = self.vertices
        Vpar = V - np.outer(V @ self.normal, self.normal)
        return float(np.linalg.norm(Vpar, axis=1).max())

    @cached_property
    def frame(self) -> np.ndarray:
        return orthonormal_frame(self.normal)

    @cached_property
    def centroid(self) -> np.ndarray:
        V = self.vertices
        n = self.normal
        tri_a = 0.5 * np.cross(V[1:-1] - V[0], V[2:] - V[0]) @ n
        cents = (V[0] + V[1:-1] + V[2:]) / 3
        return (tri_a[:, None] * cents).sum(0) / tri_a.sum()

    @cached_property
    def table(self):
        from .kernels import FaceTable

        return FaceTable.from_faces([self])


class Polyhedron:
    """Closed polyhedron with outward-oriented polygonal faces."""

    def __init__(self, vertices, faces, name: str = "polyhedron"):
        V = _as_vertices(vertices)
        V.setflags(write=False)
        self.vertices = V
        self.faces = [tuple(int(i) for i in f) for f in faces]
        self.name = name
        diag = _mesh_diagnostics(V, self.faces)
        if not diag.ok:
            raise InvalidMesh("; ".join(diag.violations))
        self.diagnostics = diag
        self.polygons = [Polygon(V[list(f)], name=f"{name}[{k}]") for k, f in enumerate(self.faces)]

    def __repr__(self):
        return f"Polyhedron({self.name!r}, K={len(self.faces)})"

    @cached_property
    def volume(self) -> float:
        return sum(p.area * p.r_perp for p in self.polygons) / 3.0

    @cached_property
    def a(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).max())

    @cached_property
    def centroid(self) -> np.ndarray:
        return _polyhedron_centroid(self)

    @cached_property
    def table(self):
        from .kernels import FaceTable

        return FaceTable.from_faces(self.polygons)


Figure = Polygon | Polyhedron


def area(chain) -> float:
    if not isinstance(chain, Polygon):
        chain = Polygon(chain)
    return chain.area


def edge_midpoint_rep(chain) -> EdgeMidpointRep:
    if not isinstance(chain, Polygon):
        chain = Polygon(chain)
    return chain.edges


def volume(mesh: Polyhedron) -> float:
    if mesh.volume <= 0:
        raise InvalidMesh("non-positive volume")
    return mesh.volume


def _mesh_diagnostics(V: np.ndarray, faces) -> MeshDiagnostics:
    diag = MeshDiagnostics(ok=True)
    if len(faces) < 4:
        diag.violations.append(f"only {len(faces)} faces")
    polys = []
    for k, f in enumerate(faces):
        if len(f) < 3 or any(i < 0 or i >= len(V) for i in f):
            diag.violations.append(f"face {k}: bad vertex indices {f}")
            continue
        try:
            polys.append(Polygon(V[list(f)]))
        except (NotPlanar, DegenerateChain) as exc:
            diag.violations.append(f"face {k}: {type(exc).__name__}: {exc}")
    directed = Counter()
    for f in faces:
        for j in range(len(f)):
            directed[(f[j - 1], f[j])] += 1
    for (i, j), cnt in directed.items():
        if cnt > 1:
            diag.violations.append(f"edge {i}->{j} traversed {cnt} times (inconsistent orientation)")
        elif directed.get((j, i), 0) != 1:
            diag.violations.append(f"edge {i}->{j} has no opposite partner (surface not closed)")
    if len(polys) == len(faces) and polys:
        vol = sum(p.area * p.r_perp for p in polys) / 3.0
        total = sum(p.area for p in polys)
        resid = float(np.linalg.norm(sum(p.area * p.normal for p in polys))) / total
        diag.volume = vol
        diag.closure_residual = resid
        if not vol > 0:
            diag.violations.append(f"non-positive volume {vol:.6g} (normals point inward)")
        if resid > 1e-12:
            diag.violations.append(f"normal-area closure residual {resid:.3g} exceeds 1e-12")
    diag.ok = not diag.violations
    return diag


def validate_mesh(mesh) -> MeshDiagnostics:
    """Collect every violation of a closed, outward-oriented surface."""
    if isinstance(mesh, Polyhedron):
        return _mesh_diagnostics(mesh.vertices, mesh.faces)
    vertices, faces = mesh
    return _mesh_diagnostics(_as_vertices(vertices), [tuple(int(i) for i in f) for f in faces])


def enclosing_radii(fig) -> EnclosingRadii:
    if isinstance(fig, Polygon):
        return EnclosingRadii(fig.a, np.array([fig.b]))
    return EnclosingRadii(fig.a, np.array([p.b for p in fig.polygons]))


def _polyhedron_centroid(mesh: Polyhedron) -> np.ndarray:
    vols, cents = [], []
    for p in mesh.polygons:
        V = p.vertices
        for j in range(1, len(V) - 1):
            a, b, c = V[0], V[j], V[j + 1]
            vols.append(np.dot(a, np.cross(b, c)) / 6.0)
            cents.append((a + b + c) / 4.0)
    vols = np.array(vols)
    return (vols[:, None] * np.array(cents)).sum(0) / vols.sum()


def center_of_gravity(fig) -> np.ndarray:
    return fig.centroid.copy()


def translate(fig, v):
    """Shift the figure by -v, i.e. move the origin to v."""
    v = np.asarray(v, dtype=float)
    if isinstance(fig, Polygon):
        return Polygon(fig.vertices - v, name=fig.name)
    return Polyhedron(fig.vertices - v, fig.faces, name=fig.name)


def transform(fig, M):
    """Apply a linear map; reflections get their face orientation restored."""
    M = np.asarray(M, dtype=float)
    V = fig.vertices @ M.T
    flip = np.linalg.det(M) < 0
    if isinstance(fig, Polygon):
        return Polygon(V[::-1] if flip else V, name=fig.name)
    faces = [tuple(reversed(f)) for f in fig.faces] if flip else fig.faces
    return Polyhedron(V, faces, name=fig.name)


def scale(fig, s: float):
    return transform(fig, s * np.eye(3))


def _s2_pairing(poly: Polygon, tol: float):
    V = poly.vertices
    J = len(V)
    if J % 2:
        return None
    n = poly.normal
    Vpar = V - np.outer(V @ n, n)
    h = J // 2
    if np.abs(Vpar + np.roll(Vpar, -h, axis=0)).max() > tol * max(poly.a, 1e-300):
        return None
    return SymmetryPairing("S2", h, (np.arange(J) + h) % J)


def _ci_pairing(mesh: Polyhedron, tol: float):
    K = len(mesh.polygons)
    if K % 2:
        return None
    atol = tol * mesh.a
    cents = np.array([p.vertices.mean(0) for p in mesh.polygons])
    partner = -np.ones(K, dtype=int)
    for k, p in enumerate(mesh.polygons):
        d = np.abs(cents + cents[k]).max(axis=1)
        cands = np.nonzero(d <= atol)[0]
        for c in cands:
            W = mesh.polygons[c].vertices
            if len(W) != len(p.vertices):
                continue
            dist = np.abs(-p.vertices[:, None, :] - W[None, :, :]).max(-1)
            if np.all(dist.min(axis=1) <= atol):
                partner[k] = c
                break
        if partner[k] < 0:
            return None
    if np.any(partner[partner] != np.arange(K)) or np.any(partner == np.arange(K)):
        return None
    return SymmetryPairing("Ci", K // 2, partner)


def detect_symmetry(fig, tol: float = SYMMETRY_TOL):
    """S2 pairing for a polygon, Ci pairing for a polyhedron, or None.

    The inversion center is the current origin (its foot point in the plane
    for a polygon), so place the origin before calling.
    """
    if isinstance(fig, Polygon):
        return _s2_pairing(fig, tol)
    return _ci_pairing(fig, tol)


def check_pairing(fig, pairing: SymmetryPairing, tol: float = 1e-10) -> None:
    expected = "S2" if isinstance(fig, Polygon) else "Ci"
    if pairing.kind != expected:
        raise InvalidPairing(f"{pairing.kind} pairing supplied for a figure needing {expected}")
    found = detect_symmetry(fig, tol)
    if found is None or not np.array_equal(found.partner, np.asarray(pairing.partner)):
        raise InvalidPairing(f"figure does not have the claimed {pairing.kind} symmetry")


# shape files ---------------------------------------------------------------


def figure_to_dict(fig) -> dict:
    if isinstance(fig, Polygon):
        faces = [list(range(len(fig.vertices)))]
    else:
        faces = [list(f) for f in fig.faces]
    return {
        "name": fig.name,
        "vertices": [[float(x) for x in v] for v in fig.vertices],
        "faces": faces,
    }


def figure_from_dict(data: dict):
    for key in ("name", "vertices", "faces"):
        if key not in data:
            raise InvalidMesh(f"shape file lacks required key {key!r}")
    V = np.array(data["vertices"], dtype=float)
    if V.ndim != 2 or V.shape[1] != 3:
        raise InvalidMesh("'vertices' must be an array of [x, y, z] triples")
    faces = data["faces"]
    if len(faces) == 1:
        return Polygon(V[list(faces[0])], name=data["name"])
    return Polyhedron(V, faces, name=data["name"])


def dumps(fig) -> str:
    return json.dumps(figure_to_dict(fig), indent=1)


def load(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidMesh(f"not a valid shape file: {exc}") from exc
    return figure_from_dict(data)


def save(fig, path) -> None:
    Path(path).write_text(dumps(fig) + "\n", encoding="utf-8")
