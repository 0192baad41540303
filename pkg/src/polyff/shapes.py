"""Constructors for the standard test shapes.

Solids are centred at their centre of gravity, except frusta, whose base
lies in the z = 0 plane centred on the z axis. Regular bases are oriented
with one edge normal to the x axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .errors import InvalidSpec
from .mesh import Polygon, Polyhedron, orthonormal_frame

PHI = (1 + np.sqrt(5)) / 2


def _regular_ngon(J: int, L: float, start: float) -> np.ndarray:
    R = L / (2 * np.sin(np.pi / J))
    ang = start + 2 * np.pi * np.arange(J) / J
    return np.column_stack([R * np.cos(ang), R * np.sin(ang), np.zeros(J)])


def regular_polygon(J: int = 3, L: float = 1.0, orientation: str = "edge_x") -> Polygon:
    """Regular J-gon in the z = 0 plane, centred at the origin.

    ``edge_x``: the lowest edge runs along x; ``edge_normal_x``: an edge is
    crossed perpendicularly by the +x axis.
    """
    if J < 3 or L <= 0:
        raise InvalidSpec("regular polygon needs J >= 3 and L > 0")
    if orientation == "edge_x":
        start = -np.pi / 2 - np.pi / J
    elif orientation == "edge_normal_x":
        start = -np.pi / J
    else:
        raise InvalidSpec(f"unknown orientation {orientation!r}")
    return Polygon(_regular_ngon(J, L, start), name=f"regular_polygon_{J}")


def triangle(L: float = 1.0) -> Polygon:
    """Equilateral triangle, edge along x, z = 0."""
    p = regular_polygon(3, L, "edge_x")
    p.name = "triangle"
    return p


def convex_hull_polyhedron(points, name: str = "convex", tol: float = 1e-9) -> Polyhedron:
    """Polyhedron from the convex hull of ``points``, coplanar facets merged."""
    pts = np.asarray(points, dtype=float)
    hull = ConvexHull(pts)
    scale = np.abs(pts).max()
    groups: list[tuple[np.ndarray, float, set]] = []
    for simplex, eq in zip(hull.simplices, hull.equations):
        n, d = eq[:3], eq[3]
        for gn, gd, verts in groups:
            if np.abs(gn - n).max() < tol and abs(gd - d) < tol * scale:
                verts.update(simplex.tolist())
                break
        else:
            groups.append((n, d, set(simplex.tolist())))
    used = sorted({v for _, _, vs in groups for v in vs})
    remap = {old: new for new, old in enumerate(used)}
    faces = []
    for n, _, verts in groups:
        idx = np.array(sorted(verts))
        c = pts[idx].mean(0)
        e1, e2, _ = orthonormal_frame(n)
        ang = np.arctan2((pts[idx] - c) @ e2, (pts[idx] - c) @ e1)
        faces.append([remap[i] for i in idx[np.argsort(ang)]])
    return Polyhedron(pts[used], faces, name=name)


def box(Lx: float = 1.0, Ly: float = 1.0, Lz: float = 1.0) -> Polyhedron:
    if min(Lx, Ly, Lz) <= 0:
        raise InvalidSpec("box edges must be positive")
    pts = [[sx * Lx / 2, sy * Ly / 2, sz * Lz / 2] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
    return convex_hull_polyhedron(pts, "box")


def cube(L: float = 1.0) -> Polyhedron:
    p = box(L, L, L)
    p.name = "cube"
    return p


def _perms(base):
    out = []
    for v in base:
        for k in range(3):
            out.append(np.roll(v, k))
    return np.unique(np.round(np.array(out), 15), axis=0)


def _signs(v):
    v = np.asarray(v, dtype=float)
    out = set()
    for sx in (-1, 1):
        for sy in (-1, 1):
            for sz in (-1, 1):
                out.add(tuple(np.array([sx, sy, sz]) * v + 0.0))
    return [np.array(p) for p in out]


def tetrahedron(L: float = 1.0) -> Polyhedron:
    s = L / (2 * np.sqrt(2))
    pts = s * np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return convex_hull_polyhedron(pts, "tetrahedron")


def octahedron(L: float = 1.0) -> Polyhedron:
    pts = _perms(_signs([1, 0, 0])) * (L / np.sqrt(2))
    return convex_hull_polyhedron(pts, "octahedron")


def icosahedron(L: float = 1.0) -> Polyhedron:
    pts = _perms(_signs([0, 1, PHI])) * (L / 2)
    return convex_hull_polyhedron(pts, "icosahedron")


def dodecahedron(L: float = 1.0) -> Polyhedron:
    base = _signs([1, 1, 1]) + _signs([0, 1 / PHI, PHI])
    pts = _perms(base) * (L * PHI / 2)
    return convex_hull_polyhedron(pts, "dodecahedron")


def cuboctahedron(L: float = 1.0) -> Polyhedron:
    pts = _perms(_signs([1, 1, 0])) * (L / np.sqrt(2))
    return convex_hull_polyhedron(pts, "cuboctahedron")


def truncated_cube(L: float = 1.0, t: float = 2 - np.sqrt(2)) -> Polyhedron:
    """Cube of edge L with each corner cut at t*L/2 along its three edges.

    The default t gives the Archimedean solid (regular octagons).
    """
    if not 0 < t < 1:
        raise InvalidSpec("truncation t must lie in (0, 1)")
    x = L / 2
    y = L / 2 - t * L / 2
    pts = _perms(_signs([y, x, x]))
    return convex_hull_polyhedron(pts, "truncated_cube")


def regular_prism(J: int = 6, L: float = 1.0, H: float = 1.0) -> Polyhedron:
    """Right prism over a regular J-gon, spanning z = -H/2 .. H/2."""
    if J < 3 or L <= 0 or H <= 0:
        raise InvalidSpec("prism needs J >= 3, L > 0, H > 0")
    base = _regular_ngon(J, L, -np.pi / J)
    pts = np.vstack([base - [0, 0, H / 2], base + [0, 0, H / 2]])
    return _extrusion(pts[:J], pts[J:], f"prism_{J}")


def _extrusion(bottom: np.ndarray, top: np.ndarray, name: str) -> Polyhedron:
    """Solid between two similar polygons (bottom CCW seen from +z)."""
    J = len(bottom)
    V = np.vstack([bottom, top])
    faces = [list(range(J - 1, -1, -1)), list(range(J, 2 * J))]
    for j in range(J):
        k = (j + 1) % J
        faces.append([j, k, J + k, J + j])
    return Polyhedron(V, faces, name=name)


def pyramid_frustum(J: int = 4, base_edge: float = 1.0, alpha: float = 72.0, H: float = 0.5,
                    base_edge2: float | None = None) -> Polyhedron:
    """Frustum of a pyramid with all side faces at dihedral angle ``alpha`` (degrees).

    The base is a regular J-gon (J >= 3) or, for J = 2, a base_edge x
    base_edge2 rectangle, lying in z = 0; the top polygon is the base shrunk
    by H / tan(alpha) along every apothem.
    """
    if not 0 < alpha <= 90:
        raise InvalidSpec("dihedral angle must lie in (0, 90] degrees")
    if base_edge <= 0 or H <= 0:
        raise InvalidSpec("base edge and height must be positive")
    shrink = 0.0 if alpha == 90 else H / np.tan(np.radians(alpha))
    if J == 2:
        Ly = base_edge if base_edge2 is None else base_edge2
        ax, ay = base_edge / 2, Ly / 2
        if shrink >= min(ax, ay):
            raise InvalidSpec("height reaches the apex")
        corners = np.array([[1, -1], [1, 1], [-1, 1], [-1, -1]], dtype=float)
        bottom = np.column_stack([corners[:, 0] * ax, corners[:, 1] * ay, np.zeros(4)])
        top = np.column_stack([corners[:, 0] * (ax - shrink), corners[:, 1] * (ay - shrink), np.full(4, H)])
        return _extrusion(bottom, top, "frustum_2")
    if J < 3:
        raise InvalidSpec("J must be 2 or at least 3")
    bottom = _regular_ngon(J, base_edge, -np.pi / J)
    apothem = base_edge / (2 * np.tan(np.pi / J))
    if shrink >= apothem:
        raise InvalidSpec("height reaches the apex")
    top = bottom * (1 - shrink / apothem)
    top[:, 2] = H
    return _extrusion(bottom, top, f"frustum_{J}")


def truncated_tetrahedron_fig() -> Polyhedron:
    """Trigonal frustum: base edge 1 (one edge along y), 72 degree sides, H = 1/2."""
    p = pyramid_frustum(3, 1.0, 72.0, 0.5)
    p.name = "truncated_tetrahedron_fig"
    return p


@dataclass(frozen=True)
class ShapeSpec:
    name: str
    params: dict = field(default_factory=dict)


CONSTRUCTORS = {
    "regular_polygon": regular_polygon,
    "triangle": triangle,
    "box": box,
    "regular_prism": regular_prism,
    "pyramid_frustum": pyramid_frustum,
    "tetrahedron": tetrahedron,
    "cube": cube,
    "octahedron": octahedron,
    "dodecahedron": dodecahedron,
    "icosahedron": icosahedron,
    "cuboctahedron": cuboctahedron,
    "truncated_cube": truncated_cube,
    "truncated_tetrahedron_fig": truncated_tetrahedron_fig,
}


def make(spec: ShapeSpec | str, **params):
    if isinstance(spec, str):
        spec = ShapeSpec(spec, params)
    try:
        ctor = CONSTRUCTORS[spec.name]
    except KeyError:
        raise InvalidSpec(f"unknown shape {spec.name!r}; choose from {sorted(CONSTRUCTORS)}") from None
    try:
        return ctor(**spec.params)
    except TypeError as exc:
        raise InvalidSpec(f"bad parameters for {spec.name}: {exc}") from None


# the verification suite: frusta of 2-, 3-, 4-, 6-fold symmetry and four solids
SUITE = {
    "frustum_2": ShapeSpec("pyramid_frustum", {"J": 2, "base_edge": 1.0, "base_edge2": 0.6, "alpha": 65.0, "H": 0.4}),
    "frustum_3": ShapeSpec("pyramid_frustum", {"J": 3, "base_edge": 1.0, "alpha": 72.0, "H": 0.5}),
    "frustum_4": ShapeSpec("pyramid_frustum", {"J": 4, "base_edge": 1.0, "alpha": 60.0, "H": 0.6}),
    "frustum_6": ShapeSpec("pyramid_frustum", {"J": 6, "base_edge": 0.6, "alpha": 55.0, "H": 0.5}),
    "cuboctahedron": ShapeSpec("cuboctahedron"),
    "truncated_cube": ShapeSpec("truncated_cube"),
    "dodecahedron": ShapeSpec("dodecahedron"),
    "icosahedron": ShapeSpec("icosahedron"),
}


def suite(extended: bool = False) -> dict:
    """Name -> Polyhedron for the verification suite.

    ``extended`` adds the cube, tetrahedron and octahedron.
    """
    out = {name: make(spec) for name, spec in SUITE.items()}
    if extended:
        out.update(cube=cube(), tetrahedron=tetrahedron(), octahedron=octahedron())
    for name, fig in out.items():
        fig.name = name
    return out


def scale_to_circumradius(fig, a: float):
    from .mesh import scale

    return scale(fig, a / fig.a)
