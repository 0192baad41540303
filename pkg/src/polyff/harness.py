"""Internal-consistency checks: symmetry, specialisation and continuity.

All comparisons use the worst-case relative deviation

    delta = max_q |F1 - F2| / (|F1 + F2| / 2)

over a set of wavevectors spanning many decades in magnitude.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import shapes
from .errors import AllPairsDegenerate, NotASymmetry, NotConverged
from .linalg import rotation_matrix
from .mesh import Polygon, Polyhedron, detect_symmetry, transform, translate
from .polygon import DEFAULT_CONFIG, EvalConfig, Method, _homed, ff_polygon_many
from .polyhedron import evaluate_many

ETA = 8e-16
SYMMETRY_BOUND = 5e-10
SPECIALIZATION_BOUND = 3e-10
CONTINUITY_BOUND = 1e-9

DIRECTIONS = np.array([
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0],
    [1.0, 1.0, 1.0],
    [1e-3, 2e-3, 1.0],
    [1.0, 1e-4, -3e-4],
    [1.0, 2.0, 3.0],
    [-0.37, 0.81, 0.45],
])
DIRECTIONS = DIRECTIONS / np.linalg.norm(DIRECTIONS, axis=1)[:, None]
IMAG_DIRECTION = np.array([0.3, -0.5, 0.8]) / np.linalg.norm([0.3, -0.5, 0.8])


@dataclass
class DeltaReport:
    delta: float
    argmax_q: np.ndarray | None
    samples: int
    excluded: int = 0
    label: str = ""

    def to_dict(self):
        q = None if self.argmax_q is None else [[z.real, z.imag] for z in np.asarray(self.argmax_q)]
        return {"label": self.label, "delta": self.delta, "argmax_q": q, "samples": self.samples,
                "excluded": self.excluded}


@dataclass
class Switch:
    q_threshold: float
    method_below: str
    method_above: str
    terms_below: int
    terms_above: int
    delta_cont: float


@dataclass
class ContinuityReport:
    label: str
    switches: list = field(default_factory=list)

    @property
    def worst(self) -> float:
        return max((s.delta_cont for s in self.switches), default=0.0)


def delta(F1, F2, qs=None) -> DeltaReport:
    """Worst relative deviation between paired values.

    Pairs with F1 + F2 == 0 are skipped and counted in ``excluded``.
    """
    F1 = np.atleast_1d(np.asarray(F1, dtype=complex))
    F2 = np.atleast_1d(np.asarray(F2, dtype=complex))
    if F1.shape != F2.shape or F1.size == 0:
        raise ValueError("need two non-empty lists of equal length")
    den = np.abs(F1 + F2) / 2
    num = np.abs(F1 - F2)
    ok = den > 0
    if not ok.any():
        raise AllPairsDegenerate("every pair has F1 + F2 = 0")
    rel = np.where(ok, num / np.where(ok, den, 1.0), -1.0)
    i = int(np.argmax(rel))
    q = None if qs is None else np.asarray(qs)[i]
    return DeltaReport(float(rel[i]), q, int(F1.size), int((~ok).sum()))


def default_q_set(a: float, directions=DIRECTIONS, n_mag: int = 61, lo: float = 1e-6, hi: float = 1e2,
                  imag: float = 0.05) -> np.ndarray:
    """Log-spaced magnitudes x directions x {real, slightly complex}, shape (N, 3)."""
    mags = np.logspace(np.log10(lo), np.log10(hi), n_mag) / a
    out = []
    for d in np.asarray(directions, dtype=float):
        for dd in (d + 0j, d + 1j * imag * IMAG_DIRECTION):
            out.append(mags[:, None] * dd[None, :])
    return np.vstack(out)


def evaluate(fig, qs, cfg: EvalConfig = DEFAULT_CONFIG, symmetric: bool = False, mode=None):
    """Dispatched form factor over an (N, 3) array; returns (values, methods, terms, signatures).

    ``symmetric`` routes through the S2 / Ci fast path (pairing detected).
    """
    qs = np.ascontiguousarray(np.atleast_2d(qs), dtype=np.complex128)
    if symmetric:
        pairing = detect_symmetry(fig)
        if pairing is None:
            raise NotASymmetry(f"{fig.name} has no inversion symmetry about the origin")
        target, shift = fig, None
    else:
        pairing = None
        target, shift = _homed(fig)
    if isinstance(fig, Polygon):
        vals, methods, terms = ff_polygon_many(qs, target, cfg, use_s2=symmetric)
        sigs = methods * 64 + terms
    else:
        vals, methods, terms, sigs = evaluate_many(qs, target, cfg, pairing, mode)
    if shift is not None:
        vals = vals * np.exp(1j * (qs @ shift))
    return vals, methods, terms, sigs


def _maps_to_itself(fig, M, tol=1e-12) -> bool:
    V = fig.vertices
    W = V @ np.asarray(M).T
    dist = np.abs(W[:, None, :] - V[None, :, :]).max(-1)
    return bool(np.all(dist.min(axis=1) <= tol * fig.a))


def symmetry_suite(fig, M, q_set=None, cfg: EvalConfig = DEFAULT_CONFIG, label="") -> DeltaReport:
    """delta[F(q), F(Mq)] for an orthogonal map M leaving the figure invariant."""
    M = np.asarray(M, dtype=float)
    if not _maps_to_itself(fig, M):
        raise NotASymmetry(f"map does not carry {fig.name} onto itself")
    qs = default_q_set(fig.a) if q_set is None else np.asarray(q_set, dtype=complex)
    F1 = evaluate(fig, qs, cfg)[0]
    F2 = evaluate(fig, qs @ M.T, cfg)[0]
    rep = delta(F1, F2, qs)
    rep.label = label or fig.name
    return rep


def specialization_suite(fig1, fig2, q_set=None, cfg: EvalConfig = DEFAULT_CONFIG, label="") -> DeltaReport:
    """delta[F(q, fig1), F(q, fig2)] for two differently built but coincident figures."""
    qs = default_q_set(max(fig1.a, fig2.a)) if q_set is None else np.asarray(q_set, dtype=complex)
    rep = delta(evaluate(fig1, qs, cfg)[0], evaluate(fig2, qs, cfg)[0], qs)
    rep.label = label or f"{fig1.name} vs {fig2.name}"
    return rep


def _signature(fig, mag, d, cfg):
    vals, methods, terms, sigs = evaluate(fig, (mag * d)[None, :], cfg)
    return vals[0], int(methods[0]), int(terms[0]), int(sigs[0])


def continuity_scan(fig, q_dir, q_range=None, cfg: EvalConfig = DEFAULT_CONFIG, points: int = 200,
                    eta: float = ETA, label="") -> ContinuityReport:
    """Locate every change of evaluation route along a ray and measure the jump there.

    A route change is any change of method or number of series terms in any
    face. Each one found between grid points is bisected down to adjacent
    floats q_lo < q_hi; the jump is delta[F(q_lo (1 - eta)), F(q_hi (1 + eta))].
    """
    d = np.asarray(q_dir, dtype=complex)
    d = d / np.sqrt(np.sum(np.abs(d) ** 2))
    lo, hi = (1e-6 / fig.a, 1e2 / fig.a) if q_range is None else q_range
    mags = np.logspace(np.log10(lo), np.log10(hi), points)
    _, methods, terms, sigs = evaluate(fig, mags[:, None] * d[None, :], cfg)
    report = ContinuityReport(label or fig.name)
    for i in np.nonzero(sigs[1:] != sigs[:-1])[0]:
        a, b = float(mags[i]), float(mags[i + 1])
        sa = int(sigs[i])
        while np.nextafter(a, b) < b:
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            if _signature(fig, m, d, cfg)[3] == sa:
                a = m
            else:
                b = m
        Fa, ma, ta, _ = _signature(fig, a * (1 - eta), d, cfg)
        Fb, mb, tb, _ = _signature(fig, b * (1 + eta), d, cfg)
        report.switches.append(Switch(a, Method(ma).name, Method(mb).name, ta, tb, delta([Fa], [Fb]).delta))
    return report


# default suites -------------------------------------------------------------


def _rot(axis, deg):
    return rotation_matrix(np.asarray(axis, dtype=float), np.radians(deg))


def _mirror(normal):
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    return np.eye(3) - 2 * np.outer(n, n)


def symmetry_cases():
    """(label, figure, map) triples over the verification suite."""
    figs = shapes.suite()
    cases = []
    for J in (2, 3, 4, 6):
        f = figs[f"frustum_{J}"]
        cases.append((f"frustum_{J} C{J}", f, _rot([0, 0, 1], 360 / J)))
        cases.append((f"frustum_{J} mirror y", f, _mirror([0, 1, 0])))
    cases.append(("frustum_4 diagonal mirror", figs["frustum_4"], _mirror([1, -1, 0])))
    for name in ("cuboctahedron", "truncated_cube"):
        f = figs[name]
        cases.append((f"{name} C4 z", f, _rot([0, 0, 1], 90)))
        cases.append((f"{name} C3 111", f, _rot([1, 1, 1], 120)))
        cases.append((f"{name} inversion", f, -np.eye(3)))
        cases.append((f"{name} mirror 110", f, _mirror([1, 1, 0])))
    # five-fold axes: through a vertex of the icosahedron, a face of the dodecahedron
    for name, axis in (("dodecahedron", [0, shapes.PHI, 1]), ("icosahedron", [0, 1, shapes.PHI])):
        f = figs[name]
        cases.append((f"{name} C5", f, _rot(axis, 72)))
        cases.append((f"{name} C3 111", f, _rot([1, 1, 1], 120)))
        cases.append((f"{name} C2 z", f, _rot([0, 0, 1], 180)))
        cases.append((f"{name} mirror x", f, _mirror([1, 0, 0])))
    return cases


def _shuffled(mesh: Polyhedron, seed=0) -> Polyhedron:
    """Same solid with permuted vertices, faces and face start vertices."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(mesh.vertices))
    inv = np.argsort(perm)
    faces = []
    for f in mesh.faces:
        f = [int(inv[i]) for i in f]
        k = int(rng.integers(len(f)))
        faces.append(f[k:] + f[:k])
    order = rng.permutation(len(faces))
    return Polyhedron(mesh.vertices[perm], [faces[i] for i in order], name=mesh.name + "_shuffled")


def specialization_cases():
    """(label, figure1, figure2) triples of coincident figures built differently."""
    cases = [
        ("square frustum at 90 deg vs cube on base",
         shapes.pyramid_frustum(4, 1.0, 90.0, 1.0), translate(shapes.cube(), [0, 0, -0.5])),
        ("rectangular frustum with square base vs 4-fold frustum",
         shapes.pyramid_frustum(2, 1.0, 60.0, 0.4, base_edge2=1.0), shapes.pyramid_frustum(4, 1.0, 60.0, 0.4)),
        ("hexagonal frustum at 90 deg vs hexagonal prism",
         shapes.pyramid_frustum(6, 0.7, 90.0, 0.9), translate(shapes.regular_prism(6, 0.7, 0.9), [0, 0, -0.45])),
        ("rectangular frustum at 90 deg vs box",
         shapes.pyramid_frustum(2, 1.0, 90.0, 0.3, base_edge2=0.6), translate(shapes.box(1.0, 0.6, 0.3), [0, 0, -0.15])),
        ("cube vs rotated box",
         shapes.cube(), transform(shapes.box(), _rot([1, 0, 0], 90))),
    ]
    for name, f in shapes.suite().items():
        cases.append((f"{name} vs relabelled copy", f, _shuffled(f)))
    return cases


def run_symmetry(cfg: EvalConfig = DEFAULT_CONFIG) -> list[DeltaReport]:
    return [symmetry_suite(f, M, cfg=cfg, label=label) for label, f, M in symmetry_cases()]


def run_specialization(cfg: EvalConfig = DEFAULT_CONFIG) -> list[DeltaReport]:
    return [specialization_suite(f1, f2, cfg=cfg, label=label) for label, f1, f2 in specialization_cases()]


def run_continuity(cfg: EvalConfig = DEFAULT_CONFIG, figs=None, directions=DIRECTIONS,
                   points: int = 200) -> list[ContinuityReport]:
    figs = shapes.suite() if figs is None else figs
    out = []
    for name, f in figs.items():
        for k, d in enumerate(directions):
            out.append(continuity_scan(f, d, cfg=cfg, points=points, label=f"{name} dir{k}"))
    return out


def tune_thresholds(figs=None, grid=(1e-5, 1e-4, 1e-3, 1e-2, 1e-1), directions=DIRECTIONS[:3],
                    points: int = 80, base: EvalConfig = DEFAULT_CONFIG):
    """Grid search for (c, c_par, C) minimising the worst continuity jump.

    Returns (config, worst jump). Configurations whose series fail to
    converge anywhere are skipped.
    """
    figs = shapes.suite() if figs is None else figs
    best = None
    for c, cp, C in itertools.product(grid, grid, grid):
        cfg = EvalConfig(c, cp, C, base.max_order, base.epsilon)
        try:
            worst = max(r.worst for r in run_continuity(cfg, figs, directions, points))
        except NotConverged:
            continue
        if best is None or worst < best[1]:
            best = (cfg, worst)
    if best is None:
        raise NotConverged("no configuration in the grid converges on the suite")
    return best


SUITES = ("symmetry", "specialization", "continuity")
BOUNDS = {"symmetry": SYMMETRY_BOUND, "specialization": SPECIALIZATION_BOUND, "continuity": CONTINUITY_BOUND}


def selftest(name: str = "all", cfg: EvalConfig = DEFAULT_CONFIG) -> dict:
    """Run one suite (or all); returns a JSON-ready report with pass flags."""
    names = SUITES if name == "all" else (name,)
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
    report = {}
    for n in names:
        if n == "symmetry":
            rows = [r.to_dict() for r in run_symmetry(cfg)]
        elif n == "specialization":
            rows = [r.to_dict() for r in run_specialization(cfg)]
        else:
            rows = []
            for r in run_continuity(cfg):
                for s in r.switches:
                    rows.append({"label": r.label, **asdict(s), "delta": s.delta_cont})
        worst = max((r["delta"] for r in rows), default=0.0)
        offender = max(rows, key=lambda r: r["delta"])["label"] if rows else None
        report[n] = {"bound": BOUNDS[n], "worst": worst, "offender": offender,
                     "passed": worst <= BOUNDS[n], "rows": rows}
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, indent=1)
