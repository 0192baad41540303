"""Stable Fourier transforms of polygon and polyhedron indicator functions."""
from ._backend import BACKEND
from .errors import *  # noqa: F401,F403
from .mesh import (
    Polygon,
    Polyhedron,
    SymmetryPairing,
    center_of_gravity,
    detect_symmetry,
    enclosing_radii,
    translate,
    validate_mesh,
    validate_polygon,
)
from .polygon import (
    DEFAULT_CONFIG,
    EvalConfig,
    EvalResult,
    Method,
    ff_polygon,
    ff_polygon_analytic,
    ff_polygon_s2,
)

__version__ = "0.1.0"
