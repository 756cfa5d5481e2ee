"""Affine normal forms, differential invariants and homogeneous models of
graphed surfaces u = F(x, y) in complex 3-space.

Exact arithmetic runs in towers of quadratic extensions of Q; approximate
mode uses mpmath at a chosen precision.
"""

from .errors import AffSurfError, DomainError, UndecidableAtOrder
from .expr import surface_from_expr
from .homogeneity import FAMILIES, is_homogeneous, match_model, model_surface
from .normalform import NormalForm, classify, invariantize_at
from .scalar import Scalar
from .series import Series2, SurfaceGraph, load_surface
from .symmetry import AffineVectorField, frame_fields, lie_bracket, orbit_surface

__all__ = [
    "AffSurfError", "DomainError", "UndecidableAtOrder", "surface_from_expr", "FAMILIES",
    "is_homogeneous", "match_model", "model_surface", "NormalForm", "classify",
    "invariantize_at", "Scalar", "Series2", "SurfaceGraph", "load_surface",
    "AffineVectorField", "frame_fields", "lie_bracket", "orbit_surface",
]

__version__ = "0.1.0"
