"""Lattice-point discrepancy and Fourier decay of convex bodies with flat points."""
from .errors import (BudgetError, ConfigError, DegenerateFit, EmptyChord, FlatDirection,
                     InvalidParameter, LatdiscError, ResolutionError, UnsupportedBody)
from .geometry import CGammaBody, ConvexPolygon, Disc, RigidMotion, body_from_spec, build_cgamma
from .lattice import count_integer_points, discrepancy

__version__ = "0.1.0"

__all__ = ["BudgetError", "ConfigError", "DegenerateFit", "EmptyChord", "FlatDirection",
           "InvalidParameter", "LatdiscError", "ResolutionError", "UnsupportedBody", "CGammaBody",
           "ConvexPolygon", "Disc", "RigidMotion", "body_from_spec", "build_cgamma",
           "count_integer_points", "discrepancy"]
