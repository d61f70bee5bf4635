"""Convex RP^2 structures from meromorphic cubic differentials.

The package solves the vortex (Wang) equation for the Blaschke metric of an
affine sphere over a punctured disc, integrates the associated flat
connection, and extracts the projective data of the end: boundary polygons of
developed images for higher-order poles, cylinder holonomies for order-3
poles, and the flat-metric classification of the end geometry.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .differentials import KDifferential
from .projective import GeometryError

__all__ = ["KDifferential", "GeometryError", "__version__"]
