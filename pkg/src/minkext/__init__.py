"""Exact toolkit for rational polyhedra, their Minkowski summands and the
semigroup extensions attached to the cone over a polyhedron."""

__version__ = "0.1.0"
