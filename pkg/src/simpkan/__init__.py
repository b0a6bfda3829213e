"""Exact linear algebra of truncated simplicial vector spaces: horn spaces,
Kan conditions, fillers, normalizations and piecewise-affine examples."""

__version__ = "0.1.0"
