"""Transversals and colorings of facet hypergraphs of simplicial spheres."""

__version__ = "0.1.0"
