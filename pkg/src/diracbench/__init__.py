"""Exact-rational workbench for Dirac-Manin triples, their doubles and Manin
pairs, linear groupoids with their duals, dressing actions and the
classification of homogeneous spaces."""

__version__ = "0.1.0"
