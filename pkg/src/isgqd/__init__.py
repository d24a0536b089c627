"""Computational toolkit for discrete inverse semigroups and quasi-diagonal approximations."""

__version__ = "0.1.0"
