"""Certification of approximate solutions to polynomial and
polynomial-exponential systems, with Newton refinement and homotopy-based
candidate generation."""

__version__ = "0.1.0"
