"""Genus, point counts and gonality bounds for Atkin-Lehner quotients of
X0(N)."""

__version__ = "0.1.0"
