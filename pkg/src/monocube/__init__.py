"""monocube: monotonicity testing, tolerant testing, and isoperimetric
verification for real-valued functions on directed hypercubes and DAG
posets, exhaustively cross-checked against exact oracles at desk scale."""

__version__ = "0.1.0"
