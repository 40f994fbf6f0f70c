"""Exact first-passage percolation on Z^d: weights, geodesics, n-boxes and experiments."""
