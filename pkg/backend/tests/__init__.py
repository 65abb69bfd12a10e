"""Tests de galton-rank-order."""
