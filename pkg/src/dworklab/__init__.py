"""Exact p-adic Frobenius data for toric hypersurfaces: Hasse-Witt and
Cartier matrices, congruence verification suites, and the Calabi-Yau
mirror-map/instanton pipeline."""

__version__ = "0.1.0"
