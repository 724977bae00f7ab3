"""Characteristic classes toolkit: exact Weil-algebra transgression,
simplicial de Rham forms, Chern-Simons representatives, regulator
cocycle evaluation, and logarithmic-form filtrations."""

__version__ = "0.1.0"

__all__ = [
    "exact",
    "matlie",
    "invpoly",
    "weil",
    "simforms",
    "cwchar",
    "regulator",
    "filtration",
    "cli",
]
