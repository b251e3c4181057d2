"""Compile fermionic excitation terms to CNOT-lean circuits."""

__version__ = "0.1.0"
