"""Spectral estimation by time evolution of maximally mixed states."""
from ._kernels import BACKEND as KERNEL_BACKEND
from .operators import (
    Hamiltonian,
    PauliString,
    PauliTerm,
    Spectrum,
    build_heisenberg,
    diagonalize,
    to_dense,
    trace_evolution_exact,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND", "Hamiltonian", "PauliString", "PauliTerm", "Spectrum",
    "build_heisenberg", "diagonalize", "to_dense", "trace_evolution_exact",
]
