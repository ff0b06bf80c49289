"""Pseudo-boson laboratory: biorthogonal bases of non-Hermitian oscillators.

Truncated Fock-space and position-space tools for the extended harmonic
oscillator and the Swanson Hamiltonian.
"""

__version__ = "0.1.0"
