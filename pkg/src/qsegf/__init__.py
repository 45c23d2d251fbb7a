"""qsegf: imaginary-time molecular Green's functions from a simulated
VQE + quantum-subspace-expansion pipeline, with an exact-diagonalization
reference, shot-noise emulation and jackknife error propagation."""

__version__ = "0.1.0"
