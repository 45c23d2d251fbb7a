"""Brute-force validation backend: dense matrices and exact sector spectra.

Everything here works on explicit 2^n x 2^n matrices in the occupation
basis, independently of the statevector/measurement pipeline, so it can
serve as the reference for the whole chain (energies, transition
amplitudes, Green's functions).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum, jw_creation, jw_annihilation
from .greens import GreensFunction, MatsubaraGrid

logger = logging.getLogger(__name__)

MAX_DENSE_QUBITS = 12

_PAULI_MATS = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def dense_matrix(o: PauliSum) -> np.ndarray:
    """Explicit matrix of a Pauli sum; qubit 0 is the least-significant bit."""
    n = o.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense matrix limited to {MAX_DENSE_QUBITS} qubits, got {n}")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, s in o.terms:
        m = np.eye(1, dtype=np.complex128)
        for q in reversed(range(n)):
            m = np.kron(m, _PAULI_MATS[s.letter(q)])
        out += coeff * m
    return out


@dataclass
class SectorSpectrum:
    """Full eigendecomposition of H restricted to a particle-number sector."""

    n_qubits: int
    particle_number: int
    basis_indices: np.ndarray  # occupation-basis indices with the right popcount
    energies: np.ndarray
    states: np.ndarray  # columns = eigenvectors in the restricted basis

    def embedded(self) -> np.ndarray:
        """Eigenvectors as columns in the full 2^n basis."""
        full = np.zeros((1 << self.n_qubits, len(self.energies)), dtype=np.complex128)
        full[self.basis_indices, :] = self.states
        return full


def sector_spectrum(h_matrix: np.ndarray, particle_number: int) -> SectorSpectrum:
    """Diagonalize H in the fixed-particle-number block of the occupation basis."""
    dim = h_matrix.shape[0]
    n = dim.bit_length() - 1
    pop = np.bitwise_count(np.arange(dim, dtype=np.int64))
    violation = np.max(np.abs(h_matrix * (pop[None, :] - pop[:, None])))
    if violation > 1e-10:
        raise ValueError(f"Hamiltonian does not commute with particle number ({violation:.2e})")
    idx = np.nonzero(pop == particle_number)[0]
    if len(idx) == 0:
        raise ValueError(f"empty particle-number sector {particle_number} on {n} qubits")
    block = h_matrix[np.ix_(idx, idx)]
    energies, states = np.linalg.eigh(block)
    return SectorSpectrum(n, particle_number, idx, energies, states)


def ground_state(h_matrix: np.ndarray, n_electrons: int) -> tuple[float, np.ndarray]:
    """Exact ground energy and full-space vector in the N-electron sector."""
    spec = sector_spectrum(h_matrix, n_electrons)
    if len(spec.energies) > 1 and spec.energies[1] - spec.energies[0] < 1e-10:
        logger.warning(
            "degenerate ground state in N=%d sector (gap %.3e); using lowest index",
            n_electrons, spec.energies[1] - spec.energies[0],
        )
    full = np.zeros(h_matrix.shape[0], dtype=np.complex128)
    full[spec.basis_indices] = spec.states[:, 0]
    return float(spec.energies[0]), full


@dataclass
class LehmannData:
    """Exact pole data: ground energy, sector energies and amplitudes."""

    e0: float
    ea_energies: np.ndarray
    x_plus: np.ndarray  # X+[mu, j] = <mu, N+1| c_j^dag |gs>
    ip_energies: np.ndarray
    x_minus: np.ndarray  # X-[mu, j] = <mu, N-1| c_j |gs>


def fci_lehmann_data(h: PauliSum, n_electrons: int) -> LehmannData:
    """Exact transition elements over the full N+1 and N-1 spectra."""
    n_so = h.n_qubits
    hm = dense_matrix(h)
    e0, psi0 = ground_state(hm, n_electrons)
    ea = sector_spectrum(hm, n_electrons + 1)
    ip = sector_spectrum(hm, n_electrons - 1)

    x_plus = np.empty((len(ea.energies), n_so), dtype=np.complex128)
    x_minus = np.empty((len(ip.energies), n_so), dtype=np.complex128)
    for j in range(n_so):
        vec = dense_matrix(jw_creation(j, n_so)) @ psi0
        x_plus[:, j] = ea.states.conj().T @ vec[ea.basis_indices]
        vec = dense_matrix(jw_annihilation(j, n_so)) @ psi0
        x_minus[:, j] = ip.states.conj().T @ vec[ip.basis_indices]
    return LehmannData(e0, ea.energies, x_plus, ip.energies, x_minus)


def fci_greens(h: PauliSum, n_electrons: int, grid: MatsubaraGrid) -> GreensFunction:
    """Exact Lehmann Green's function from full sector spectra.

    Uses every eigenstate of the (N+1)- and (N-1)-electron sectors and the
    exact transition elements <mu|c_j^dag|gs> and <mu|c_i|gs>.
    """
    data = fci_lehmann_data(h, n_electrons)
    n_so = h.n_qubits
    values = np.zeros((len(grid.frequencies), n_so, n_so), dtype=np.complex128)
    for mu in range(len(data.ea_energies)):
        res = np.outer(data.x_plus[mu].conj(), data.x_plus[mu])
        denom = 1j * grid.frequencies + (data.e0 - data.ea_energies[mu])
        values += res[None, :, :] / denom[:, None, None]
    for mu in range(len(data.ip_energies)):
        res = np.outer(data.x_minus[mu], data.x_minus[mu].conj())
        denom = 1j * grid.frequencies + (data.ip_energies[mu] - data.e0)
        values += res[None, :, :] / denom[:, None, None]
    return GreensFunction(grid, values)
