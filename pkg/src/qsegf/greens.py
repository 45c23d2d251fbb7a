"""Matsubara Green's functions in Lehmann form, plus the Dyson self-energy.

The frequency grid is the uniform fermionic one, w_n = (2n+1) pi / beta.
Green's functions are assembled from subspace-expansion output (retained
energies and transition amplitudes) for the electron-attachment and
ionization sectors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatsubaraGrid:
    beta: float
    indices: np.ndarray
    frequencies: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.indices)

    def matches(self, other: "MatsubaraGrid") -> bool:
        return (
            abs(self.beta - other.beta) < 1e-12
            and self.n_max == other.n_max
        )


def matsubara_grid(beta: float, n_max: int) -> MatsubaraGrid:
    """Fermionic frequencies w_n = (2n+1) pi / beta for n = 0 .. n_max-1."""
    if beta <= 0:
        raise ValueError(f"inverse temperature must be positive, got {beta}")
    if n_max < 1:
        raise ValueError("need at least one frequency")
    indices = np.arange(n_max, dtype=np.int64)
    return MatsubaraGrid(beta, indices, (2 * indices + 1) * np.pi / beta)


@dataclass
class GreensFunction:
    """Per-frequency matrices G(i w_n), optionally with element-wise error bars."""

    grid: MatsubaraGrid
    values: np.ndarray  # (n_freq, n_so, n_so) complex
    errors: Optional[tuple[np.ndarray, np.ndarray]] = None  # (real_std, imag_std)

    @property
    def n_so(self) -> int:
        return self.values.shape[1]


def lehmann_values(
    e0: float,
    ea_energies: np.ndarray,
    ea_amplitudes: np.ndarray,
    ip_energies: np.ndarray,
    ip_amplitudes: np.ndarray,
    omegas: np.ndarray,
) -> np.ndarray:
    """Evaluate the two Lehmann sums at arbitrary (real) frequencies.

    G_ij(iw) = sum_mu conj(X+_mu,i) X+_mu,j / (iw + e0 - E+_mu)
             + sum_mu conj(X-_mu,j) X-_mu,i / (iw + E-_mu - e0)
    """
    n_so = ea_amplitudes.shape[1] if len(ea_amplitudes) else ip_amplitudes.shape[1]
    iw = 1j * np.asarray(omegas, dtype=float)
    values = np.zeros((len(iw), n_so, n_so), dtype=np.complex128)
    if len(ea_energies):
        denom = iw[:, None] + (e0 - ea_energies)[None, :]
        if np.min(np.abs(denom)) < 1e-14:
            raise ValueError("Lehmann pole coincides with a grid frequency")
        res = np.einsum("mi,mj->mij", ea_amplitudes.conj(), ea_amplitudes)
        values += np.einsum("wm,mij->wij", 1.0 / denom, res)
    if len(ip_energies):
        denom = iw[:, None] + (ip_energies - e0)[None, :]
        if np.min(np.abs(denom)) < 1e-14:
            raise ValueError("Lehmann pole coincides with a grid frequency")
        res = np.einsum("mj,mi->mij", ip_amplitudes.conj(), ip_amplitudes)
        values += np.einsum("wm,mij->wij", 1.0 / denom, res)
    return values


def lehmann_greens(e0: float, ea, ip, grid: MatsubaraGrid) -> GreensFunction:
    """Assemble G(iw_n) from the two sector SubspaceResults."""
    if ea.sector != "EA" or ip.sector != "IP":
        raise ValueError("lehmann_greens expects (EA, IP) subspace results in that order")
    values = lehmann_values(
        e0, ea.energies, ea.amplitudes, ip.energies, ip.amplitudes, grid.frequencies
    )
    return GreensFunction(grid, values)


def sum_rule_matrix(ea_amplitudes: np.ndarray, ip_amplitudes: np.ndarray) -> np.ndarray:
    """Total spectral weight sum_mu X+^dag X+ + transpose-conjugate IP part.

    Equals the identity when both sector overlap matrices are full rank
    (canonical anticommutation).
    """
    a = ea_amplitudes.conj().T @ ea_amplitudes
    b = (ip_amplitudes.conj().T @ ip_amplitudes).T
    return a + b


def hf_reference_greens(
    soh,
    occupation: int,
    grid: MatsubaraGrid,
    eps: float = 1e-8,
    orbital_rotation: Optional[np.ndarray] = None,
) -> GreensFunction:
    """Mean-field reference: the identical subspace pipeline at theta = 0.

    Running the pure Hartree-Fock state through the same expansion keeps
    every convention aligned with the correlated Green's function, so the
    Dyson subtraction is internally consistent.
    """
    from .pauli import map_hamiltonian
    from .qse import expand_sector
    from .simulator import apply_orbital_rotation, expectation, prepare_basis_state

    h = map_hamiltonian(soh)
    state = prepare_basis_state(occupation, soh.n_so)
    if orbital_rotation is not None:
        state = apply_orbital_rotation(state, orbital_rotation)
    e_hf = expectation(state, h).real
    ea, _ = expand_sector(state, h, "EA", eps)
    ip, _ = expand_sector(state, h, "IP", eps)
    return lehmann_greens(e_hf, ea, ip, grid)


def self_energy(g0: GreensFunction, g: GreensFunction) -> np.ndarray:
    """Dyson difference Sigma(iw_n) = G0^-1 - G^-1, one inversion per frequency."""
    if not g0.grid.matches(g.grid):
        raise ValueError("self-energy requires both Green's functions on the same grid")
    out = np.empty_like(g.values)
    for w in range(len(g.grid.frequencies)):
        for name, mat in (("G0", g0.values[w]), ("G", g.values[w])):
            cond = np.linalg.cond(mat)
            if cond > 1e10:
                logger.warning("%s ill-conditioned at frequency index %d (cond %.2e)", name, w, cond)
        try:
            out[w] = np.linalg.inv(g0.values[w]) - np.linalg.inv(g.values[w])
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"singular Green's function at frequency index {w}") from exc
    return out


def electron_count(ip_s_sub: np.ndarray) -> float:
    """Tr S- = sum_i <c_i^dag c_i>, the Green's-function-side electron count."""
    return float(np.trace(ip_s_sub).real)


def electron_count_matsubara_sum(g: GreensFunction) -> float:
    """Cross-check electron count from the frequency sum of Re Tr G.

    (1/beta) sum_n Tr G(iw_n) exp(iw_n 0+) with the 1/(iw) part summed
    analytically (contributing n_so/2) and the truncated 1/w^2 tail
    corrected with a trigamma closure fitted at the last grid point.
    Slower to converge than Tr S-; provided for diagnostics only.
    """
    from scipy.special import polygamma

    beta = g.grid.beta
    w = g.grid.frequencies
    trace_re = np.trace(g.values, axis1=1, axis2=2).real
    partial = g.n_so / 2.0 + (2.0 / beta) * float(np.sum(trace_re))
    c_tail = trace_re[-1] * w[-1] ** 2  # Re Tr G ~ c / w^2 beyond the grid
    tail = (2.0 / beta) * c_tail * (beta / (2 * np.pi)) ** 2 * float(
        polygamma(1, g.grid.n_max + 0.5)
    )
    return partial + tail
