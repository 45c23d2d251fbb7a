"""Subspace expansion in the N+1 and N-1 particle sectors.

The subspace vectors are single attachments c_j^dag |Psi> (EA sector) or
removals c_j |Psi> (IP sector) of the reference state.  Matrix elements
of H and of the overlap are either evaluated exactly on the statevector
or estimated from finite shots after splitting each non-Hermitian
operator into two Hermitian parts.  The generalized eigenproblem
H_sub V = S_sub V E is solved by canonical orthogonalization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .pauli import PauliSum, hermitian_split, jw_annihilation, jw_creation, sum_multiply
from .simulator import Statevector, draw_binned_outcomes, expectation, term_expectations

logger = logging.getLogger(__name__)

SECTORS = ("EA", "IP")
DEFAULT_EPS_EXACT = 1e-8
DEFAULT_EPS_SHOTS = 1e-2


@dataclass
class SubspaceResult:
    """Solved sector: matrices, retained eigenpairs and transition amplitudes."""

    sector: str
    h_sub: np.ndarray
    s_sub: np.ndarray
    energies: np.ndarray  # retained eigenvalues, ascending
    coeffs: np.ndarray  # columns V_mu, S-orthonormal
    amplitudes: np.ndarray  # X[mu, j] = sum_i conj(V[i, mu]) S[i, j]


@dataclass
class SectorBins:
    """Per-bin matrix estimates for jackknife resampling."""

    h_bins: np.ndarray  # (M, n_so, n_so)
    s_bins: np.ndarray


@dataclass(frozen=True)
class ShotPlan:
    shots: int
    bins: int
    seed: int

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError("need at least two bins for resampling")
        if self.shots <= 0 or self.shots % self.bins:
            raise ValueError(f"shots ({self.shots}) must divide evenly into {self.bins} bins")


def sector_operators(i: int, j: int, n_so: int, sector: str, h: Optional[PauliSum]):
    """The operator whose expectation is the (i, j) matrix element.

    EA: c_i H c_j^dag (or c_i c_j^dag for the overlap);
    IP: c_i^dag H c_j (or c_i^dag c_j).
    """
    if sector == "EA":
        left, right = jw_annihilation(i, n_so), jw_creation(j, n_so)
    elif sector == "IP":
        left, right = jw_creation(i, n_so), jw_annihilation(j, n_so)
    else:
        raise ValueError(f"unknown sector {sector!r}")
    if h is None:
        return sum_multiply(left, right)
    return sum_multiply(sum_multiply(left, h), right)


def build_subspace_matrices(
    state: Statevector, h: PauliSum, sector: str
) -> tuple[np.ndarray, np.ndarray]:
    """Exact H_sub and S_sub from statevector expectations."""
    if sector not in SECTORS:
        raise ValueError(f"unknown sector {sector!r}")
    n_so = h.n_qubits
    h_sub = np.empty((n_so, n_so), dtype=np.complex128)
    s_sub = np.empty((n_so, n_so), dtype=np.complex128)
    for i in range(n_so):
        if sector == "EA":
            left_h = sum_multiply(jw_annihilation(i, n_so), h)
        else:
            left_h = sum_multiply(jw_creation(i, n_so), h)
        for j in range(n_so):
            if sector == "EA":
                right = jw_creation(j, n_so)
            else:
                right = jw_annihilation(j, n_so)
            h_sub[i, j] = expectation(state, sum_multiply(left_h, right))
            s_sub[i, j] = expectation(state, sector_operators(i, j, n_so, sector, None))
    return h_sub, s_sub


def _sample_operator(
    state: Statevector, op: PauliSum, plan: ShotPlan, stream: tuple[int, ...]
) -> tuple[complex, np.ndarray]:
    """Shot estimate of a (generally non-Hermitian) operator expectation.

    Splits op = A + iB into Hermitian parts and samples every non-identity
    Pauli term of each with its own counter-based stream.  Returns the mean
    and the per-bin means (complex).
    """
    bins_total = np.zeros(plan.bins, dtype=np.complex128)
    for part_id, part in enumerate(hermitian_split(op)):
        if not len(part):
            continue
        exact = term_expectations(state, part).real
        unit = 1.0 if part_id == 0 else 1.0j
        for t, (coeff, s) in enumerate(part.terms):
            if s.is_identity:
                bins_total += unit * coeff.real
                continue
            val = min(1.0, max(-1.0, float(exact[t])))
            _, _, bin_means = draw_binned_outcomes(
                val, plan.shots, plan.bins, plan.seed, stream + (part_id, t)
            )
            bins_total += unit * coeff.real * bin_means
    return complex(bins_total.mean()), bins_total


def sample_subspace_matrices(
    state: Statevector, h: PauliSum, sector: str, plan: ShotPlan
) -> tuple[np.ndarray, np.ndarray, SectorBins]:
    """Finite-shot H_sub and S_sub, with the per-bin estimates kept for resampling."""
    n_so = h.n_qubits
    sector_id = SECTORS.index(sector)
    h_sub = np.empty((n_so, n_so), dtype=np.complex128)
    s_sub = np.empty((n_so, n_so), dtype=np.complex128)
    h_bins = np.empty((plan.bins, n_so, n_so), dtype=np.complex128)
    s_bins = np.empty((plan.bins, n_so, n_so), dtype=np.complex128)
    for i in range(n_so):
        for j in range(n_so):
            op_h = sector_operators(i, j, n_so, sector, h)
            op_s = sector_operators(i, j, n_so, sector, None)
            h_sub[i, j], h_bins[:, i, j] = _sample_operator(
                state, op_h, plan, (sector_id, 0, i, j)
            )
            s_sub[i, j], s_bins[:, i, j] = _sample_operator(
                state, op_s, plan, (sector_id, 1, i, j)
            )
    return h_sub, s_sub, SectorBins(h_bins, s_bins)


def solve_generalized(
    h_sub: np.ndarray, s_sub: np.ndarray, eps: float
) -> tuple[np.ndarray, np.ndarray]:
    """Canonical orthogonalization: whiten with S^(-1/2) on the retained range.

    Overlap eigenvalues below eps (including any negative ones from shot
    noise) are discarded; the retained eigenpairs come back in ascending
    energy order with V^dag S V = I.
    """
    h_sym = 0.5 * (h_sub + h_sub.conj().T)
    s_sym = 0.5 * (s_sub + s_sub.conj().T)
    s_eigs, u = np.linalg.eigh(s_sym)
    if np.any(s_eigs < 0):
        logger.warning(
            "discarding %d negative overlap eigenvalue(s); most negative %.3e",
            int(np.sum(s_eigs < 0)), float(s_eigs.min()),
        )
    keep = s_eigs > eps
    if not np.any(keep):
        raise ValueError(f"all overlap eigenvalues below threshold {eps}")
    y = u[:, keep] / np.sqrt(s_eigs[keep])
    reduced = y.conj().T @ h_sym @ y
    reduced = 0.5 * (reduced + reduced.conj().T)
    energies, w = np.linalg.eigh(reduced)
    return energies, y @ w


def transition_amplitudes(coeffs: np.ndarray, s_sub: np.ndarray) -> np.ndarray:
    """X[mu, j] = sum_i conj(V[i, mu]) S[i, j]."""
    return coeffs.conj().T @ s_sub


def expand_from_matrices(
    sector: str, h_sub: np.ndarray, s_sub: np.ndarray, eps: float
) -> SubspaceResult:
    """Solve one sector's generalized problem and attach the amplitudes."""
    s_sym = 0.5 * (s_sub + s_sub.conj().T)
    energies, coeffs = solve_generalized(h_sub, s_sub, eps)
    return SubspaceResult(
        sector=sector,
        h_sub=0.5 * (h_sub + h_sub.conj().T),
        s_sub=s_sym,
        energies=energies,
        coeffs=coeffs,
        amplitudes=transition_amplitudes(coeffs, s_sym),
    )


def expand_sector(
    state: Statevector,
    h: PauliSum,
    sector: str,
    eps: float = DEFAULT_EPS_EXACT,
    plan: Optional[ShotPlan] = None,
) -> tuple[SubspaceResult, Optional[SectorBins]]:
    """Build, solve and post-process one particle sector."""
    if plan is None:
        h_sub, s_sub = build_subspace_matrices(state, h, sector)
        return expand_from_matrices(sector, h_sub, s_sub, eps), None
    h_sub, s_sub, bins = sample_subspace_matrices(state, h, sector, plan)
    return expand_from_matrices(sector, h_sub, s_sub, eps), bins
