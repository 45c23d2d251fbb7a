"""Dense statevector engine.

States live in the computational basis with little-endian labeling
(qubit 0 = least-significant bit of the basis index).  Gates return new
Statevector objects; nothing is mutated in place.  Shot sampling draws
from the exact +/-1 outcome distribution of a Pauli observable with a
counter-based generator so that results are independent of evaluation
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pauli import PauliString, PauliSum

NORM_TOL = 1e-10


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())


def prepare_basis_state(occupation: int, n_qubits: int) -> Statevector:
    """Computational basis state |occupation>, bits = occupied qubits."""
    dim = 1 << n_qubits
    if not 0 <= occupation < dim:
        raise ValueError(f"occupation {occupation:#b} out of range for {n_qubits} qubits")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[occupation] = 1.0
    return Statevector(n_qubits, amps)


@lru_cache(maxsize=4096)
def _string_action(n_qubits: int, x_mask: int, z_mask: int):
    """Action of a Pauli string on basis states: P|x> = phase[x] |x ^ flip>.

    Returns (flip, perm, phase) with perm[x] = x ^ flip and
    phase[x] = i^(#Y) * (-1)^popcount(x & z_mask).
    """
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    parity = (np.bitwise_count(idx & z_mask) & 1).astype(np.int8)
    signs = 1.0 - 2.0 * parity
    pref = 1j ** ((x_mask & z_mask).bit_count() % 4)
    return x_mask, idx ^ x_mask, pref * signs


def apply_pauli(state: Statevector, p: PauliString) -> Statevector:
    """P|s> for a bare Pauli string."""
    if p.n_qubits != state.n_qubits:
        raise ValueError("Pauli string / state dimension mismatch")
    _, perm, phase = _string_action(p.n_qubits, p.x_mask, p.z_mask)
    tmp = phase * state.amplitudes
    return Statevector(state.n_qubits, tmp[perm])


def apply_pauli_rotation(state: Statevector, p: PauliString, theta: float) -> Statevector:
    """exp(-i theta/2 P)|s> = cos(theta/2)|s> - i sin(theta/2) P|s>."""
    rotated = apply_pauli(state, p)
    amps = np.cos(0.5 * theta) * state.amplitudes - 1j * np.sin(0.5 * theta) * rotated.amplitudes
    return Statevector(state.n_qubits, amps)


def apply_givens(state: Statevector, p: int, q: int, phi: float) -> Statevector:
    """exp(phi (c_p^dag c_q - c_q^dag c_p))|s> with the Jordan-Wigner parity string.

    Mixes occupation patterns (n_p, n_q) = (0,1) and (1,0); the amplitude on
    doubly-empty or doubly-occupied pairs is untouched.
    """
    if p == q:
        raise ValueError("Givens rotation needs two distinct qubits")
    n = state.n_qubits
    if not (0 <= p < n and 0 <= q < n):
        raise ValueError("qubit index out of range")
    if p > q:
        return apply_givens(state, q, p, -phi)
    bp, bq = 1 << p, 1 << q
    between = ((bq - 1) ^ (bp - 1)) & ~bp & ~bq
    idx = np.arange(state.dim, dtype=np.int64)
    sel01 = ((idx & bp) == 0) & ((idx & bq) != 0)  # n_p = 0, n_q = 1
    i01 = idx[sel01]
    i10 = i01 ^ (bp | bq)
    zeta = 1.0 - 2.0 * (np.bitwise_count(i01 & between) & 1).astype(np.float64)
    amps = state.amplitudes.copy()
    a01, a10 = amps[i01].copy(), amps[i10].copy()
    c, s = np.cos(phi), np.sin(phi)
    amps[i01] = c * a01 - zeta * s * a10
    amps[i10] = zeta * s * a01 + c * a10
    return Statevector(state.n_qubits, amps)


def _plane_rotations(u: np.ndarray) -> tuple[list[tuple[int, int, float]], np.ndarray]:
    """Reduce orthogonal u to a diagonal of +/-1 by adjacent-plane Givens sweeps.

    Returns rotations L_1..L_m (applied left, in order) and the residual
    diagonal signs, such that L_m ... L_1 u = diag(signs).  Each L is the
    plane rotation with block [[cos t, sin t], [-sin t, cos t]] on rows (p, q).
    """
    w = u.copy()
    n = w.shape[0]
    rots: list[tuple[int, int, float]] = []
    for col in range(n):
        for row in range(n - 1, col, -1):
            a, b = w[row - 1, col], w[row, col]
            if abs(b) < 1e-15:
                continue
            t = np.arctan2(b, a)
            c, s = np.cos(t), np.sin(t)
            upper, lower = w[row - 1].copy(), w[row].copy()
            w[row - 1] = c * upper + s * lower
            w[row] = -s * upper + c * lower
            rots.append((row - 1, row, t))
    signs = np.diag(w).copy()
    return rots, signs


def apply_orbital_rotation(state: Statevector, u: np.ndarray) -> Statevector:
    """Fermionic image of an orthogonal one-body rotation u.

    Equivalent to the unitary G(u) with G c_p^dag G^dag = sum_q u[q,p] c_q^dag
    and G|vac> = |vac>, realized as a sequence of adjacent-plane Givens
    rotations plus Z flips for the -1 diagonal entries.  u must be real
    orthogonal; the spin-blocked pipeline builds it from a spatial matrix
    applied identically to both spin sectors.
    """
    n = state.n_qubits
    u = np.asarray(u, dtype=float)
    if u.shape != (n, n):
        raise ValueError("rotation matrix shape mismatch")
    if np.max(np.abs(u.T @ u - np.eye(n))) > 1e-10:
        raise ValueError("rotation matrix is not orthogonal")

    # u = L_1^T ... L_m^T D, and each L^T is the plane rotation with angle -t,
    # whose fermionic image is apply_givens(p, q, -t).  Apply right to left.
    rots, signs = _plane_rotations(u)
    out = state
    for p in np.nonzero(signs < 0)[0]:
        out = apply_pauli(out, PauliString(n, 0, 1 << int(p)))
    for p, q, t in reversed(rots):
        out = apply_givens(out, p, q, -t)
    return out


@lru_cache(maxsize=256)
def _compiled_sum(psum: PauliSum):
    """Stacked (gather, signs, prefactors) arrays for fast expectations."""
    n = psum.n_qubits
    idx = np.arange(1 << n, dtype=np.int64)
    gathers = np.empty((len(psum), 1 << n), dtype=np.int64)
    signs = np.empty((len(psum), 1 << n), dtype=np.float64)
    prefs = np.empty(len(psum), dtype=np.complex128)
    for t, (coeff, s) in enumerate(psum.terms):
        gathers[t] = idx ^ s.x_mask
        signs[t] = 1.0 - 2.0 * (np.bitwise_count(idx & s.z_mask) & 1)
        prefs[t] = coeff * 1j ** (s.n_y % 4)
    return gathers, signs, prefs


def expectation(state: Statevector, o: PauliSum) -> complex:
    """<s|O|s> evaluated exactly, term by term."""
    if o.n_qubits != state.n_qubits:
        raise ValueError("observable / state dimension mismatch")
    if not len(o):
        return 0.0 + 0.0j
    gathers, signs, prefs = _compiled_sum(o)
    amps = state.amplitudes
    vals = (np.conj(amps)[gathers] * signs) @ amps
    return complex(prefs @ vals)


def term_expectations(state: Statevector, o: PauliSum) -> np.ndarray:
    """Exact <s|P_t|s> for every term of o (coefficients not applied)."""
    if not len(o):
        return np.zeros(0)
    gathers, signs, prefs = _compiled_sum(o)
    amps = state.amplitudes
    vals = (np.conj(amps)[gathers] * signs) @ amps
    ny = np.array([1j ** (s.n_y % 4) for _, s in o.terms])
    return vals * ny


@dataclass
class ShotEstimate:
    """Finite-shot estimate of a single Pauli expectation value."""

    term: PauliString
    mean: float
    shots: int
    bin_means: np.ndarray


def _rng_for(seed: int, stream: tuple[int, ...]) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=stream)
    return np.random.Generator(np.random.Philox(ss))


def sample_expectation(
    state: Statevector,
    p: PauliString,
    shots: int,
    bins: int,
    seed: int,
    stream: tuple[int, ...] = (),
) -> ShotEstimate:
    """Draw i.i.d. +/-1 outcomes with the exact mean <s|P|s>, binned for resampling.

    ``stream`` labels the measured term so that concurrent evaluation order
    cannot change the draw; bin b uses the generator keyed by
    (seed, *stream, b).
    """
    if p.is_identity:
        raise ValueError("refusing to sample the identity (expectation is exactly 1)")
    if shots <= 0:
        raise ValueError("shots must be positive")
    if bins < 1 or shots % bins:
        raise ValueError(f"shots ({shots}) must divide evenly into {bins} bins")
    mean = complex(expectation(state, PauliSum(p.n_qubits, [(1.0, p)])))
    if abs(mean.imag) > 1e-9:
        raise ValueError("sampled observable must be Hermitian (real expectation)")
    exact = min(1.0, max(-1.0, mean.real))
    est_mean, _, bin_means = draw_binned_outcomes(exact, shots, bins, seed, stream)
    return ShotEstimate(p, est_mean, shots, bin_means)


def draw_binned_outcomes(
    exact: float, shots: int, bins: int, seed: int, stream: tuple[int, ...]
) -> tuple[float, int, np.ndarray]:
    """Binned means of +/-1 Bernoulli draws with the given exact mean."""
    per_bin = shots // bins
    p_up = 0.5 * (1.0 + exact)
    if 1.0 - exact < 1e-12:
        p_up = 1.0
    elif 1.0 + exact < 1e-12:
        p_up = 0.0
    bin_means = np.empty(bins)
    for b in range(bins):
        rng = _rng_for(seed, stream + (b,))
        ups = rng.binomial(per_bin, p_up)
        bin_means[b] = (2.0 * ups - per_bin) / per_bin
    return float(bin_means.mean()), shots, bin_means
