"""Hartree-Fock reference and the qubit coupled-cluster ansatz.

The ansatz state is exp(K) exp(-i th_m/2 P_m) ... exp(-i th_1/2 P_1) |HF>,
where each generator is an X/Y string producing a single or double
excitation on top of the Hartree-Fock bitstring, and exp(K) is an optional
fixed orbital rotation applied after the parameterized layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .pauli import PauliString
from .simulator import Statevector, apply_orbital_rotation, apply_pauli_rotation, prepare_basis_state


def hf_occupation(n_electrons: int, n_so: int, ms2: int = 0) -> int:
    """Aufbau bitmask in the spin-blocked register (alpha block, then beta)."""
    if n_so % 2:
        raise ValueError("spin-orbital count must be even")
    if not 0 <= n_electrons <= n_so:
        raise ValueError(f"electron count {n_electrons} out of range")
    if (n_electrons + ms2) % 2:
        raise ValueError(f"infeasible spin projection ms2={ms2} for {n_electrons} electrons")
    n_alpha = (n_electrons + ms2) // 2
    n_beta = (n_electrons - ms2) // 2
    n_spatial = n_so // 2
    if not (0 <= n_alpha <= n_spatial and 0 <= n_beta <= n_spatial):
        raise ValueError(f"infeasible spin projection ms2={ms2} for {n_electrons} electrons")
    mask = 0
    for i in range(n_alpha):
        mask |= 1 << i
    for i in range(n_beta):
        mask |= 1 << (n_spatial + i)
    return mask


def _spin(p: int, n_spatial: int) -> int:
    return p // n_spatial


def enumerate_generators(hf: int, n_so: int) -> list[PauliString]:
    """Spin-conserving single- and double-excitation generators.

    Doubles are X_b X_a X_j Y_i with i<j occupied and a<b virtual, singles
    are X_a Y_i; both restricted to excitations preserving the number of
    electrons in each spin sector.  Ordering: opposite-spin doubles, then
    same-spin doubles, then singles, each class sorted by (i, j, a, b).
    """
    n_spatial = n_so // 2
    occ = [p for p in range(n_so) if hf >> p & 1]
    virt = [p for p in range(n_so) if not hf >> p & 1]

    opposite, same = [], []
    for i, j in combinations(occ, 2):
        for a, b in combinations(virt, 2):
            spins_out = sorted((_spin(i, n_spatial), _spin(j, n_spatial)))
            spins_in = sorted((_spin(a, n_spatial), _spin(b, n_spatial)))
            if spins_out != spins_in:
                continue
            string = PauliString.from_ops(n_so, [(i, "Y"), (j, "X"), (a, "X"), (b, "X")])
            (opposite if spins_out[0] != spins_out[1] else same).append(((i, j, a, b), string))
    singles = []
    for i in occ:
        for a in virt:
            if _spin(i, n_spatial) != _spin(a, n_spatial):
                continue
            singles.append(((i, a), PauliString.from_ops(n_so, [(i, "Y"), (a, "X")])))

    ordered = [s for _, s in sorted(opposite)] + [s for _, s in sorted(same)]
    ordered += [s for _, s in sorted(singles)]
    return ordered


def single_xxxy_generator(hf: int, n_so: int) -> list[PauliString]:
    """The lone opposite-spin double used for two-orbital systems (XXXY)."""
    if n_so != 4:
        raise ValueError("single-XXXY truncation applies to two-orbital (4 spin-orbital) systems")
    gens = enumerate_generators(hf, n_so)
    doubles = [g for g in gens if g.n_y == 1 and bin(g.x_mask | g.z_mask).count("1") == 4]
    if not doubles:
        raise ValueError("no double excitation available for this occupation")
    return doubles[:1]


@dataclass(frozen=True, eq=False)
class QccCircuit:
    """Immutable description of the ansatz: HF bitstring, generators, optional e^K."""

    n_so: int
    hf_occupation: int
    generators: tuple[PauliString, ...]
    orbital_rotation: Optional[np.ndarray] = None

    def __post_init__(self):
        for g in self.generators:
            if not (g.x_mask & self.hf_occupation):
                raise ValueError(f"generator {g.label()} does not excite the reference state")

    @property
    def n_parameters(self) -> int:
        return len(self.generators)


def prepare_state(circuit: QccCircuit, theta: np.ndarray) -> Statevector:
    """Apply the ansatz: X flips, the Pauli rotations in order, then e^K."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape != (len(circuit.generators),):
        raise ValueError(
            f"got {theta.shape[0]} parameters for {len(circuit.generators)} generators"
        )
    state = prepare_basis_state(circuit.hf_occupation, circuit.n_so)
    for angle, gen in zip(theta, circuit.generators):
        state = apply_pauli_rotation(state, gen, angle)
    if circuit.orbital_rotation is not None:
        state = apply_orbital_rotation(state, circuit.orbital_rotation)
    return state


def expand_spatial_rotation(spatial: np.ndarray) -> np.ndarray:
    """Lift an n x n spatial-orbital rotation to both spin blocks."""
    spatial = np.asarray(spatial, dtype=float)
    n = spatial.shape[0]
    if spatial.shape != (n, n):
        raise ValueError("spatial rotation must be square")
    u = np.zeros((2 * n, 2 * n))
    u[:n, :n] = spatial
    u[n:, n:] = spatial
    return u


def load_rotation_file(text: str, n_spatial: int) -> np.ndarray:
    """Parse a whitespace-delimited row-major n x n real matrix."""
    values = [float(tok) for tok in text.split()]
    if len(values) != n_spatial * n_spatial:
        raise ValueError(
            f"rotation file holds {len(values)} values, expected {n_spatial * n_spatial}"
        )
    return np.array(values).reshape(n_spatial, n_spatial)


def build_circuit(
    n_electrons: int,
    n_so: int,
    ms2: int = 0,
    mode: str = "full",
    spatial_rotation: Optional[np.ndarray] = None,
) -> QccCircuit:
    """Assemble the ansatz circuit for one of the supported generator modes."""
    hf = hf_occupation(n_electrons, n_so, ms2)
    if mode == "full":
        gens = enumerate_generators(hf, n_so)
    elif mode == "single-xxxy":
        gens = single_xxxy_generator(hf, n_so)
    else:
        raise ValueError(f"unknown ansatz mode {mode!r}")
    rotation = expand_spatial_rotation(spatial_rotation) if spatial_rotation is not None else None
    return QccCircuit(n_so, hf, tuple(gens), rotation)
