"""FCIDUMP ingestion and spin-orbital expansion of molecular integrals.

Spatial integrals are stored in chemist notation (ij|kl); the spin-orbital
tensor is reindexed to the physicist ordering used by the second-quantized
Hamiltonian H = sum h_pq c^dag_p c_q + 1/2 sum v_pqrs c^dag_p c^dag_q c_s c_r.
Spin-orbitals are spin-blocked: p = i for the alpha spin of spatial orbital
i, p = n_spatial + i for the beta spin.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

DUPLICATE_TOL = 1e-12


class FcidumpError(ValueError):
    """Malformed FCIDUMP content."""


@dataclass(frozen=True)
class MolecularIntegrals:
    """Spatial-orbital integrals in chemist notation, plus system counts."""

    n_spatial: int
    n_electrons: int
    ms2: int
    e_core: float
    h: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        n = self.n_spatial
        if self.h.shape != (n, n) or self.v.shape != (n, n, n, n):
            raise ValueError("integral tensor shape mismatch")
        if not 0 <= self.n_electrons <= 2 * n:
            raise ValueError(f"electron count {self.n_electrons} out of range")
        if not np.allclose(self.h, self.h.T, atol=1e-12):
            raise ValueError("one-body integrals not symmetric")


@dataclass(frozen=True)
class SpinOrbitalHamiltonian:
    """Second-quantized operator data over spin-blocked spin-orbitals."""

    n_so: int
    h_so: np.ndarray
    v_so: np.ndarray
    e_core: float


def _chemist_images(i: int, j: int, k: int, l: int):
    """All 8 permutational images of a chemist (ij|kl) index quadruple."""
    return {
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    }


def _canonical_v_key(i, j, k, l):
    ij = (i, j) if i >= j else (j, i)
    kl = (k, l) if k >= l else (l, k)
    return ij + kl if ij >= kl else kl + ij


def parse_fcidump(text: str) -> MolecularIntegrals:
    """Parse FCIDUMP text into spatial-orbital integrals.

    Accepts the usual namelist header (NORB, NELEC, MS2; ORBSYM/ISYM are
    ignored) followed by whitespace-delimited `value i j k l` lines with
    1-based indices.  Zero indices flag lower-rank terms: k=l=0 gives a
    one-body element, all-zero indices give the core energy.  Re-stated
    entries must agree within 1e-12.
    """
    lines = text.splitlines()
    header_parts: list[str] = []
    body_start = None
    for ln, line in enumerate(lines):
        header_parts.append(line)
        if "&END" in line.upper() or line.strip() == "/" or line.strip().endswith("/"):
            body_start = ln + 1
            break
    if body_start is None:
        raise FcidumpError("FCIDUMP header not terminated by &END or /")
    header = " ".join(header_parts)

    def header_int(name: str, required: bool = True, default: int = 0) -> int:
        m = re.search(rf"{name}\s*=\s*(-?\d+)", header, re.IGNORECASE)
        if m is None:
            if required:
                raise FcidumpError(f"FCIDUMP header missing {name}")
            return default
        return int(m.group(1))

    n = header_int("NORB")
    n_elec = header_int("NELEC")
    ms2 = header_int("MS2", required=False)
    if n <= 0:
        raise FcidumpError(f"NORB must be positive, got {n}")

    h = np.zeros((n, n))
    v = np.zeros((n, n, n, n))
    e_core = 0.0
    seen: dict[tuple, float] = {}

    def record(key: tuple, value: float, where: int):
        if key in seen and abs(seen[key] - value) > DUPLICATE_TOL:
            raise FcidumpError(
                f"conflicting duplicate entry for {key} on line {where + 1}: "
                f"{seen[key]!r} vs {value!r}"
            )
        seen[key] = value

    for ln in range(body_start, len(lines)):
        parts = lines[ln].split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FcidumpError(f"malformed FCIDUMP line {ln + 1}: {lines[ln]!r}")
        try:
            value = float(parts[0])
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpError(f"malformed FCIDUMP line {ln + 1}: {lines[ln]!r}") from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > n:
                raise FcidumpError(f"index {idx} out of range [1, {n}] on line {ln + 1}")
        if i == j == k == l == 0:
            record(("core",), value, ln)
            e_core = value
        elif k == 0 and l == 0 and i > 0 and j > 0:
            record(("h", max(i, j), min(i, j)), value, ln)
            h[i - 1, j - 1] = value
            h[j - 1, i - 1] = value
        elif i > 0 and j == 0 and k == 0 and l == 0:
            continue  # orbital-energy line, not used
        elif min(i, j, k, l) > 0:
            record(("v",) + _canonical_v_key(i, j, k, l), value, ln)
            for a, b, c, d in _chemist_images(i, j, k, l):
                v[a - 1, b - 1, c - 1, d - 1] = value
        else:
            raise FcidumpError(f"unsupported index pattern on line {ln + 1}: {lines[ln]!r}")

    return MolecularIntegrals(n, n_elec, ms2, e_core, h, v)


def dump_fcidump(mi: MolecularIntegrals) -> str:
    """Serialize integrals back to FCIDUMP text (round-trips bitwise)."""
    out = [f"&FCI NORB={mi.n_spatial},NELEC={mi.n_electrons},MS2={mi.ms2},", "&END"]
    n = mi.n_spatial
    emitted = set()
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            for k in range(1, i + 1):
                for l in range(1, k + 1):
                    key = _canonical_v_key(i, j, k, l)
                    val = float(mi.v[i - 1, j - 1, k - 1, l - 1])
                    if key in emitted or val == 0.0:
                        continue
                    emitted.add(key)
                    out.append(f"{val!r} {i} {j} {k} {l}")
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            val = float(mi.h[i - 1, j - 1])
            if val != 0.0:
                out.append(f"{val!r} {i} {j} 0 0")
    out.append(f"{float(mi.e_core)!r} 0 0 0 0")
    return "\n".join(out) + "\n"


def to_spin_orbitals(mi: MolecularIntegrals) -> SpinOrbitalHamiltonian:
    """Expand spatial integrals to the spin-blocked spin-orbital tensors.

    v_so[p,q,r,s] = (pbar rbar | qbar sbar) * delta(spin p, spin r)
                  * delta(spin q, spin s), so that
    1/2 sum v_so c^dag_p c^dag_q c_s c_r reproduces the two-body energy.
    """
    n = mi.n_spatial
    n_so = 2 * n
    h_so = np.zeros((n_so, n_so))
    h_so[:n, :n] = mi.h
    h_so[n:, n:] = mi.h

    spin = np.arange(n_so) // n
    bar = np.arange(n_so) % n
    same = spin[:, None] == spin[None, :]
    v_so = mi.v[
        bar[:, None, None, None],
        bar[None, None, :, None],
        bar[None, :, None, None],
        bar[None, None, None, :],
    ]
    v_so = v_so * same[:, None, :, None] * same[None, :, None, :]
    return SpinOrbitalHamiltonian(n_so, h_so, v_so, mi.e_core)
