"""Pauli-string algebra and the Jordan-Wigner map.

Pauli strings are stored in the symplectic (x, z) bitmask convention:
qubit q carries X iff bit q of ``x_mask`` is set, Z iff bit q of
``z_mask`` is set, and Y iff both are set.  Qubit 0 is the
least-significant bit everywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

_LETTERS = "IXZY"  # index = (x_bit) + 2*(z_bit)
_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

# Coefficients with modulus below this are dropped from canonical sums.
COEFF_PRUNE = 1e-14


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-qubit Pauli operators (no coefficient)."""

    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        full = (1 << self.n_qubits) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("Pauli mask exceeds qubit count")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Build from a label such as ``"XXXY"``, leftmost letter = highest qubit."""
        x = z = 0
        n = len(label)
        for pos, letter in enumerate(label):
            q = n - 1 - pos
            try:
                xb, zb = _LETTER_TO_BITS[letter]
            except KeyError:
                raise ValueError(f"unknown Pauli letter {letter!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(n, x, z)

    @classmethod
    def from_ops(cls, n_qubits: int, ops: Iterable[tuple[int, str]]) -> "PauliString":
        """Build from (qubit, letter) pairs; unlisted qubits are identity."""
        x = z = 0
        for q, letter in ops:
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
            xb, zb = _LETTER_TO_BITS[letter]
            if (x | z) & (1 << q):
                raise ValueError(f"duplicate qubit {q}")
            x |= xb << q
            z |= zb << q
        return cls(n_qubits, x, z)

    def letter(self, q: int) -> str:
        return _LETTERS[((self.x_mask >> q) & 1) + 2 * ((self.z_mask >> q) & 1)]

    @property
    def letters(self) -> tuple[str, ...]:
        """Per-qubit letters, index = qubit."""
        return tuple(self.letter(q) for q in range(self.n_qubits))

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def n_y(self) -> int:
        return (self.x_mask & self.z_mask).bit_count()

    def label(self) -> str:
        """Letters from highest qubit down to qubit 0."""
        return "".join(self.letter(q) for q in reversed(range(self.n_qubits)))

    def __str__(self) -> str:
        return self.label()


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product a*b as (phase, string) with phase in {1, i, -1, -i}."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("Pauli string length mismatch")
    x = a.x_mask ^ b.x_mask
    z = a.z_mask ^ b.z_mask
    # Each letter is i^(x.z) X^x Z^z; commuting Z^za past X^xb gives (-1)^(za.xb).
    k = (
        (a.x_mask & a.z_mask).bit_count()
        + (b.x_mask & b.z_mask).bit_count()
        - (x & z).bit_count()
        + 2 * (a.z_mask & b.x_mask).bit_count()
    ) % 4
    return (1j**k, PauliString(a.n_qubits, x, z))


def _format_coeff(c: complex) -> str:
    if c.imag == 0.0:
        return f"({c.real:g})"
    if c.real == 0.0:
        return f"({c.imag:g}i)"
    sign = "+" if c.imag >= 0 else "-"
    return f"({c.real:g}{sign}{abs(c.imag):g}i)"


class PauliSum:
    """Complex-weighted sum of Pauli strings, kept in canonical form.

    Canonical form: unique strings, coefficients with modulus below
    ``COEFF_PRUNE`` dropped, terms ordered lexicographically by their
    rendered label (highest qubit first).
    """

    __slots__ = ("n_qubits", "_terms", "_hash")

    def __init__(self, n_qubits: int, terms: Iterable[tuple[complex, PauliString]] = ()):
        acc: dict[tuple[int, int], complex] = {}
        for coeff, string in terms:
            if string.n_qubits != n_qubits:
                raise ValueError("Pauli string length mismatch")
            key = (string.x_mask, string.z_mask)
            acc[key] = acc.get(key, 0.0) + complex(coeff)
        self.n_qubits = n_qubits
        kept = [
            (c, PauliString(n_qubits, x, z))
            for (x, z), c in acc.items()
            if abs(c) >= COEFF_PRUNE
        ]
        kept.sort(key=lambda t: t[1].label())
        self._terms = tuple(kept)
        self._hash = None

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [(coeff, PauliString.identity(n_qubits))])

    @property
    def terms(self) -> tuple[tuple[complex, PauliString], ...]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[complex, PauliString]]:
        return iter(self._terms)

    def coefficient(self, string: PauliString) -> complex:
        for c, s in self._terms:
            if s == string:
                return c
        return 0.0

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n_qubits != self.n_qubits:
            raise ValueError("Pauli sum length mismatch")
        return PauliSum(self.n_qubits, list(self._terms) + list(other._terms))

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other.scaled(-1.0)

    def scaled(self, factor: complex) -> "PauliSum":
        return PauliSum(self.n_qubits, [(factor * c, s) for c, s in self._terms])

    def adjoint(self) -> "PauliSum":
        """Hermitian conjugate (strings are self-adjoint, coefficients conjugate)."""
        return PauliSum(self.n_qubits, [(c.conjugate(), s) for c, s in self._terms])

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c, _ in self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n_qubits, self._terms))
        return self._hash

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{_format_coeff(c)}·{s.label()}" for c, s in self._terms)

    def __repr__(self) -> str:
        return f"PauliSum({self.n_qubits}, {len(self._terms)} terms)"


def sum_multiply(a: PauliSum, b: PauliSum) -> PauliSum:
    """Distributive product of two sums, re-canonicalized."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("Pauli sum length mismatch")
    acc: dict[tuple[int, int], complex] = {}
    n = a.n_qubits
    for ca, sa in a.terms:
        for cb, sb in b.terms:
            phase, s = multiply(sa, sb)
            key = (s.x_mask, s.z_mask)
            acc[key] = acc.get(key, 0.0) + ca * cb * phase
    return PauliSum(n, [(c, PauliString(n, x, z)) for (x, z), c in acc.items()])


def _jw_ladder(p: int, n_so: int, creation: bool) -> PauliSum:
    if not 0 <= p < n_so:
        raise ValueError(f"spin-orbital index {p} out of range for {n_so}")
    z_tail = (1 << p) - 1  # Z on every qubit below p
    x_term = PauliString(n_so, 1 << p, z_tail)
    y_term = PauliString(n_so, 1 << p, z_tail | (1 << p))
    sign = -0.5j if creation else 0.5j
    return PauliSum(n_so, [(0.5, x_term), (sign, y_term)])


def jw_creation(p: int, n_so: int) -> PauliSum:
    """c_p^dag = (X_p - i Y_p)/2 . Z_(p-1)...Z_0."""
    return _jw_ladder(p, n_so, creation=True)


def jw_annihilation(p: int, n_so: int) -> PauliSum:
    """c_p = (X_p + i Y_p)/2 . Z_(p-1)...Z_0."""
    return _jw_ladder(p, n_so, creation=False)


def number_operator(n_so: int) -> PauliSum:
    """Total particle number sum_p c_p^dag c_p."""
    terms = [(0.5 * n_so, PauliString.identity(n_so))]
    for p in range(n_so):
        terms.append((-0.5, PauliString(n_so, 0, 1 << p)))
    return PauliSum(n_so, terms)


def map_hamiltonian(soh) -> PauliSum:
    """Jordan-Wigner image of the second-quantized Hamiltonian.

    Takes a SpinOrbitalHamiltonian (h_so, v_so in the c^dag_p c^dag_q c_s c_r
    ordering, plus the core energy) and returns a sum with real coefficients.
    """
    import numpy as np

    n = soh.n_so
    cre = [jw_creation(p, n) for p in range(n)]
    ann = [jw_annihilation(p, n) for p in range(n)]
    acc: dict[tuple[int, int], complex] = {(0, 0): complex(soh.e_core)}

    def accumulate(coeff: complex, op: PauliSum):
        for c, s in op.terms:
            key = (s.x_mask, s.z_mask)
            acc[key] = acc.get(key, 0.0) + coeff * c

    for p, q in zip(*np.nonzero(np.abs(soh.h_so) > COEFF_PRUNE)):
        accumulate(soh.h_so[p, q], sum_multiply(cre[p], ann[q]))

    pair_cc: dict[tuple[int, int], PauliSum] = {}
    pair_aa: dict[tuple[int, int], PauliSum] = {}
    for p, q, r, s in zip(*np.nonzero(np.abs(soh.v_so) > COEFF_PRUNE)):
        if p == q or r == s:
            continue  # c^dag_p c^dag_q (or c_s c_r) vanishes identically
        left = pair_cc.get((p, q))
        if left is None:
            left = pair_cc[(p, q)] = sum_multiply(cre[p], cre[q])
        right = pair_aa.get((s, r))
        if right is None:
            right = pair_aa[(s, r)] = sum_multiply(ann[s], ann[r])
        accumulate(0.5 * soh.v_so[p, q, r, s], sum_multiply(left, right))

    terms = [(c, PauliString(n, x, z)) for (x, z), c in acc.items()]
    out = PauliSum(n, terms)
    bad = max((abs(c.imag) for c, _ in out.terms), default=0.0)
    if bad > 1e-12:
        raise ValueError(f"mapped Hamiltonian has complex coefficient (|imag|={bad:.2e})")
    return PauliSum(n, [(c.real, s) for c, s in out.terms])


def hermitian_split(o: PauliSum) -> tuple[PauliSum, PauliSum]:
    """Write o = a + i*b with a, b Hermitian: a = (o + o^dag)/2, b = (o - o^dag)/2i."""
    a = [(c.real, s) for c, s in o.terms]
    b = [(c.imag, s) for c, s in o.terms]
    return PauliSum(o.n_qubits, a), PauliSum(o.n_qubits, b)
