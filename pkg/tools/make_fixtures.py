"""Generate the checked-in FCIDUMP fixtures (hydrogen chains, STO-6G).

Self-contained electronic-structure oracle for s-orbital-only systems:
closed-form Gaussian integrals (overlap, kinetic, nuclear attraction,
ERIs via the Boys function), restricted Hartree-Fock with DIIS, and an
independent determinant-basis full CI used to cross-validate the package
against a second implementation route.

Outputs (written to tests/fixtures/):
  h2_sto6g_0.76.fcidump        H2, bond length 0.76 A, canonical MO basis
  h4_sto6g_1.00.fcidump        linear H4 chain, 1.0 A spacing, MO basis
  h2_sao_sto6g_0.76.fcidump    H2 in the symmetrically orthogonalized AO basis
  h2_mo_to_sao_0.76.rot        MO orbitals expressed in that SAO basis
  provenance.json              geometries, constants, reference energies

Run:  python3 tools/make_fixtures.py
"""

from __future__ import annotations

import json
import sys
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy.special import erf

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qsegf.integrals import MolecularIntegrals, dump_fcidump  # noqa: E402

ANGSTROM_TO_BOHR = 1.0 / 0.529177210903

# Published STO-6G hydrogen 1s set (Hehre/Stewart/Pople fit); these
# exponents already carry the standard zeta = 1.24 hydrogen scaling.
STO6G_EXPONENTS = np.array(
    [35.52322122, 6.513143725, 1.822142904, 0.625955266, 0.243076747, 0.100112428]
)
STO6G_COEFFS = np.array(
    [0.00916359628, 0.04936149294, 0.16853830490, 0.37056279970, 0.41649152980, 0.13033408410]
)


def boys_f0(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    small = t < 1e-12
    safe = np.where(small, 1.0, t)
    return np.where(small, 1.0 - t / 3.0, 0.5 * np.sqrt(np.pi / safe) * erf(np.sqrt(safe)))


class SBasis:
    """Contracted s-type Gaussians, one per center."""

    def __init__(self, centers: np.ndarray):
        self.centers = np.asarray(centers, dtype=float)
        self.n = len(self.centers)
        alpha = STO6G_EXPONENTS.copy()
        norm = (2.0 * alpha / np.pi) ** 0.75
        self.alpha = alpha
        self.d = STO6G_COEFFS * norm  # coefficients for unnormalized primitives

    def _pairs(self, a_idx, b_idx):
        A, B = self.centers[a_idx], self.centers[b_idx]
        al, be = self.alpha[:, None], self.alpha[None, :]
        p = al + be
        ab2 = float(np.dot(A - B, A - B))
        pref = np.exp(-al * be / p * ab2)
        center = (al[..., None] * A + be[..., None] * B) / p[..., None]
        return p, pref, center

    def overlap(self) -> np.ndarray:
        s = np.empty((self.n, self.n))
        dd = np.outer(self.d, self.d)
        for a in range(self.n):
            for b in range(self.n):
                p, pref, _ = self._pairs(a, b)
                s[a, b] = np.sum(dd * (np.pi / p) ** 1.5 * pref)
        return s

    def kinetic(self) -> np.ndarray:
        t = np.empty((self.n, self.n))
        dd = np.outer(self.d, self.d)
        for a in range(self.n):
            for b in range(self.n):
                A, B = self.centers[a], self.centers[b]
                ab2 = float(np.dot(A - B, A - B))
                al, be = self.alpha[:, None], self.alpha[None, :]
                p = al + be
                mu = al * be / p
                s_prim = (np.pi / p) ** 1.5 * np.exp(-mu * ab2)
                t[a, b] = np.sum(dd * mu * (3.0 - 2.0 * mu * ab2) * s_prim)
        return t

    def nuclear(self, charges: list[tuple[float, np.ndarray]]) -> np.ndarray:
        v = np.zeros((self.n, self.n))
        dd = np.outer(self.d, self.d)
        for a in range(self.n):
            for b in range(self.n):
                p, pref, center = self._pairs(a, b)
                acc = 0.0
                for z, pos in charges:
                    pc2 = np.sum((center - pos) ** 2, axis=-1)
                    acc += -z * np.sum(dd * 2.0 * np.pi / p * pref * boys_f0(p * pc2))
                v[a, b] = acc
        return v

    def eri(self) -> np.ndarray:
        n = self.n
        out = np.empty((n, n, n, n))
        d = self.d
        dddd = d[:, None, None, None] * d[None, :, None, None] * d[None, None, :, None] * d[None, None, None, :]
        for a in range(n):
            for b in range(n):
                p, pref_ab, center_ab = self._pairs(a, b)
                for c in range(n):
                    for e in range(n):
                        q, pref_cd, center_cd = self._pairs(c, e)
                        pp = p[:, :, None, None]
                        qq = q[None, None, :, :]
                        pq2 = np.sum(
                            (center_ab[:, :, None, None, :] - center_cd[None, None, :, :, :]) ** 2,
                            axis=-1,
                        )
                        val = (
                            2.0 * np.pi**2.5
                            / (pp * qq * np.sqrt(pp + qq))
                            * pref_ab[:, :, None, None]
                            * pref_cd[None, None, :, :]
                            * boys_f0(pp * qq / (pp + qq) * pq2)
                        )
                        out[a, b, c, e] = np.sum(dddd * val)
        return out


def rhf(s, hcore, eri, n_elec, e_nuc, max_cycles=200, tol=1e-12):
    """Closed-shell SCF with DIIS; returns (energy, mo_coeffs, mo_energies)."""
    n = s.shape[0]
    n_occ = n_elec // 2
    x = _inv_sqrt(s)
    f = hcore.copy()
    energy = 0.0
    err_list, f_list = [], []
    for cycle in range(max_cycles):
        fp = x.T @ f @ x
        mo_e, cp = np.linalg.eigh(fp)
        c = x @ cp
        dm = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
        j = np.einsum("pqrs,rs->pq", eri, dm)
        k = np.einsum("prqs,rs->pq", eri, dm)
        f_new = hcore + j - 0.5 * k
        e_new = 0.5 * np.sum(dm * (hcore + f_new)) + e_nuc
        err = x.T @ (f_new @ dm @ s - s @ dm @ f_new) @ x
        err_list.append(err.ravel())
        f_list.append(f_new)
        if len(err_list) > 8:
            err_list.pop(0)
            f_list.pop(0)
        if np.max(np.abs(err)) < tol and abs(e_new - energy) < tol:
            return e_new, c, mo_e
        energy = e_new
        f = _diis_extrapolate(err_list, f_list)
    raise RuntimeError("SCF did not converge")


def _inv_sqrt(s):
    vals, vecs = np.linalg.eigh(s)
    return vecs @ np.diag(vals**-0.5) @ vecs.T


def _diis_extrapolate(errs, focks):
    m = len(focks)
    if m == 1:
        return focks[0]
    b = -np.ones((m + 1, m + 1))
    b[-1, -1] = 0.0
    for i in range(m):
        for j in range(m):
            b[i, j] = float(np.dot(errs[i], errs[j]))
    rhs = np.zeros(m + 1)
    rhs[-1] = -1.0
    try:
        coeff = np.linalg.solve(b, rhs)[:m]
    except np.linalg.LinAlgError:
        return focks[-1]
    return sum(c * f for c, f in zip(coeff, focks))


def mo_integrals(c, hcore, eri):
    h_mo = c.T @ hcore @ c
    v_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, c, c, c, c, optimize=True)
    return h_mo, v_mo


def determinant_fci(h_mo, v_mo, n_elec):
    """Full CI in the determinant basis via direct operator application.

    Independent of any qubit mapping: determinants are spin-orbital
    bitmasks (alpha block first) and fermionic signs come from explicit
    occupation parities.
    """
    n = h_mo.shape[0]
    n_so = 2 * n

    def spin(p):
        return p // n

    def bar(p):
        return p % n

    dets = [sum(1 << p for p in occ) for occ in combinations(range(n_so), n_elec)]
    index = {d: k for k, d in enumerate(dets)}
    dim = len(dets)
    ham = np.zeros((dim, dim))

    def annihilate(det, p):
        if not det >> p & 1:
            return None
        sign = (-1) ** bin(det & ((1 << p) - 1)).count("1")
        return det & ~(1 << p), sign

    def create(det, p):
        if det >> p & 1:
            return None
        sign = (-1) ** bin(det & ((1 << p) - 1)).count("1")
        return det | (1 << p), sign

    so_pairs = [
        (p, q)
        for p in range(n_so)
        for q in range(n_so)
        if spin(p) == spin(q) and abs(h_mo[bar(p), bar(q)]) > 1e-14
    ]
    for d in dets:
        col = index[d]
        for p, q in so_pairs:
            step = annihilate(d, q)
            if step is None:
                continue
            d1, s1 = step
            step = create(d1, p)
            if step is None:
                continue
            d2, s2 = step
            ham[index[d2], col] += s1 * s2 * h_mo[bar(p), bar(q)]
        for p in range(n_so):
            for q in range(n_so):
                for r in range(n_so):
                    if spin(p) != spin(r):
                        continue
                    for s in range(n_so):
                        if spin(q) != spin(s):
                            continue
                        val = v_mo[bar(p), bar(r), bar(q), bar(s)]
                        if abs(val) < 1e-14:
                            continue
                        step = annihilate(d, r)
                        if step is None:
                            continue
                        d1, s1 = step
                        step = annihilate(d1, s)
                        if step is None:
                            continue
                        d2, s2 = step
                        step = create(d2, q)
                        if step is None:
                            continue
                        d3, s3 = step
                        step = create(d3, p)
                        if step is None:
                            continue
                        d4, s4 = step
                        ham[index[d4], col] += 0.5 * val * s1 * s2 * s3 * s4
    return float(np.linalg.eigvalsh(ham)[0])


def build_system(centers_angstrom):
    centers = np.asarray(centers_angstrom, dtype=float) * ANGSTROM_TO_BOHR
    basis = SBasis(centers)
    charges = [(1.0, pos) for pos in centers]
    e_nuc = sum(
        1.0 / np.linalg.norm(centers[a] - centers[b])
        for a in range(len(centers))
        for b in range(a + 1, len(centers))
    )
    s = basis.overlap()
    hcore = basis.kinetic() + basis.nuclear(charges)
    eri = basis.eri()
    return s, hcore, eri, e_nuc


def main():
    fixtures = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    provenance = {
        "generator": "tools/make_fixtures.py",
        "method": "closed-form s-orbital Gaussian integrals + RHF(DIIS) + determinant FCI",
        "basis": "STO-6G (zeta=1.24 hydrogen scaling)",
        "angstrom_to_bohr": ANGSTROM_TO_BOHR,
        "systems": {},
    }

    # --- H2, 0.76 A ---------------------------------------------------
    geom_h2 = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.76]]
    s, hcore, eri, e_nuc = build_system(geom_h2)
    e_hf, c, mo_e = rhf(s, hcore, eri, n_elec=2, e_nuc=e_nuc)
    h_mo, v_mo = mo_integrals(c, hcore, eri)
    e_fci = determinant_fci(h_mo, v_mo, 2) + e_nuc
    mi = MolecularIntegrals(2, 2, 0, e_nuc, h_mo, v_mo)
    (fixtures / "h2_sto6g_0.76.fcidump").write_text(dump_fcidump(mi))
    provenance["systems"]["h2_sto6g_0.76"] = {
        "geometry_angstrom": geom_h2,
        "e_rhf": e_hf,
        "e_fci": e_fci,
        "mo_energies": [float(x) for x in mo_e],
    }

    # SAO variant: integrals in the Lowdin-orthogonalized AO basis plus the
    # MO -> SAO rotation (columns = MO orbitals in SAO coordinates).
    x = _inv_sqrt(s)
    h_sao = x.T @ hcore @ x
    v_sao = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, x, x, x, x, optimize=True)
    rot = np.linalg.inv(x) @ c  # = S^(1/2) C, orthogonal
    assert np.max(np.abs(rot.T @ rot - np.eye(2))) < 1e-10
    mi_sao = MolecularIntegrals(2, 2, 0, e_nuc, h_sao, v_sao)
    (fixtures / "h2_sao_sto6g_0.76.fcidump").write_text(dump_fcidump(mi_sao))
    (fixtures / "h2_mo_to_sao_0.76.rot").write_text(
        "\n".join(" ".join(repr(float(v)) for v in row) for row in rot) + "\n"
    )
    provenance["systems"]["h2_sao_sto6g_0.76"] = {
        "note": "same system in the symmetrically orthogonalized AO basis",
        "rotation_file": "h2_mo_to_sao_0.76.rot",
        "rotation_convention": "columns are the canonical MOs expressed in the SAO basis",
    }

    # --- H4 chain, 1.0 A spacing ---------------------------------------
    geom_h4 = [[0.0, 0.0, float(k)] for k in range(4)]
    s, hcore, eri, e_nuc = build_system(geom_h4)
    e_hf, c, mo_e = rhf(s, hcore, eri, n_elec=4, e_nuc=e_nuc)
    h_mo, v_mo = mo_integrals(c, hcore, eri)
    e_fci = determinant_fci(h_mo, v_mo, 4) + e_nuc
    mi = MolecularIntegrals(4, 4, 0, e_nuc, h_mo, v_mo)
    (fixtures / "h4_sto6g_1.00.fcidump").write_text(dump_fcidump(mi))
    provenance["systems"]["h4_sto6g_1.00"] = {
        "geometry_angstrom": geom_h4,
        "e_rhf": e_hf,
        "e_fci": e_fci,
        "mo_energies": [float(x) for x in mo_e],
    }

    (fixtures / "provenance.json").write_text(json.dumps(provenance, indent=2) + "\n")
    for name, info in provenance["systems"].items():
        if "e_rhf" in info:
            print(f"{name}: E_RHF = {info['e_rhf']:.10f}  E_FCI = {info['e_fci']:.10f}")


if __name__ == "__main__":
    main()
