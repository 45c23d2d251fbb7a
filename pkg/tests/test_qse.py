"""Subspace matrices, the generalized eigensolve and transition amplitudes."""

import numpy as np
import pytest

from qsegf import ansatz, qse
from qsegf.oracle import dense_matrix, sector_spectrum
from qsegf.pauli import PauliSum, jw_annihilation, jw_creation, number_operator
from qsegf.simulator import prepare_basis_state


def dense_sector_matrices(state, h, sector):
    """Oracle route: the same matrix elements from explicit dense operators."""
    n = h.n_qubits
    hm = dense_matrix(h)
    cre = [dense_matrix(jw_creation(p, n)) for p in range(n)]
    ann = [dense_matrix(jw_annihilation(p, n)) for p in range(n)]
    psi = state.amplitudes
    h_sub = np.empty((n, n), dtype=complex)
    s_sub = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if sector == "EA":
                h_sub[i, j] = np.vdot(psi, ann[i] @ hm @ cre[j] @ psi)
                s_sub[i, j] = np.vdot(psi, ann[i] @ cre[j] @ psi)
            else:
                h_sub[i, j] = np.vdot(psi, cre[i] @ hm @ ann[j] @ psi)
                s_sub[i, j] = np.vdot(psi, cre[i] @ ann[j] @ psi)
    return h_sub, s_sub


class TestBuildMatrices:
    def test_ea_overlap_on_hf(self, h2_hamiltonian):
        hf = prepare_basis_state(0b0101, 4)
        _, s_sub = qse.build_subspace_matrices(hf, h2_hamiltonian, "EA")
        assert np.allclose(s_sub, np.diag([0.0, 1.0, 0.0, 1.0]), atol=1e-12)

    def test_ip_overlap_trace_counts_electrons(self, h2_hamiltonian, h2_ground):
        _, _, state = h2_ground
        _, s_sub = qse.build_subspace_matrices(state, h2_hamiltonian, "IP")
        assert np.trace(s_sub).real == pytest.approx(2.0, abs=1e-10)

    def test_matches_dense_oracle(self, h2_hamiltonian, h2_ground):
        _, _, state = h2_ground
        for sector in ("EA", "IP"):
            h_sub, s_sub = qse.build_subspace_matrices(state, h2_hamiltonian, sector)
            h_ref, s_ref = dense_sector_matrices(state, h2_hamiltonian, sector)
            assert np.max(np.abs(h_sub - h_ref)) < 1e-10
            assert np.max(np.abs(s_sub - s_ref)) < 1e-10

    def test_unknown_sector(self, h2_hamiltonian):
        with pytest.raises(ValueError, match="sector"):
            qse.sector_operators(0, 0, 4, "XX", h2_hamiltonian)


class TestSolveGeneralized:
    def test_identity_overlap(self):
        energies, coeffs = qse.solve_generalized(np.diag([2.0, 1.0]).astype(complex),
                                                 np.eye(2, dtype=complex), 1e-8)
        assert np.allclose(energies, [1.0, 2.0])
        assert np.allclose(np.abs(coeffs), [[0.0, 1.0], [1.0, 0.0]])

    def test_rank_deficient_overlap(self):
        h_sub = np.array([[5.0, 0.3], [0.3, 2.0]], dtype=complex)
        s_sub = np.diag([0.0, 1.0]).astype(complex)
        energies, coeffs = qse.solve_generalized(h_sub, s_sub, 1e-8)
        assert energies.shape == (1,)
        assert energies[0] == pytest.approx(2.0)

    def test_empty_subspace(self):
        with pytest.raises(ValueError, match="threshold"):
            qse.solve_generalized(np.eye(2, dtype=complex),
                                  1e-12 * np.eye(2, dtype=complex), 1e-8)

    def test_s_orthonormal_coefficients(self, h2_hamiltonian, h2_ground):
        _, _, state = h2_ground
        h_sub, s_sub = qse.build_subspace_matrices(state, h2_hamiltonian, "EA")
        energies, coeffs = qse.solve_generalized(h_sub, s_sub, 1e-8)
        gram = coeffs.conj().T @ (0.5 * (s_sub + s_sub.conj().T)) @ coeffs
        assert np.max(np.abs(gram - np.eye(len(energies)))) < 1e-8

    def test_energies_real_and_ascending(self, h2_hamiltonian, h2_ground):
        _, _, state = h2_ground
        h_sub, s_sub = qse.build_subspace_matrices(state, h2_hamiltonian, "IP")
        energies, _ = qse.solve_generalized(h_sub, s_sub, 1e-8)
        assert np.all(np.diff(energies) >= 0)
        assert energies.dtype == np.float64

    def test_negative_overlap_discarded_with_warning(self, caplog):
        import logging

        h_sub = np.eye(2, dtype=complex)
        s_sub = np.diag([1.0, -0.05]).astype(complex)
        with caplog.at_level(logging.WARNING):
            energies, _ = qse.solve_generalized(h_sub, s_sub, 1e-2)
        assert len(energies) == 1
        assert "negative overlap" in caplog.text


class TestAmplitudes:
    def test_identity_coefficients(self):
        s_sub = np.array([[0.2, 0.1], [0.1, 0.9]], dtype=complex)
        x = qse.transition_amplitudes(np.eye(2, dtype=complex), s_sub)
        assert np.array_equal(x, s_sub)

    def test_completeness_with_full_rank(self, h2_hamiltonian, h2_ground):
        _, _, state = h2_ground
        ea, _ = qse.expand_sector(state, h2_hamiltonian, "EA")
        ip, _ = qse.expand_sector(state, h2_hamiltonian, "IP")
        total = ea.amplitudes.conj().T @ ea.amplitudes + (
            ip.amplitudes.conj().T @ ip.amplitudes
        ).T
        assert np.max(np.abs(total - np.eye(4))) < 1e-10
        assert np.trace(total).real == pytest.approx(4.0, abs=1e-8)

    def test_pole_weights_match_oracle_residues(self, h2_hamiltonian, h2_ground):
        # Complete subspace: the residue matrix of each distinct pole equals
        # the exact Lehmann residue.  Degenerate levels are summed, since only
        # the multiplet total is basis-independent.
        from qsegf.oracle import ground_state

        _, res, state = h2_ground
        ea, _ = qse.expand_sector(state, h2_hamiltonian, "EA")
        hm = dense_matrix(h2_hamiltonian)
        _, psi0 = ground_state(hm, 2)
        spec = sector_spectrum(hm, 3)
        x_exact = np.empty((len(spec.energies), 4), dtype=complex)
        for j in range(4):
            vec = dense_matrix(jw_creation(j, 4)) @ psi0
            x_exact[:, j] = spec.states.conj().T @ vec[spec.basis_indices]

        def residues_by_pole(energies, amplitudes):
            out = {}
            for mu, e_mu in enumerate(energies):
                key = round(float(e_mu), 8)
                res_mu = np.outer(amplitudes[mu].conj(), amplitudes[mu])
                out[key] = out.get(key, 0.0) + res_mu
            return out

        got = residues_by_pole(ea.energies, ea.amplitudes)
        want = residues_by_pole(spec.energies, x_exact)
        assert set(got) == set(want)
        for key in got:
            assert np.max(np.abs(got[key] - want[key])) < 1e-8


class TestVariationalStructure:
    def test_ea_energies_bound_below_by_sector_minimum(self, h2_hamiltonian, h2_ground):
        _, _, state = h2_ground
        ea, _ = qse.expand_sector(state, h2_hamiltonian, "EA")
        spec = sector_spectrum(dense_matrix(h2_hamiltonian), 3)
        assert ea.energies[0] >= spec.energies[0] - 1e-8

    def test_h2_sector_energies_exact(self, h2_hamiltonian, h2_ground):
        # four attachment vectors span the whole N+1 sector for H2
        _, _, state = h2_ground
        ea, _ = qse.expand_sector(state, h2_hamiltonian, "EA")
        spec = sector_spectrum(dense_matrix(h2_hamiltonian), 3)
        assert np.max(np.abs(np.sort(ea.energies) - np.sort(spec.energies))) < 1e-8

    def test_cauchy_interlacing_h4(self, h4_hamiltonian):
        circ = ansatz.build_circuit(4, 8, 0, "full")
        from qsegf import vqe

        res = vqe.minimize(h4_hamiltonian, circ)
        state = ansatz.prepare_state(circ, res.theta_opt)
        ea, _ = qse.expand_sector(state, h4_hamiltonian, "EA")
        spec = sector_spectrum(dense_matrix(h4_hamiltonian), 5)
        for mu, e_mu in enumerate(ea.energies):
            assert e_mu >= spec.energies[mu] - 1e-8


class TestShotMode:
    def test_plan_validation(self):
        with pytest.raises(ValueError, match="divide"):
            qse.ShotPlan(105, 10, 0)
        with pytest.raises(ValueError, match="bins"):
            qse.ShotPlan(100, 1, 0)

    def test_bins_average_to_estimate(self, h2_hamiltonian, h2_ground):
        _, _, state = h2_ground
        plan = qse.ShotPlan(400, 4, 3)
        h_sub, s_sub, bins = qse.sample_subspace_matrices(state, h2_hamiltonian, "EA", plan)
        assert np.max(np.abs(bins.h_bins.mean(axis=0) - h_sub)) < 1e-12
        assert np.max(np.abs(bins.s_bins.mean(axis=0) - s_sub)) < 1e-12

    def test_seeded_determinism(self, h2_hamiltonian, h2_ground):
        _, _, state = h2_ground
        plan = qse.ShotPlan(200, 4, 11)
        a = qse.sample_subspace_matrices(state, h2_hamiltonian, "IP", plan)
        b = qse.sample_subspace_matrices(state, h2_hamiltonian, "IP", plan)
        assert np.array_equal(a[0], b[0])
        assert np.array_equal(a[2].h_bins, b[2].h_bins)

    def test_sampled_matrices_near_exact(self, h2_hamiltonian, h2_ground):
        _, _, state = h2_ground
        exact_h, exact_s = qse.build_subspace_matrices(state, h2_hamiltonian, "EA")
        plan = qse.ShotPlan(200000, 10, 5)
        h_sub, s_sub, _ = qse.sample_subspace_matrices(state, h2_hamiltonian, "EA", plan)
        # statistical agreement: ~n_terms/sqrt(shots) scale, generous factor
        assert np.max(np.abs(h_sub - exact_h)) < 0.05
        assert np.max(np.abs(s_sub - exact_s)) < 0.02

    def test_elements_within_jackknife_bars(self, h2_hamiltonian, h2_ground):
        # noiseless matrix elements sit inside 4 sigma of the per-element
        # jackknife for at least 95% of (seed, element) samples
        from qsegf.stats import jackknife

        _, _, state = h2_ground
        exact_h, exact_s = qse.build_subspace_matrices(state, h2_hamiltonian, "EA")
        hits, total = 0, 0
        for seed in range(8):
            plan = qse.ShotPlan(2000, 10, seed)
            h_sub, s_sub, bins = qse.sample_subspace_matrices(
                state, h2_hamiltonian, "EA", plan
            )
            for sampled, exact, per_bin in (
                (h_sub, exact_h, bins.h_bins), (s_sub, exact_s, bins.s_bins),
            ):
                for i in range(4):
                    for j in range(4):
                        for part in (np.real, np.imag):
                            est = jackknife(part(per_bin[:, i, j]))
                            dev = abs(part(sampled[i, j]) - part(exact[i, j]))
                            hits += dev <= 4 * est.std + 1e-12
                            total += 1
        assert hits / total >= 0.95
