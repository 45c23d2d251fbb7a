"""Hartree-Fock reference, generator enumeration and state preparation."""

from itertools import combinations

import numpy as np
import pytest

from qsegf.ansatz import (
    QccCircuit,
    build_circuit,
    enumerate_generators,
    expand_spatial_rotation,
    hf_occupation,
    load_rotation_file,
    prepare_state,
    single_xxxy_generator,
)
from qsegf.pauli import number_operator
from qsegf.simulator import expectation, prepare_basis_state


class TestHfOccupation:
    def test_h2(self):
        assert hf_occupation(2, 4, 0) == 0b0101

    def test_empty(self):
        assert hf_occupation(0, 4, 0) == 0

    def test_h4_blocked_layout(self):
        assert hf_occupation(4, 8, 0) == 0b00110011

    def test_triplet_projection(self):
        assert hf_occupation(2, 4, 2) == 0b0011  # both alpha

    def test_infeasible_parity(self):
        with pytest.raises(ValueError, match="spin projection"):
            hf_occupation(2, 4, 1)

    def test_infeasible_block(self):
        with pytest.raises(ValueError, match="spin projection"):
            hf_occupation(4, 4, 4)


def brute_force_doubles_and_singles(hf, n_so):
    """Independent enumeration: every spin-conserving excitation pattern."""
    n_spatial = n_so // 2
    occ = [p for p in range(n_so) if hf >> p & 1]
    virt = [p for p in range(n_so) if not hf >> p & 1]
    spin = lambda p: p // n_spatial
    doubles = [
        (i, j, a, b)
        for i, j in combinations(occ, 2)
        for a, b in combinations(virt, 2)
        if sorted((spin(i), spin(j))) == sorted((spin(a), spin(b)))
    ]
    singles = [(i, a) for i in occ for a in virt if spin(i) == spin(a)]
    return doubles, singles


class TestEnumerateGenerators:
    def test_h2_generators_and_order(self):
        gens = enumerate_generators(0b0101, 4)
        assert [g.label() for g in gens] == ["XXXY", "IIXY", "XYII"]

    def test_full_occupation_gives_none(self):
        assert enumerate_generators(0b1111, 4) == []

    def test_h4_count_matches_brute_force(self):
        hf = hf_occupation(4, 8, 0)
        gens = enumerate_generators(hf, 8)
        doubles, singles = brute_force_doubles_and_singles(hf, 8)
        assert len(gens) == len(doubles) + len(singles)

    def test_class_ordering(self):
        # opposite-spin doubles first, then same-spin doubles, then singles
        hf = hf_occupation(4, 8, 0)
        gens = enumerate_generators(hf, 8)
        weights = [bin(g.x_mask).count("1") for g in gens]
        n_doubles = sum(1 for w in weights if w == 4)
        assert all(w == 4 for w in weights[:n_doubles])
        assert all(w == 2 for w in weights[n_doubles:])
        spatial = 4
        def classes(g):
            qubits = [q for q in range(8) if g.x_mask >> q & 1]
            occ = [q for q in qubits if hf >> q & 1]
            return len({q // spatial for q in occ})
        doubles = gens[:n_doubles]
        n_opposite = sum(1 for g in doubles if classes(g) == 2)
        assert all(classes(g) == 2 for g in doubles[:n_opposite])
        assert all(classes(g) == 1 for g in doubles[n_opposite:])

    def test_excited_determinants_conserve_particle_number(self):
        hf = hf_occupation(4, 8, 0)
        for g in enumerate_generators(hf, 8):
            excited = hf ^ g.x_mask
            assert bin(excited).count("1") == 4

    def test_single_xxxy_truncation(self):
        gens = single_xxxy_generator(0b0101, 4)
        assert [g.label() for g in gens] == ["XXXY"]
        with pytest.raises(ValueError):
            single_xxxy_generator(0b00110011, 8)


class TestPrepareState:
    def test_zero_angles_give_hf(self):
        circ = build_circuit(2, 4, 0, "full")
        state = prepare_state(circ, np.zeros(3))
        assert state.amplitudes[0b0101] == 1.0

    def test_pi_rotation_fully_excites(self):
        circ = build_circuit(2, 4, 0, "single-xxxy")
        state = prepare_state(circ, np.array([np.pi]))
        assert abs(abs(state.amplitudes[0b1010]) - 1.0) < 1e-12

    def test_h2_reachable_family(self):
        # the reachable set is exactly span{|0101>, |1010>} with real weights
        circ = build_circuit(2, 4, 0, "single-xxxy")
        rng = np.random.default_rng(0)
        for theta in rng.uniform(-np.pi, np.pi, size=10):
            state = prepare_state(circ, np.array([theta]))
            in_span = abs(state.amplitudes[0b0101]) ** 2 + abs(state.amplitudes[0b1010]) ** 2
            assert in_span == pytest.approx(1.0, abs=1e-12)

    def test_normalized_and_number_conserving_h2(self):
        # For two electrons in two orbitals every reachable determinant keeps
        # N = 2, so the qubit generators conserve particle number exactly.
        nhat = number_operator(4)
        rng = np.random.default_rng(1)
        for mode in ("single-xxxy", "full"):
            circ = build_circuit(2, 4, 0, mode)
            for _ in range(10):
                theta = rng.uniform(-2, 2, circ.n_parameters)
                state = prepare_state(circ, theta)
                assert abs(state.norm() - 1.0) < 1e-10
                assert abs(expectation(state, nhat).real - 2.0) < 1e-10

    def test_h4_single_active_double_conserves_number(self):
        # One active double excitation acts on determinants holding exactly
        # two electrons among its four qubits, so N stays exact.
        circ = build_circuit(4, 8, 0, "full")
        nhat = number_operator(8)
        theta = np.zeros(circ.n_parameters)
        theta[0] = 0.9
        state = prepare_state(circ, theta)
        assert abs(expectation(state, nhat).real - 4.0) < 1e-10

    def test_parameter_count_mismatch(self):
        circ = build_circuit(2, 4, 0, "full")
        with pytest.raises(ValueError, match="parameters"):
            prepare_state(circ, np.zeros(2))

    def test_generator_must_excite_reference(self):
        from qsegf.pauli import PauliString

        # Z-only string cannot excite the reference
        with pytest.raises(ValueError, match="excite"):
            QccCircuit(4, 0b0101, (PauliString.from_label("ZZZZ"),))


class TestRotationPlumbing:
    def test_expand_spatial_rotation_blocks(self):
        r = np.array([[0.0, 1.0], [-1.0, 0.0]])
        u = expand_spatial_rotation(r)
        assert np.array_equal(u[:2, :2], r)
        assert np.array_equal(u[2:, 2:], r)
        assert np.all(u[:2, 2:] == 0)

    def test_load_rotation_file(self):
        text = "0.6 0.8\n-0.8 0.6\n"
        r = load_rotation_file(text, 2)
        assert r.shape == (2, 2) and r[1, 0] == -0.8

    def test_load_rotation_wrong_count(self):
        with pytest.raises(ValueError, match="expected"):
            load_rotation_file("1 0 0", 2)

    def test_unknown_mode(self):
        with pytest.raises(ValueError, match="ansatz mode"):
            build_circuit(2, 4, 0, "adapt")
