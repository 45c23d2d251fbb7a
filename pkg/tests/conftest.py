import json
from pathlib import Path

import pytest

from qsegf import ansatz, vqe
from qsegf.integrals import parse_fcidump, to_spin_orbitals
from qsegf.pauli import map_hamiltonian

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def h2_text():
    return (FIXTURES / "h2_sto6g_0.76.fcidump").read_text()


@pytest.fixture(scope="session")
def h4_text():
    return (FIXTURES / "h4_sto6g_1.00.fcidump").read_text()


@pytest.fixture(scope="session")
def h2_integrals(h2_text):
    return parse_fcidump(h2_text)


@pytest.fixture(scope="session")
def h4_integrals(h4_text):
    return parse_fcidump(h4_text)


@pytest.fixture(scope="session")
def h2_hamiltonian(h2_integrals):
    return map_hamiltonian(to_spin_orbitals(h2_integrals))


@pytest.fixture(scope="session")
def h4_hamiltonian(h4_integrals):
    return map_hamiltonian(to_spin_orbitals(h4_integrals))


@pytest.fixture(scope="session")
def h2_ground(h2_hamiltonian):
    """Converged single-XXXY ansatz for H2: (circuit, VqeResult, Statevector)."""
    circuit = ansatz.build_circuit(2, 4, 0, "single-xxxy")
    result = vqe.minimize(h2_hamiltonian, circuit, vqe.VqeOptions(gtol=1e-9))
    state = ansatz.prepare_state(circuit, result.theta_opt)
    return circuit, result, state


@pytest.fixture(scope="session")
def h2_oracle_regression():
    return json.loads((FIXTURES / "h2_oracle_regression.json").read_text())


@pytest.fixture(scope="session")
def h4_regression():
    return json.loads((FIXTURES / "h4_regression.json").read_text())
