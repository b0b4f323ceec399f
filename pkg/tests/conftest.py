from functools import reduce

import numpy as np
import pytest

import zeeman as z

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]])
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


def _op_at(op, site, n):
    mats = [np.eye(2)] * n
    mats[site] = op
    return reduce(np.kron, mats)


def full_spin_hamiltonian(spec):
    """Dense 2^N XXZ Hamiltonian; basis state 0 = spin up (Z = +1)."""
    n = spec.n_sites
    h = np.zeros((2**n, 2**n), dtype=complex)
    for j, c in enumerate(spec.couplings):
        for op, scale in ((PAULI_X, 1.0), (PAULI_Y, 1.0), (PAULI_Z, spec.anisotropy)):
            h += c * scale * _op_at(op, j, n) @ _op_at(op, j + 1, n)
    for j, b in enumerate(spec.onsite):
        h += b * _op_at(PAULI_Z, j, n)
    return h


def single_excitation_block(spec):
    """Project the full Hamiltonian onto 'one spin up, rest down'."""
    n = spec.n_sites
    index = []
    for site in range(n):
        bits = [1] * n  # 1 = down
        bits[site] = 0
        index.append(int("".join(map(str, bits)), 2))
    h = full_spin_hamiltonian(spec)
    return h[np.ix_(index, index)]


def random_chain(rng, n):
    return z.ChainSpec(n, rng.uniform(0.5, 1.5, n - 1), rng.uniform(-0.5, 0.5, n))


def chain_spectra(spec, f=10.0, site=0):
    h = z.build_chain_matrix(spec)
    hp = z.apply_perturbation(h, z.Perturbation.at_site(site, spec.n_sites, f))
    return h, z.spectrum(h), z.spectrum(hp)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = {}


def record(criterion, passed, detail):
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
