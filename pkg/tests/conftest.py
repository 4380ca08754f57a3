import sys

import numpy as np
import pytest

# reference systems used across the suite
REF_A = np.array([[0.73, 0.14, -0.15, -0.04],
                      [0.14, 0.68, -0.05, -0.01],
                      [-0.15, -0.05, 0.77, -0.03],
                      [-0.04, -0.01, -0.03, 0.59]])
CKS_A = np.array([[0.73, 0.15, -0.15, -0.04],
                  [0.15, 0.69, -0.05, -0.01],
                  [-0.15, -0.05, 0.77, -0.03],
                  [-0.04, -0.01, -0.03, 0.59]])
RHS = np.array([0.0, 1.0, 1.0, 1.0])
PAULI_Z = np.diag([1.0, -1.0])
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def random_hermitian(rng, dim, real=False):
    M = rng.normal(size=(dim, dim))
    if not real:
        M = M + 1j * rng.normal(size=(dim, dim))
    return (M + M.conj().T) / 2


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def dense_chebyshev(M, k):
    prev, cur = np.eye(M.shape[0], dtype=complex), M.astype(complex)
    if k == 0:
        return prev
    for _ in range(k - 1):
        prev, cur = cur, 2 * M @ cur - prev
    return cur


def matrix_function(M, f):
    w, V = np.linalg.eigh(M)
    return (V * f(w)) @ V.conj().T


def phase_aligned_error(a, b):
    """max |a e^{i phi} - b| with phi aligning a to b."""
    ov = np.vdot(a, b)
    return float(np.abs(a * (ov / abs(ov)) - b).max())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
