"""Linear-system and ground-state solvers built from block-encodings."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .approx import inverse_series
from .encoding import BlockEncoding, EncodingError, PauliSum, X, Y, Z, from_operator
from .qubitization import chebyshev, unary_chebyshev_lcu
from .simulator import hadamard_test


def cks(encoding: BlockEncoding, eps: float, kappa: float) -> BlockEncoding:
    """
    Inverse of ``A`` as a unary-indexed LCU of walk-operator powers.

    The Chebyshev coefficients ``g`` of ``1/x`` on ``D_kappa`` feed
    :func:`unary_chebyshev_lcu`, whose block is ``g(A/alpha) / ||g||_1``.
    Since ``g(A/alpha) ~ alpha A^{-1}`` the result has ``alpha = ||g||_1 / alpha_A``.
    """
    plan = inverse_series(eps, kappa)
    g = plan.raw
    lcu = unary_chebyshev_lcu(encoding, g)
    return BlockEncoding(lcu.alpha / encoding.alpha, lcu.ancillas, lcu.unitary,
                         lcu.operand_shape, False, eps / encoding.alpha)


def chebyshev_moments(encoding: BlockEncoding, prep, m_max: int, *, shots: int = 0,
                      seed: int | None = None) -> np.ndarray:
    """``E_m = <psi|T_m(H/alpha)|psi>`` for ``m = 0..m_max`` from Hadamard tests on ``W^m``."""
    if not encoding.is_hermitian:
        raise EncodingError("moments need a Hermitian encoding")
    rng = np.random.default_rng(seed)
    out = np.empty(m_max + 1)
    for m in range(m_max + 1):
        sub_seed = int(rng.integers(2 ** 32)) if shots else None
        out[m] = hadamard_test(chebyshev(encoding, m), prep, "real", shots=shots,
                               seed=sub_seed) / encoding.alpha
    return out


@dataclass(frozen=True)
class KrylovResult:
    overlap: np.ndarray
    hamiltonian: np.ndarray
    energy: float
    retained: int
    moments: np.ndarray
    alpha: float

    def to_dict(self) -> dict:
        return {"S": self.overlap.tolist(), "H'": self.hamiltonian.tolist(), "energy": self.energy,
                "retained": self.retained}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def krylov_matrices(moments: np.ndarray, D: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Overlap ``S_jk = <T_j T_k>`` and projected ``H'_jk = <T_j x T_k>`` from moments,
    using ``T_j T_k = (T_{j+k} + T_{|j-k|}) / 2`` and ``x T_k = (T_{k+1} + T_{|k-1|}) / 2``.
    """
    E = np.asarray(moments)
    if E.size < 2 * D:
        raise ValueError(f"need {2 * D} moments for dimension {D}, got {E.size}")
    S = np.empty((D, D))
    H = np.empty((D, D))
    for j in range(D):
        for k in range(D):
            S[j, k] = (E[j + k] + E[abs(j - k)]) / 2
            H[j, k] = (E[j + k + 1] + E[abs(j - k - 1)] + E[j + abs(k - 1)] + E[abs(j - abs(k - 1))]) / 4
    return S, H


def solve_krylov(S: np.ndarray, H: np.ndarray, delta: float = 1e-8) -> tuple[float, int]:
    """Lowest generalised eigenvalue of ``H v = lambda S v`` on the well-conditioned part of ``S``."""
    w, V = np.linalg.eigh((S + S.T) / 2)
    keep = w > delta
    if not keep.any():
        raise ValueError("Krylov space is degenerate: no overlap eigenvalue exceeds delta")
    P = V[:, keep] / np.sqrt(w[keep])
    Hr = P.T @ ((H + H.T) / 2) @ P
    return float(np.linalg.eigvalsh(Hr)[0]), int(keep.sum())


def lanczos(H: PauliSum | BlockEncoding, D: int, prep=None, *, delta: float = 1e-8, shots: int = 0,
            seed: int | None = None) -> KrylovResult:
    """
    Krylov ground-energy estimate in the span of ``T_k(H/alpha)|psi_0>``, ``k < D``.

    Moments ``E_0 .. E_{2D-1}`` come from the circuit; the small generalised
    eigenproblem is solved classically and rescaled by ``alpha``.
    """
    if D < 1:
        raise ValueError("Krylov dimension must be at least 1")
    enc = H if isinstance(H, BlockEncoding) else from_operator(H)
    E = chebyshev_moments(enc, prep, 2 * D - 1, shots=shots, seed=seed)
    S, Hp = krylov_matrices(E, D)
    energy, kept = solve_krylov(S, Hp, delta)
    return KrylovResult(S, Hp, enc.alpha * energy, kept, E, enc.alpha)


# -- model Hamiltonians ------------------------------------------------------------


def cycle_edges(L: int) -> list[tuple[int, int]]:
    return [(i, (i + 1) % L) for i in range(L)] if L > 2 else [(0, 1)]


def heisenberg(L: int) -> PauliSum:
    """``(1/4) sum_edges (XX + YY + 0.5 ZZ)`` on the cycle of length ``L``."""
    return sum((0.25 * (X(i) * X(j) + Y(i) * Y(j) + 0.5 * Z(i) * Z(j)) for i, j in cycle_edges(L)),
               PauliSum())


def ising(L: int, J: float, B: float) -> PauliSum:
    """Open chain ``-J sum Z_i Z_{i+1} + B sum X_i``."""
    return sum((-J * Z(i) * Z(i + 1) for i in range(L - 1)), PauliSum()) + \
        sum((B * X(i) for i in range(L)), PauliSum())


def maximal_matching(edges: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Greedy maximal matching in edge order."""
    used: set[int] = set()
    out = []
    for i, j in edges:
        if i not in used and j not in used:
            out.append((i, j))
            used.update((i, j))
    return out
