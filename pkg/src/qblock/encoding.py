"""
The block-encoding abstraction and its constructors.

A :class:`BlockEncoding` carries the subnormalisation ``alpha``, an error bound
``epsilon``, ancilla register sizes, operand register sizes, a Hermiticity flag
and a circuit factory. The factory is called as
``unitary(circuit, *ancilla_lists, *operand_lists)`` and appends gates
realising ``U`` with ``(<0|_a x I) U (|0>_a x I) = A / alpha``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .arith import add_constant
from .circuit import Circuit, ResourceReport, build
from .state_prep import as_prep, prep_pair

UnitaryFn = Callable[..., None]


class EncodingError(ValueError):
    """Raised for invalid constructor arguments or incompatible operands."""


@dataclass(frozen=True)
class BlockEncoding:
    alpha: float
    ancillas: tuple[int, ...]
    unitary: UnitaryFn = field(repr=False, compare=False)
    operand_shape: tuple[int, ...]
    is_hermitian: bool = False
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "ancillas", tuple(int(s) for s in self.ancillas))
        object.__setattr__(self, "operand_shape", tuple(int(s) for s in self.operand_shape))
        if not self.alpha > 0 or not math.isfinite(self.alpha):
            raise EncodingError(f"alpha must be positive and finite, got {self.alpha}")
        if self.epsilon < 0:
            raise EncodingError("epsilon must be nonnegative")
        if any(s < 1 for s in self.ancillas) or any(s < 1 for s in self.operand_shape):
            raise EncodingError("register sizes must be at least 1")
        if not self.operand_shape:
            raise EncodingError("an encoding needs at least one operand register")

    @classmethod
    def custom(cls, alpha: float, ancillas: Sequence[int], unitary: UnitaryFn,
               operand_shape: Sequence[int], is_hermitian: bool = False,
               epsilon: float = 0.0) -> BlockEncoding:
        """Wrap caller-supplied parts unchanged."""
        return cls(alpha, tuple(ancillas), unitary, tuple(operand_shape), is_hermitian, epsilon)

    # -- shape helpers -------------------------------------------------------

    @property
    def num_operand_qubits(self) -> int:
        return sum(self.operand_shape)

    @property
    def num_ancillas(self) -> int:
        return sum(self.ancillas)

    @property
    def dim(self) -> int:
        return 1 << self.num_operand_qubits

    # -- compilation ---------------------------------------------------------

    def _skeleton(self) -> tuple[Circuit, list[list[int]], list[list[int]]]:
        circ = Circuit()
        ops = [circ.add_register(f"op{i}", s) for i, s in enumerate(self.operand_shape)]
        ancs = [circ.add_register(f"anc{i}", s, "ancilla") for i, s in enumerate(self.ancillas)]
        return circ, ancs, ops

    def circuit(self) -> Circuit:
        """The bare unitary on operand registers (low qubits) followed by ancillas."""
        circ, ancs, ops = self._skeleton()
        self.unitary(circ, *ancs, *ops)
        return circ

    def apply(self, prep=None) -> Circuit:
        """
        Compiled program: operand preparation, then the unitary on fresh ancillas.

        The caller post-selects the ``ancilla``-role qubits on zero.
        """
        circ, ancs, ops = self._skeleton()
        as_prep(prep, self.num_operand_qubits)(circ, [q for r in ops for q in r])
        self.unitary(circ, *ancs, *ops)
        return circ

    def apply_rus(self, prep=None, **kwargs):
        from .simulator import apply_rus

        return apply_rus(self, prep, **kwargs)

    def expectation_value(self, prep=None, **kwargs) -> float:
        from .simulator import hadamard_test

        return hadamard_test(self, prep, "real", **kwargs)

    def resources(self) -> ResourceReport:
        return self.apply().resources()

    def block(self) -> np.ndarray:
        from .simulator import extract_block

        return extract_block(self)

    def matrix(self) -> np.ndarray:
        """``alpha * block``: the operator this encoding represents."""
        return self.alpha * self.block()

    # -- algebra -------------------------------------------------------------

    def __add__(self, other):
        from .algebra import add

        return add(self, other) if isinstance(other, BlockEncoding) else NotImplemented

    def __sub__(self, other):
        from .algebra import sub

        return sub(self, other) if isinstance(other, BlockEncoding) else NotImplemented

    def __mul__(self, c):
        from .algebra import scale

        return scale(self, c) if np.isscalar(c) else NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        from .algebra import neg

        return neg(self)

    def __matmul__(self, other):
        from .algebra import matmul

        return matmul(self, other) if isinstance(other, BlockEncoding) else NotImplemented

    def kron(self, other: BlockEncoding) -> BlockEncoding:
        from .algebra import kron

        return kron(self, other)

    # -- spectral transforms -------------------------------------------------

    def qubitization(self):
        from .qubitization import qubitize

        return qubitize(self)

    def chebyshev(self, k: int) -> BlockEncoding:
        from .qubitization import chebyshev

        return chebyshev(self, k)

    def poly(self, coeffs, kind: str = "monomial") -> BlockEncoding:
        from .gqsp import poly

        return poly(self, coeffs, kind)

    def inv(self, eps: float, kappa: float) -> BlockEncoding:
        from .gqsp import inv

        return inv(self, eps, kappa)

    def sim(self, t: float = 1.0, N: int = 8) -> BlockEncoding:
        from .gqsp import sim

        return sim(self, t, N)


# -- Pauli operators ------------------------------------------------------------

_PAULI_MUL = {
    ("X", "Y"): (1j, "Z"), ("Y", "Z"): (1j, "X"), ("Z", "X"): (1j, "Y"),
    ("Y", "X"): (-1j, "Z"), ("Z", "Y"): (-1j, "X"), ("X", "Z"): (-1j, "Y"),
}
_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}

PauliString = tuple[tuple[int, str], ...]


def _mul_strings(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    out = dict(a)
    phase = 1 + 0j
    for q, p in b:
        if q not in out:
            out[q] = p
        elif out[q] == p:
            del out[q]
        else:
            f, out[q] = _PAULI_MUL[(out[q], p)]
            phase *= f
    return phase, tuple(sorted(out.items()))


class PauliSum:
    """
    Linear combination of Pauli strings with merged duplicates.

    Build with :func:`X`, :func:`Y`, :func:`Z`, ``+``, ``*`` and scalars, e.g.
    ``0.5 * Z(0) * Z(1) + X(0)``.
    """

    def __init__(self, terms: Mapping[PauliString, complex] | None = None):
        self.terms: dict[PauliString, complex] = {}
        for s, c in (terms or {}).items():
            self._add(tuple(sorted(s)), c)

    def _add(self, s: PauliString, c: complex):
        c = self.terms.get(s, 0) + c
        if abs(c) < 1e-15:
            self.terms.pop(s, None)
        else:
            self.terms[s] = c

    @property
    def num_qubits(self) -> int:
        return 1 + max((q for s in self.terms for q, _ in s), default=0)

    def __add__(self, other):
        if other == 0:
            return self
        if np.isscalar(other):
            other = PauliSum({(): other})
        out = PauliSum(self.terms)
        for s, c in other.terms.items():
            out._add(s, c)
        return out

    __radd__ = __add__

    def __neg__(self):
        return -1 * self

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, other):
        if np.isscalar(other):
            return PauliSum({s: c * other for s, c in self.terms.items()})
        out = PauliSum()
        for sa, ca in self.terms.items():
            for sb, cb in other.terms.items():
                f, s = _mul_strings(sa, sb)
                out._add(s, f * ca * cb)
        return out

    def __rmul__(self, other):
        return self * other

    def __eq__(self, other):
        return isinstance(other, PauliSum) and self.terms == other.terms

    def __repr__(self):
        parts = [f"{c:+g}*" + "".join(f"{p}{q}" for q, p in s) if s else f"{c:+g}"
                 for s, c in self.terms.items()]
        return "PauliSum(" + " ".join(parts) + ")"

    def to_matrix(self, num_qubits: int | None = None) -> np.ndarray:
        """Dense matrix, qubit ``q`` being bit ``q`` of the basis index."""
        n = num_qubits or self.num_qubits
        out = np.zeros((1 << n, 1 << n), dtype=complex)
        for s, c in self.terms.items():
            ops = dict(s)
            m = np.ones((1, 1), dtype=complex)
            for q in range(n - 1, -1, -1):
                m = np.kron(m, _PAULI_MATS[ops.get(q, "I")])
            out += c * m
        return out

    def ground_state_energy(self, num_qubits: int | None = None) -> float:
        return float(np.linalg.eigvalsh(self.to_matrix(num_qubits))[0])

    def to_dict(self) -> dict:
        terms = []
        for s, c in self.terms.items():
            if abs(np.imag(c)) > 0:
                raise EncodingError("JSON Pauli sums carry real coefficients only")
            terms.append({"coeff": float(np.real(c)), "paulis": {str(q): p for q, p in s}})
        return {"terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> PauliSum:
        out = cls()
        for t in doc["terms"]:
            s = tuple(sorted((int(q), str(p).upper()) for q, p in t.get("paulis", {}).items()))
            if any(p not in "XYZ" for _, p in s):
                raise EncodingError(f"unknown Pauli label in {t}")
            out._add(s, float(t["coeff"]))
        return out

    @classmethod
    def from_json(cls, text: str) -> PauliSum:
        return cls.from_dict(json.loads(text))


def X(q: int) -> PauliSum:
    return PauliSum({((q, "X"),): 1.0})


def Y(q: int) -> PauliSum:
    return PauliSum({((q, "Y"),): 1.0})


def Z(q: int) -> PauliSum:
    return PauliSum({((q, "Z"),): 1.0})


# -- constructors ----------------------------------------------------------------


def _pauli_term(string: PauliString, phase: float) -> UnitaryFn:
    def apply(circ: Circuit, ops: list[int]):
        for q, p in string:
            {"X": circ.x, "Y": circ.y, "Z": circ.z}[p](ops[q])
        if phase:
            circ.gphase(phase)

    return apply


def from_lcu(coeffs: Sequence[float], unitaries: Sequence[UnitaryFn],
             operand_shape: Sequence[int] = (1,), is_hermitian: bool = False,
             epsilon: float = 0.0) -> BlockEncoding:
    """
    PREP-SELECT-PREP† encoding of ``sum_k c_k U_k``.

    Each ``U_k`` is a callable ``fn(circuit, *operand_lists)``. Term ``k`` is
    applied controlled on the ancilla index register holding ``k``.
    ``is_hermitian`` is the caller's promise that every ``U_k`` is self-inverse.
    """
    coeffs = [float(c) for c in coeffs]
    if not coeffs or len(coeffs) != len(unitaries):
        raise EncodingError("need matching, nonempty coefficient and unitary lists")
    if any(not c > 0 for c in coeffs):
        raise EncodingError("LCU coefficients must be strictly positive; fold signs into the unitaries")
    alpha = 0.0
    for c in coeffs:
        alpha += c
    m = (len(coeffs) - 1).bit_length()
    prep = prep_pair(coeffs)
    unitaries = list(unitaries)

    def unitary(circ: Circuit, *regs):
        if not m:
            unitaries[0](circ, *regs)
            return
        anc, ops = regs[0], regs[1:]
        prep_gates = prep.remap(anc)
        circ.extend(prep_gates)
        for k, u in enumerate(unitaries):
            term = build(circ, u, *ops)
            circ.extend(term.controlled(anc, [(k >> i) & 1 for i in range(m)]))
        circ.extend(g.inverse() for g in reversed(prep_gates))

    return BlockEncoding(alpha, (m,) if m else (), unitary, tuple(operand_shape), is_hermitian, epsilon)


def pauli_coefficients(A: np.ndarray) -> np.ndarray:
    """
    ``c[p_{n-1}, ..., p_0] = Tr(P A) / 2**n`` with ``p`` indexing (I, X, Y, Z).

    Contracts one qubit at a time (most significant first), costing
    ``O(n 4**n)`` instead of one trace per string.
    """
    N = A.shape[0]
    n = N.bit_length() - 1
    T = np.stack([_PAULI_MATS[p].T for p in "IXYZ"]) / 2  # T[p, a, b] = sigma_p[b, a] / 2
    t = np.asarray(A, dtype=complex).reshape((2,) * (2 * n))
    for k in range(n):
        t = np.tensordot(t, T, axes=([0, n - k], [1, 2]))
    return t


def _check_square_pow2(A: np.ndarray) -> int:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise EncodingError(f"expected a square matrix, got shape {A.shape}")
    N = A.shape[0]
    n = N.bit_length() - 1
    if N < 2 or 1 << n != N:
        raise EncodingError(f"matrix dimension {N} is not a power of two >= 2")
    return n


def from_array(A, tol: float = 1e-12) -> BlockEncoding:
    """
    Pauli-basis LCU encoding of a dense ``2**n x 2**n`` matrix.

    Coefficient signs and phases are folded into each selected string as a
    global phase, so ``alpha = sum |Tr(P A)| / 2**n``. Strings with weight
    below ``tol`` are dropped and their total weight is reported as ``epsilon``.
    """
    A = np.asarray(A, dtype=complex)
    n = _check_square_pow2(A)
    coeffs = pauli_coefficients(A)
    hermitian = bool(np.allclose(A, A.conj().T, atol=1e-12, rtol=0))
    weights, units, dropped = [], [], 0.0
    for idx in np.ndindex(coeffs.shape):
        c = coeffs[idx]
        if hermitian:
            c = complex(c.real, 0)
        if abs(c) <= tol:
            dropped += abs(c)
            continue
        string = tuple((n - 1 - axis, "IXYZ"[p]) for axis, p in enumerate(idx) if p)
        weights.append(abs(c))
        units.append(_pauli_term(tuple(sorted(string)), float(np.angle(c))))
    if not weights:
        raise EncodingError("cannot encode the zero matrix")
    return from_lcu(weights, units, (n,), hermitian, dropped)


def from_operator(op: PauliSum, num_qubits: int | None = None) -> BlockEncoding:
    """LCU encoding of a Pauli sum; each string is a layer of single-qubit Paulis."""
    if not op.terms:
        raise EncodingError("cannot encode an empty operator")
    n = num_qubits or op.num_qubits
    if n < op.num_qubits:
        raise EncodingError("num_qubits is smaller than the operator support")
    weights = [abs(c) for c in op.terms.values()]
    units = [_pauli_term(s, float(np.angle(c))) for s, c in op.terms.items()]
    hermitian = all(abs(np.imag(c)) < 1e-15 for c in op.terms.values())
    return from_lcu(weights, units, (n,), hermitian)


def from_eye(k: int = 0, n: int = 1) -> BlockEncoding:
    """
    Ones on the ``k``-th diagonal (``k > 0`` above the main one).

    Adds ``-k`` modulo ``2**(n+1)`` to the operand extended by one flag qubit
    as its most significant bit. The flag ends in ``|1>`` exactly when
    ``j - k`` leaves ``[0, 2**n)``, which drops wrapped entries from the block.
    """
    if n < 1:
        raise EncodingError("n must be at least 1")
    if abs(k) >= 1 << n:
        raise EncodingError(f"|k| = {abs(k)} must be below 2**n = {1 << n}")
    if k == 0:
        return BlockEncoding(1.0, (), lambda circ, ops: None, (n,), True)

    def unitary(circ: Circuit, flag, ops):
        add_constant(circ, list(ops) + list(flag), -k)

    return BlockEncoding(1.0, (1,), unitary, (n,), False)


def _projector_prep(state, n: int):
    if isinstance(state, (int, np.integer)):
        if not 0 <= state < 1 << n:
            raise EncodingError(f"basis index {state} does not fit {n} qubits")

        def basis(circ, qubits):
            for i, q in enumerate(qubits):
                if (state >> i) & 1:
                    circ.x(q)

        return basis
    return as_prep(state, n)


def _prep_size(state) -> int | None:
    if isinstance(state, Circuit):
        return state.num_qubits
    if isinstance(state, (int, np.integer)) or callable(state):
        return None
    size = np.asarray(state).size
    return size.bit_length() - 1


def from_projector(left=0, right=0, kernel: bool = False, n: int | None = None) -> BlockEncoding:
    """
    ``|phi><psi|`` (or ``I - |phi><phi|`` with ``kernel=True``), ``alpha = 1``.

    ``left`` and ``right`` are basis indices, amplitude vectors, preparation
    circuits or ``fn(circuit, qubits)`` callables. One flag qubit marks the
    all-zero system state between ``U_psi†`` and ``U_phi``.
    """
    sizes = {s for s in (_prep_size(left), _prep_size(right)) if s is not None}
    if len(sizes) > 1:
        raise EncodingError(f"left and right act on different register sizes {sorted(sizes)}")
    if n is None:
        n = sizes.pop() if sizes else max(1, int(left).bit_length(), int(right).bit_length())
    elif sizes and sizes != {n}:
        raise EncodingError("n disagrees with the size of the supplied preparation")
    u_left, u_right = _projector_prep(left, n), _projector_prep(right, n)

    def unitary(circ: Circuit, flag, ops):
        f = flag[0]
        right_gates = build(circ, u_right, list(ops))
        circ.extend(right_gates.adjoint())
        if not kernel:
            circ.x(f)
        circ.mcx(list(ops), f, [0] * len(ops))
        u_left(circ, list(ops))

    same = left is right or (isinstance(left, (int, np.integer)) and isinstance(right, (int, np.integer))
                             and left == right)
    return BlockEncoding(1.0, (1,), unitary, (n,), bool(same))
