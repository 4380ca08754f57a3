"""
Dense statevector engine used both to run circuits and as the verification oracle.

Amplitude index bit ``q`` is qubit ``q`` (little-endian, register-major, matching
:mod:`qblock.circuit`). Internally a state of ``n`` qubits is held as a tensor of
shape ``(2,)*n + (batch,)`` so qubit ``q`` lives on axis ``n - 1 - q``; the
trailing batch axis lets a block be extracted from all columns in one pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .circuit import Circuit, CircuitError

if TYPE_CHECKING:
    from .encoding import BlockEncoding

MAX_QUBITS = 22

_SQ2 = 1 / math.sqrt(2)
_FIXED = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "cx": np.array([[0, 1], [1, 0]], dtype=complex),
    "mcx": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.diag([1, -1]).astype(complex),
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * math.pi / 4)]),
    "tdg": np.diag([1, np.exp(-1j * math.pi / 4)]),
}


class SimulationError(ValueError):
    """Raised for budget overruns, shape mismatches and degenerate post-selection."""


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """2x2 matrix of an uncontrolled single-qubit gate kind."""
    if kind in _FIXED:
        return _FIXED[kind]
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "rz":
        return np.diag([np.exp(-1j * angle / 2), np.exp(1j * angle / 2)])
    if kind == "p":
        return np.diag([1, np.exp(1j * angle)])
    raise CircuitError(f"no single-qubit matrix for {kind!r}")


def _check_budget(n: int):
    if n > MAX_QUBITS:
        raise SimulationError(f"circuit needs {n} qubits; the simulator budget is {MAX_QUBITS}")


def _apply(psi: np.ndarray, n: int, gate) -> None:
    if gate.kind == "gphase":
        psi *= np.exp(1j * gate.angle)
        return
    if gate.kind == "measure":
        raise SimulationError("run() expects a measure-free circuit")
    idx = [slice(None)] * (n + 1)
    for c, b in zip(gate.controls, gate.polarity):
        idx[n - 1 - c] = b
    t = n - 1 - gate.targets[0]
    i0, i1 = list(idx), list(idx)
    i0[t], i1[t] = 0, 1
    i0, i1 = tuple(i0), tuple(i1)
    m = gate_matrix(gate.kind, gate.angle)
    if m[0, 1] == 0 and m[1, 0] == 0:
        if m[0, 0] != 1:
            psi[i0] *= m[0, 0]
        psi[i1] *= m[1, 1]
        return
    a, b = psi[i0], psi[i1]
    if m[0, 0] == 0 and m[1, 1] == 0:
        new_a = m[0, 1] * b
        psi[i1] = m[1, 0] * a
        psi[i0] = new_a
        return
    new_a = m[0, 0] * a + m[0, 1] * b
    psi[i1] = m[1, 0] * a + m[1, 1] * b
    psi[i0] = new_a


def run(circuit: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """
    Apply ``circuit`` to ``initial``.

    ``initial`` is a vector of length ``2**n`` or a matrix of shape ``(2**n, B)``
    whose columns are evolved independently. ``None`` means ``|0...0>``.
    """
    n = circuit.num_qubits
    _check_budget(n)
    dim = 1 << n
    if initial is None:
        initial = np.zeros(dim, dtype=complex)
        initial[0] = 1
    initial = np.asarray(initial, dtype=complex)
    if initial.shape[0] != dim:
        raise SimulationError(f"state has {initial.shape[0]} amplitudes, circuit needs {dim}")
    batched = initial.ndim == 2
    psi = initial.reshape((2,) * n + (-1,)).copy()
    for g in circuit.gates:
        _apply(psi, n, g)
    out = psi.reshape(dim, -1)
    return out if batched else out[:, 0]


def unitary(circuit: Circuit) -> np.ndarray:
    """Full unitary of a measure-free circuit (small circuits only)."""
    return run(circuit, np.eye(1 << circuit.num_qubits, dtype=complex))


def extract_block(encoding: BlockEncoding) -> np.ndarray:
    """
    Top-left block ``(<0|_a x I) U (|0>_a x I)`` of a compiled encoding.

    Operand qubits occupy the low bits of the compiled circuit, so the block is
    the leading ``N x N`` corner of the evolved column batch.
    """
    circ = encoding.circuit()
    _check_budget(circ.num_qubits)
    N = encoding.dim
    cols = np.zeros((1 << circ.num_qubits, N), dtype=complex)
    cols[np.arange(N), np.arange(N)] = 1
    return run(circ, cols)[:N, :N]


@dataclass(frozen=True)
class PostSelectResult:
    """
    Outcome of projecting ancillas onto zero.

    ``state`` is ``None`` when the projection annihilates the input. In sampled
    repeat-until-success mode ``attempts`` holds the attempt count per trial.
    """

    state: np.ndarray | None
    success_probability: float
    attempts: np.ndarray | None = None

    @property
    def degenerate(self) -> bool:
        return self.state is None


def postselect_zero(state: np.ndarray, ancilla_qubits, num_qubits: int | None = None,
                    tol: float = 1e-15) -> PostSelectResult:
    """Project ``ancilla_qubits`` onto ``|0>`` and renormalise the remaining qubits."""
    state = np.asarray(state, dtype=complex)
    n = num_qubits if num_qubits is not None else int(round(math.log2(state.size)))
    if state.size != 1 << n:
        raise SimulationError("state length is not 2**num_qubits")
    idx = [slice(None)] * n
    for q in ancilla_qubits:
        if not 0 <= q < n:
            raise SimulationError(f"ancilla qubit {q} outside the {n}-qubit state")
        idx[n - 1 - q] = 0
    kept = state.reshape((2,) * n)[tuple(idx)].reshape(-1)
    p = float(np.vdot(kept, kept).real)
    if p <= tol:
        return PostSelectResult(None, p)
    return PostSelectResult(kept / math.sqrt(p), p)


def _compiled(encoding: BlockEncoding, prep) -> tuple[Circuit, list[int]]:
    circ = encoding.apply(prep)
    return circ, circ.qubits_by_role("ancilla")


def apply_rus(encoding: BlockEncoding, prep=None, *, trials: int = 0, seed: int | None = None,
              min_probability: float = 1e-12) -> PostSelectResult:
    """
    Exact emulation of a repeat-until-success loop.

    The post-selected state is what every successful attempt yields, so it is
    computed once by projection. With ``trials > 0`` the number of attempts of
    that many independent loops is drawn from the per-attempt success law.
    """
    circ, anc = _compiled(encoding, prep)
    res = postselect_zero(run(circ), anc, circ.num_qubits)
    if res.success_probability < min_probability:
        raise SimulationError(
            f"success probability {res.success_probability:.3g} is below {min_probability:g}; "
            "the loop would practically never terminate")
    if trials:
        rng = np.random.default_rng(seed)
        return PostSelectResult(res.state, res.success_probability,
                                rng.geometric(res.success_probability, size=trials))
    return res


def hadamard_test(encoding: BlockEncoding, prep=None, part: str = "real", *, shots: int = 0,
                  seed: int | None = None) -> float:
    """
    ``alpha * Re`` (or ``Im``) of ``<0,psi|U|0,psi>`` via an explicit one-qubit
    interference circuit. ``shots=0`` reads ``<Z>`` off the statevector.
    """
    if part not in ("real", "imag"):
        raise ValueError("part must be 'real' or 'imag'")
    from .state_prep import as_prep

    circ = Circuit()
    ops = [circ.add_register(f"op{i}", s) for i, s in enumerate(encoding.operand_shape)]
    ancs = [circ.add_register(f"anc{i}", s, "ancilla") for i, s in enumerate(encoding.ancillas)]
    ctrl = circ.add_register("hadamard", 1, "ancilla")[0]
    as_prep(prep, sum(encoding.operand_shape))(circ, [q for r in ops for q in r])
    circ.h(ctrl)
    body = circ.sub()
    encoding.unitary(body, *ancs, *ops)
    circ.extend(body.controlled([ctrl]))
    if part == "imag":
        circ.sdg(ctrl)
    circ.h(ctrl)

    psi = run(circ).reshape(2, -1)  # ctrl is the top qubit
    p0 = float(np.vdot(psi[0], psi[0]).real)
    if shots:
        p0 = np.random.default_rng(seed).binomial(shots, min(max(p0, 0.0), 1.0)) / shots
    return encoding.alpha * (2 * p0 - 1)


# -- JSON ------------------------------------------------------------------------


def array_to_json(a: np.ndarray) -> dict:
    """``{"dim": N, "data": [[re, im], ...]}`` for vectors and row-major square matrices."""
    a = np.asarray(a, dtype=complex)
    return {"dim": int(a.shape[0]), "data": [[float(z.real), float(z.imag)] for z in a.reshape(-1)]}


def array_from_json(doc: dict | str) -> np.ndarray:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        dim = int(doc["dim"])
        flat = np.array([complex(re, im) for re, im in doc["data"]], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed array document: {exc}") from None
    if flat.size == dim:
        return flat
    if flat.size == dim * dim:
        return flat.reshape(dim, dim)
    raise ValueError(f"data holds {flat.size} entries, expected {dim} or {dim * dim}")
