"""State-preparation circuits for real amplitude vectors, LCU weights and singlets."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit, CircuitError, Gate

PrepFn = Callable[[Circuit, list], None]


def _num_qubits(length: int) -> int:
    n = length.bit_length() - 1
    if length < 2 or 1 << n != length:
        raise CircuitError(f"amplitude vector length {length} is not a power of two >= 2")
    return n


def _rotation_tree(circ: Circuit, qubits: Sequence[int], amps: np.ndarray) -> None:
    n = len(qubits)
    tree = amps.reshape((2,) * n)  # axis 0 = most significant qubit
    for level in range(n):
        target = qubits[n - 1 - level]
        controls = [qubits[n - 1 - i] for i in range(level)]
        blocks = tree.reshape(1 << level, 2, -1)
        last = level == n - 1
        for prefix in range(1 << level):
            lo, hi = blocks[prefix, 0], blocks[prefix, 1]
            if last:
                theta = 2 * math.atan2(hi[0], lo[0])
            else:
                theta = 2 * math.atan2(np.linalg.norm(hi), np.linalg.norm(lo))
            if abs(theta) < 1e-14:
                continue
            pol = [(prefix >> (level - 1 - i)) & 1 for i in range(level)]
            circ.append(Gate("ry", (target,), tuple(controls), tuple(pol), theta))


def prepare(amplitudes: Sequence[float]) -> Circuit:
    """
    Circuit on one register ``q`` mapping ``|0...0>`` to the normalised real vector.

    Uses a binary tree of multiplexed Y rotations, most significant qubit first.
    The last level takes the signed ``atan2`` of each amplitude pair, which
    absorbs signs without separate Z corrections.
    """
    if np.iscomplexobj(amplitudes):
        raise CircuitError("only real amplitudes are supported")
    amps = np.asarray(amplitudes, dtype=float)
    n = _num_qubits(amps.size)
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise CircuitError("cannot prepare the zero vector")
    circ = Circuit()
    q = circ.add_register("q", n)
    _rotation_tree(circ, q, amps / norm)
    return circ


def prep_pair(coeffs: Sequence[float]) -> Circuit:
    """PREP for LCU weights: ``sum_k sqrt(c_k / sum c) |k>``, zero-padded to a power of two."""
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0:
        raise CircuitError("need at least one coefficient")
    if np.any(c <= 0):
        raise CircuitError("LCU coefficients must be strictly positive")
    if c.size == 1:
        return Circuit()
    size = 1 << (c.size - 1).bit_length()
    amps = np.zeros(size)
    amps[: c.size] = np.sqrt(c / c.sum())
    return prepare(amps)


def singlet_prep(matching: Sequence[tuple[int, int]], num_qubits: int) -> Circuit:
    """(|01> - |10>)/sqrt(2) on every matched pair, |0> elsewhere."""
    seen: set[int] = set()
    circ = Circuit()
    q = circ.add_register("q", num_qubits)
    for i, j in matching:
        if i == j or i in seen or j in seen:
            raise CircuitError(f"pair ({i}, {j}) overlaps another pair")
        seen.update((i, j))
        circ.x(q[i]).h(q[i]).cx(q[i], q[j]).x(q[j])
    return circ


def as_prep(prep, num_qubits: int) -> PrepFn:
    """
    Normalise the accepted preparation forms to ``fn(circuit, qubits)``.

    ``prep`` may be ``None`` (start in ``|0>``), an amplitude vector, a
    :class:`Circuit` on exactly ``num_qubits`` qubits, or such a callable.
    """
    if prep is None:
        return lambda circ, qubits: None
    if isinstance(prep, Circuit):
        if prep.num_qubits != num_qubits:
            raise CircuitError(f"prep acts on {prep.num_qubits} qubits, operands have {num_qubits}")
        return lambda circ, qubits: circ.extend(prep.remap(qubits))
    if callable(prep):
        return prep
    amps = np.asarray(prep)
    if amps.size != 1 << num_qubits:
        raise CircuitError(f"amplitude vector of length {amps.size} does not fit {num_qubits} qubits")
    return as_prep(prepare(amps), num_qubits)
