"""Modular register arithmetic used by the shift-type encodings."""

from __future__ import annotations

from typing import Sequence

from .circuit import Circuit


def increment(circ: Circuit, qubits: Sequence[int]) -> Circuit:
    """``|k> -> |k + 1 mod 2**n>`` on a little-endian register (MCX cascade)."""
    for i in range(len(qubits) - 1, -1, -1):
        circ.mcx(qubits[:i], qubits[i])
    return circ


def decrement(circ: Circuit, qubits: Sequence[int]) -> Circuit:
    for i in range(len(qubits)):
        circ.mcx(qubits[:i], qubits[i])
    return circ


def add_constant(circ: Circuit, qubits: Sequence[int], c: int) -> Circuit:
    """``|k> -> |k + c mod 2**n>``; bit ``b`` of ``c`` increments the sub-register from ``b`` up."""
    c %= 1 << len(qubits)
    for b in range(len(qubits)):
        if (c >> b) & 1:
            increment(circ, qubits[b:])
    return circ
