"""Qubitized walk operator, Chebyshev iterates and the unary Chebyshev LCU."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate
from .encoding import BlockEncoding, EncodingError


def reflect_zero(circ: Circuit, qubits: list[int]) -> None:
    """``2|0><0| - I`` on ``qubits``; nothing at all for an empty list."""
    if not qubits:
        return
    for q in qubits:
        circ.x(q)
    circ.mcz(qubits[:-1], qubits[-1])
    for q in qubits:
        circ.x(q)
    circ.gphase(math.pi)


@dataclass(frozen=True)
class WalkOperator:
    """
    ``W = R U`` for a Hermitian encoding ``U`` with ``R`` reflecting about the
    all-zero ancilla state. ``<0|W^k|0> = T_k(A / alpha)`` on the operands.
    """

    base: BlockEncoding

    @property
    def alpha(self) -> float:
        return self.base.alpha

    @property
    def ancillas(self) -> tuple[int, ...]:
        return self.base.ancillas

    def apply(self, circ: Circuit, *regs, power: int = 1) -> None:
        k = len(self.base.ancillas)
        flat = [q for r in regs[:k] for q in r]
        for _ in range(power):
            self.base.unitary(circ, *regs)
            reflect_zero(circ, flat)

    def as_encoding(self, power: int = 1) -> BlockEncoding:
        def unitary(circ: Circuit, *regs):
            self.apply(circ, *regs, power=power)

        # without ancillas W = U is itself Hermitian, and so is every power
        herm = power == 0 or not self.base.ancillas
        return BlockEncoding(self.base.alpha, self.base.ancillas, unitary,
                             self.base.operand_shape, herm, 0.0)


def qubitize(encoding: BlockEncoding) -> WalkOperator:
    if not encoding.is_hermitian:
        raise EncodingError("qubitization needs a Hermitian (self-inverse) encoding unitary")
    return WalkOperator(encoding)


def chebyshev(encoding: BlockEncoding, k: int) -> BlockEncoding:
    """
    Encoding of ``T_k(A / alpha)`` with the same ``alpha`` and ancillas, compiled as ``W^k``.

    Note ``alpha * block = alpha T_k(A / alpha)``, not ``T_k(A)``.
    """
    if k < 0:
        raise EncodingError("Chebyshev degree must be nonnegative")
    return qubitize(encoding).as_encoding(int(k))


def unary_prep(circ: Circuit, qubits: list[int], weights: np.ndarray) -> Circuit:
    """
    Gates preparing ``sum_j sqrt(w_j) |1^j 0^(M-j)>`` (weights summing to one)
    as a staircase: qubit ``j`` rotates only if qubit ``j - 1`` is set.
    """
    out = circ.sub()
    tails = np.cumsum(weights[::-1])[::-1]
    for j, q in enumerate(qubits):
        ratio = tails[j + 1] / tails[j] if tails[j] > 0 else 0.0
        theta = 2 * math.asin(math.sqrt(min(max(ratio, 0.0), 1.0)))
        if theta == 0:
            continue
        out.append(Gate("ry", (q,), (qubits[j - 1],) if j else (), (), theta))
    return out


def unary_chebyshev_lcu(encoding: BlockEncoding, coeffs) -> BlockEncoding:
    """
    ``sum_k c_k T_k(A / alpha)`` as an LCU whose index register is unary.

    Level ``j`` of the register is the string ``1^j 0^(M-j)``; unary qubit
    ``j`` switches on one more power of the walk operator. Series of a single
    parity step by ``W^2`` per qubit, which halves the register. The block is
    the series divided by ``||c||_1`` and ``alpha = ||c||_1``.
    """
    from .approx import ChebSeries

    series = coeffs if isinstance(coeffs, ChebSeries) else ChebSeries(coeffs)
    if series.basis != "chebyshev":
        series = series.to_chebyshev()
    c = np.asarray(series.coeffs)
    if np.any(np.abs(np.imag(c)) > 1e-14):
        raise EncodingError("unary Chebyshev LCU takes real coefficients")
    c = np.real(c)
    walk = qubitize(encoding)
    norm1 = float(np.abs(c).sum())
    if norm1 == 0:
        raise EncodingError("zero series")
    if c.size == 1:
        phase = 0.0 if c[0] > 0 else math.pi

        def const(circ: Circuit, *regs):
            if phase:
                circ.gphase(phase)

        return BlockEncoding(norm1, encoding.ancillas, const, encoding.operand_shape, True, 0.0)

    if not np.any(c[0::2]):
        parity, levels_c = "odd", c[1::2]
    elif not np.any(c[1::2]):
        parity, levels_c = "even", c[0::2]
    else:
        parity, levels_c = "mixed", c
    # walk powers: applied unconditionally, and added by each unary qubit
    lead, step = {"odd": (1, 2), "even": (0, 2), "mixed": (0, 1)}[parity]
    M = levels_c.size - 1
    weights = np.abs(levels_c) / norm1
    phases = np.where(levels_c < 0, math.pi, 0.0)

    def unitary(circ: Circuit, *regs):
        if M == 0:
            walk.apply(circ, *regs, power=lead)
            if phases[0]:
                circ.gphase(phases[0])
            return
        unary, base_regs = regs[0], regs[1:]
        prep = unary_prep(circ, unary, weights)
        circ.extend(prep)
        if phases[0]:
            circ.gphase(phases[0])
        for j, q in enumerate(unary):
            d = phases[j + 1] - phases[j]
            if d:
                circ.p(d, q)
        walk.apply(circ, *base_regs, power=lead)
        for q in unary:
            body = circ.sub()
            walk.apply(body, *base_regs, power=step)
            circ.extend(body.controlled([q]))
        circ.extend(prep.adjoint())

    anc = ((M,) if M else ()) + encoding.ancillas
    return BlockEncoding(norm1, anc, unitary, encoding.operand_shape, False, 0.0)
