"""
Arithmetic on block-encodings.

Error bounds compose additively for sums and to first order for products;
both are upper-bound bookkeeping rather than tight estimates.
"""

from __future__ import annotations

import math

from .circuit import Circuit
from .encoding import BlockEncoding, EncodingError


def _same_shape(a: BlockEncoding, b: BlockEncoding):
    if a.operand_shape != b.operand_shape:
        raise EncodingError(f"operand shapes differ: {a.operand_shape} vs {b.operand_shape}")


def add(a: BlockEncoding, b: BlockEncoding) -> BlockEncoding:
    """``A + B`` as a two-term LCU over one new selector qubit."""
    _same_shape(a, b)
    alpha = a.alpha + b.alpha
    theta = 2 * math.atan2(math.sqrt(b.alpha), math.sqrt(a.alpha))
    na, nb = len(a.ancillas), len(b.ancillas)

    def unitary(circ: Circuit, sel, *regs):
        s = sel[0]
        anc_a, anc_b, ops = regs[:na], regs[na:na + nb], regs[na + nb:]
        circ.ry(theta, s)
        body = circ.sub()
        a.unitary(body, *anc_a, *ops)
        circ.extend(body.controlled([s], [0]))
        body = circ.sub()
        b.unitary(body, *anc_b, *ops)
        circ.extend(body.controlled([s], [1]))
        circ.ry(-theta, s)

    return BlockEncoding(alpha, (1,) + a.ancillas + b.ancillas, unitary, a.operand_shape,
                         a.is_hermitian and b.is_hermitian, a.epsilon + b.epsilon)


def scale(a: BlockEncoding, c: float) -> BlockEncoding:
    """``c A``: ``alpha`` absorbs ``|c|`` and a negative sign becomes a global phase."""
    c = float(c)
    if c == 0 or not math.isfinite(c):
        raise EncodingError("scale factor must be finite and nonzero")
    if c > 0:
        unitary = a.unitary
    else:
        def unitary(circ: Circuit, *regs):
            a.unitary(circ, *regs)
            circ.gphase(math.pi)
    return BlockEncoding(abs(c) * a.alpha, a.ancillas, unitary, a.operand_shape,
                         a.is_hermitian, abs(c) * a.epsilon)


def neg(a: BlockEncoding) -> BlockEncoding:
    return scale(a, -1.0)


def sub(a: BlockEncoding, b: BlockEncoding) -> BlockEncoding:
    return add(a, neg(b))


def matmul(a: BlockEncoding, b: BlockEncoding) -> BlockEncoding:
    """
    ``A B``: run ``U_B`` then ``U_A`` on the shared operands with separate ancillas.

    The product unitary is never flagged Hermitian, even for ``A @ A``: two
    copies on disjoint ancillas do not square to the identity.
    """
    _same_shape(a, b)
    na, nb = len(a.ancillas), len(b.ancillas)

    def unitary(circ: Circuit, *regs):
        anc_a, anc_b, ops = regs[:na], regs[na:na + nb], regs[na + nb:]
        b.unitary(circ, *anc_b, *ops)
        a.unitary(circ, *anc_a, *ops)

    return BlockEncoding(a.alpha * b.alpha, a.ancillas + b.ancillas, unitary, a.operand_shape,
                         False, b.alpha * a.epsilon + a.alpha * b.epsilon)


def kron(a: BlockEncoding, b: BlockEncoding) -> BlockEncoding:
    """
    ``A (x) B`` in the ``numpy.kron`` sense.

    Under little-endian ordering the right factor owns the least significant
    qubits, so the operand registers of ``B`` come first.
    """
    na, nb = len(a.ancillas), len(b.ancillas)
    kb = len(b.operand_shape)

    def unitary(circ: Circuit, *regs):
        anc_a, anc_b, ops = regs[:na], regs[na:na + nb], regs[na + nb:]
        b.unitary(circ, *anc_b, *ops[:kb])
        a.unitary(circ, *anc_a, *ops[kb:])

    return BlockEncoding(a.alpha * b.alpha, a.ancillas + b.ancillas, unitary,
                         b.operand_shape + a.operand_shape, a.is_hermitian and b.is_hermitian,
                         b.alpha * a.epsilon + a.alpha * b.epsilon)
