"""
Generalized quantum signal processing over the qubitized walk operator.

Phase convention: the signal rotation is

    R(theta, phi, lam) = [[e^{i(lam+phi)} cos, e^{i phi} sin],
                          [e^{i lam} sin,       -cos        ]]

and the sequence ``R_0(theta_0, phi_0, lam)``, then for ``j = 1..d`` a walk
step applied when the signal qubit is ``|0>`` followed by ``R_j(theta_j, phi_j, 0)``,
has top-left entry ``P(z) = sum_k p_k z^k``. With the walk operator as ``z``,
projecting signal and walk ancillas onto zero leaves ``sum_k p_k T_k(A / alpha)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .approx import ChebSeries, inverse_series, jacobi_anger, jacobi_anger_tail, sup_norm_rescale
from .circuit import Circuit
from .encoding import BlockEncoding
from .qubitization import qubitize

_polyval = np.polynomial.polynomial.polyval


class PhaseError(ValueError):
    """Raised when a polynomial cannot be completed into a phase sequence."""


def _rotation(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[np.exp(1j * (lam + phi)) * c, np.exp(1j * phi) * s],
                     [np.exp(1j * lam) * s, -c]])


@dataclass(frozen=True)
class GQSPPhases:
    thetas: np.ndarray
    phis: np.ndarray
    lam: float

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        ph = np.asarray(self.phis, dtype=float)
        if th.shape != ph.shape or th.ndim != 1 or th.size == 0:
            raise PhaseError("thetas and phis must be equal-length nonempty vectors")
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "phis", ph)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def degree(self) -> int:
        return self.thetas.size - 1

    def evaluate(self, z) -> np.ndarray:
        """Top-left entry of the signal-processing product at each ``z``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        r0 = _rotation(self.thetas[0], self.phis[0], self.lam)
        top = np.full(z.shape, r0[0, 0])
        bot = np.full(z.shape, r0[1, 0])
        for t, f in zip(self.thetas[1:], self.phis[1:]):
            r = _rotation(t, f, 0.0)
            top, bot = z * top, bot
            top, bot = r[0, 0] * top + r[0, 1] * bot, r[1, 0] * top + r[1, 1] * bot
        return top

    def to_dict(self) -> dict:
        return {"thetas": self.thetas.tolist(), "phis": self.phis.tolist(), "lambda": self.lam}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> GQSPPhases:
        return cls(doc["thetas"], doc["phis"], doc["lambda"])

    @classmethod
    def from_json(cls, text: str) -> GQSPPhases:
        return cls.from_dict(json.loads(text))


def _circle_coeffs(poly) -> np.ndarray:
    if isinstance(poly, ChebSeries):
        poly = poly.to_chebyshev().coeffs
    return np.asarray(poly, dtype=complex)


def complementary(poly, check_points: int = 1024, tol: float = 1e-8) -> np.ndarray:
    """
    Coefficients of ``Q`` with ``|P|^2 + |Q|^2 = 1`` on the unit circle.

    Roots of ``z^d (1 - P(z) P*(1/z))`` come in pairs ``r, 1/conj(r)``; ``Q`` is
    built from the ``d`` roots inside the disk and its scale fixed by matching
    ``1 - |P|^2`` on the circle.
    """
    p = _circle_coeffs(poly)
    d = p.size - 1
    z = np.exp(2j * np.pi * np.arange(check_points) / check_points)
    peak = np.abs(_polyval(z, p)).max()
    if peak >= 1:
        raise PhaseError(f"polynomial reaches {peak:.6g} on the unit circle; it must stay below 1")
    if d == 0:
        return np.array([math.sqrt(1 - abs(p[0]) ** 2)], dtype=complex)
    g = -np.convolve(p, np.conj(p[::-1]))
    g[d] += 1
    roots = np.roots(g[::-1])
    inside = roots[np.argsort(np.abs(roots))][:d]
    q = np.poly(inside)[::-1].astype(complex)
    F = 1 - np.abs(_polyval(z, p)) ** 2
    q *= math.sqrt(float(np.mean(F / np.abs(_polyval(z, q)) ** 2)))
    err = np.abs(np.abs(_polyval(z, p)) ** 2 + np.abs(_polyval(z, q)) ** 2 - 1).max()
    if err > tol:
        raise PhaseError(f"completion residual {err:.3g} exceeds {tol:g}; increase the rescaling margin")
    return q


def find_phases(poly) -> GQSPPhases:
    """
    Phase sequence whose top-left entry is the circle polynomial of ``poly``.

    ``poly`` is a Chebyshev series (its coefficients are read as ``p_k`` of
    ``P(z) = sum p_k z^k``) or a raw coefficient array. Layers are peeled off
    from the top degree down, each choice zeroing either the leading or the
    constant coefficient of the rotated pair, whichever is larger.
    """
    p = _circle_coeffs(poly)
    q = complementary(p)
    d = p.size - 1
    thetas, phis = np.zeros(d + 1), np.zeros(d + 1)
    for j in range(d, 0, -1):
        if abs(p[-1]) + abs(q[-1]) > abs(p[0]) + abs(q[0]):
            t = math.atan2(abs(q[-1]), abs(p[-1]))
            f = float(np.angle(p[-1]) - np.angle(q[-1])) if abs(q[-1]) > 0 else 0.0
        else:
            t = math.atan2(abs(p[0]), abs(q[0]))
            f = float(np.angle(p[0]) - np.angle(-q[0])) if abs(p[0]) > 0 else 0.0
        c, s, e = math.cos(t), math.sin(t), np.exp(-1j * f)
        p, q = (e * c * p + s * q)[1:], (e * s * p - c * q)[:-1]
        thetas[j], phis[j] = t, f
    thetas[0] = math.atan2(abs(q[0]), abs(p[0]))
    lam = float(np.angle(q[0]))
    phis[0] = float(np.angle(p[0])) - lam
    return GQSPPhases(thetas, phis, lam)


def _signal_rotation(circ: Circuit, s: int, theta: float, phi: float, lam: float) -> None:
    if lam:
        circ.x(s).p(lam, s).x(s)
    circ.z(s)
    circ.ry(2 * theta, s)
    if phi:
        circ.x(s).p(phi, s).x(s)


def gqet(encoding: BlockEncoding, phases: GQSPPhases, alpha: float = 1.0,
         epsilon: float = 0.0) -> BlockEncoding:
    """
    Encoding of ``P(A / alpha_in)`` using one signal qubit and ``d`` controlled walk steps.

    ``alpha`` is the subnormalisation assigned to the result (the caller's
    rescaling factor).
    """
    walk = qubitize(encoding)

    def unitary(circ: Circuit, sig, *regs):
        s = sig[0]
        _signal_rotation(circ, s, phases.thetas[0], phases.phis[0], phases.lam)
        for t, f in zip(phases.thetas[1:], phases.phis[1:]):
            body = circ.sub()
            walk.apply(body, *regs)
            circ.extend(body.controlled([s], [0]))
            _signal_rotation(circ, s, t, f, 0.0)

    return BlockEncoding(alpha, (1,) + encoding.ancillas, unitary, encoding.operand_shape,
                         False, epsilon)


def poly(encoding: BlockEncoding, coeffs, kind: str = "monomial") -> BlockEncoding:
    """
    Encoding of ``p(A)`` for the operator ``A = alpha * block`` itself.

    Coefficients refer to powers (or Chebyshev polynomials) of ``A``. They are
    moved to the normalised variable ``x = A / alpha``, converted to the
    Chebyshev basis, rescaled below one on the circle and the scale becomes the
    result's ``alpha``.
    """
    series = coeffs if isinstance(coeffs, ChebSeries) else ChebSeries(np.asarray(coeffs), kind)
    mono = series.to_monomial().coeffs
    mono = mono * encoding.alpha ** np.arange(mono.size)
    scaled, scale = sup_norm_rescale(ChebSeries(mono, "monomial"))
    return gqet(encoding, find_phases(scaled), scale)


def inv(encoding: BlockEncoding, eps: float, kappa: float) -> BlockEncoding:
    """
    Encoding of ``A^{-1}``, assuming the spectrum of ``A / alpha`` lies in ``D_kappa``.

    The phase sequence realises ``r / x`` with ``x = A / alpha`` and circle
    rescaling ``r``; dividing out gives ``alpha_new = 1 / (r alpha)``.
    """
    plan = inverse_series(eps, kappa)
    return gqet(encoding, find_phases(plan.series), 1 / (plan.rescale * encoding.alpha),
                eps / encoding.alpha)


def sim(encoding: BlockEncoding, t: float, N: int = 8) -> BlockEncoding:
    """
    Encoding of ``exp(-i t A)`` by Jacobi-Anger truncation at order ``N``.

    In the normalised variable this is ``exp(-i (t alpha) x)``; the Bessel tail
    bound is reported as ``epsilon``.
    """
    tau = t * encoding.alpha
    series = jacobi_anger(tau, N)
    scaled, scale = sup_norm_rescale(series)
    return gqet(encoding, find_phases(scaled), scale, jacobi_anger_tail(tau, N))

