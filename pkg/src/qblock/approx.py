"""
Classical polynomial tools: basis conversion, circle sup-norm rescaling, the
Chebyshev series of 1/x and the Jacobi-Anger expansion of exp(-i t x).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

BASES = ("monomial", "chebyshev")


def _trim(c: np.ndarray, tol: float = 1e-15) -> np.ndarray:
    n = c.size
    while n > 1 and abs(c[n - 1]) < tol:
        n -= 1
    return c[:n]


@dataclass(frozen=True)
class ChebSeries:
    """
    Polynomial on ``[-1, 1]`` given by coefficients in the monomial or
    Chebyshev-T basis (index = degree). Trailing terms below ``1e-15`` are trimmed.
    """

    coeffs: np.ndarray
    basis: str = "chebyshev"

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}")
        c = np.atleast_1d(np.asarray(self.coeffs))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a nonempty 1-D sequence")
        c = c.astype(complex if np.iscomplexobj(c) else float)
        object.__setattr__(self, "coeffs", _trim(c))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coeffs) or not np.any(self.coeffs.imag)

    def __call__(self, x):
        x = np.asarray(x)
        c = self.coeffs
        if self.basis == "monomial":
            acc = np.zeros_like(x, dtype=c.dtype) + c[-1]
            for a in c[-2::-1]:
                acc = acc * x + a
            return acc
        # Clenshaw: b_k = c_k + 2x b_{k+1} - b_{k+2}
        b1 = np.zeros_like(x, dtype=np.result_type(c, x))
        b2 = np.zeros_like(b1)
        for a in c[:0:-1]:
            b1, b2 = a + 2 * x * b1 - b2, b1
        return c[0] + x * b1 - b2

    def __mul__(self, s):
        return ChebSeries(self.coeffs * s, self.basis)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return ChebSeries(self.coeffs / s, self.basis)

    def to_chebyshev(self) -> ChebSeries:
        """Exact conversion using ``x T_k = (T_{k+1} + T_{|k-1|}) / 2``."""
        if self.basis == "chebyshev":
            return self
        d = self.degree
        out = np.zeros(d + 1, dtype=self.coeffs.dtype)
        power = np.zeros(d + 1)  # Chebyshev coefficients of x**k
        power[0] = 1.0
        out[0] = self.coeffs[0]
        for k in range(1, d + 1):
            nxt = np.zeros(d + 1)
            for j in range(k):
                if power[j]:
                    nxt[j + 1] += power[j] / 2
                    nxt[abs(j - 1)] += power[j] / 2
            power = nxt
            out += self.coeffs[k] * power
        return ChebSeries(out, "chebyshev")

    def to_monomial(self) -> ChebSeries:
        """Expand via ``T_{k+1} = 2x T_k - T_{k-1}``."""
        if self.basis == "monomial":
            return self
        d = self.degree
        out = np.zeros(d + 1, dtype=self.coeffs.dtype)
        prev, cur = np.zeros(d + 1), np.zeros(d + 1)
        prev[0] = 1.0
        out += self.coeffs[0] * prev
        if d >= 1:
            cur[1] = 1.0
            out += self.coeffs[1] * cur
        for k in range(2, d + 1):
            nxt = -prev.copy()
            nxt[1:] += 2 * cur[:-1]
            prev, cur = cur, nxt
            out += self.coeffs[k] * cur
        return ChebSeries(out, "monomial")

    def circle(self, z):
        """``sum_k c_k z^k`` with ``c`` the Chebyshev coefficients."""
        return np.polynomial.polynomial.polyval(z, self.to_chebyshev().coeffs)

    def to_dict(self) -> dict:
        c = np.asarray(self.coeffs, dtype=complex)
        return {"basis": self.basis, "coeffs": [[float(z.real), float(z.imag)] for z in c]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> ChebSeries:
        c = np.array([complex(re, im) for re, im in doc["coeffs"]])
        if not np.any(c.imag):
            c = c.real
        return cls(c, doc.get("basis", "chebyshev"))

    @classmethod
    def from_json(cls, text: str) -> ChebSeries:
        return cls.from_dict(json.loads(text))


def circle_max(series: ChebSeries, points: int | None = None) -> float:
    """Grid maximum of ``|sum_k c_k e^{ik theta}|`` over the unit circle."""
    c = series.to_chebyshev().coeffs
    points = points or max(4096, 16 * c.size)
    size = max(points, c.size)
    return float(np.abs(np.fft.fft(c, size)).max())


def sup_norm_rescale(series: ChebSeries, margin: float = 1e-3) -> tuple[ChebSeries, float]:
    """
    Scale a series so its circle polynomial peaks at ``1 - margin``.

    Returns ``(series / scale, scale)``. The circle bound is what signal
    processing needs, and for real Chebyshev series it dominates the bound on
    ``[-1, 1]``.
    """
    if not 0 < margin <= 0.1:
        raise ValueError("margin must lie in (0, 0.1]")
    series = series.to_chebyshev()
    peak = circle_max(series)
    if peak == 0:
        raise ValueError("cannot rescale the zero polynomial")
    scale = peak / (1 - margin)
    return series / scale, scale


# -- inverse ------------------------------------------------------------------


@dataclass(frozen=True)
class InversePlan:
    """
    Odd Chebyshev approximation ``series ~ rescale / x`` on
    ``D_kappa = [-1, -1/kappa] U [1/kappa, 1]`` with circle peak ``1 - margin``.
    """

    eps: float
    kappa: float
    series: ChebSeries
    rescale: float
    b: int
    j0: int

    @property
    def raw(self) -> ChebSeries:
        """The unscaled approximation of ``1/x``."""
        return self.series / self.rescale

    def domain_grid(self, points: int = 2001) -> np.ndarray:
        """At least ``points`` samples of ``D_kappa``, split evenly between its halves."""
        half = np.linspace(1 / self.kappa, 1, (points + 1) // 2)
        return np.concatenate([-half[::-1], half])


def inverse_coefficients(b: int, j0: int) -> np.ndarray:
    """
    ``c_{2j+1} = 4 (-1)^j sum_{i=j+1}^{b} C(2b, b+i) / 4^b`` for ``j <= j0``,
    with the binomials taken in log space.
    """
    i = np.arange(b + 1)
    logw = gammaln(2 * b + 1) - gammaln(b + i + 1) - gammaln(b - i + 1) - 2 * b * math.log(2)
    w = np.exp(logw)
    tail = np.cumsum(w[::-1])[::-1]  # tail[m] = sum_{i >= m} w_i
    out = np.zeros(2 * j0 + 2)
    for j in range(j0 + 1):
        if j + 1 <= b:
            out[2 * j + 1] = 4 * (-1) ** j * tail[j + 1]
    return out


def inverse_series(eps: float, kappa: float, margin: float = 1e-3) -> InversePlan:
    """Chebyshev series for ``1/x`` on ``D_kappa`` with degree ``2 j0 + 1``."""
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    if not kappa >= 1:
        raise ValueError("kappa must be at least 1")
    b = max(1, math.ceil(kappa ** 2 * math.log(kappa / eps)))
    j0 = math.ceil(math.sqrt(b * math.log(4 * b / eps)))
    raw = ChebSeries(inverse_coefficients(b, j0))
    scaled, scale = sup_norm_rescale(raw, margin)
    return InversePlan(eps, kappa, scaled, 1 / scale, b, j0)


# -- Bessel / Jacobi-Anger ------------------------------------------------------


def bessel_j(t: float, kmax: int) -> np.ndarray:
    """
    ``J_0(t) ... J_kmax(t)`` by Miller's downward recurrence normalised with
    ``J_0 + 2 sum_k J_{2k} = 1``.
    """
    t = float(t)
    if t == 0:
        out = np.zeros(kmax + 1)
        out[0] = 1.0
        return out
    sign = 1.0
    if t < 0:
        t, sign = -t, -1.0
    start = kmax + 20 + int(t) + 2 * int(math.sqrt(40 * max(kmax, t)))
    start += start % 2
    vals = np.zeros(start + 2)
    vals[start] = 1e-300
    for k in range(start, 0, -1):
        vals[k - 1] = 2 * k / t * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > 1e250:
            vals[k - 1:] *= 1e-250
    norm = vals[0] + 2 * vals[2::2].sum()
    out = vals[: kmax + 1] / norm
    if sign < 0:
        out[1::2] *= -1
    return out


def jacobi_anger_tail(t: float, N: int) -> float:
    """``2 sum_{k > N} (|t|/2)^k / k!``, which bounds ``2 sum_{k > N} |J_k(t)|``."""
    h = abs(t) / 2
    total, k = 0.0, N + 1
    term = math.exp(k * math.log(h) - math.lgamma(k + 1)) if h > 0 else 0.0
    while term > 0:
        total += term
        k += 1
        term *= h / k
        if term < total * 1e-17:
            break
    return 2 * total


def jacobi_anger(t: float, N: int) -> ChebSeries:
    """Chebyshev series of ``exp(-i t x)`` truncated at order ``N``."""
    if N < 0:
        raise ValueError("truncation order must be nonnegative")
    J = bessel_j(t, N)
    k = np.arange(N + 1)
    c = 2 * (-1j) ** k * J
    c[0] = J[0]
    return ChebSeries(c.astype(complex))
