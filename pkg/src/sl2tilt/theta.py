"""Theta series of the odd character mod 4.

    phi(x) = (pi/8) sum_{n>=1} chi(n) n exp(-pi^2 n^2 x / 16),   x > 0,

and ``phi(x) = 0`` for ``x <= 0``.  The series converges fast for large
``x``; for small ``x`` the inversion formula

    phi(x) = 8 (pi x)^(-3/2) phi(16 / (pi^2 x))

maps the argument back past the fixed point ``4/pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate

RATE = math.pi**2 / 16          # exponent scale in each term
INVERSION = 16 / math.pi**2     # x -> INVERSION / x
SWITCH = 4 / math.pi            # fixed point of the inversion
MAX_ORDER = 6


class UnsupportedOrder(ValueError):
    pass


def dirichlet_chi(n: int) -> int:
    """Primitive character mod 4."""
    r = n % 4
    return 1 if r == 1 else -1 if r == 3 else 0


@dataclass(frozen=True)
class ThetaEvaluator:
    """Evaluates ``phi`` and its derivatives, switching branch at ``switch``."""

    tol: float = 1e-16
    switch: float = SWITCH

    def _series(self, x: float, p: int = 0) -> float:
        # sum over odd n of chi(n) n (-RATE n^2)^p exp(-RATE n^2 x)
        total = 0.0
        n = 1
        peak = math.sqrt((2 * p + 1) / (2 * RATE * x))
        while True:
            term = dirichlet_chi(n) * n * (-RATE * n * n) ** p * math.exp(-RATE * n * n * x)
            total += term
            n += 2
            if n > peak:
                nxt = n * (RATE * n * n) ** p * math.exp(-RATE * n * n * x)
                if nxt <= self.tol * abs(total) or nxt == 0.0:
                    break
        return math.pi / 8 * total

    def phi(self, x: float) -> float:
        if x <= 0:
            return 0.0
        if x >= self.switch:
            return self._series(x)
        return 8 * (math.pi * x) ** -1.5 * self._series(INVERSION / x)

    def phi_derivative(self, x: float, p: int) -> float:
        if p < 0 or p > MAX_ORDER:
            raise UnsupportedOrder(f"derivative order {p} outside 0..{MAX_ORDER}")
        if x <= 0:
            return 0.0
        if x >= self.switch:
            return self._series(x, p)
        total = 0.0
        y = INVERSION / x
        for (power, order), coef in inversion_derivative_terms(p).items():
            total += coef * x**power * self._series(y, order)
        return total

    def __call__(self, x):
        if np.ndim(x) == 0:
            return self.phi(float(x))
        return phi_vec(x, self)


_DEFAULT = ThetaEvaluator()


def inversion_derivative_terms(p: int) -> dict[tuple[float, int], float]:
    """``d^p/dx^p [8 (pi x)^(-3/2) phi(a/x)]`` as ``{(power, order): coef}``.

    Each entry stands for ``coef * x**power * phi^(order)(a / x)`` with
    ``a = 16 / pi**2``.
    """
    terms = {(-1.5, 0): 8 * math.pi**-1.5}
    for _ in range(p):
        nxt: dict[tuple[float, int], float] = {}
        for (e, k), c in terms.items():
            # d/dx x^e f(a/x) = e x^(e-1) f(a/x) - a x^(e-2) f'(a/x)
            nxt[(e - 1, k)] = nxt.get((e - 1, k), 0.0) + e * c
            nxt[(e - 2, k + 1)] = nxt.get((e - 2, k + 1), 0.0) - INVERSION * c
        terms = nxt
    return terms


def phi(x: float) -> float:
    return _DEFAULT.phi(x)


def phi_derivative(x: float, p: int) -> float:
    return _DEFAULT.phi_derivative(x, p)


def phi_vec(x, evaluator: ThetaEvaluator | None = None, n_terms: int = 41) -> np.ndarray:
    """Vectorised ``phi`` on an array.

    Both branches keep ``n_terms`` odd indices; past the switch point the
    ratio of consecutive terms is at most ``3 exp(-2 pi)``, so 41 odd
    terms are far below double precision.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    n = np.arange(1, 2 * n_terms, 2, dtype=float)
    weights = np.where(n % 4 == 1, 1.0, -1.0) * n
    switch = SWITCH if evaluator is None else evaluator.switch
    hi = x >= switch
    lo = (x > 0) & ~hi
    if hi.any():
        out[hi] = math.pi / 8 * (np.exp(-RATE * np.multiply.outer(x[hi], n * n)) @ weights)
    if lo.any():
        y = INVERSION / x[lo]
        out[lo] = 8 * (math.pi * x[lo]) ** -1.5 * (math.pi / 8) * (np.exp(-RATE * np.multiply.outer(y, n * n)) @ weights)
    return out


def phi_series(x, dps: int | None = None):
    """Direct series at any ``x > 0``, no inversion.

    Slow and cancellation-prone for small ``x`` in double precision; with
    ``dps`` it runs in mpmath and serves as an independent reference.
    """
    if x <= 0:
        return 0.0
    if dps is None:
        return ThetaEvaluator(tol=0.0)._series(float(x))
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        rate = mpmath.pi**2 / 16
        cutoff = mpmath.mpf(10) ** -(dps + 10)
        total = mpmath.mpf(0)
        n = 1
        peak = mpmath.sqrt(1 / (2 * rate * x))
        while True:
            term = n * mpmath.exp(-rate * n * n * x)
            total += term if n % 4 == 1 else -term
            if n > peak and term < cutoff:
                break
            n += 2
        return mpmath.pi / 8 * total


def laplace(lam):
    """``int_0^inf exp(-lam x) phi(x) dx = sech(2 sqrt(lam)) / 2`` for ``Re lam >= 0``.

    Accepts complex arrays; the principal square root is used.
    """
    z = 2 * np.sqrt(np.asarray(lam, dtype=complex))
    e = np.exp(-z)
    return e / (1 + e * e)


def termwise_integral(n: int) -> float:
    """``int_0^inf`` of the n-th series term: ``2 chi(n) / (pi n)``."""
    return math.pi / 8 * dirichlet_chi(n) * n * 16 / (math.pi**2 * n * n)


def integral_partial_sums(n_max: int) -> list[float]:
    out, acc = [], 0.0
    for n in range(1, n_max + 1, 2):
        acc += termwise_integral(n)
        out.append(acc)
    return out


def phi_integral(cut: float = 8.0) -> float:
    """``int_0^inf phi``: adaptive quadrature on ``(0, cut]`` plus the exact tail."""
    head = integrate.quad(phi, 0.0, SWITCH, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    head += integrate.quad(phi, SWITCH, cut, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    tail = 0.0
    for n in range(1, 200, 2):
        term = math.pi / 8 * dirichlet_chi(n) * n / (RATE * n * n) * math.exp(-RATE * n * n * cut)
        tail += term
        if abs(term) < 1e-18:
            break
    return head + tail


def paired_term_ratio(x: float, m: int) -> float:
    """Ratio of the ``(4m+3)`` term to the ``(4m+1)`` term; below 1 past the switch point."""
    a, b = 4 * m + 1, 4 * m + 3
    return b / a * math.exp(-RATE * (b * b - a * a) * x)


def fe_residual(x: float, evaluator: ThetaEvaluator | None = None) -> float:
    """Relative gap between ``phi(x)`` and its inversion image."""
    ev = evaluator or _DEFAULT
    lhs = ev.phi(x)
    rhs = 8 * (math.pi * x) ** -1.5 * ev.phi(INVERSION / x)
    return abs(lhs - rhs) / lhs
