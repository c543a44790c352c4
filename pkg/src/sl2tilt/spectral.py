"""Closed-form coefficients of ``X_{2^s}`` from the roots of ``P_s``.

``P_s(x) = F^s(x - 2)`` with ``F(y) = y*y - 2`` has the simple roots
``beta_{s,j} = 2 + 2 cos((2j - 1) pi / 2**(s+1))`` for ``j = 1..2**s``.
The partial-fraction expansion of ``t**(2**s) / prod(1 - beta t)`` turns
every coefficient ``x[2^s, k]`` into a finite trigonometric sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np


class PrecisionLoss(ArithmeticError):
    """The unscaled value does not fit in double precision."""


class DegenerateRoot(ArithmeticError):
    """Two poles coincide numerically."""


@dataclass(frozen=True)
class RootSet:
    s: int
    roots: np.ndarray

    def __len__(self):
        return len(self.roots)


def _angles(s: int) -> np.ndarray:
    j = np.arange(1, 2**s + 1)
    return (2 * j - 1) * math.pi / 2 ** (s + 1)


def roots(s: int, dps: int | None = None) -> RootSet:
    """Roots of ``P_s`` in decreasing order.

    With ``dps`` set the cosines are evaluated in mpmath at that many
    digits before rounding, which keeps ``4 - beta`` accurate for large s.
    """
    if s < 0:
        raise ValueError("s must be non-negative")
    if dps is None:
        vals = 2 + 2 * np.cos(_angles(s))
    else:
        with mpmath.workdps(dps):
            vals = np.array([float(2 + 2 * mpmath.cos((2 * j - 1) * mpmath.pi / 2 ** (s + 1)))
                             for j in range(1, 2**s + 1)])
    return RootSet(s, vals)


def beta(s: int, j: int, dps: int | None = None):
    """``2 + 2 cos(j pi / 2**(s+1))``, i.e. ``zeta^j + 2 + zeta^-j`` for ``zeta`` a primitive ``2**(s+2)``-th root of unity.

    Levels below -2 are pinned at 4.
    """
    if s < -2:
        return 4.0 if dps is None else mpmath.mpf(4)
    return 2 + 2 * _cos_dyadic(j, s + 1, dps)


def _cos_dyadic(j: int, e: int, dps: int | None = None):
    """``cos(j pi / 2**e)`` with the angle reduced exactly first."""
    if e <= 0:
        v = 1 if (j << -e) % 2 == 0 else -1
        return float(v) if dps is None else mpmath.mpf(v)
    period = 2 ** (e + 1)
    j %= period
    if j > period // 2:
        j = period - j
    # cos(pi - a) = -cos(a) keeps the argument in [0, pi/2]
    half = period // 4
    sign = 1
    if j > half:
        sign, j = -1, 2 * half - j
    if dps is None:
        return sign * math.cos(j * math.pi / 2**e)
    with mpmath.workdps(dps):
        return sign * mpmath.cos(j * mpmath.pi / 2**e)


def p_s_eval(s: int, x):
    """``P_s(x)`` by ``s`` squarings starting from ``x - 2``."""
    if s < 0:
        raise ValueError("s must be non-negative")
    y = x - 2
    for _ in range(s):
        y = y * y - 2
    return y


def p_s_eval_at_beta(s_prime: int, s: int, j: int, dps: int | None = None):
    """``P_{s'}(beta_{s,j}) = 2 cos(j pi 2**s' / 2**(s+1))``, exact angle reduction."""
    return 2 * _cos_dyadic(j, s + 1 - s_prime, dps)


def p_s_prime(s: int, j: int, dps: int | None = None):
    """``P_s'`` at the ``j``-th root: ``(-1)**(j+1) 2**s / sin((2j-1) pi / 2**(s+1))``."""
    if not 1 <= j <= 2**s:
        raise ValueError(f"j must lie in [1, {2**s}]")
    sign = 1 if j % 2 == 1 else -1
    if dps is None:
        return sign * 2**s / math.sin((2 * j - 1) * math.pi / 2 ** (s + 1))
    with mpmath.workdps(dps):
        return sign * mpmath.mpf(2) ** s / mpmath.sin((2 * j - 1) * mpmath.pi / 2 ** (s + 1))


def _weights_and_log_bases(s: int, dps: int | None):
    """Per-root weight ``(-1)**(j+1) 2**-s sin(theta_j)`` and ``log((2 + 2cos theta_j) / 4)``."""
    j = np.arange(1, 2**s + 1)
    sign = np.where(j % 2 == 1, 1.0, -1.0)
    if dps is None:
        theta = _angles(s)
        w = sign * np.sin(theta) / 2**s
        # (2 + 2cos)/4 = cos^2(theta/2), accurate near theta = pi
        lb = 2 * np.log(np.cos(theta / 2))
        return w, lb
    with mpmath.workdps(dps):
        th = [(2 * int(i) - 1) * mpmath.pi / 2 ** (s + 1) for i in j]
        w = sign * np.array([float(mpmath.sin(t)) for t in th]) / 2**s
        lb = np.array([float(2 * mpmath.log(mpmath.cos(t / 2))) for t in th])
    return w, lb


def coeff_spectral(s: int, k: int, dps: int | None = None):
    """``x[2^s, k]`` from the trigonometric sum; valid for ``k >= 2**s``.

    Returns a float, or an ``mpmath.mpf`` carrying ``dps`` digits when
    ``dps`` is given.  Doubles only reproduce the integer below ``2**53``.
    """
    if k < 2**s:
        raise ValueError(f"closed form holds for k >= 2**s = {2**s}")
    if dps is not None:
        with mpmath.workdps(dps):
            total = mpmath.mpf(0)
            for j in range(1, 2**s + 1):
                th = (2 * j - 1) * mpmath.pi / 2 ** (s + 1)
                term = mpmath.sin(th) * (2 + 2 * mpmath.cos(th)) ** (k - 1)
                total += term if j % 2 else -term
            return total / 2**s
    # dominant term is below 4**(k-1) 2**-s; guard the double range
    if (k - 1) * 2 - s > 1000:
        raise PrecisionLoss(f"x[2^{s}, {k}] overflows double precision; use coeff_scaled")
    theta = _angles(s)
    sign = np.where(np.arange(1, 2**s + 1) % 2 == 1, 1.0, -1.0)
    base = 2 + 2 * np.cos(theta)
    terms = sign * np.sin(theta) * np.power(base, k - 1) / 2**s
    return float(math.fsum(terms))


def nearest_integer(v) -> int:
    """Round a float or ``mpmath.mpf`` to the nearest integer without losing bits."""
    if isinstance(v, mpmath.mpf):
        man, exp = v.man_exp
        return round(Fraction(int(man)) * Fraction(2) ** int(exp))
    return round(v)


def coeff_scaled(s: int, k, dps: int | None = None, atol: float = 0.0,
                 precise: bool = False, rtol: float = 1e-11):
    """``4**-k x[2^s, k]`` computed with bases ``(2 + 2cos theta)/4`` in ``(0, 1]``.

    ``k`` may be an integer or an integer array.  Terms whose magnitude is
    below ``atol`` for every requested ``k`` are dropped, which speeds up
    large sweeps; the default keeps all of them.

    For ``k`` not far above ``2**s`` the sum cancels heavily (the value can
    be as small as ``4**-k`` while single terms are near ``2**-s``).  With
    ``precise=True`` every entry whose rounding-error estimate exceeds
    ``rtol`` relative is recomputed by :func:`coeff_scaled_mp`.
    """
    if s < 0:
        raise ValueError("s must be non-negative")
    scalar = np.ndim(k) == 0
    ks = np.atleast_1d(np.asarray(k, dtype=np.int64))
    w, lb = _weights_and_log_bases(s, dps)
    out = np.zeros(len(ks), dtype=float)
    valid = ks >= 2**s
    kv = ks[valid]
    res = np.zeros(len(kv))
    err = np.zeros(len(kv))
    chunk = max(1, 2**22 // len(w))
    for a in range(0, len(kv), chunk):
        kk = kv[a:a + chunk]
        keep = slice(None)
        if atol > 0:
            bound = np.abs(w) * np.exp((kk.min() - 1) * lb) / 4
            keep = bound > atol
        pw = np.exp(np.outer(kk - 1, lb[keep]))
        res[a:a + chunk] = pw @ w[keep] / 4
        if precise:
            # each term carries ~eps relative error, amplified by (k-1)|log base|
            rel = 1e-14 * (1 + np.outer(kk - 1, np.abs(lb[keep])))
            err[a:a + chunk] = (pw * rel) @ np.abs(w[keep]) / 4
    if precise:
        bad = np.nonzero(err > rtol * np.abs(res))[0]
        if len(bad):
            res[bad] = [float(v) for v in coeff_scaled_mp(s, kv[bad])]
    out[valid] = res
    # below 2**s no path reaches 2**s
    return float(out[0]) if scalar else out


def coeff_scaled_mp(s: int, k, guard_bits: int = 64, block: int = 64):
    """``4**-k x[2^s, k]`` as ``mpmath.mpf`` in fixed-point integer arithmetic.

    The value at ``k`` is at least ``4**-k`` (a positive integer over
    ``4**k``) and at least half the value at ``k - 1`` (the self-loop
    doubles every count).  So before each block of ``block`` consecutive
    ``k`` the fractional bits needed for ``2**-guard_bits`` relative accuracy
    are known.  Inside a block the powers advance by one multiply per root.
    Accepts an integer or an array; arrays return a list.
    """
    scalar = np.ndim(k) == 0
    ks = [int(v) for v in np.atleast_1d(k)]
    vals = {}
    need = sorted({v for v in ks if v >= 2**s})
    wanted = set(need)
    if need:
        lo, hi = need[0], need[-1]
        slack = s + guard_bits + block.bit_length() + 8
        log2_lb = -2 * lo
        start = lo
        while start <= hi:
            stop = min(hi, start + block - 1)
            # skip stretches with nothing requested
            nxt = min((v for v in need if v >= start), default=None)
            if nxt is not None and nxt > stop:
                log2_lb = max(log2_lb - (nxt - start), -2 * nxt)
                start = nxt
                continue
            prec = min(2 * stop, -log2_lb + (stop - start)) + slack
            one = 1 << prec
            weights, bases, powers = [], [], []
            with mpmath.workprec(prec + 32):
                for j in range(1, 2**s + 1):
                    th = (2 * j - 1) * mpmath.pi / 2 ** (s + 1)
                    c = mpmath.cos(th / 2) ** 2
                    w = int(mpmath.nint(mpmath.sin(th) * one))
                    weights.append(w if j % 2 else -w)
                    bases.append(int(mpmath.nint(c * one)))
                    powers.append(int(mpmath.nint(c ** (start - 1) * one)))
            for kk in range(start, stop + 1):
                if kk > start:
                    powers = [(p * b) >> prec for p, b in zip(powers, bases)]
                total = sum(w * p for w, p in zip(weights, powers))
                if total <= 0:
                    raise PrecisionLoss(f"lost 4^-k x[2^{s}, {kk}] at {prec} bits")
                if kk in wanted:
                    vals[kk] = mpmath.ldexp(mpmath.mpf(total), -(2 * prec + s + 2))
            log2_lb = max(total.bit_length() - 1 - (2 * prec + s + 2) - 1, -2 * (stop + 1))
            start = stop + 1
    out = [vals.get(v, mpmath.mpf(0)) for v in ks]
    return out[0] if scalar else out


def poles_of(n: int) -> list[int]:
    """Binary levels ``s_1 > s_2 > ...`` of ``n``."""
    if n < 1:
        raise ValueError("n must be positive")
    return [s for s in range(n.bit_length() - 1, -1, -1) if (n >> s) & 1]


def root_indices(n: int) -> list[tuple[int, int]]:
    """Roots of ``P^n = prod P_{s_i}`` as ``(j, level)`` with root ``beta_{s_1, j}``.

    A root of ``P_{s_i}`` is ``beta_{s_i, odd}`` which is ``beta_{s_1, odd * 2**(s_1 - s_i)}``.
    Ordered by decreasing root, i.e. ascending ``j``.
    """
    levels = poles_of(n)
    top = levels[0]
    out = []
    for s in levels:
        step = 2 ** (top - s)
        for odd in range(1, 2 ** (s + 1), 2):
            out.append((odd * step, s))
    return sorted(out)


def pn_prime(n: int, j: int, dps: int | None = None):
    """``(P^n)'`` at ``beta_{s_1, j}``, a root of exactly one factor ``P_{s_i}``.

    The factor owning the root contributes its closed-form derivative; the
    others are evaluated exactly through the dyadic cosine identity.
    """
    levels = poles_of(n)
    top = levels[0]
    owner = None
    value = 1.0 if dps is None else mpmath.mpf(1)
    for s in levels:
        step = 2 ** (top - s)
        if j % step == 0 and (j // step) % 2 == 1:
            owner = s
            odd = j // step
            # beta_{s, odd} with odd = 2i - 1
            value *= p_s_prime(s, (odd + 1) // 2, dps)
        else:
            value *= p_s_eval_at_beta(s, top, j, dps)
    if owner is None:
        raise ValueError(f"beta_{{{top},{j}}} is not a root of P^{n}")
    return value


def residues(n: int, dps: int | None = None) -> list[tuple]:
    """Poles and residues of ``X_n``: ``x[n, k] = sum res * beta**(k-1)`` for ``k >= n``.

    Pairs come back in decreasing order of the root.  With ``dps`` both
    entries are ``mpmath.mpf`` values.
    """
    levels = poles_of(n)
    top = levels[0]
    out = []
    for j, _ in root_indices(n):
        b = beta(top, j, dps)
        if dps is None:
            out.append((b, 1.0 / pn_prime(n, j)))
        else:
            with mpmath.workdps(dps):
                out.append((b, 1 / pn_prime(n, j, dps)))
    rs = sorted(float(r) for r, _ in out)
    gaps = np.diff(rs)
    if len(gaps) and gaps.min() <= 4e-13:
        raise DegenerateRoot(f"poles of X_{n} closer than {gaps.min():.3g}")
    return out


def coeff_from_residues(n: int, k: int, dps: int | None = None):
    """``x[n, k]`` as the residue sum; below ``k = n`` the coefficient is 0."""
    if k < n:
        return 0.0
    if dps is None:
        return math.fsum(res * b ** (k - 1) for b, res in residues(n))
    with mpmath.workdps(dps):
        return mpmath.fsum(res * b ** (k - 1) for b, res in residues(n, dps))
