"""Exact rational generating functions ``X_n(t) = sum_k x[n, k] t^k``.

Polynomials are plain lists of Python ints, lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

try:
    from gmpy2 import mpz as _bigint
except ImportError:  # pragma: no cover - optional accelerator
    _bigint = int


Poly = tuple[int, ...]


def _trim(p) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(int(c) for c in p)


def poly_mul(a, b) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_add(a, b) -> Poly:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_scale(a, c: int) -> Poly:
    return _trim([c * x for x in a])


def poly_shift(a, d: int) -> Poly:
    return _trim((0,) * d + tuple(a)) if a else ()


def poly_eval(p, x):
    """Horner evaluation; exact for ``int`` and ``Fraction`` arguments."""
    if isinstance(x, Fraction):
        # clear the denominator once instead of per step
        num, den = x.numerator, x.denominator
        acc = 0
        scale = 1
        for c in reversed(p):
            acc = acc * num + c * scale
            scale *= den
        return Fraction(acc, scale // den) if p else Fraction(0)
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _square_positive(p: Poly) -> Poly:
    """Square a polynomial with non-negative coefficients by Kronecker packing."""
    n = len(p)
    width = (2 * max(p).bit_length() + n.bit_length() + 8) // 8 + 1
    packed = int.from_bytes(b"".join(c.to_bytes(width, "little") for c in p), "little")
    v = _bigint(packed)
    sq = int(v * v).to_bytes(width * (2 * n - 1), "little")
    return tuple(int.from_bytes(sq[i * width:(i + 1) * width], "little") for i in range(2 * n - 1))


@dataclass(frozen=True)
class RationalGF:
    """Power series ``numerator(t) / denominator(t)`` with ``denominator(0) = 1``."""

    numerator: Poly
    denominator: Poly = (1,)

    def __post_init__(self):
        num, den = _trim(self.numerator), _trim(self.denominator)
        if not den or den[0] == 0:
            raise ValueError("denominator must have a nonzero constant term")
        if den[0] != 1:
            if den[0] != -1:
                raise ValueError("denominator constant term must be 1 after normalisation")
            num, den = poly_scale(num, -1), poly_scale(den, -1)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    def __mul__(self, other: "RationalGF") -> "RationalGF":
        return RationalGF(poly_mul(self.numerator, other.numerator),
                          poly_mul(self.denominator, other.denominator))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalGF):
            return NotImplemented
        return poly_mul(self.numerator, other.denominator) == poly_mul(other.numerator, self.denominator)

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def coefficients(self, k_max: int) -> list[int]:
        return coefficients(self, k_max)

    def __call__(self, t):
        den = poly_eval(self.denominator, t)
        if den == 0:
            raise ZeroDivisionError("evaluation point is a pole")
        num = poly_eval(self.numerator, t)
        if isinstance(t, Fraction) or isinstance(t, int):
            return Fraction(num) / Fraction(den)
        return num / den


def coefficients(f: RationalGF, k_max: int) -> list[int]:
    """First ``k_max + 1`` series coefficients via the denominator recurrence."""
    if k_max < 0:
        return []
    den, num = f.denominator, f.numerator
    if den[0] != 1:
        raise ValueError("denominator constant term must be 1")
    out = []
    for k in range(k_max + 1):
        c = num[k] if k < len(num) else 0
        for i in range(1, min(k, len(den) - 1) + 1):
            c -= den[i] * out[k - i]
        out.append(c)
    return out


@lru_cache(maxsize=None)
def _iterated_denominator(s: int) -> Poly:
    """``t**(2**s) * F^s(1/t - 2)`` for ``F(x) = x**2 - 2``.

    Substituting ``t -> -t`` makes every coefficient non-negative, which
    lets the squaring go through one big-integer multiplication.
    """
    if s == 0:
        return (1, -2)
    prev = _iterated_denominator(s - 1)
    flipped = tuple(c if i % 2 == 0 else -c for i, c in enumerate(prev))
    sq = list(_square_positive(flipped))
    sq[-1] -= 2  # minus 2 t**(2**s), even degree so the flip is harmless
    return _trim(c if i % 2 == 0 else -c for i, c in enumerate(sq))


def x_power_of_two(s: int) -> RationalGF:
    """``X_{2^s}(t) = t**(2**s) / (t**(2**s) F^s(1/t - 2))``."""
    if s < 0:
        raise ValueError("s must be non-negative")
    return RationalGF((0,) * 2**s + (1,), _iterated_denominator(s))


def x_general(n: int) -> RationalGF:
    """``X_n`` as the product of ``X_{2^s}`` over the set bits of ``n``."""
    if n < 1:
        raise ValueError("n must be positive")
    out = RationalGF((1,))
    s = 0
    while n >> s:
        if (n >> s) & 1:
            out = out * x_power_of_two(s)
        s += 1
    return out


def recurrence_check(s: int) -> bool:
    """``X_{2^{s+1}} (1 - 2 X_{2^s}^2) = X_{2^s}^2`` as a polynomial identity."""
    x, y = x_power_of_two(s), x_power_of_two(s + 1)
    # x = a/b, y = c/d:  c (b^2 - 2 a^2) == d a^2
    a, b = x.numerator, x.denominator
    c, d = y.numerator, y.denominator
    a2, b2 = poly_mul(a, a), poly_mul(b, b)
    lhs = poly_mul(c, poly_add(b2, poly_scale(a2, -2)))
    return lhs == poly_mul(d, a2)


def _series_mul(a: list, b: list, order: int) -> list:
    out = [0] * (order + 1)
    for i, x in enumerate(a[:order + 1]):
        if x:
            for j, y in enumerate(b[:order + 1 - i]):
                out[i + j] += x * y
    return out


def iterate_f_identity(s: int, order: int) -> bool:
    """``F^s(1/t - 2) * X_{2^s}(t) = 1`` as a truncated series.

    ``F^s(1/t - 2)`` is a Laurent series with a pole of order ``2**s``; it
    is built by literally iterating ``y -> y*y - 2`` on Laurent
    coefficients, independent of the cleared-denominator construction.
    """
    pole = 2**s
    # Laurent series stored as (lowest exponent, coefficient list)
    low, coeffs = -1, [Fraction(1), Fraction(-2)]
    for _ in range(s):
        sq = _series_mul(coeffs, coeffs, 2 * len(coeffs))
        low *= 2
        sq[-low] -= 2  # constant term sits at index -low
        coeffs = _trim_list(sq)
    assert low == -pole
    x = coefficients(x_power_of_two(s), order + pole)
    prod = _series_mul(coeffs, x, order + pole)
    # product exponent e = low + index; want 1 at e = 0 and 0 for 0 < e <= order
    vals = [prod[i] for i in range(-low, -low + order + 1)]
    lower = [prod[i] for i in range(0, -low)]
    return vals[0] == 1 and all(v == 0 for v in vals[1:]) and all(v == 0 for v in lower)


def _trim_list(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def linear_form_check(n: int, order: int) -> bool:
    """``X_n = t * (X_{n-1} + 2 sum_{i<=r} X_{2^i + n - 1})`` to ``t**order``.

    Here ``2**r`` is the largest power of two dividing ``n``.
    """
    if n < 1:
        raise ValueError("n must be positive")

    def series(m):
        if m == 0:
            return [1] + [0] * order
        return coefficients(x_general(m), order)

    r = (n & -n).bit_length() - 1
    rhs = series(n - 1)
    for i in range(r + 1):
        rhs = [u + 2 * v for u, v in zip(rhs, series(2**i + n - 1))]
    shifted = [0] + rhs[:order]
    return shifted == series(n)
