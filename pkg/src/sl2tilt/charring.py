"""Formal characters of tilting modules for SL2 in characteristic 2.

Characters are Weyl-invariant Laurent polynomials in ``t``.  Only the
coefficients of non-negative weights are stored; the coefficient of
``t**-m`` equals that of ``t**m`` by construction.

The greedy decomposition in :func:`decompose` is the brute-force oracle the
other modules are checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping


class NonTilting(ValueError):
    """The character is not a non-negative combination of tilting characters."""


@dataclass(frozen=True)
class SymmetricCharacter:
    """Weyl-invariant Laurent polynomial ``sum_m a_m t^m`` with ``a_-m = a_m``.

    ``coeffs[m]`` is the coefficient of ``t**m`` for ``m >= 0``.  Trailing
    zeros are stripped so equal characters compare equal.
    """

    coeffs: tuple[int, ...] = (1,)

    def __post_init__(self):
        c = tuple(int(a) for a in self.coeffs)
        end = len(c)
        while end > 0 and c[end - 1] == 0:
            end -= 1
        object.__setattr__(self, "coeffs", c[:end])

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, int]) -> "SymmetricCharacter":
        if not coeffs:
            return cls(())
        if min(coeffs) < 0:
            raise ValueError("store non-negative weights only")
        dense = [0] * (max(coeffs) + 1)
        for m, a in coeffs.items():
            dense[m] += a
        return cls(tuple(dense))

    @classmethod
    def zero(cls) -> "SymmetricCharacter":
        return cls(())

    @classmethod
    def unit(cls) -> "SymmetricCharacter":
        return cls((1,))

    def as_dict(self) -> dict[int, int]:
        return {m: a for m, a in enumerate(self.coeffs) if a}

    def laurent(self) -> dict[int, int]:
        """All nonzero coefficients, negative weights included."""
        full = {}
        for m, a in enumerate(self.coeffs):
            if a:
                full[m] = a
                full[-m] = a
        return full

    @property
    def degree(self) -> int:
        """Top weight, or -1 for the zero character."""
        return len(self.coeffs) - 1

    @property
    def is_virtual(self) -> bool:
        return any(a < 0 for a in self.coeffs)

    @property
    def dim(self) -> int:
        if not self.coeffs:
            return 0
        return self.coeffs[0] + 2 * sum(self.coeffs[1:])

    def __getitem__(self, m: int) -> int:
        m = abs(m)
        return self.coeffs[m] if m < len(self.coeffs) else 0

    def evaluate(self, t):
        """Value of the Laurent polynomial at ``t`` (``t != 0``)."""
        return sum(a * t**m for m, a in self.laurent().items())

    def __add__(self, other: "SymmetricCharacter") -> "SymmetricCharacter":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return SymmetricCharacter(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "SymmetricCharacter":
        return SymmetricCharacter(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "SymmetricCharacter") -> "SymmetricCharacter":
        return self + (-other)

    def scale(self, k: int) -> "SymmetricCharacter":
        return SymmetricCharacter(tuple(k * a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SymmetricCharacter":
        if k < 0:
            raise ValueError("negative powers are not characters")
        out = SymmetricCharacter.unit()
        for _ in range(k):
            out = multiply(out, self)
        return out


@dataclass(frozen=True)
class TiltingDecomposition:
    """Multiset of tilting summands ``{highest weight: multiplicity}``."""

    parts: Mapping[int, int]

    def __post_init__(self):
        parts = {int(n): int(m) for n, m in sorted(self.parts.items())}
        for n, m in parts.items():
            if n < 0:
                raise ValueError(f"negative highest weight {n}")
            if m <= 0:
                raise ValueError(f"multiplicity of T({n}) must be positive, got {m}")
        object.__setattr__(self, "parts", parts)

    def total(self) -> int:
        """Number of indecomposable summands counted with multiplicity."""
        return sum(self.parts.values())

    def multiplicity(self, n: int) -> int:
        return self.parts.get(n, 0)

    def character(self) -> SymmetricCharacter:
        out = SymmetricCharacter.zero()
        for n, m in self.parts.items():
            out = out + chi(n).scale(m)
        return out

    @property
    def parity(self) -> str:
        kinds = {n % 2 for n in self.parts}
        if kinds == {0}:
            return "even"
        if kinds == {1}:
            return "odd"
        return "mixed"


def _binary_digits(n: int) -> tuple[int, list[int]]:
    """For ``n + 1 = 2**j + sum(a_i 2**i)`` return ``j`` and the set bits below it."""
    m = n + 1
    j = m.bit_length() - 1
    return j, [i for i in range(j) if (m >> i) & 1]


def support(n: int) -> frozenset[int]:
    if n < 0:
        raise ValueError("n must be non-negative")
    j, low = _binary_digits(n)
    out = set()
    for signs in product((1, -1), repeat=len(low)):
        out.add(2**j + sum(e * 2**i for e, i in zip(signs, low)))
    return frozenset(out)


def _quantum_integer(m: int) -> dict[int, int]:
    # (t^m - t^-m) / (t - t^-1) = t^(m-1) + t^(m-3) + ... + t^-(m-1)
    return {w: 1 for w in range(-(m - 1), m, 2)}


def _laurent_mul(a: Mapping[int, int], b: Mapping[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            out[wa + wb] = out.get(wa + wb, 0) + ca * cb
    return out


def _from_laurent(full: Mapping[int, int]) -> SymmetricCharacter:
    top = max((w for w, a in full.items() if a), default=-1)
    dense = [0] * (top + 1)
    for w, a in full.items():
        if w >= 0:
            dense[w] = a
    return SymmetricCharacter(tuple(dense))


def chi_from_support(n: int) -> SymmetricCharacter:
    """Character of ``T(n)`` as a sum of Weyl characters over ``support(n)``."""
    full: dict[int, int] = {}
    for m in support(n):
        for w, a in _quantum_integer(m).items():
            full[w] = full.get(w, 0) + a
    return _from_laurent(full)


def chi_from_product(n: int) -> SymmetricCharacter:
    """Character of ``T(n)`` via the factorised product over binary digits."""
    j, low = _binary_digits(n)
    full = _quantum_integer(2**j)
    for i in low:
        full = _laurent_mul(full, {2**i: 1, -(2**i): 1})
    return _from_laurent(full)


@lru_cache(maxsize=4096)
def chi(n: int) -> SymmetricCharacter:
    """Formal character of the indecomposable tilting module ``T(n)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return chi_from_product(n)


def multiply(a: SymmetricCharacter, b: SymmetricCharacter) -> SymmetricCharacter:
    if len(a.coeffs) < len(b.coeffs):
        a, b = b, a
    out = [0] * (len(a.coeffs) + len(b.coeffs) - 1) if b.coeffs else []
    da = a.coeffs
    # sum over full Laurent support of the sparser factor
    for wb, cb in b.laurent().items():
        for wa in range(-(len(da) - 1), len(da)):
            w = wa + wb
            if w < 0:
                continue
            ca = da[abs(wa)]
            if ca:
                out[w] += ca * cb
    return SymmetricCharacter(tuple(out))


def decompose(c: SymmetricCharacter) -> TiltingDecomposition:
    """Split a tilting character into indecomposable summands.

    Peels off the top weight repeatedly; the character of ``T(n)`` has
    leading coefficient 1 at ``t**n``, so the greedy choice is forced.
    """
    rest = list(c.coeffs)
    parts = {}
    for w in range(len(rest) - 1, -1, -1):
        a = rest[w]
        if a == 0:
            continue
        if a < 0:
            raise NonTilting(f"coefficient {a} at weight {w} after subtracting higher summands")
        parts[w] = a
        for m, x in enumerate(chi(w).coeffs):
            rest[m] -= a * x
    return TiltingDecomposition(parts)


def b_oracle(w: SymmetricCharacter, k: int) -> int:
    """Number of indecomposable summands of the k-th tensor power of ``w``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return decompose(w**k).total()


def tensor_power_decompositions(w: SymmetricCharacter, k_max: int) -> Iterable[TiltingDecomposition]:
    """Decompositions of ``w**0, w**1, ..., w**k_max`` sharing the running product."""
    c = SymmetricCharacter.unit()
    for k in range(k_max + 1):
        if k:
            c = multiply(c, w)
        yield decompose(c)
