"""Tilting modules as polynomials in ``V`` and spectral multiplicity functionals.

A representation ``W`` whose character is ``Q(t + 1/t)`` is written
``W = Q(V)``.  The multiplicity of ``T(2n)`` in ``W^(x)k`` is ``mu_n(Q^k)``
with ``mu_n(x^{2j}) = x[n, j]`` and ``mu_n`` zero on odd powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import mpmath
import numpy as np

from .charring import (SymmetricCharacter, TiltingDecomposition, chi, decompose,
                       tensor_power_decompositions)
from .limitfn import DELTA
from .spectral import PrecisionLoss, beta, pn_prime, poles_of, root_indices

_V = chi(1)
MAX_DIM_POWER = 4.0**40


def _poly_eval(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_derivative(coeffs) -> tuple[int, ...]:
    return tuple(i * c for i, c in enumerate(coeffs))[1:]


@dataclass(frozen=True)
class TiltingPoly:
    """Integer polynomial ``Q`` (lowest degree first) standing for ``Q(V)``."""

    coeffs: tuple[int, ...]
    character: SymmetricCharacter = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        c = [int(a) for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))
        char = SymmetricCharacter.zero()
        power = SymmetricCharacter.unit()
        for i, a in enumerate(c):
            if i:
                power = power * _V
            if a:
                char = char + power.scale(a)
        object.__setattr__(self, "character", char)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return _poly_eval(self.coeffs, x)

    def derivative(self, x):
        return _poly_eval(_poly_derivative(self.coeffs), x)

    @property
    def dim(self) -> int:
        return self(2)

    def decomposition(self) -> TiltingDecomposition:
        return decompose(self.character)

    @property
    def parity(self) -> str:
        return self.decomposition().parity

    @property
    def is_even(self) -> bool:
        return all(a == 0 for a in self.coeffs[1::2])

    @property
    def is_odd(self) -> bool:
        return all(a == 0 for a in self.coeffs[0::2])


def poly_of_tilting(d: TiltingDecomposition | SymmetricCharacter) -> TiltingPoly:
    """Express a character as a polynomial in ``x = t + 1/t`` by peeling top weights."""
    rest = d.character() if isinstance(d, TiltingDecomposition) else d
    out = [0] * (rest.degree + 1)
    while rest.coeffs:
        m, a = rest.degree, rest.coeffs[-1]
        out[m] = a
        rest = rest - (_V**m).scale(a)
    return TiltingPoly(tuple(out))


class DynkinData(NamedTuple):
    dim: int
    q_prime_at_2: int
    weight_sum_index: int       # sum over weights m > 0 of a_m m^2
    squared_multiplicity_sum: int  # sum over all weights of a_m^2
    agrees: bool


def dynkin_data(q: TiltingPoly) -> DynkinData:
    """``Q(2)``, ``Q'(2)`` and the weight-based index ``sum_m a_m m^2 / 2`` (all weights)."""
    coeffs = q.character.coeffs
    weight_sum = sum(a * m * m for m, a in enumerate(coeffs))
    squares = sum(a * a for a in q.character.laurent().values())
    qp = q.derivative(2)
    return DynkinData(q.dim, qp, weight_sum, squares, qp == weight_sum)


@dataclass(frozen=True)
class BetaGrid:
    """Roots of ``P^n`` with ``(P^n)'`` at each root, in decreasing order."""

    n: int
    level: int
    indices: tuple[int, ...]
    values: tuple
    derivatives: tuple


def beta_grid(n: int, dps: int | None = None) -> BetaGrid:
    top = poles_of(n)[0]
    idx = tuple(j for j, _ in root_indices(n))
    vals = tuple(beta(top, j, dps) for j in idx)
    ders = tuple(pn_prime(n, j, dps) for j in idx)
    return BetaGrid(n, top, idx, vals, ders)


def mu_n(q: TiltingPoly, n: int, k: int, dps: int | None = None):
    """Multiplicity of ``T(2n)`` in ``Q(V)^(x)k`` from the roots of ``P^n``.

    ``mu_n`` sends ``x^{2j}`` to ``x[n, j]``; the constant ``x^0`` maps to 0
    for ``n >= 1``, which the residue sum would not give, so ``Q(0)^k``
    is removed explicitly.
    """
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    if k == 0:
        return 0.0 if dps is None else mpmath.mpf(0)
    if q.is_odd and k % 2 == 1:
        return 0.0 if dps is None else mpmath.mpf(0)
    if dps is None and abs(q.dim) ** k >= 2.0**53:
        raise PrecisionLoss(f"dim^k = {q.dim}^{k} exceeds double precision; pass dps")
    grid = beta_grid(n, dps)
    c0 = q(0) ** k
    ctx = mpmath.workdps(dps) if dps is not None else _nullctx()
    with ctx:
        terms = []
        for b, der in zip(grid.values, grid.derivatives):
            r = mpmath.sqrt(b) if dps is not None else math.sqrt(b)
            if q.is_even:
                num = q(r) ** k - c0
            else:
                num = (q(r) ** k + q(-r) ** k) / 2 - c0
            terms.append(num / (b * der))
        return mpmath.fsum(terms) if dps is not None else math.fsum(terms)


class _nullctx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def mu_n_exact(q: TiltingPoly, n: int, k: int) -> int:
    """Oracle multiplicity of ``T(2n)`` in ``Q(V)^(x)k`` by decomposition."""
    return decompose(q.character**k).multiplicity(2 * n)


@dataclass
class WitnessReport:
    ks: list
    b: list
    c_hat: list
    c_w: float
    tail_nonvanishing: bool
    tail_nonincreasing: bool
    monotone_b: bool | None   # b_{k+1} >= b_k, reported for odd W
    parity: str

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def lower_bound_witness(q: TiltingPoly, k_range=range(1, 31)) -> WitnessReport:
    """Exact ``b_k`` of ``W = Q(V)`` with ``c_hat(k) = b_k k^DELTA / dim^k``.

    ``c_w`` is the minimum of ``c_hat`` over the range.  The tail (second
    half of the range) is called non-vanishing when its minimum is at
    least half the minimum over the first half.
    """
    ks = sorted(int(k) for k in k_range)
    if not ks or ks[0] < 1:
        raise ValueError("k_range must hold positive integers")
    dim = q.dim
    if dim <= 1:
        raise ValueError("W must be non-trivial")
    if float(dim) ** ks[-1] > MAX_DIM_POWER:
        raise ValueError(f"dim^k above {MAX_DIM_POWER:g}; shrink k_range")
    decs = list(tensor_power_decompositions(q.character, ks[-1]))
    b_all = [d.total() for d in decs]
    b = [b_all[k] for k in ks]
    c_hat = [bk * k**DELTA / dim**k for bk, k in zip(b, ks)]
    half = len(ks) // 2
    head, tail = c_hat[:max(half, 1)], c_hat[half:]
    parity = q.parity
    monotone = None
    if parity == "odd":
        monotone = all(b_all[k + 1] >= b_all[k] for k in range(1, ks[-1]))
    return WitnessReport(
        ks=ks, b=b, c_hat=c_hat, c_w=min(c_hat),
        tail_nonvanishing=min(tail) >= 0.5 * min(head),
        tail_nonincreasing=all(x >= y for x, y in zip(tail, tail[1:])),
        monotone_b=monotone, parity=parity,
    )


def pnprime_ratio(n: int, j: int) -> float:
    """``|(P^n)'(beta_{s1,j})| / |(P^n)'(beta_{s1,1})|``."""
    if j not in {i for i, _ in root_indices(n)}:
        raise ValueError(f"beta_{{{poles_of(n)[0]},{j}}} is not a root of P^{n}")
    return abs(pn_prime(n, j)) / abs(pn_prime(n, 1))


def pnprime_ratio_bound(j: int) -> float:
    return 2.0 ** -(math.log2(j) ** 2) / (4 * j * j)


def pnprime_ratio_check(n: int, j: int) -> bool:
    return pnprime_ratio(n, j) >= pnprime_ratio_bound(j)


def random_effective_poly(rng: np.random.Generator, max_degree: int = 8, max_terms: int = 3) -> TiltingPoly:
    """Random non-negative combination of ``T(m)``, ``1 <= m <= max_degree``, as a polynomial."""
    n_terms = int(rng.integers(1, max_terms + 1))
    parts: dict[int, int] = {}
    for _ in range(n_terms):
        m = int(rng.integers(1, max_degree + 1))
        parts[m] = parts.get(m, 0) + int(rng.integers(1, 3))
    return poly_of_tilting(TiltingDecomposition(parts))
