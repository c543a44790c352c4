"""Rescaled densities, subset-sum convolutions and the limit shape ``psi``.

``phi_s(x) = 4**-s phi(4**-s x)`` has mass 1/2 and lives at scale ``4**s``.
The subset-sum density over a window of levels ``S`` is

    psi_S = prod_{s in S} (delta_0 + phi_s) - delta_0,

and ``psi`` is the limit of ``(3/2)**-r1 psi_[-r1, r2]``.  It satisfies
``psi(4x) = (3/8) psi(x)``, so ``omega(x) = psi(x) x**DELTA`` is periodic
under ``x -> 4x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import theta
from .fusion import scaled_b_sequence
from .spectral import coeff_scaled

DELTA = 1.5 - math.log(3) / (2 * math.log(2))
SCALE = 3 / 8
SAMPLES_PER_SCALE = 16  # minimum 4**s / h for a level to be sampled
CLIP = 1e-14


class UnderResolved(ValueError):
    """Grid spacing too coarse for a density level."""


class GridMismatch(ValueError):
    """Densities on different spacings."""


class DomainTooSmall(ValueError):
    """Grid does not reach the points the computation needs."""


class NotConverged(ArithmeticError):
    """Convergence diagnostic above tolerance."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``origin + h * i`` for ``i < length``."""

    h: float = 2.0**-14
    domain: float = 16.5
    origin: float = 0.0

    @property
    def length(self) -> int:
        return int(math.ceil(self.domain / self.h)) + 1

    def points(self) -> np.ndarray:
        return self.origin + self.h * np.arange(self.length)


@dataclass(frozen=True, eq=False)
class SampledDensity:
    origin: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self):
        return len(self.values)

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.h * np.arange(len(self.values))

    @property
    def mass(self) -> float:
        return float(self.h * math.fsum(self.values))

    @property
    def sup(self) -> float:
        return float(self.values.max()) if len(self.values) else 0.0


def _check_level(s: int, h: float):
    if h > 4.0**s / SAMPLES_PER_SCALE:
        raise UnderResolved(f"h = {h:g} cannot resolve level {s} (scale {4.0**s:g})")


def _phi_s_values(s: int, x: np.ndarray) -> np.ndarray:
    return 4.0**-s * theta.phi_vec(x / 4.0**s)


def sample_phi_s(s: int, grid: Grid) -> SampledDensity:
    """Point samples of ``phi_s`` on ``grid``."""
    _check_level(s, grid.h)
    return SampledDensity(grid.origin, grid.h, _phi_s_values(s, grid.points()))


def _clip(v: np.ndarray) -> np.ndarray:
    v[(v < 0) & (v > -CLIP)] = 0.0
    return v


def convolve(a: SampledDensity, b: SampledDensity) -> SampledDensity:
    """Riemann-sum convolution ``h * sum_j a_j b_{i-j}`` via FFT."""
    if not math.isclose(a.h, b.h, rel_tol=1e-12, abs_tol=0.0):
        raise GridMismatch(f"spacings differ: {a.h} vs {b.h}")
    vals = fftconvolve(a.values, b.values) * a.h
    return SampledDensity(a.origin + b.origin, a.h, _clip(vals))


def _sech(z):
    e = np.exp(-z)
    return 2 * e / (1 + e * e)


@dataclass(frozen=True, eq=False)
class PsiApprox:
    """``(3/2)**-r1 psi_[-r1, r2]`` sampled on a grid, with a cubic interpolant."""

    r1: int
    r2: int
    density: SampledDensity
    norm_exponent: int
    analytic_levels: tuple = ()
    _spline: CubicSpline = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_spline", CubicSpline(self.density.x, self.density.values))

    @property
    def domain(self) -> float:
        return float(self.density.x[-1])

    def raw(self, x):
        """Interpolated approximation, no scaling reduction."""
        x = np.asarray(x, dtype=float)
        if np.any(x > self.domain) or np.any(x < self.density.origin):
            raise DomainTooSmall(f"evaluation outside [{self.density.origin}, {self.domain}]")
        return self._spline(x)

    def __call__(self, x):
        """``psi(x)`` for ``x > 0`` via reduction to ``[1, 4)``."""
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise ValueError("psi is evaluated at x > 0 only")
        m, y = reduce_to_unit_period(x)
        return SCALE**m * self.raw(y)


def reduce_to_unit_period(x):
    """Write ``x = 4**m * y`` with ``y`` in ``[1, 4)``; exact in binary floating point."""
    mant, e = np.frexp(np.asarray(x, dtype=float))  # x = mant 2**e, mant in [0.5, 1)
    e = e - 1                                       # x = (2 mant) 2**e
    m = np.floor_divide(e, 2)
    y = np.ldexp(2 * mant, e - 2 * m)
    return m, y


def build_psi(r1: int, r2: int, grid: Grid | None = None, fine_tail: str = "analytic") -> PsiApprox:
    """Subset-sum pipeline over levels ``-r1..r2``, normalised by ``(3/2)**-r1``.

    Levels coarse enough for the grid are sampled and folded in with
    ``D <- D + f + f * D`` using one zero-padded FFT size throughout.
    Finer levels are too narrow to sample; with ``fine_tail='analytic'``
    their factors ``(1 + L[phi_s])/(3/2)`` are applied exactly in Fourier
    space, while ``fine_tail='strict'`` raises :class:`UnderResolved`.
    Only ``[0, domain]`` is kept; every density is supported on ``x >= 0``
    so truncation never feeds back into the kept range.
    """
    grid = grid or Grid()
    if -r1 > r2:
        raise ValueError("empty window")
    if fine_tail not in ("analytic", "strict"):
        raise ValueError("fine_tail must be 'analytic' or 'strict'")
    if grid.origin != 0.0:
        raise ValueError("grid must start at 0")
    if grid.domain < 4.0:
        raise DomainTooSmall("grid must cover [1, 4]")
    n = grid.length
    x = grid.points()
    size = 1 << int(math.ceil(math.log2(2 * n)))
    d = np.zeros(n)
    resolved_negative = 0
    unresolved = []
    for s in range(-r1, r2 + 1):
        if grid.h > 4.0**s / SAMPLES_PER_SCALE:
            if fine_tail == "strict":
                _check_level(s, grid.h)
            unresolved.append(s)
            continue
        if s < 0:
            resolved_negative += 1
        f = _phi_s_values(s, x)
        cross = np.fft.irfft(np.fft.rfft(f * grid.h, size) * np.fft.rfft(d, size), size)[:n]
        d = d + f + cross
    if unresolved:
        xi = 2 * math.pi * np.fft.rfftfreq(size, d=grid.h)
        root = np.sqrt(1j * xi)
        factor = np.ones(len(xi), dtype=complex)
        for s in unresolved:
            # Fourier transform of phi_s is sech(2 sqrt(i xi 4**s)) / 2
            factor *= (1 + 0.5 * _sech(2.0 ** (s + 1) * root)) / 1.5
        d = np.fft.irfft(np.fft.rfft(d, size) * factor, size)[:n]
        # every level vanishes to all orders at 0; the multiplier only rings there
        d[0] = 0.0
    d = _clip(d * 1.5**-resolved_negative)
    return PsiApprox(r1, r2, SampledDensity(0.0, grid.h, d),
                     norm_exponent=-max(r1, 0), analytic_levels=tuple(unresolved))


def scaling_residual(approx: PsiApprox, n_points: int = 301) -> float:
    """``sup |psi(4x) - (3/8) psi(x)| / psi(x)`` over ``[1, 4]`` on the raw grid."""
    if approx.domain < 16.0:
        raise DomainTooSmall("scaling check needs the grid to reach 16")
    g = np.linspace(1.0, 4.0, n_points)
    p = approx.raw(g)
    return float(np.max(np.abs(approx.raw(4 * g) - SCALE * p) / p))


def cauchy_diagnostic(rs=range(2, 7), h: float = 2.0**-14, domain: float = 4.2,
                      n_points: int = 301) -> dict[int, float]:
    """``sup_[1,4] |psi_{r+1} - psi_r|`` for consecutive symmetric windows ``[-r, r]``."""
    grid = Grid(h=h, domain=domain)
    g = np.linspace(1.0, 4.0, n_points)
    prev = None
    out = {}
    for r in rs:
        cur = build_psi(r, r, grid).raw(g)
        if prev is not None:
            out[r - 1] = float(np.max(np.abs(cur - prev)))
        prev = cur
    return out


class PsiModel(BaseEstimator):
    """Estimator wrapper: ``fit`` builds the approximation, ``predict`` evaluates ``psi``.

    ``fit`` raises :class:`NotConverged` when the scaling residual exceeds ``tol``.
    """

    def __init__(self, r1: int = 12, r2: int = 4, h: float = 2.0**-14,
                 domain: float = 16.5, tol: float = 1e-4):
        self.r1 = r1
        self.r2 = r2
        self.h = h
        self.domain = domain
        self.tol = tol

    def fit(self, X=None, y=None):
        approx = build_psi(self.r1, self.r2, Grid(h=self.h, domain=self.domain))
        res = scaling_residual(approx)
        if not res <= self.tol:
            raise NotConverged(f"scaling residual {res:.3g} above tolerance {self.tol:g}")
        self.approx_ = approx
        self.scaling_residual_ = res
        return self

    def predict(self, X):
        check_is_fitted(self, "approx_")
        x = check_array(np.asarray(X, dtype=float).reshape(-1, 1), ensure_all_finite=True).ravel()
        return self.approx_(x)

    def omega(self, X):
        x = np.asarray(X, dtype=float).ravel()
        return self.predict(x) * x**DELTA


@lru_cache(maxsize=4)
def _fitted(r1: int, r2: int, h: float, domain: float) -> PsiModel:
    return PsiModel(r1, r2, h, domain).fit()


def default_model(r1: int = 12, r2: int = 4, h: float = 2.0**-14, domain: float = 16.5) -> PsiModel:
    return _fitted(r1, r2, h, domain)


def psi(x, model: PsiModel | None = None):
    model = model or default_model()
    out = model.predict(np.atleast_1d(x))
    return float(out[0]) if np.ndim(x) == 0 else out


def omega(x, model: PsiModel | None = None):
    model = model or default_model()
    out = model.omega(np.atleast_1d(x))
    return float(out[0]) if np.ndim(x) == 0 else out


@dataclass
class AVsPhiReport:
    errors: dict            # s -> E(s)
    argmax_k: dict          # s -> k attaining E(s)
    ratios: dict            # s -> E(s+1)/E(s)
    scaled8: dict           # s -> E(s) 8**s
    scaled16: dict          # s -> E(s) 16**s
    tail_bound: dict        # s -> max_k A_s(k) (k/4**s)**4 4**s

    def as_dict(self) -> dict:
        return {k: {str(a): b for a, b in v.items()} for k, v in self.__dict__.items()}


def a_vs_phi_diagnostic(s_range=range(5, 11), k_factor: float = 4.0, atol: float = 1e-20) -> AVsPhiReport:
    """Sup distance between scaled coefficients ``A_s(k)`` and ``phi_s(k - 1)``.

    ``k`` runs over ``0 <= k < k_factor * 4**s``.
    """
    errors, where, tail = {}, {}, {}
    for s in s_range:
        k = np.arange(0, int(k_factor * 4**s))
        a = coeff_scaled(s, k, atol=atol)
        e = np.abs(a - _phi_s_values(s, (k - 1).astype(float)))
        i = int(np.argmax(e))
        errors[s], where[s] = float(e[i]), int(k[i])
        tail[s] = float(np.max(a * (k / 4.0**s) ** 4 * 4.0**s))
    ss = sorted(errors)
    ratios = {s: errors[s + 1] / errors[s] for s in ss if s + 1 in errors}
    return AVsPhiReport(errors, where, ratios,
                        {s: errors[s] * 8.0**s for s in ss},
                        {s: errors[s] * 16.0**s for s in ss}, tail)


def main_comparison(ks=(256, 512, 1024, 2048, 4096), model: PsiModel | None = None) -> list[dict]:
    """``B(k) = 4**-k b_{2k}`` against ``psi(k)``, with ``omega_hat(k) = B(k) k**DELTA``."""
    ks = [int(k) for k in ks]
    b = scaled_b_sequence(max(ks))
    p = psi(np.array(ks, dtype=float), model)
    rows = []
    for k, pk in zip(ks, p):
        rows.append({"k": k, "B": float(b[k]), "psi": float(pk),
                     "ratio": float(b[k] / pk), "omega_hat": float(b[k] * k**DELTA)})
    return rows
