"""Fusion graph of ``V (x) V`` and path-count dynamic programs.

Vertex ``n`` stands for ``T(2n)``.  Weighted paths of length ``k`` from 0 to
``n`` count the multiplicity ``x[n, k]`` of ``T(2n)`` in ``V^(2k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def two_adic_valuation(m: int) -> int:
    if m <= 0:
        raise ValueError("valuation needs a positive integer")
    return (m & -m).bit_length() - 1


def successors(n: int) -> list[tuple[int, int]]:
    """Out-edges ``(target, label)`` of vertex ``n``, ascending by target."""
    if n < 0:
        raise ValueError("vertex must be non-negative")
    r = two_adic_valuation(n + 1)
    edges = [(n + 1 - 2**i, 2) for i in range(r + 1) if n + 1 - 2**i != 0]
    edges.append((n + 1, 1))
    return sorted(edges)


@dataclass(frozen=True)
class PathCountTable:
    """``counts[n] = x[n, k]`` for ``0 <= n <= k``."""

    k: int
    counts: tuple

    def __getitem__(self, n: int):
        if 0 <= n < len(self.counts):
            return self.counts[n]
        return 0

    def as_dict(self) -> dict[int, int]:
        return {n: c for n, c in enumerate(self.counts) if c}

    def total(self):
        return sum(self.counts)


def _push(x: np.ndarray, k: int) -> np.ndarray:
    """One round of the weighted push, frontier ``0..k-1`` to ``0..k``.

    Works for ``object`` (exact) and ``float64`` (scaled) arrays alike.
    """
    new = np.zeros(k + 1, dtype=x.dtype)
    new[1:] += x[:k]          # n -> n+1, label 1
    new[1:k] += 2 * x[1:k]    # self-loops, label 2
    p = 2
    while 2 * p - 1 <= k - 1:
        # sources n with p | n+1 and target n+1-p >= 1
        src = x[2 * p - 1:k:p]
        new[p:p + p * len(src):p] += 2 * src
        p *= 2
    return new


def path_counts(k: int) -> PathCountTable:
    """Exact ``x[n, k]`` for all ``n`` by ``k`` rounds of the push."""
    if k < 0:
        raise ValueError("k must be non-negative")
    x = np.array([1], dtype=object)
    for step in range(1, k + 1):
        x = _push(x, step)
    return PathCountTable(k, tuple(int(v) for v in x))


def path_count_tables(k_max: int) -> list[PathCountTable]:
    """``path_counts(k)`` for every ``k <= k_max`` in one sweep."""
    x = np.array([1], dtype=object)
    tables = [PathCountTable(0, (1,))]
    for step in range(1, k_max + 1):
        x = _push(x, step)
        tables.append(PathCountTable(step, tuple(int(v) for v in x)))
    return tables


def scaled_path_counts(k: int) -> np.ndarray:
    """``4**-k * x[n, k]`` in double precision, dividing by 4 every round."""
    x = np.ones(1)
    for step in range(1, k + 1):
        x = _push(x, step) * 0.25
    return x


def b_sequence(k_max: int) -> list[int]:
    """Exact ``b_{2k}`` of ``V`` for ``k = 0..k_max``."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    x = np.array([1], dtype=object)
    out = [1]
    for step in range(1, k_max + 1):
        x = _push(x, step)
        out.append(int(x.sum()))
    return out


def scaled_b_sequence(k_max: int) -> np.ndarray:
    """``B(k) = 4**-k * b_{2k}`` for ``k = 0..k_max`` from the float track."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    x = np.ones(1)
    out = np.empty(k_max + 1)
    out[0] = 1.0
    for step in range(1, k_max + 1):
        x = _push(x, step) * 0.25
        out[step] = x.sum()
    return out


def exact_scaled(b: list[int]) -> list[float]:
    """``4**-k * b[k]`` rounded once from the exact integers."""
    return [v / 4**k for k, v in enumerate(b)]


def parity_report(k_max: int) -> dict:
    """Which parity pairing of odd and even tensor powers holds, via the oracle.

    The classical statement pairs ``b_{2k}`` with ``b_{2k+1}``; tensoring the
    odd summands ``T(2n+1)`` with ``V`` gives ``T(2n+2)``, which pairs
    ``b_{2k+1}`` with ``b_{2k+2}`` instead.  Both are checked.
    """
    from .charring import chi, tensor_power_decompositions

    b = [d.total() for d in tensor_power_decompositions(chi(1), 2 * k_max + 2)]
    lower = all(b[2 * k] == b[2 * k + 1] for k in range(k_max + 1))
    upper = all(b[2 * k + 1] == b[2 * k + 2] for k in range(k_max + 1))
    first_fail = next((k for k in range(k_max + 1) if b[2 * k] != b[2 * k + 1]), None)
    return {
        "k_max": k_max,
        "b": b,
        "b2k_eq_b2k+1": lower,
        "b2k+1_eq_b2k+2": upper,
        "b2k_eq_b2k+1_first_failure": first_fail,
    }


def counts_at(ns, k_max: int) -> dict[int, list[int]]:
    """Exact ``x[n, k]`` for ``k = 0..k_max`` at the chosen vertices only.

    Runs the full push but keeps just the requested columns, so long
    sweeps at a handful of vertices stay cheap in memory.
    """
    ns = sorted(set(int(n) for n in ns))
    out = {n: [1 if n == 0 else 0] for n in ns}
    x = np.array([1], dtype=object)
    for step in range(1, k_max + 1):
        x = _push(x, step)
        for n in ns:
            out[n].append(int(x[n]) if n <= step else 0)
    return out
