import numpy as np
from hypothesis import given, strategies as st

from sl2tilt.charring import chi, decompose
from sl2tilt.fusion import (b_sequence, counts_at, exact_scaled, parity_report, path_count_tables,
                            path_counts, scaled_b_sequence, scaled_path_counts, successors,
                            two_adic_valuation)


def test_successors_examples():
    assert successors(0) == [(1, 1)]
    assert successors(1) == [(1, 2), (2, 1)]
    assert successors(7) == [(4, 2), (6, 2), (7, 2), (8, 1)]
    assert successors(2) == [(2, 2), (3, 1)]


@given(st.integers(0, 10_000))
def test_successor_labels(n):
    edges = successors(n)
    assert (n + 1, 1) in edges
    assert all(t >= 1 or (t, l) == (n + 1, 1) for t, l in edges)
    assert len(edges) == two_adic_valuation(n + 1) + 2 - (1 if (n + 1) & n == 0 else 0)


def _counts_by_edges(k):
    x = {0: 1}
    for _ in range(k):
        nxt = {}
        for n, c in x.items():
            for t, w in successors(n):
                nxt[t] = nxt.get(t, 0) + w * c
        x = nxt
    return x


@given(st.integers(0, 40))
def test_vectorised_push_matches_edge_walk(k):
    assert path_counts(k).as_dict() == _counts_by_edges(k)


def test_path_counts_examples():
    assert path_counts(0).counts == (1,)
    assert path_counts(1).as_dict() == {1: 1}
    assert path_counts(2).as_dict() == {1: 2, 2: 1}
    assert path_counts(3).as_dict() == {1: 4, 2: 4, 3: 1}


def test_matches_oracle_small():
    v2 = chi(1) * chi(1)
    c = chi(0)
    for k in range(10):
        d = decompose(c)
        assert all(d.multiplicity(2 * n) == path_counts(k)[n] for n in range(k + 1))
        c = c * v2


def test_b_sequence():
    assert b_sequence(0) == [1]
    assert b_sequence(4) == [1, 1, 3, 9, 29]
    assert scaled_b_sequence(3)[3] == 9 / 64
    assert [t.total() for t in path_count_tables(4)] == [1, 1, 3, 9, 29]


def test_scaled_track_matches_exact():
    b = b_sequence(300)
    assert np.allclose(scaled_b_sequence(300), exact_scaled(b), rtol=1e-13, atol=0)
    sc = scaled_path_counts(50)
    ex = path_counts(50).counts
    assert np.allclose(sc, [c / 4**50 for c in ex], rtol=1e-13, atol=0)


def test_counts_at_columns():
    cols = counts_at([1, 4], 30)
    tables = path_count_tables(30)
    assert cols[1] == [t[1] for t in tables]
    assert cols[4] == [t[4] for t in tables]


def test_parity_pairing():
    rep = parity_report(10)
    assert rep["b2k+1_eq_b2k+2"]
    assert not rep["b2k_eq_b2k+1"]
    assert rep["b2k_eq_b2k+1_first_failure"] == 1
