import numpy as np
from hypothesis import given, settings, strategies as st

from exdim import gf

PRIMES = st.sampled_from([2, 3, 5])


@st.composite
def matrices(draw, max_rows=4, max_cols=4):
    p = draw(PRIMES)
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return np.array(vals, dtype=np.int64).reshape(r, c), p


def test_rank_of_known_matrices():
    assert gf.rank(np.array([[1, 1], [1, 1]]), 2) == 1
    assert gf.rank(np.array([[1, 1], [1, 2]]), 3) == 2
    assert gf.rank(np.zeros((2, 3), dtype=np.int64), 5) == 0


def test_inverse_mod_3():
    a = np.array([[2, 1], [1, 1]])
    inv = gf.inverse(a, 3)
    assert np.array_equal(gf.reduce(a @ inv, 3), np.eye(2, dtype=np.int64))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(mp):
    a, p = mp
    ns = gf.nullspace(a, p)
    assert gf.rank(a, p) + ns.shape[1] == a.shape[1]
    assert not np.any(gf.reduce(a @ ns, p))
    assert gf.rank(ns.T, p) == ns.shape[1]


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_matches_brute_force_over_gf2(mp):
    a, p = mp
    if p != 2:
        return
    rows = a.shape[0]
    span = set()
    for mask in range(1 << rows):
        v = np.zeros(a.shape[1], dtype=np.int64)
        for i in range(rows):
            if mask >> i & 1:
                v = (v + a[i]) % 2
        span.add(tuple(v))
    assert len(span) == 2 ** gf.rank(a, p)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_recovers_a_solution(mp, data):
    a, p = mp
    x = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=a.shape[1], max_size=a.shape[1])))
    b = gf.reduce(a @ x, p)
    y = gf.solve(a, b, p)
    assert y is not None
    assert np.array_equal(gf.reduce(a @ np.asarray(y).reshape(-1), p), b)
