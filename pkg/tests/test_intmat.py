import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from sdchain import intmat


@st.composite
def int_matrices(draw, max_dim=5, bound=6):
    rows = draw(st.integers(0, max_dim))
    cols = draw(st.integers(0, max_dim))
    vals = draw(st.lists(st.integers(-bound, bound), min_size=rows * cols, max_size=rows * cols))
    m = intmat.zeros(rows, cols)
    for k, v in enumerate(vals):
        m[k // cols, k % cols] = v
    return m


def test_smith_of_diag_2_3():
    s = intmat.smith(intmat.as_int_matrix([[2, 0], [0, 3]]))
    assert s.diag == [1, 6]


def test_solve_detects_no_integer_solution():
    assert intmat.solve(intmat.as_int_matrix([[2]]), intmat.as_int_matrix([[1]])) is None
    x = intmat.solve(intmat.as_int_matrix([[2]]), intmat.as_int_matrix([[4]]))
    assert x.tolist() == [[2]]


def test_entries_stay_python_ints():
    big = intmat.as_int_matrix([[2 ** 70, 1], [3, 2 ** 65]])
    s = intmat.smith(big)
    assert all(isinstance(v, int) for v in (s.U @ big @ s.V).flat)


@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_smith_normal_form(a):
    s = intmat.smith(a)
    d = s.U @ a @ s.V
    for i in range(d.shape[0]):
        for j in range(d.shape[1]):
            want = s.diag[i] if i == j and i < s.rank else 0
            assert d[i, j] == want
    assert all(x > 0 for x in s.diag)
    assert all(b % a_ == 0 for a_, b in zip(s.diag, s.diag[1:]))
    assert intmat.equal(s.U @ s.U_inv, intmat.eye(a.shape[0]))
    assert intmat.equal(s.V @ s.V_inv, intmat.eye(a.shape[1]))


@settings(max_examples=100, deadline=None)
@given(int_matrices(), st.data())
def test_solve_round_trip(a, data):
    cols = a.shape[1]
    x = intmat.zeros(cols, 1)
    for i in range(cols):
        x[i, 0] = data.draw(st.integers(-4, 4))
    b = a @ x
    y = intmat.solve(a, b)
    assert y is not None
    assert intmat.equal(a @ y, b)


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rank_matches_numpy(a):
    if a.size:
        assert intmat.smith(a).rank == np.linalg.matrix_rank(a.astype(float))
