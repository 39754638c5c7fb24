import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdchain.errors import EmptyComplexError, MalformedSimplexError, ParameterError, UnknownSimplexError
from sdchain.generators import named_complex
from sdchain.simplicial_core import (
    BOUNDARY_RETRACTING,
    MIN_VERTEX,
    SimplicialComplex,
    barycentric_subdivide,
    boundary_matrix,
    build_complex,
    choose_r,
    dual_cell,
    faces_of,
    iterated_subdivision,
    perm_sign,
    standard_simplex,
)


def test_closure_of_one_triangle():
    X = build_complex([[0, 1, 2]])
    assert len(X.simplices) == 7
    assert [len(X.of_dim(k)) for k in range(3)] == [3, 3, 1]
    assert X.dim == 2


def test_t_graph():
    T = named_complex("t-graph")
    assert len(T.vertices) == 4
    assert len(T.of_dim(1)) == 3
    assert T.dim == 1


def test_boundary_of_tetrahedron_has_14_simplices():
    X = named_complex("boundary-delta3")
    assert len(X.simplices) == 14
    assert X.is_pure()


def test_build_is_order_independent():
    a = build_complex([[2, 1, 0], [3, 1]])
    b = build_complex([[1, 3], [0, 2, 1]])
    assert a == b
    assert a.maximal() == b.maximal()


def test_duplicate_vertex_is_rejected():
    with pytest.raises(MalformedSimplexError):
        build_complex([[0, 0, 1]])


def test_empty_complex_is_rejected():
    with pytest.raises(EmptyComplexError):
        build_complex([])


def test_json_round_trip():
    X = named_complex("wedge-circles")
    assert SimplicialComplex.from_json(X.to_json()) == X


def test_sd_delta1():
    S = barycentric_subdivide(standard_simplex(1))
    K = S.complex
    assert len(K.vertices) == 3
    assert len(K.of_dim(1)) == 2
    mid = S.vertex_of[(0, 1)]
    assert all(mid in e for e in K.of_dim(1))


def test_sd_delta2_counts():
    K = barycentric_subdivide(standard_simplex(2)).complex
    assert [len(K.of_dim(k)) for k in range(3)] == [7, 12, 6]


def test_sd_of_a_point_is_a_point():
    S = barycentric_subdivide(build_complex([[5]]))
    assert len(S.complex.simplices) == 1
    assert S.carrier[S.complex.of_dim(0)[0]] == (5,)


def test_iterated_levels_nest():
    S2 = iterated_subdivision(standard_simplex(2), 2)
    assert S2.level == 2 and S2.parent.level == 1
    # each level multiplies the triangle count by 3! = 6
    assert len(S2.complex.of_dim(2)) == 36


def test_carrier_is_smallest_containing_simplex():
    S = barycentric_subdivide(standard_simplex(2))
    for s, c in S.carrier.items():
        support = {v for w in s for v in S.coords[w]}
        assert set(c) == support


def test_dual_cell_of_top_simplex_is_its_barycentre():
    D = dual_cell((0, 1, 2), standard_simplex(2))
    assert D.closed == {((0, 1, 2),)}
    assert D.boundary == frozenset()


def test_dual_cell_of_an_edge():
    D = dual_cell((0, 1), standard_simplex(2))
    edges = [fl for fl in D.closed if len(fl) == 2]
    assert edges == [((0, 1), (0, 1, 2))]
    assert D.open == D.closed - D.boundary


def test_dual_cell_of_a_vertex_is_a_star():
    X = standard_simplex(2)
    D = dual_cell((2,), X)
    assert len([fl for fl in D.open if len(fl) == 3]) == 2
    assert all(fl[0] == (2,) for fl in D.open)


def test_open_dual_cells_partition_the_subdivision():
    X = named_complex("boundary-delta3")
    seen = []
    for s in X.simplices:
        seen.extend(dual_cell(s, X).open)
    assert len(seen) == len(set(seen)) == len(barycentric_subdivide(X).complex.simplices)


def test_dual_cell_unknown_simplex():
    with pytest.raises(UnknownSimplexError):
        dual_cell((0, 3), standard_simplex(2))


def test_choose_r_on_sd_delta1():
    r = choose_r(barycentric_subdivide(standard_simplex(1)))
    S = r.subdivision
    w0, w1, w01 = S.vertex_of[(0,)], S.vertex_of[(1,)], S.vertex_of[(0, 1)]
    assert r.r_vertex_map == {w0: 0, w01: 0, w1: 1}
    assert r.I_partition[(0,)] == {(w0,), (w01,), tuple(sorted((w0, w01)))}
    assert r.I_partition[(0, 1)] == {tuple(sorted((w01, w1)))}
    assert r.I_partition[(1,)] == {(w1,)}


def test_choose_r_on_a_point():
    r = choose_r(barycentric_subdivide(build_complex([[0]])))
    assert r.forest == frozenset()
    assert list(r.r_vertex_map.values()) == [0]


def test_unknown_policy():
    with pytest.raises(ParameterError):
        choose_r(barycentric_subdivide(standard_simplex(1)), "nearest")


@pytest.mark.parametrize("policy", [MIN_VERTEX, BOUNDARY_RETRACTING])
@pytest.mark.parametrize("levels", [1, 2])
def test_subdivision_data_invariants(base, policy, levels):
    r = choose_r(iterated_subdivision(base, levels), policy)
    S = r.subdivision
    # simplicial approximation to the identity
    for w, v in r.r_vertex_map.items():
        assert v in S.carrier[(w,)]
    # the I_sigma partition all simplices
    parts = [s for I in r.I_partition.values() for s in I]
    assert len(parts) == len(set(parts)) == len(S.complex.simplices)
    for sigma in base.simplices:
        top = r.distinguished_simplex(sigma)
        assert r.image(top) == sigma and len(top) == len(sigma)
    # forest: each fibre of r is a tree through its base vertex
    for v in base.vertices:
        fibre = {w for w, x in r.r_vertex_map.items() if x == v}
        edges = [e for e in r.forest if e[0] in fibre]
        assert all(e[1] in fibre for e in edges)
        assert len(edges) == len(fibre) - 1
        reach, todo = set(), [S.vertex_of[(v,)] if levels == 1 else next(iter(fibre))]
        while todo:
            a = todo.pop()
            if a not in reach:
                reach.add(a)
                todo.extend(b for e in edges for b in e if a in e)
        assert reach == fibre


def test_gamma_signs_are_units():
    r = choose_r(barycentric_subdivide(standard_simplex(2)))
    assert r.gamma_signs
    assert set(r.gamma_signs.values()) <= {1, -1}
    for s, (chain, tau) in r.gamma.items():
        assert len(s) == len(tau) + len(chain) - 1


def test_simplicial_r_inverts_s():
    X = standard_simplex(3)
    r = choose_r(barycentric_subdivide(X))
    step = r.steps[0]
    for sigma in X.simplices:
        image = {}
        for s, c in step.subdivision_chain(sigma).items():
            t = step.image[s]
            if len(t) == len(s):
                sign = perm_sign([step.r[w] for w in s])
                image[t] = image.get(t, 0) + c * sign
        assert {k: v for k, v in image.items() if v} == {sigma: 1}


def test_boundary_matrix_examples():
    assert boundary_matrix(standard_simplex(1), 1).tolist() == [[-1], [1]]
    m = boundary_matrix(standard_simplex(2), 2)
    edges = standard_simplex(2).of_dim(1)
    col = {e: int(m[i, 0]) for i, e in enumerate(edges)}
    assert (col[(1, 2)], col[(0, 2)], col[(0, 1)]) == (1, -1, 1)


def test_boundary_squares_to_zero_on_sphere():
    X = named_complex("boundary-delta3")
    assert not np.any(boundary_matrix(X, 1) @ boundary_matrix(X, 2))


complexes = st.lists(
    st.lists(st.integers(0, 6), min_size=1, max_size=4, unique=True), min_size=1, max_size=6
)


@settings(max_examples=60, deadline=None)
@given(complexes)
def test_closure_and_boundary_square(maximal):
    X = build_complex(maximal)
    for s in X.simplices:
        assert list(s) == sorted(s)
        assert all(f in X for f in faces_of(s))
    for n in range(2, X.dim + 1):
        assert not np.any(boundary_matrix(X, n - 1) @ boundary_matrix(X, n))


@settings(max_examples=20, deadline=None)
@given(complexes)
def test_sd_simplices_are_flags(maximal):
    X = build_complex(maximal)
    S = barycentric_subdivide(X)
    for s in S.complex.simplices:
        fl = S.flag(s)
        assert all(len(a) < len(b) and set(a) < set(b) for a, b in itertools.pairwise(fl))
