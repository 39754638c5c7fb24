import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdchain import chain_algebra as ca
from sdchain import control_metrics as cm
from sdchain.errors import ParameterError
from sdchain.generators import named_complex, random_chain_map, random_complex
from sdchain.simplicial_core import (
    BOUNDARY_RETRACTING,
    barycentric_subdivide,
    build_complex,
    choose_r,
    faces_of,
    iterated_subdivision,
    standard_simplex,
)


def test_delta2_level0():
    rep = cm.metric_report(standard_simplex(2), 0)
    assert rep.mesh_sq == 2
    assert rep.comesh_sq == Fraction(1, 6)


def test_sd_delta2_mesh():
    assert cm.metric_report(standard_simplex(2), 1).mesh_sq == Fraction(2, 3)


def test_single_vertex():
    rep = cm.metric_report(build_complex([[0]]), 0)
    assert rep.mesh_sq == 0
    assert rep.comesh is None and rep.comesh_value == float("inf")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_standard_simplex_values(n):
    rep = cm.metric_report(standard_simplex(n), 0)
    assert rep.per_simplex[tuple(range(n + 1))][0] == 2
    assert cm.standard_rad_sq(n) == Fraction(1, n * (n + 1))


def test_mesh_decay_examples():
    assert cm.verify_mesh_decay(standard_simplex(2), 1)
    assert cm.verify_mesh_decay(named_complex("boundary-delta3"), 1)
    # Sd Δ¹ halves the edge exactly: 1/2 against 1/2, so the strict test fails
    assert cm.metric_report(standard_simplex(1), 1).mesh_sq == Fraction(1, 2)
    assert not cm.verify_mesh_decay(standard_simplex(1), 1)


def test_mesh_never_grows(base):
    prev = cm.metric_report(base, 0).mesh_sq
    for i in (1, 2):
        cur = cm.metric_report(base, i).mesh_sq
        assert cur <= prev
        prev = cur


def test_comesh_rad_diam_mesh_chain():
    rep = cm.metric_report(standard_simplex(3), 1)
    for s, (d2, rad) in rep.per_simplex.items():
        if len(s) > 1:
            assert rep.comesh <= rad
            assert rad * rad <= d2 <= rep.mesh_sq


def test_squeeze_params_delta2():
    p = cm.squeeze_params(standard_simplex(2), Fraction(1, 2))
    assert p.epsilon_sq == Fraction(1, 24)
    assert p.i == 8
    assert abs(p.epsilon - 0.2041) < 1e-4
    assert cm.squeeze_chain_holds(standard_simplex(2), p)


def test_squeeze_params_delta1():
    p = cm.squeeze_params(standard_simplex(1), Fraction(1, 2))
    assert p.epsilon_sq == Fraction(1, 8)
    assert p.i == 4


def test_squeeze_params_monotone_in_alpha():
    X = standard_simplex(2)
    assert cm.squeeze_params(X, Fraction(9, 10)).i >= cm.squeeze_params(X, Fraction(1, 2)).i


@pytest.mark.parametrize("alpha", [0, 1, Fraction(3, 2), -1])
def test_alpha_out_of_range(alpha):
    with pytest.raises(ParameterError):
        cm.squeeze_params(standard_simplex(2), alpha)


def test_minimal_feasible_level_is_smaller_than_i():
    X = standard_simplex(2)
    lvl = cm.minimal_feasible_level(X, Fraction(1, 9), 6)
    assert lvl is not None and lvl <= cm.squeeze_params(X, Fraction(1, 9)).i
    assert cm.feasible_at(X, Fraction(1, 81) * cm.standard_rad_sq(2), lvl)


def test_identity_has_bound_zero():
    C = ca.simplicial_chain_complex(standard_simplex(2))
    assert cm.morphism_bound(C.identity()).sq == 0


def test_boundary_incidence_bound_delta1():
    C = ca.simplicial_chain_complex(standard_simplex(1))
    b = cm.morphism_bound(C.d)
    assert b.sq == Fraction(1, 2)


def test_unsubdivided_morphisms_within_mesh(rng):
    X = standard_simplex(2)
    for _ in range(5):
        C = random_complex(X, rng)
        D = random_complex(X, rng)
        f = random_chain_map(C, D, rng)
        assert cm.morphism_bound(f).value ** 2 <= 2 + 1e-12


def test_bound_of_composite_at_most_sum():
    X = standard_simplex(2)
    rng = random.Random(3)
    for _ in range(5):
        A, B, C = (random_complex(X, rng) for _ in range(3))
        f, g = random_chain_map(A, B, rng), random_chain_map(B, C, rng)
        assert cm.morphism_bound(g @ f).value <= cm.morphism_bound(f).value + cm.morphism_bound(g).value + 1e-12


def test_neighbourhood_at_zero_is_the_closed_star():
    # the vertex rule admits every simplex touching a target vertex
    S = barycentric_subdivide(standard_simplex(2))
    K = S.complex
    edge = K.of_dim(1)[0]
    N = cm.epsilon_neighbourhood(S, [edge], Fraction(0))
    star = {f for s in K.simplices if set(s) & set(edge) for f in faces_of(s)}
    assert N == star
    assert {edge, (edge[0],), (edge[1],)} <= N


def test_neighbourhood_sd_delta1():
    S = barycentric_subdivide(standard_simplex(1))
    w0, w01 = S.vertex_of[(0,)], S.vertex_of[(0, 1)]
    N = cm.epsilon_neighbourhood(S, [(w0,)], Fraction(3, 5))
    assert tuple(sorted((w0, w01))) in N
    assert (S.vertex_of[(1,)],) not in N


def test_distinguished_simplex_avoids_boundary_neighbourhood():
    # at a level where the squeeze inequality holds, the distinguished simplex stays clear of the boundary
    X = standard_simplex(2)
    alpha = Fraction(1, 9)
    eps_sq = alpha ** 2 * cm.standard_rad_sq(2)
    lvl = cm.minimal_feasible_level(X, alpha, 6)
    r = choose_r(iterated_subdivision(X, lvl), BOUNDARY_RETRACTING, eps_sq)
    S = r.subdivision
    boundary = [s for s in S.complex.simplices if S.carrier[s] != (0, 1, 2)]
    N = cm.epsilon_neighbourhood(S, boundary, math.sqrt(eps_sq))
    assert r.distinguished_simplex((0, 1, 2)) not in N


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 3), st.fractions(min_value=Fraction(1, 20), max_value=Fraction(19, 20)))
def test_squeeze_inequality_chain(n, alpha):
    X = standard_simplex(n)
    p = cm.squeeze_params(X, alpha)
    assert p.i >= 1
    assert cm.squeeze_chain_holds(X, p)
