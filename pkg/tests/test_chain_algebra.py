import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdchain import chain_algebra as ca
from sdchain import intmat
from sdchain.errors import InvalidLocalContractionError, UnsupportedVariantError
from sdchain.generators import named_complex, named_map, random_bases, random_chain_map, random_complex
from sdchain.map_analysis import induced_chain_map
from sdchain.simplicial_core import barycentric_subdivide, build_complex, standard_simplex

M = intmat.as_int_matrix
V0, V1, E = (0,), (1,), (0, 1)


def interval(a=-1, b=1):
    X = standard_simplex(1)
    return ca.GradedChainComplex(X, ca.COSTAR, {(V0, 0): 1, (V1, 0): 1, (E, 1): 1},
                                 {(V0, E, 1): M([[a]]), (V1, E, 1): M([[b]])})


def point_complex(ranks, diff, variant=ca.COSTAR):
    return ca.GradedChainComplex(build_complex([[0]]), variant, {(V0, n): r for n, r in ranks.items()},
                                 {(V0, V0, n): M(m) for n, m in diff.items()})


def total_homology(C):
    T, _ = ca.total_complex(C)
    return {n: (h.betti, h.torsion) for n, h in ca.homology(T).items() if not h.is_zero}


def test_verify_interval():
    assert ca.verify(interval())
    # sign-flipped edge boundary still squares to zero for degree reasons
    assert ca.verify(interval(1, 1))


def test_verify_rejects_bad_triangle():
    C = ca.simplicial_chain_complex(standard_simplex(2))
    diff = dict(C.diff)
    diff[((0, 1), (0, 1, 2), 2)] = -diff[((0, 1), (0, 1, 2), 2)]
    assert not ca.verify(ca.GradedChainComplex(C.base, ca.COSTAR, C.ranks, diff))


def test_verify_rejects_wrong_direction_in_star_variant():
    X = standard_simplex(1)
    C = ca.GradedChainComplex(X, ca.STAR, {(V0, 0): 1, (E, 1): 1}, {(V0, E, 1): M([[1]])})
    assert not ca.verify(C)


def test_interval_is_the_simplicial_chain_complex():
    assert ca.simplicial_chain_complex(standard_simplex(1)) == interval()


def test_point_chains():
    C = ca.simplicial_chain_complex(build_complex([[0]]))
    assert C.ranks == {(V0, 0): 1}
    assert total_homology(C) == {0: (1, [])}


def test_sphere_homology():
    C = ca.simplicial_chain_complex(named_complex("boundary-delta3"))
    assert total_homology(C) == {0: (1, []), 2: (1, [])}


def test_sphere_cohomology_sits_in_negative_degrees():
    C = ca.simplicial_cochain_complex(named_complex("boundary-delta3"))
    assert C.variant == ca.STAR and ca.verify(C)
    assert all(n == -(len(s) - 1) for (s, n) in C.ranks)
    assert total_homology(C) == {0: (1, []), -2: (1, [])}


def test_cone_of_zero_is_the_suspension():
    D = interval()
    Z = ca.zero_complex(D.base)
    cone = ca.mapping_cone(Z.zero_map(D))
    assert cone.ranks == {(s, n - 1): r for (s, n), r in D.ranks.items()}
    assert all(ca.intmat.equal(m, -D.diff[(t, s, n + 1)]) for (t, s, n), m in cone.diff.items())


def test_cone_of_identity_is_contractible():
    C = interval()
    cert = ca.is_contractible(ca.mapping_cone(C.identity()))
    assert isinstance(cert, ca.ContractionCertificate) and cert.verified


def test_cone_of_two_has_z2_homology():
    C = point_complex({0: 1}, {})
    f = ca.GradedChainMap(C, C, {(V0, V0, 0): M([[2]])})
    res = ca.is_contractible(ca.mapping_cone(f))
    assert isinstance(res, ca.ContractibilityWitness)
    assert res.witness.group.torsion == [2]


def test_local_contract_unit():
    D = ca.FreeComplex.from_lists({0: 1, 1: 1}, {1: [[1]]})
    cert = ca.local_contract(D)
    assert cert.verified and cert.homotopy[0].tolist() == [[1]]


def test_local_contract_witness():
    D = ca.FreeComplex.from_lists({0: 1, 1: 1}, {1: [[2]]})
    w = ca.local_contract(D)
    assert isinstance(w, ca.HomologyWitness)
    assert w.group.degree == 0 and w.group.torsion == [2]


def test_local_contract_cone_on_sphere():
    C = ca.simplicial_chain_complex(named_complex("boundary-delta3"))
    T, _ = ca.total_complex(ca.mapping_cone(C.identity()))
    cert = ca.local_contract(T)
    assert cert.verified and ca.check_local(T, cert.homotopy)


def test_globalize_without_off_diagonal_terms():
    X = standard_simplex(1)
    C = ca.GradedChainComplex(X, ca.COSTAR, {(V0, 0): 1, (V0, 1): 1, (E, 0): 1, (E, 1): 1},
                              {(V0, V0, 1): M([[1]]), (E, E, 1): M([[1]])})
    locs = {s: ca.local_contract(C.local(s)).homotopy for s in C.support}
    cert = ca.globalize_contraction(C, locs)
    assert cert.verified
    assert set(cert.homotopy.blocks) == {(V0, V0, 0), (E, E, 0)}


def test_globalize_flag_of_length_one():
    X = standard_simplex(1)
    ranks = {(V0, 1): 1, (V0, 2): 1, (E, 1): 1, (E, 2): 1}
    diff = {(V0, V0, 2): M([[1]]), (E, E, 2): M([[1]]), (V0, E, 2): M([[3]])}
    C = ca.GradedChainComplex(X, ca.COSTAR, ranks, diff)
    assert ca.verify(C)
    locs = {s: ca.local_contract(C.local(s)).homotopy for s in C.support}
    cert = ca.globalize_contraction(C, locs)
    expected = -(locs[V0][1] @ diff[(V0, E, 2)] @ locs[E][1])
    assert cert.verified
    assert cert.homotopy.blocks[(V0, E, 1)].tolist() == expected.tolist() == [[-3]]


def test_globalize_rejects_bad_local():
    C = point_complex({0: 1, 1: 1}, {1: [[1]]})
    with pytest.raises(InvalidLocalContractionError):
        ca.globalize_contraction(C, {V0: {0: M([[2]])}})


def test_interval_is_not_contractible_at_a_vertex():
    res = ca.is_contractible(interval())
    assert isinstance(res, ca.ContractibilityWitness)
    assert len(res.simplex) == 1


def test_full_variant_is_refused():
    with pytest.raises(UnsupportedVariantError):
        ca.is_contractible(interval().with_variant(ca.FULL))


def test_chain_equivalence_examples():
    C = interval()
    res = ca.is_chain_equivalence(C.identity())
    assert res and res.certificate.check()
    P = point_complex({0: 1}, {})
    assert not ca.is_chain_equivalence(ca.GradedChainMap(P, P, {(V0, V0, 0): M([[2]])}))
    assert ca.is_chain_equivalence(induced_chain_map(named_map("t-projection")))


def test_composite_certificate():
    rng = random.Random(5)
    X = standard_simplex(2)
    C = random_complex(X, rng)
    one = ca.is_chain_equivalence(C.identity()).certificate
    neg = ca.is_chain_equivalence(C.identity().scaled(-1)).certificate
    both = one.then(neg)
    assert both.check()


def test_json_round_trip():
    C = random_complex(named_complex("t-graph"), random.Random(9), ca.STAR)
    again = ca.GradedChainComplex.from_json(C.to_json())
    assert again == C


def on_sd_delta1():
    S = barycentric_subdivide(standard_simplex(1))
    return S, ca.simplicial_chain_complex(S)


def test_covariant_assembly_of_sd_interval():
    S, C = on_sd_delta1()
    R = ca.assemble_covariant(C)
    totals = {s: sum(r for (t, _n), r in R.ranks.items() if t == s) for s in R.space.simplices}
    assert totals == {V0: 1, E: 3, V1: 1}
    assert R.variant == ca.COSTAR and ca.verify(R)
    # the edge block is the 1x2 piece of the middle matrix: both sub-edges hit the midpoint
    assert R.diff[(E, E, 1)].shape == (1, 2)
    assert all(x != 0 for x in R.diff[(E, E, 1)].flat)
    # each endpoint sees exactly one of the sub-edges
    for v in (V0, V1):
        assert sorted(abs(int(x)) for x in R.diff[(v, E, 1)].flat) == [0, 1]


def test_contravariant_assembly_of_sd_interval():
    S, C = on_sd_delta1()
    T = ca.assemble_contravariant(C)
    totals = {s: sum(r for (t, _n), r in T.ranks.items() if t == s) for s in T.space.simplices}
    assert totals == {V0: 2, E: 1, V1: 2}
    assert T.variant == ca.STAR and ca.verify(T)
    for v in (V0, V1):
        assert T.diff[(v, v, 1)].shape == (1, 1)


def test_assembly_of_a_single_open_simplex_relabels():
    S, _ = on_sd_delta1()
    w = S.vertex_of[E]
    C = ca.GradedChainComplex(S, ca.COSTAR, {((w,), 0): 2}, {})
    R = ca.assemble_covariant(C)
    assert R.ranks == {(E, 0): 2}


def test_assembly_is_functorial():
    rng = random.Random(12)
    S = barycentric_subdivide(standard_simplex(2))
    comps = []
    for _ in range(3):
        C = random_complex(S.complex, rng)
        comps.append(ca.GradedChainComplex(S, C.variant, C.ranks, C.diff))
    A, B, C = comps
    f, g = random_chain_map(A, B, rng), random_chain_map(B, C, rng)
    lhs = ca.assemble_map(g @ f)
    rhs = ca.assemble_map(g) @ ca.assemble_map(f)
    assert lhs.blocks.keys() == rhs.blocks.keys()
    assert all(intmat.equal(lhs.blocks[k], rhs.blocks[k]) for k in lhs.blocks)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3), st.sampled_from([ca.COSTAR, ca.STAR]), st.integers(0, 10 ** 6))
def test_random_complexes_verify(j, variant, seed):
    C = random_complex(random_bases()[j], random.Random(seed), variant)
    assert ca.verify(C)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3), st.sampled_from([ca.COSTAR, ca.STAR]), st.integers(0, 10 ** 6))
def test_equivalence_iff_cone_contractible(j, variant, seed):
    rng = random.Random(seed)
    X = random_bases()[j]
    C = random_complex(X, rng, variant)
    f = random_chain_map(C, C, rng)
    res = ca.is_chain_equivalence(f)
    cone = ca.is_contractible(ca.mapping_cone(f))
    assert bool(res) == isinstance(cone, ca.ContractionCertificate)
    if res:
        assert res.certificate.check()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3), st.sampled_from([ca.COSTAR, ca.STAR]), st.integers(0, 10 ** 6))
def test_global_contraction_is_triangular(j, variant, seed):
    C = random_complex(random_bases()[j], random.Random(seed), variant, contractible=True)
    cert = ca.is_contractible(C)
    assert cert.verified and cert.homotopy.respects(variant)
