from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherelab import constructions as C
from spherelab import k21, solvers, topology
from spherelab.complex_core import HypergraphError, f_vector, hypergraph
from oracles import gale_facets_by_definition

APPENDIX_C47 = [
    (0, 1, 2, 3), (0, 1, 2, 6), (0, 1, 3, 4), (0, 1, 4, 5), (0, 1, 5, 6), (0, 2, 3, 6), (0, 3, 4, 6),
    (0, 4, 5, 6), (1, 2, 3, 4), (1, 2, 4, 5), (1, 2, 5, 6), (2, 3, 4, 5), (2, 3, 5, 6), (3, 4, 5, 6),
]


def test_simplex_boundary_small_cases():
    assert C.simplex_boundary(0).facets == ((0,), (1,))
    assert len(C.simplex_boundary(2)) == 4
    assert f_vector(C.simplex_boundary(3)).counts == (1, 5, 10, 10, 5)
    with pytest.raises(ValueError):
        C.simplex_boundary(-1)


@pytest.mark.parametrize("d", range(0, 5))
def test_cross_polytope(d):
    K, antipode = C.cross_polytope_boundary(d)
    assert K.n == 2 * (d + 1) and len(K) == 2 ** (d + 1)
    assert all(antipode[v] == v ^ 1 for v in range(K.n))
    for f in K.facets:
        assert len({v // 2 for v in f}) == d + 1
    if d >= 1:
        assert solvers.transversal_number(K).value == 2


def test_cross_polytope_d3_matches_count():
    K, _ = C.cross_polytope_boundary(3)
    assert (K.n, len(K)) == (8, 16)


def test_cyclic_4_7_is_appendix_list():
    assert list(C.cyclic_polytope(4, 7).facets) == APPENDIX_C47


def test_gale_rejects_spread_facet():
    assert not C.is_gale_facet((0, 2, 4, 6), 7)
    assert C.is_gale_facet((0, 1, 5, 6), 7)


@pytest.mark.parametrize("d,n", [(2, 6), (3, 7), (4, 8), (4, 9), (5, 8), (6, 9)])
def test_cyclic_matches_moment_curve(d, n):
    assert list(C.cyclic_polytope(d, n).facets) == gale_facets_by_definition(d, n)


@pytest.mark.parametrize("n", range(5, 13))
def test_cyclic_3_facets_touch_ends(n):
    K = C.cyclic_polytope(3, n)
    assert all(0 in f or n - 1 in f for f in K.facets)
    assert solvers.is_transversal(K, [0, n - 1])


@pytest.mark.parametrize("d,n", [(4, 10), (6, 11)])
def test_even_cyclic_facet_count(d, n):
    m = d // 2
    assert len(C.cyclic_polytope(d, n)) == n * comb(n - m, m) // (n - m)


def test_cyclic_errors():
    with pytest.raises(ValueError):
        C.cyclic_polytope(4, 4)


def test_stacked_ball_path():
    assert C.stacked_ball_path(3, 6).facets == ((0, 1, 2, 3), (1, 2, 3, 4), (2, 3, 4, 5))
    assert C.stacked_ball_path(3, 4).facets == ((0, 1, 2, 3),)
    assert C.validate_stacked_ball(C.stacked_ball_path(3, 9))


def test_validate_stacked_ball_cases():
    ball = k21.load_script().steps[0][1]
    assert len(ball) == 4 and C.validate_stacked_ball(ball)
    assert not C.validate_stacked_ball([(0, 1, 2, 3), (4, 5, 6, 7)])
    with pytest.raises(ValueError):
        C.validate_stacked_ball([(0, 1, 2), (0, 1, 2, 3)])


def test_validate_checks_the_given_order_only():
    # same three tetrahedra; in the second order 2345 meets 0123 only in an edge
    assert C.validate_stacked_ball([(0, 1, 2, 3), (1, 2, 3, 4), (2, 3, 4, 5)])
    assert not C.validate_stacked_ball([(0, 1, 2, 3), (2, 3, 4, 5), (1, 2, 3, 4)])


def test_validate_rejects_second_contact():
    # third facet meets the first one only in vertex 0 besides its glued ridge
    assert not C.validate_stacked_ball([(0, 1, 2), (1, 2, 3), (0, 2, 3)])


def test_appendix_order_swaps_are_rechecked():
    for n, ball in k21.load_script().steps:
        facets = list(ball.facets)
        facets[0], facets[1] = facets[1], facets[0]
        # both tetrahedra meet in a triangle, so the swapped order stays valid
        assert C.validate_stacked_ball(facets) == C.validate_stacked_ball(ball)


@pytest.mark.parametrize("m", range(1, 18))
def test_stacked_ball_boundary_size(m):
    ball = C.stacked_ball_path(3, m + 3)
    assert len(C.ball_boundary(ball)) == 2 * m + 2


@pytest.mark.parametrize("n", range(4, 12))
def test_path_boundary_is_stacked_two_sphere(n):
    S = C.ball_boundary(C.stacked_ball_path(3, n))
    assert S.n == n and len(S) == 2 * n - 4
    assert topology.is_sphere_lowdim(S, 2)


def test_ball_boundary_of_simplex():
    assert C.ball_boundary([(0, 1, 2, 3)]) == C.simplex_boundary(2)
    with pytest.raises(HypergraphError, match="not a manifold-like ball"):
        C.boundary_ridges([(0, 1, 2), (0, 1, 3), (0, 1, 4)])


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_connected_sum_of_simplices_is_bipyramid(d):
    S = C.simplex_boundary(d)
    K = C.connected_sum(S, S.facets[0], S, S.facets[0])
    assert K.n == d + 3 and len(K) == 2 * (d + 1)
    assert all(topology.check_complex(K).values())


def test_connected_sum_counts_and_errors():
    A = C.icosahedron_boundary()
    B, _ = C.cross_polytope_boundary(2)
    K = C.connected_sum(A, A.facets[3], B, B.facets[5])
    assert K.n == A.n + B.n - 3 and len(K) == len(A) + len(B) - 2
    assert topology.euler_characteristic(K) == 2
    with pytest.raises(HypergraphError):
        C.connected_sum(A, (0, 1, 11), B, B.facets[0])
    with pytest.raises(HypergraphError):
        C.connected_sum(A, A.facets[0], B, B.facets[0], psi={0: 0, 1: 0, 2: 2})


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.data())
def test_connected_sum_invariants(d, data):
    A = C.cyclic_polytope(d + 1, data.draw(st.integers(d + 2, d + 6)))
    B, _ = C.cross_polytope_boundary(d)
    f1 = data.draw(st.sampled_from(A.facets))
    f2 = data.draw(st.sampled_from(B.facets))
    K = C.connected_sum(A, f1, B, f2)
    assert K.n == A.n + B.n - (d + 1)
    assert len(K) == len(A) + len(B) - 2
    assert topology.euler_characteristic(K) == (2 if d % 2 == 0 else 0)
    assert topology.homology(K).is_sphere(d)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_cd_plus(d):
    K, meta = C.cd_plus(d)
    assert K.n == 2 * d + 3
    assert len(K) == (2 ** (d + 1) - 1) + (d + 1)
    assert sum(meta.apex in f for f in K.facets) == d + 1
    assert meta.base_facet in K.facet_set
    assert all(topology.check_complex(K).values())


@pytest.mark.parametrize("d,k", [(2, 1), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_x_construction_shape(d, k):
    X, meta = C.x_construction(d, k)
    assert X.n == k * (d + 2)
    assert sorted(v for block in meta.partition for v in block) == list(range(X.n))
    if k >= 2:
        assert sum(meta.apex in f for f in X.facets) == d + 1
    assert topology.euler_characteristic(X) == (2 if d % 2 == 0 else 0)


def test_x_small_transversals():
    assert solvers.transversal_number(C.x_construction(2, 3)[0]).value == 6
    assert solvers.transversal_number(C.x_construction(3, 2)[0]).value == 4


def test_single_element_extension_first_stage():
    K = C.cyclic_polytope(4, 7)
    ball = k21.load_script().steps[0][1]
    L = C.single_element_extension(K, ball, w=7)
    assert (L.n, len(L)) == (8, 20)
    assert topology.is_k_neighborly(L, 2)
    assert topology.manifold_check_3d(L)


def test_single_element_extension_errors():
    K = C.cyclic_polytope(4, 7)
    ball = k21.load_script().steps[0][1]
    with pytest.raises(HypergraphError, match="labelled 7"):
        C.single_element_extension(K, ball, w=9)
    with pytest.raises(HypergraphError, match="not a subcomplex"):
        C.single_element_extension(K, [(0, 2, 4, 6)])
    with pytest.raises(HypergraphError, match="not stacked"):
        C.single_element_extension(K, [(0, 1, 2, 3), (3, 4, 5, 6), (1, 2, 3, 4)])
    with pytest.raises(HypergraphError, match="span"):
        C.single_element_extension(K, [(0, 1, 2, 3), (1, 2, 3, 4)])


def test_ck_gadget():
    K = k21.build_k21()
    G, meta = C.ck_gadget(K, (2, 3, 4, 5))
    assert G.n == 25
    assert not set(meta.base_facet) & {0, 2, 4, 6}
    assert meta.base_facet in G.facet_set
    assert topology.euler_characteristic(G) == 0
    missing = next(f for f in combinations(range(21), 4) if f not in K.facet_set)
    with pytest.raises(HypergraphError):
        C.ck_gadget(K, missing)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_y_construction(k):
    Y, meta = C.y_construction(k)
    assert Y.n == 21 * k
    assert [len(b) for b in meta.partition] == [21] * k
    assert meta.base_facet in Y.facet_set
    assert topology.euler_characteristic(Y) == 0


def test_y3_blocks_are_copies_of_n21():
    from spherelab.complex_core import induced
    Y, meta = C.y_construction(3)
    N = k21.n21()
    for block in meta.partition:
        H, _ = induced(Y, block)
        assert solvers.isomorphic(H, N) is not None


def test_torus_is_not_a_sphere():
    T = C.torus_7()
    assert (T.n, len(T)) == (7, 14)
    assert topology.is_pseudomanifold(T, 2) and topology.is_connected(T)
    assert topology.euler_characteristic(T) == 0
    assert not topology.is_sphere_lowdim(T, 2)
    # the 7-vertex torus is 2-neighborly
    assert len({e for f in T.facets for e in combinations(f, 2)}) == 21


def test_icosahedron():
    I = C.icosahedron_boundary()
    assert (I.n, len(I)) == (12, 20)
    assert all(d == 5 for d in I.vertex_degrees)
    assert topology.is_sphere_lowdim(I, 2)


def test_octahedron_is_cross_polytope():
    assert C.cross_polytope_boundary(2)[0] == hypergraph(
        [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)])
