from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherelab import constructions as C
from spherelab.complex_core import (MAX_VERTICES, FacetHypergraph, HypergraphError, canonicalize,
                                    dump, edge_degrees, epsilon, f_vector, faces, induced, is_face,
                                    join, join_facets, link, load, mask_of, parse_json, parse_text,
                                    remove_facet, vertices_of)


@st.composite
def raw_families(draw, max_n=9):
    n = draw(st.integers(2, max_n))
    sets = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=1, max_size=n), min_size=1, max_size=12))
    return sets


def test_canonicalize_merges_and_drops_subsets():
    H, labels = canonicalize([[2, 1, 0], [0, 1], [0, 1, 2], [3, 2]])
    assert H.facets == ((0, 1, 2), (2, 3))
    assert labels == (0, 1, 2, 3)


def test_canonicalize_strict_rejects_non_maximal():
    with pytest.raises(HypergraphError, match="not maximal"):
        canonicalize([[0, 1], [0, 1, 2]], strict=True)


def test_canonicalize_errors():
    with pytest.raises(HypergraphError, match="no facets"):
        canonicalize([])
    with pytest.raises(HypergraphError, match="uncovered vertex 1"):
        canonicalize([[0, 2]])
    with pytest.raises(HypergraphError, match="outside"):
        canonicalize([[0, 5]], n=3)
    with pytest.raises(HypergraphError, match="non-negative"):
        canonicalize([[-1, 0]])


def test_dense_relabel_keeps_label_map():
    H, labels = canonicalize([[10, 4], [4, 7]], dense_relabel=True)
    assert labels == (4, 7, 10)
    assert H.facets == ((0, 1), (0, 2))


def test_constructor_checks_invariants():
    with pytest.raises(HypergraphError):
        FacetHypergraph(3, ((1, 0),))
    with pytest.raises(HypergraphError):
        FacetHypergraph(3, ((1, 2), (0, 1)))
    with pytest.raises(HypergraphError):
        FacetHypergraph(MAX_VERTICES + 1, ((0,),))


@given(raw_families())
def test_canonical_form_properties(raw):
    H, labels = canonicalize(raw, dense_relabel=True)
    assert list(H.facets) == sorted(H.facets)
    assert all(list(f) == sorted(set(f)) for f in H.facets)
    sets = [set(f) for f in H.facets]
    assert not any(a < b for a in sets for b in sets)
    # idempotent
    again, _ = canonicalize(H.facets)
    assert again == H
    original = {frozenset(r) for r in raw}
    assert {frozenset(labels[v] for v in f) for f in H.facets} <= original


@given(raw_families(), st.randoms(use_true_random=False))
def test_relabel_preserves_invariants(raw, rnd):
    H, _ = canonicalize(raw, dense_relabel=True)
    perm = list(range(H.n))
    rnd.shuffle(perm)
    G = H.relabel(perm)
    assert f_vector(G) == f_vector(H)
    assert epsilon(G) == epsilon(H)
    assert sorted(G.vertex_degrees) == sorted(H.vertex_degrees)


def test_relabel_rejects_non_permutation():
    H = C.simplex_boundary(2)
    with pytest.raises(HypergraphError):
        H.relabel([0, 0, 1, 2])


def test_masks_roundtrip():
    assert vertices_of(mask_of([5, 0, 3])) == (0, 3, 5)
    assert mask_of([]) == 0


@pytest.mark.parametrize("d", range(0, 5))
def test_simplex_boundary_f_vector(d):
    fv = f_vector(C.simplex_boundary(d))
    assert fv.counts == tuple(comb(d + 2, i) for i in range(0, d + 2))


def test_f_vector_indexing_and_euler():
    fv = f_vector(C.simplex_boundary(3))
    assert fv.counts == (1, 5, 10, 10, 5)
    assert fv[0] == 5 and fv[3] == 5 and fv.dim == 3
    assert fv.euler_characteristic == 0


def test_faces_and_is_face():
    K = C.simplex_boundary(2)
    assert faces(K, -1) == {()}
    assert len(faces(K, 1)) == 6
    assert is_face(K, [0, 1]) and not is_face(K, [0, 1, 2, 3])


def test_link_of_octahedron_vertex_is_square():
    K, antipode = C.cross_polytope_boundary(2)
    H, labels = link(K, [0])
    assert H.n == 4 and len(H) == 4
    assert 0 not in labels and antipode[0] not in labels
    assert all(d == 2 for d in H.vertex_degrees)


def test_link_errors():
    K = C.simplex_boundary(2)
    with pytest.raises(HypergraphError, match="is a facet"):
        link(K, (0, 1, 2))
    K, _ = C.cross_polytope_boundary(2)
    with pytest.raises(HypergraphError, match="not a face"):
        link(K, (0, 1))


def test_join_of_two_zero_spheres_is_square():
    S0 = C.simplex_boundary(0)
    Q = join(S0, S0)
    assert Q.n == 4 and Q.facets == ((0, 2), (0, 3), (1, 2), (1, 3))
    with pytest.raises(HypergraphError, match="share"):
        join_facets([(0,)], [(0, 1)])


def test_join_f_vector_multiplies():
    # f-polynomials multiply under joins
    A, B = C.simplex_boundary(1), C.simplex_boundary(2)
    J = join(A, B)
    assert J.n == A.n + B.n
    assert len(J) == len(A) * len(B)


def test_induced_and_remove_facet():
    K = C.simplex_boundary(3)
    H, labels = induced(K, [1, 2, 3, 4])
    assert H.facets == ((0, 1, 2, 3),) and labels == (1, 2, 3, 4)
    E, labels = induced(K, [0, 1])
    assert E.is_empty and labels == ()
    R = remove_facet(K, (0, 1, 2, 3))
    assert len(R) == 4
    with pytest.raises(HypergraphError):
        remove_facet(K, (0, 1, 2))


@pytest.mark.parametrize("n", range(7, 13))
def test_cyclic_epsilon(n):
    assert epsilon(C.cyclic_polytope(4, n)) == n * (n - 2)


def test_edge_degrees_sum():
    K = C.cyclic_polytope(4, 9)
    prof = edge_degrees(K)
    assert sum(prof.degrees.values()) == 6 * len(K)
    assert prof.epsilon == sum(sorted(prof.degrees.values(), reverse=True)[:9])


def test_text_roundtrip(tmp_path):
    K = C.cyclic_polytope(4, 8)
    assert parse_text(K.to_text()) == K
    assert parse_json(K.to_json()) == K
    for fmt in ("text", "json"):
        path = tmp_path / f"k.{fmt}"
        dump(K, path, fmt)
        assert load(path) == K


def test_text_header_keeps_isolated_label_range():
    with pytest.raises(HypergraphError, match="uncovered"):
        parse_text("# n=4 d=1\n0 1\n1 2\n")


def test_text_parse_errors_name_lines():
    with pytest.raises(HypergraphError, match="line 3"):
        parse_text("# comment\n0 1 2\n0 a 2\n")
    with pytest.raises(HypergraphError, match="line 1: labels must be strictly ascending"):
        parse_text("2 1 0\n")
    with pytest.raises(HypergraphError, match="facets"):
        parse_json('{"n": 3}')


@settings(max_examples=30)
@given(st.integers(5, 14))
def test_neighborly_edges(n):
    edges = faces(C.cyclic_polytope(4, n), 1)
    assert edges == set(combinations(range(n), 2))
