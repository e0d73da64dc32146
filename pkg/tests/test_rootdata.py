from math import comb, factorial

import pytest
from hypothesis import given, strategies as st

from mirrorflag.rootdata import (Unsupported, WeylElement, build_root_system, case_label, first_chern_coefficients,
                                 from_word, parabolic_data, parse_levi, quantum_degree, simple_reflection)

from conftest import pd_of


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_weyl_group_sizes(rank):
    rs = build_root_system("A", rank)
    assert len(rs.weyl_elements) == factorial(rank + 1)
    assert len(rs.positive_roots) == rank * (rank + 1) // 2
    assert rs.longest_element.length == len(rs.positive_roots)


def test_cartan_matrix_a3():
    assert build_root_system("A", 3).cartan_matrix == ((2, -1, 0), (-1, 2, -1), (0, -1, 2))


@pytest.mark.parametrize("cartan_type,rank", [("D", 4), ("B", 2), ("A", 5), ("A", 0)])
def test_unsupported(cartan_type, rank):
    with pytest.raises(Unsupported):
        build_root_system(cartan_type, rank)


@pytest.mark.parametrize("rank,levi,size", [
    (1, (), 2), (2, (2,), 3), (2, (), 6), (3, (1, 3), 6), (3, (2, 3), 4), (4, (2, 4), 30), (4, (1, 2, 3), 5)])
def test_parabolic_quotient_sizes(rank, levi, size):
    pd = pd_of(rank, levi)
    assert len(pd.minimal_reps) == size
    assert len(pd.minimal_reps) * len(pd.W_P) == factorial(rank + 1)
    assert pd.w_P_w_0.length == pd.rs.longest_element.length - pd.w_P.length


def test_grassmannian_count():
    # Gr(2, 4): levi {1, 3}
    assert len(pd_of(3, (1, 3)).minimal_reps) == comb(4, 2)


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_projective_space_degrees(rank):
    levi = tuple(range(2, rank + 1))
    pd = pd_of(rank, levi)
    assert pd.k == 1
    assert quantum_degree(pd, 1) == 2 * (rank + 1)
    assert first_chern_coefficients(pd) == (rank + 1,)


def test_full_flag_degrees():
    pd = pd_of(3)
    assert [quantum_degree(pd, i) for i in (1, 2, 3)] == [4, 4, 4]


perms = st.integers(1, 4).flatmap(lambda r: st.permutations(list(range(1, r + 2))))


@given(perms)
def test_word_roundtrip(p):
    w = WeylElement(tuple(p))
    assert from_word(w.n, w.word) == w
    assert len(w.word) == w.length
    assert (w * w.inverse()).is_identity()


@given(perms, st.data())
def test_projection_is_minimal(p, data):
    n = len(p)
    levi = data.draw(st.sets(st.integers(1, n - 1)))
    pd = parabolic_data(build_root_system("A", n - 1), levi)
    w = WeylElement(tuple(p))
    v = pd.project(w)
    assert v in pd.minimal_reps
    assert pd.project(v) == v
    assert v.length <= w.length
    for j in levi:
        assert pd.project(w * simple_reflection(n, j)) == v


def test_parse_levi_and_labels():
    assert parse_levi("") == frozenset()
    assert parse_levi(" 2, 4") == frozenset({2, 4})
    with pytest.raises(ValueError):
        parse_levi("x")
    with pytest.raises(IndexError):
        pd_of(2, (3,))
    assert case_label(pd_of(2, (2,))) == "A2[2]"
