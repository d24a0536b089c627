import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isgqd.constructions import (
    ball_size,
    brandt,
    brandt_z_window,
    clifford_chain,
    cyclic_group,
    direct_product,
    free_ball,
    group_from_permutations,
    group_with_zero,
    qdnotr_family,
    quotient_tower,
    semilattice_from_sets,
    trivial_group,
    verify_ball_injectivity,
)
from isgqd.constructions.tower import direct_sum, parse_word, reduce_word, word_str
from isgqd.errors import NotDescendingChain, SemigroupError
from isgqd.semigroup import check_inverse_axioms, green_partition


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 4))
def test_brandt_size_and_table(m, k):
    H = cyclic_group(m)
    S = brandt(H, k)
    assert S.size == k * k * m + 1
    F, h, E = S.meta["coords"].T
    # (f2,h2,e2)(f1,h1,e1) = (f2, h2 h1, e1) when e2 = f1, else 0
    for i in range(1, S.size):
        for j in range(1, S.size):
            p = S.mul[i, j]
            if E[i - 1] != F[j - 1]:
                assert p == S.zero
            else:
                c = S.meta["coords"][p - 1]
                assert (c[0], c[2]) == (F[i - 1], E[j - 1])
                assert c[1] == H.mul[h[i - 1], h[j - 1]]


def test_brandt_window_products():
    S = brandt_z_window(2, 5)
    assert not S.closed
    assert S.size == 4 * 11 + 1
    coords = S.meta["coords"]
    i = 1 + list(map(tuple, coords)).index((0, 4, 0))
    j = 1 + list(map(tuple, coords)).index((0, 3, 1))
    assert S.mul[i, j] == -1  # 4 + 3 leaves [-5, 5]
    assert tuple(coords[S.star[j] - 1]) == (1, -3, 0)


def test_group_with_zero_label_collision():
    S = group_with_zero(cyclic_group(2))
    assert "z" in S.elements and S.elements[S.zero] == "z"


def test_qdnotr_sizes():
    for k in range(1, 6):
        assert qdnotr_family(k).size == k * k + 2
        assert qdnotr_family(k, unital=False).size == k * k + 1


def test_clifford_chain_needs_homomorphisms():
    C = clifford_chain([trivial_group(), cyclic_group(2), cyclic_group(4)], {(2, 1): [0, 1, 0, 1]})
    check_inverse_axioms(C)
    G = green_partition(C)
    assert G.n_d == 3
    with pytest.raises(SemigroupError):
        clifford_chain([cyclic_group(3), cyclic_group(2)], {(1, 0): [0, 2]})


def test_semilattice_from_sets():
    S = semilattice_from_sets({"a": frozenset({1, 2}), "b": frozenset({2, 3}), "c": frozenset({2}),
                               "z": frozenset()})
    assert S.elements[S.mul[S.index("a"), S.index("b")]] == "c"


def test_direct_product_order():
    assert direct_product(cyclic_group(2), cyclic_group(3)).order == 6


@pytest.mark.parametrize("radius", range(0, 6))
def test_free_ball_size(radius):
    B = free_ball(radius)
    assert len(B) == ball_size(radius)
    # every reduced word appears once; left multiplication by a letter and its inverse cancel
    assert len(set(B.words)) == len(B)
    inv = {0: 1, 1: 0, 2: 3, 3: 2}
    for g in range(4):
        inside = B.left[g] >= 0
        back = B.left[inv[g], B.left[g, inside]]
        assert np.array_equal(back, np.flatnonzero(inside))


def test_word_roundtrip():
    w = (0, 2, 1, 3)
    assert reduce_word(w + (2, 3)) == w
    assert parse_word(word_str(w)) == w
    assert reduce_word((0, 1, 2)) == (2,)


def test_quotient_tower_levels():
    lvl1 = ([1, 0], [0, 1])
    lvl2 = (direct_sum(lvl1[0], [1, 0, 2]), direct_sum(lvl1[1], [0, 2, 1]))
    gens = [([0], [0]), lvl1, lvl2]
    T = quotient_tower(gens, 3)
    assert T.depth == 3
    assert group_from_permutations(lvl2)[0].order == 12  # Z/2 x S_3
    assert verify_ball_injectivity(T, 0, 0)
    assert not verify_ball_injectivity(T, 0, 1)
    assert T.truncate(1).size == 1 + 2
    S = T.truncate(2)
    check_inverse_axioms(S)
    assert S.size == 1 + 2 + 12
    with pytest.raises(NotDescendingChain):
        quotient_tower([lvl1, ([1, 2, 0], [0, 2, 1])], 3)
