import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from isgqd.catalog import load_catalog
from isgqd.constructions import brandt_z_window, symmetric_inverse_monoid
from isgqd.operators import (
    LinOp,
    algebra_dim,
    check_regular_identities,
    combination,
    dependency_kernel,
    identity,
    left_regular,
    mmwrite,
    norm_equal_check,
    opnorm,
    right_regular,
    unit_expansion,
    unit_summand,
)


def _dense_left(S, s):
    # straight from the definition: v_s δ_x = δ_{sx} when s*s x = x
    n = S.size
    M = np.zeros((n, n), dtype=int)
    e = S.source[s]
    for x in range(n):
        if S.mul[e, x] == x:
            M[S.mul[s, x], x] = 1
    return M


def _dense_right(S, s):
    n = S.size
    M = np.zeros((n, n), dtype=int)
    e = S.source[s]
    for x in range(n):
        if S.mul[x, e] == x:
            M[S.mul[x, S.star[s]], x] = 1
    return M


@pytest.mark.parametrize("name", ["symmetric_inverse_3", "clifford_z6_z3", "qdnotr_k3", "tower_truncated"])
def test_regular_representation_matches_definition(name):
    S = load_catalog(name).semigroup
    for s in range(S.size):
        assert np.array_equal(left_regular(S, s).dense(), _dense_left(S, s))
        assert np.array_equal(right_regular(S, s).dense(), _dense_right(S, s))
        assert left_regular(S, s).is_partial_isometry()


def test_identity_checks_both_paths_agree():
    S = symmetric_inverse_monoid(3)
    assert check_regular_identities(S, via_matrices=True).ok
    assert check_regular_identities(S, via_matrices=False).ok


def test_window_clipping():
    S = brandt_z_window(1, 3)
    gen = 1 + list(map(tuple, S.meta["coords"])).index((0, 1, 0))
    v = left_regular(S, gen)
    assert len(v.clipped) == 1  # the column at h = 3
    assert check_regular_identities(S).ok


def test_opnorm_dense_and_lanczos():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(40, 30))
    assert abs(opnorm(A) - np.linalg.norm(A, 2)) <= 1e-12
    d = rng.uniform(0, 1, size=2500)
    d[1234] = 3.75
    assert abs(opnorm(sp.diags(d, format="csr")) - 3.75) <= 1e-9
    assert opnorm(sp.csr_matrix((5, 5))) == 0.0


def test_norm_equal_rejects_bad_pair():
    S = symmetric_inverse_monoid(2)
    V = left_regular(S, S.index("[1->1]"))
    with pytest.raises(ValueError):
        norm_equal_check(identity(S), V)


@pytest.mark.parametrize("name", ["symmetric_inverse_3", "qdnotr_k4", "brandt_z2_2", "chain_three"])
def test_unit_expansion_reconstructs_identity(name):
    S = load_catalog(name).semigroup
    c = unit_expansion(S)
    assert c is not None
    assert np.abs(combination(S, c).dense() - np.eye(S.size)).max() <= 1e-9
    assert algebra_dim(S) == S.size
    assert dependency_kernel(S).shape[1] == 0


def test_unit_summand_dimensions():
    us = unit_summand(load_catalog("qdnotr_k3").semigroup)
    assert us.central and us.annihilates_rest
    assert (us.dim_S, us.dim_T) == (11, 10)


def test_mmwrite_roundtrip(tmp_path):
    from scipy.io import mmread

    S = symmetric_inverse_monoid(2)
    v = left_regular(S, 3)
    mmwrite(tmp_path / "v.mtx", v)
    assert np.array_equal(mmread(str(tmp_path / "v.mtx")).toarray(), v.dense())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 33), st.integers(0, 33), st.lists(st.floats(-3, 3), min_size=34, max_size=34))
def test_left_right_commute_and_star(s, t, coeffs):
    S = symmetric_inverse_monoid(3)
    v, w = left_regular(S, s), right_regular(S, t)
    assert (v @ w).equals(w @ v)
    assert left_regular(S, int(S.star[s])).equals(v.H)
    A = combination(S, coeffs)
    assert isinstance(A, LinOp)
    # the commutant contains the right representation, so it commutes with every combination
    assert np.abs((A @ w - w @ A).dense()).max() <= 1e-12
