from itertools import combinations

import pytest

from isgqd.catalog import load_catalog
from isgqd.constructions import brandt, chain, cyclic_group, qdnotr_family, symmetric_inverse_monoid
from isgqd.errors import DomainViolation
from isgqd.spectrum import (
    brandt_structure,
    enumerate_groupoid,
    enumerate_spectrum,
    germ_canonical,
    germs_equal_by_definition,
    grpdmin_check,
    is_filter,
    is_minimal,
    isolated_certificate,
    principal_filter,
    theta,
)


def _all_filters_brute(S):
    E = [e for e in S.idempotent_list() if e != S.zero]
    out = set()
    for r in range(1, len(E) + 1):
        for sub in combinations(E, r):
            if is_filter(S, sub):
                out.add(frozenset(sub))
    return out


@pytest.mark.parametrize("S", [chain(4), symmetric_inverse_monoid(2), symmetric_inverse_monoid(3),
                               brandt(cyclic_group(2), 3)], ids=["chain4", "I2", "I3", "B(Z2,3)"])
def test_spectrum_matches_brute_force(S):
    assert {f.members for f in enumerate_spectrum(S)} == _all_filters_brute(S)


def _germ_classes_brute(S, filters):
    germs = []
    for xi in filters:
        for s in range(S.size):
            if s != S.zero and int(S.source[s]) in xi.members:
                germs.append(germ_canonical(S, s, xi))
    classes = []
    for g in germs:
        for c in classes:
            if germs_equal_by_definition(S, g, c[0]):
                c.append(g)
                break
        else:
            classes.append([g])
    return classes


@pytest.mark.parametrize("name", ["symmetric_inverse_3", "clifford_z6_z3", "qdnotr_k3", "brandt_z2_2"])
def test_germ_count_matches_definition(name):
    S = load_catalog(name).semigroup
    T = enumerate_groupoid(S)
    classes = _germ_classes_brute(S, enumerate_spectrum(S))
    assert len(T) == len(classes)
    # the canonical representative is a class invariant
    for c in classes:
        assert len({g.canonical for g in c}) == 1


def test_theta_domain():
    S = symmetric_inverse_monoid(2)
    e1 = S.index("[1->1]")
    s = S.index("[2->1]")
    with pytest.raises(DomainViolation):
        theta(S, s, principal_filter(S, e1))
    e2 = S.index("[2->2]")
    assert theta(S, s, principal_filter(S, e2)).principal_at == e1


def test_isolated_certificate_cover():
    S = symmetric_inverse_monoid(3)
    top = S.index("[1->1,2->2,3->3]")
    cert = isolated_certificate(S, top)
    assert cert.valid and len(cert.cover) == 3
    rank1 = S.index("[1->1]")
    assert isolated_certificate(S, rank1).cover == (S.zero,)


def test_tower_top_is_not_isolated_in_family():
    S = load_catalog("tower_truncated").semigroup
    E = S.idempotent_list()
    flags = [isolated_certificate(S, e).isolated_in_family for e in E]
    assert flags.count(False) == 1


def test_brandt_structure_detection():
    B = brandt_structure(brandt(cyclic_group(3), 2))
    assert B is not None and len(B.nonzero_idempotents) == 2 and len(B.subgroup) == 3
    assert brandt_structure(qdnotr_family(3, unital=False)) is not None
    assert brandt_structure(qdnotr_family(3)) is None
    assert brandt_structure(symmetric_inverse_monoid(2)) is None


def test_minimality():
    assert is_minimal(brandt(cyclic_group(2), 3))
    assert not is_minimal(chain(3))


def test_structure_report_json():
    rep = grpdmin_check(load_catalog("brandt_z3_4").semigroup).to_json()
    assert rep["brandt_structure"] and rep["group_order"] == 3 and rep["nonzero_idempotents"] == 4
    rep = grpdmin_check(load_catalog("brandt_z_window").semigroup).to_json()
    assert rep["group_order"] == "infinite" and rep["quasi_diagonal"]
