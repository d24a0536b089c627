"""Acceptance criteria 1-11. Each test prints one PASS/FAIL line in the terminal summary."""

import json
import time
from fractions import Fraction

import numpy as np
import pytest

from isgqd.catalog import load_catalog
from isgqd.constructions import brandt, cyclic_group, direct_product, group_from_table, trivial_group
from isgqd.operators import check_regular_identities, left_regular, norm_equal_check, right_regular
from isgqd.qd import (
    Strategy,
    berg_bound,
    brandt_generators,
    default_witnesses,
    global_qd_projection,
    isolated_subgroup_projection,
    qd_nonfl_projection,
    qd_series,
)
from isgqd.reports import analyze_report, dumps, qd_reports, trace_report
from isgqd.semigroup import (
    check_hclass_multiplication,
    check_inverse_axioms,
    check_subgroups,
    green_partition,
)
from isgqd.spectrum import enumerate_groupoid, enumerate_spectrum, grpdmin_check
from isgqd.traces import (
    grpdmin_trace,
    is_faithful,
    is_state,
    is_tracial,
    qdnotr_trace_margin,
    unit_summand_trace,
)

c = pytest.mark.criterion


def _s3():
    from itertools import permutations

    perms = list(permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    mul = [[idx[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]
    return group_from_table(["".join(map(str, p)) for p in perms], mul)


GROUPS = {
    "trivial": trivial_group(),
    "Z2": cyclic_group(2),
    "Z3": cyclic_group(3),
    "Z4": cyclic_group(4),
    "Z2xZ2": direct_product(cyclic_group(2), cyclic_group(2)),
    "Z5": cyclic_group(5),
    "Z6": cyclic_group(6),
    "S3": _s3(),
}


@c(1, "axiom suite on the catalog")
def test_criterion_1_axioms(catalog):
    families = {S.meta.get("family") for S in catalog.values()}
    assert len(catalog) >= 10
    assert {"brandt", "qdnotr", "symmetric_inverse", "clifford", "tower"} <= families
    t0 = time.perf_counter()
    for name, S in catalog.items():
        check_inverse_axioms(S)
        G = green_partition(S)  # cross-checks closure(L u R) against L∘R
        assert (G.l_class == np.unique(S.source, return_inverse=True)[1]).all(), name
        assert (G.r_class == np.unique(S.range_, return_inverse=True)[1]).all(), name
        check_subgroups(G)
        check_hclass_multiplication(S, G)
    assert time.perf_counter() - t0 < 10.0


EXPECTED_BRANDT = {
    "brandt_trivial_1": True, "brandt_trivial_2_partial": True, "brandt_z2_2": True, "brandt_z3_4": True,
    "brandt_z_window": True, "group_z5_zero": True, "qdnotr_T_k3": True,
    "symmetric_inverse_2": False, "symmetric_inverse_3": False,
    "clifford_z2_identity": False, "clifford_z2_collapse": False, "clifford_z6_z3": False,
    "chain_three": False, "semilattice_square": False,
}


@c(2, "structure equivalence verdicts agree")
def test_criterion_2_structure(catalog):
    for name, S in catalog.items():
        rep = grpdmin_check(S)  # raises if the three verdicts differ
        assert rep.condition2 == rep.condition3 == rep.condition4, name
        if name in EXPECTED_BRANDT:
            assert rep.condition4 is EXPECTED_BRANDT[name], name


@c(3, "filter and germ counts for Brandt semigroups")
def test_criterion_3_groupoid_counts():
    for H in GROUPS.values():
        for k in (1, 2, 3, 4):
            S = brandt(H, k)
            # principal filters at the k non-zero idempotents; one germ per non-zero element
            assert len(enumerate_spectrum(S)) == k
            assert len(enumerate_groupoid(S)) == k * k * H.order
    S = load_catalog("brandt_z3_4").semigroup
    assert (len(enumerate_spectrum(S)), len(enumerate_groupoid(S))) == (4, 48)


@c(4, "regular representation identities on every catalog spec")
def test_criterion_4_identities(catalog):
    for name, S in catalog.items():
        rep = check_regular_identities(S)
        assert rep.ok, (name, rep)


@c(5, "FULL strategy reaches an exact identity projection")
def test_criterion_5_full_strategy(catalog):
    for name, S in catalog.items():
        if not S.closed:
            continue
        reports = qd_series(S, 3, Strategy.FULL)
        assert reports[-1].max_commutator == 0.0, name
        assert reports[-1].is_identity, name
        for r in reports:
            class_max = max(v["max_commutator"] for v in r.per_class.values())
            assert r.max_commutator == class_max, name


@c(6, "Berg witness on brandt(Z,2) with window 200")
def test_criterion_6_berg_window():
    t0 = time.perf_counter()
    S = load_catalog("brandt_z_window").semigroup
    assert S.meta["group"].N == 200
    G = green_partition(S)
    W = default_witnesses(S, G, Strategy.BERG_Z)
    F = brandt_generators(S)
    D = list(range(G.n_d))
    for n in (4, 8, 16):
        _, r = global_qd_projection(S, n, F, D, W, G, probes=[], advance=False)
        assert r.max_commutator <= berg_bound(n) + r.defect + 1e-9, n
        assert r.defect == 0.0
    for n in range(1, 13):
        _, r = global_qd_projection(S, n, F, D, W, G, probes=[])
        assert r.max_commutator <= 1.0 / n + 1e-9, n
    assert time.perf_counter() - t0 < 60.0


def _isolated_cases():
    I3 = load_catalog("symmetric_inverse_3").semigroup
    yield I3, [e for e in I3.idempotent_list() if I3.elements[e].count("->") == 2]
    for name in ("clifford_z2_identity", "clifford_z2_collapse", "clifford_z6_z3"):
        S = load_catalog(name).semigroup
        yield S, [e for e in S.idempotent_list() if e != S.zero]


@c(7, "isolated subgroup projection commutes and has the R-class as range")
def test_criterion_7_isolated():
    seen = 0
    for S, es in _isolated_cases():
        for e in es:
            _, q = isolated_subgroup_projection(S, e)
            for h in np.flatnonzero((S.source == e) & (S.range_ == e)):
                v = left_regular(S, int(h))
                assert (v @ q - q @ v).mat.count_nonzero() == 0
            support = np.flatnonzero(q.mat.diagonal() > 0.5)
            assert support.tolist() == np.flatnonzero(S.range_ == e).tolist()
            seen += 1
    assert seen >= 3 + 3


@c(8, "free group tower example at n=4, r=2")
def test_criterion_8_nonfl(nonfl_tower):
    t0 = time.perf_counter()
    from isgqd.constructions import ball_size, injectivity_radius

    m = nonfl_tower.depth - 1
    assert injectivity_radius(nonfl_tower, m) >= 6
    assert ball_size(6) == 1457
    _, rep = qd_nonfl_projection(nonfl_tower, n=4, m=m, r=2)
    print(f"nonfl max commutator {rep.max_commutator:.12f} (bound {rep.bound})")
    assert rep.orthogonality_error <= 1e-12
    assert rep.max_commutator <= 0.5 + 1e-12
    assert rep.defect == 0.0
    assert time.perf_counter() - t0 < 120.0


@c(9, "traces: faithful Brandt traces, qdnotr margin 1/k, non-faithful unit summand")
def test_criterion_9_traces():
    for H in GROUPS.values():
        if H.order > 6:
            continue
        for k in range(1, 9):
            if k * k * H.order > 200:
                continue
            S = brandt(H, k)
            tau = grpdmin_trace(S)
            assert is_tracial(S, tau) and is_state(S, tau)
            ok, margin = is_faithful(S, tau)
            assert ok and margin > 0
            e = S.idempotent_list()
            e = next(x for x in e if x != S.zero)
            assert abs((tau.value(e) - tau.value(S.zero)) - 1 / (2 * k)) <= 1e-15
    for k in range(2, 9):
        res = qdnotr_trace_margin(k)
        assert res.margin == Fraction(1, k)
        assert res.is_state
        assert abs(res.linprog_value - 1 / k) <= 1e-9
        tau = unit_summand_trace(k)
        assert is_tracial(tau.S, tau) and is_state(tau.S, tau)
        assert not is_faithful(tau.S, tau)[0]


def _operator_pool():
    for name in ("symmetric_inverse_3", "brandt_z3_4", "clifford_z6_z3", "qdnotr_k4", "tower_truncated"):
        S = load_catalog(name).semigroup
        yield S


@c(10, "norm equality under A(1 - VV*) = 0 on 500 seeded pairs")
def test_criterion_10_norm_equal():
    rng = np.random.default_rng(20240601)
    pool = list(_operator_pool())
    for _ in range(500):
        S = pool[rng.integers(len(pool))]
        s = int(rng.integers(S.size))
        V = left_regular(S, s) if rng.random() < 0.5 else right_regular(S, s)
        # A = B V V* with B a random combination, so A(1 - VV*) = 0 holds
        terms = rng.integers(S.size, size=3)
        B = left_regular(S, int(terms[0])) * rng.normal()
        for t in terms[1:]:
            B = B + left_regular(S, int(t)) * rng.normal()
        A = B @ V @ V.H
        na, nav = norm_equal_check(A, V)
        assert abs(na - nav) <= 1e-9


@c(11, "determinism of JSON reports")
def test_criterion_11_determinism():
    runs = []
    for _ in range(2):
        a = dumps(analyze_report(load_catalog("symmetric_inverse_3"), seed=7))
        q = dumps(qd_reports(load_catalog("brandt_z2_2"), 3, seed=7)[0])
        t = dumps(trace_report(load_catalog("qdnotr_k3"), margin=True, seed=7))
        runs.append((a, q, t))
    assert runs[0] == runs[1]
    json.loads(runs[0][0])
