"""JSON/CSV report builders behind the command-line interface."""

from __future__ import annotations

import csv
import io
import json
from typing import Callable

import numpy as np

from .catalog import LoadedSpec
from .constructions.tower import injectivity_radius
from .errors import NotUnital, Unsupported
from .operators import unit_expansion
from .qd import (
    Strategy,
    brandt_generators,
    default_witnesses,
    global_qd_projection,
    isolated_representation_bound,
    permutation_group_order,
    qd_nonfl_projection,
)
from .semigroup import InverseSemigroup, green_partition, order_equality_on_dclasses
from .spectrum import enumerate_groupoid, enumerate_spectrum, grpdmin_check, isolated_certificate
from .traces import (
    grpdmin_trace,
    is_faithful,
    is_state,
    is_tracial,
    qdnotr_trace_margin,
    trace_space,
    unit_summand_trace,
)

FORMAT_VERSION = 1


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _header(command: str, spec: LoadedSpec, seed: int) -> dict:
    return {"format_version": FORMAT_VERSION, "command": command, "spec": spec.name, "seed": seed}


def _qd_elements(S: InverseSemigroup) -> list[int]:
    if S.closed:
        return list(range(S.size))
    return brandt_generators(S)


def _default_strategy(S: InverseSemigroup) -> Strategy:
    return Strategy.FULL if S.closed else Strategy.BERG_Z


def _tower_section(spec: LoadedSpec) -> dict:
    T = spec.tower
    return {
        "depth": T.depth,
        "ball_radius": T.top_radius,
        "level_orders": [permutation_group_order(lv.a, lv.b) for lv in T.levels],
        "injectivity_radius": [injectivity_radius(T, m) for m in range(T.depth)],
        "top_group": "F2",
        "top_group_amenable": False,
        "top_has_finite_cover": False,
        "note": "the top idempotent of the untruncated tower is a non-isolated limit point",
    }


def analyze_report(spec: LoadedSpec, seed: int = 0, tol: float = 1e-9) -> dict:
    rep = _header("analyze", spec, seed)
    if spec.tower is not None:
        rep["family"] = _tower_section(spec)
    S = spec.semigroup
    if S is None:
        return rep
    G = green_partition(S)
    E = S.idempotent_list()
    rep["semigroup"] = {
        "size": S.size,
        "idempotents": len(E),
        "zero": S.elements[S.zero],
        "closed": S.closed,
        "family": S.meta.get("family", "table"),
        "has_unit": S.unit() is not None,
    }
    dclasses = []
    for d in range(G.n_d):
        e0 = min(G.d_idempotents[d])
        sub = G.subgroup_at(e0)
        order = sub.group.order if sub.group is not None else ("infinite" if e0 != S.zero else 1)
        dclasses.append({"id": d, "size": len(G.d_members(d)), "idempotents": len(G.d_idempotents[d]),
                         "base_idempotent": S.elements[e0], "subgroup_order": order, "subgroup_amenable": True})
    ordeq, witness = order_equality_on_dclasses(S, G)
    rep["green"] = {
        "L": G.count("L"), "R": G.count("R"), "H": G.count("H"), "D": G.n_d,
        "dclasses": dclasses,
        "order_equality": ordeq,
        "order_witness": [S.elements[x] for x in witness] if witness else None,
    }
    filters = enumerate_spectrum(S)
    certs = [isolated_certificate(S, f.principal_at) for f in filters]
    rep["spectrum"] = {
        "filters": len(filters),
        "certificates": [{"idempotent": S.elements[c.idempotent], "cover": [S.elements[x] for x in c.cover],
                          "valid": c.valid, "isolated_in_family": c.isolated_in_family} for c in certs],
    }
    T = enumerate_groupoid(S, seed=seed)
    structure = grpdmin_check(S, G, T)
    rep["groupoid"] = {"germs": len(T), "units": len(T.units), "minimal": structure.minimal,
                       "note": "spectrum is discrete, so density of orbits is checked as equality"}
    rep["structure"] = structure.to_json()

    F = _qd_elements(S)
    W = default_witnesses(S, G, _default_strategy(S))
    _, qd = global_qd_projection(S, 1, F, list(range(G.n_d)), W, G)
    rep["qd"] = {
        "every_subgroup_amenable": all(c["subgroup_amenable"] for c in dclasses),
        "no_dclass_with_infinitely_many_idempotents": True,
        "max_idempotents_per_dclass": max(len(x) for x in G.d_idempotents),
        "witness_report": qd.to_json(),
    }
    isolated = [c for c in certs if c.isolated_in_family]
    nonamenable = [S.elements[c.idempotent] for c in isolated
                   if not dclasses[int(G.d_class[c.idempotent])]["subgroup_amenable"]]
    rep["consistency"] = {
        "qd_verified": qd.schedule_ok,
        "nonamenable_isolated_subgroups": nonamenable,
        "conflict": bool(qd.schedule_ok and nonamenable),
    }
    if S.closed and S.size <= 120:
        top = [c.idempotent for c in isolated if c.idempotent != S.zero]
        if top:
            e = max(top, key=lambda x: len(G.subgroup_at(x).members))
            pairs = isolated_representation_bound(S, e, trials=8, seed=seed, G=G)
            rep["isolated_bound"] = {"idempotent": S.elements[e], "trials": len(pairs),
                                     "holds": all(a <= b + tol for a, b in pairs),
                                     "max_ratio": round(max(a / b for a, b in pairs if b > 0), 12)}
        rep["traces"] = _trace_section(S, structure.brandt, tol)
    return rep


def _trace_section(S: InverseSemigroup, brandt_ok: bool, tol: float) -> dict:
    out: dict = {}
    if unit_expansion(S) is None:
        out["unital"] = False
        return out
    out["unital"] = True
    out["trace_space_dim"] = trace_space(S).dim
    if brandt_ok and S.size > 1:
        tau = grpdmin_trace(S)
        ok, margin = is_faithful(S, tau, tol)
        out["grpdmin_trace"] = {"tracial": is_tracial(S, tau, tol), "state": is_state(S, tau, tol),
                                "faithful": ok, "margin": round(margin, 12)}
    if S.meta.get("family") == "qdnotr" and S.meta.get("unital"):
        out["margin"] = qdnotr_trace_margin(S.meta["k"]).to_json()
    return out


def qd_reports(spec: LoadedSpec, n_max: int, strategy: str | None = None,
               user: Callable[[int], np.ndarray] | None = None, seed: int = 0) -> tuple[dict, str]:
    S = spec.semigroup
    if S is None:
        raise Unsupported("spec does not materialize a semigroup; use nonfl")
    G = green_partition(S)
    st = Strategy(strategy) if strategy else _default_strategy(S)
    W = default_witnesses(S, G, st, user)
    F = _qd_elements(S)
    reports = [global_qd_projection(S, n, F, list(range(G.n_d)), W, G)[1] for n in range(1, n_max + 1)]
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "rank", "max_commutator", "schedule_ok", "defect"])
    for r in reports:
        wr.writerow(r.csv_row())
    ok = all(r.schedule_ok for r in reports)
    rep = _header("qd", spec, seed)
    rep.update({
        "strategy": st.value,
        "elements_checked": len(F),
        "reports": [r.to_json() for r in reports],
        "verdict": "pass" if ok else "schedule-unachievable",
        "reaches_zero": any(r.max_commutator == 0.0 for r in reports),
        "reaches_identity": any(r.is_identity for r in reports),
    })
    return rep, buf.getvalue()


def nonfl_report(spec: LoadedSpec, n: int | None = None, m: int | None = None, r: int | None = None,
                 orientation: str = "corrected", seed: int = 0) -> tuple[dict, str]:
    if spec.tower is None:
        raise Unsupported("nonfl needs a tower spec")
    cfg = dict(spec.raw.get("nonfl", {}))
    n = n if n is not None else cfg.get("n", 4)
    m = m if m is not None else cfg.get("m", spec.tower.depth - 1)
    r = r if r is not None else cfg.get("r", 2)
    _, rep_obj = qd_nonfl_projection(spec.tower, n, m, r, orientation)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["generator", "commutator", "bound", "pass"])
    for g, v in rep_obj.commutators.items():
        wr.writerow([g, f"{v:.12g}", f"{rep_obj.bound:.12g}", int(v <= rep_obj.bound + 1e-9)])
    rep = _header("nonfl", spec, seed)
    rep["report"] = rep_obj.to_json()
    rep["verdict"] = "pass" if rep_obj.passes else "fail"
    return rep, buf.getvalue()


def trace_report(spec: LoadedSpec, margin: bool = False, seed: int = 0, tol: float = 1e-9) -> dict:
    S = spec.semigroup
    if S is None or unit_expansion(S) is None:
        raise NotUnital("the identity is not in the span of the regular representation")
    rep = _header("trace", spec, seed)
    ts = trace_space(S)
    rep["trace_space"] = {"dim": ts.dim, "particular": [round(float(x), 12) for x in ts.particular]}
    structure = grpdmin_check(S)
    rep.update(_trace_section(S, structure.brandt, tol))
    if S.meta.get("family") == "qdnotr" and S.meta.get("unital"):
        tau = unit_summand_trace(S.meta["k"])
        ok, mg = is_faithful(S, tau, tol)
        rep["unit_summand_trace"] = {"tracial": is_tracial(S, tau, tol), "state": is_state(S, tau, tol),
                                     "faithful": ok, "margin": round(mg, 12)}
        if margin:
            rep["margins"] = [qdnotr_trace_margin(k).to_json() for k in range(1, S.meta["k"] + 1)]
    return rep


def groupoid_report(spec: LoadedSpec, seed: int = 0) -> dict:
    S = spec.semigroup
    if S is None:
        raise Unsupported("spec does not materialize a semigroup")
    T = enumerate_groupoid(S, seed=seed)
    rep = _header("groupoid", spec, seed)
    rep["groupoid"] = T.to_json(S)
    return rep
