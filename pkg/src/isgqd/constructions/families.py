"""Example families: Brandt semigroups, Clifford semigroups, symmetric inverse monoids, ..."""

from __future__ import annotations

from itertools import combinations, permutations, product
from math import comb, factorial
from typing import Mapping, Sequence

import numpy as np

from ..errors import FunctorialityViolated, SemigroupError, TooLarge
from ..groups import GroupTable, ZWindow, trivial_group
from ..semigroup import InverseSemigroup, adjoin_zero, build_from_table, build_window, find_zero


def _unit_first(H: GroupTable) -> list[int]:
    return [H.unit] + [h for h in range(H.order) if h != H.unit]


def brandt(H: GroupTable, k: int) -> InverseSemigroup:
    """E+ x H x E+ plus zero, with (f2,h2,e2)(f1,h1,e1) = (f2,h2h1,e1) if e2 = f1 and 0 otherwise.

    Index 0 is the zero; (f, h, e) sits at 1 + (f*k + e)*|H| + position of h,
    the unit of H being listed first.
    """
    if k < 1:
        raise SemigroupError("brandt needs k >= 1")
    horder = _unit_first(H)
    hpos = {h: i for i, h in enumerate(horder)}
    m = H.order
    F, E, Hh = (np.array(c, dtype=np.int64) for c in zip(*product(range(k), range(k), horder)))
    n = k * k * m + 1
    mul = np.zeros((n, n), dtype=np.int64)
    match = E[:, None] == F[None, :]
    hprod = np.vectorize(hpos.__getitem__)(H.mul[Hh[:, None], Hh[None, :]])
    idx = 1 + (F[:, None] * k + E[None, :]) * m + hprod
    mul[1:, 1:] = np.where(match, idx, 0)
    labels = ["0"] + [f"({f + 1},{H.elements[h]},{e + 1})" for f, e, h in zip(F, E, Hh)]
    meta = {"family": "brandt", "k": k, "group": H, "coords": np.stack([F, Hh, E], axis=1)}
    return build_from_table(labels, mul, 0, meta=meta)


def brandt_z_window(k: int, N: int) -> InverseSemigroup:
    """Brandt semigroup over the integers, materialized for |h| <= N.

    Products leaving the window are recorded as -1 in the table.
    """
    if k < 1 or N < 1:
        raise SemigroupError("brandt_z_window needs k >= 1 and N >= 1")
    Z = ZWindow(N)
    hs = np.array(Z.elements, dtype=np.int64)
    m = len(hs)
    F, E, Hh = (np.array(c, dtype=np.int64) for c in zip(*product(range(k), range(k), hs)))
    n = k * k * m + 1
    pos = np.empty(2 * N + 1, dtype=np.int64)
    pos[hs + N] = np.arange(m)
    hsum = Hh[:, None] + Hh[None, :]
    inside = np.abs(hsum) <= N
    idx = 1 + (F[:, None] * k + E[None, :]) * m + pos[np.clip(hsum, -N, N) + N]
    mul = np.zeros((n, n), dtype=np.int64)
    mul[1:, 1:] = np.where(E[:, None] == F[None, :], np.where(inside, idx, -1), 0)
    star = np.zeros(n, dtype=np.int64)
    star[1:] = 1 + (E * k + F) * m + pos[-Hh + N]
    labels = ["0"] + [f"({f + 1},{h},{e + 1})" for f, e, h in zip(F, E, Hh)]
    meta = {"family": "brandt", "k": k, "group": Z, "coords": np.stack([F, Hh, E], axis=1)}
    return build_window(labels, mul, 0, star, meta=meta)


def group_with_zero(H: GroupTable) -> InverseSemigroup:
    label = "0" if "0" not in H.elements else "z"
    elements, mul, zero = adjoin_zero(H.elements, H.mul, label)
    return build_from_table(elements, mul, zero, meta={"family": "group_with_zero", "group": H})


# -- Clifford semigroups --------------------------------------------------------


def _check_meet(meet: np.ndarray) -> None:
    n = meet.shape[0]
    ar = np.arange(n)
    if meet.shape != (n, n) or (meet[ar, ar] != ar).any() or (meet != meet.T).any():
        raise SemigroupError("meet table must be square, idempotent and commutative")
    if (meet[meet] != np.take(meet, meet, axis=1)).any():
        raise SemigroupError("meet table is not associative")


def clifford(labels: Sequence[str], meet, groups: Sequence[GroupTable] | None = None,
             homs: Mapping[tuple[int, int], Sequence[int]] | None = None) -> InverseSemigroup:
    """Semilattice of groups with g_e · h_f = pi_{e,e∧f}(g) pi_{f,e∧f}(h).

    ``homs[(e, f)]`` (for e > f) lists the image in G_f of each element of G_e.
    Maps into a trivial group and identity maps may be omitted.  A zero is
    adjoined unless the bottom idempotent carries the trivial group.
    """
    meet = np.asarray(meet, dtype=np.int64)
    _check_meet(meet)
    k = len(labels)
    groups = list(groups) if groups is not None else [trivial_group()] * k
    homs = {tuple(key): np.asarray(v, dtype=np.int64) for key, v in (homs or {}).items()}
    if len(groups) != k:
        raise SemigroupError("one group per idempotent")

    def pi(e: int, f: int) -> np.ndarray:
        if e == f:
            return np.arange(groups[e].order)
        if (e, f) in homs:
            return homs[(e, f)]
        if groups[f].order == 1:
            return np.zeros(groups[e].order, dtype=np.int64)
        raise FunctorialityViolated((e, f), "(map missing)")

    geq = [(e, f) for e in range(k) for f in range(k) if meet[e, f] == f]
    for e, f in geq:
        p = pi(e, f)
        Ge, Gf = groups[e], groups[f]
        if len(p) != Ge.order or ((p < 0) | (p >= Gf.order)).any():
            raise FunctorialityViolated((e, f), "(bad map shape)")
        if e == f and (e, f) in homs and not (homs[(e, f)] == np.arange(Ge.order)).all():
            raise FunctorialityViolated((e, e, e), "(pi_ee is not the identity)")
        if (p[Ge.mul] != Gf.mul[p[:, None], p[None, :]]).any():
            raise FunctorialityViolated((e, f), "(not a homomorphism)")
    for e1, e2 in geq:
        for e3 in range(k):
            if meet[e2, e3] == e3:
                if (pi(e2, e3)[pi(e1, e2)] != pi(e1, e3)).any():
                    raise FunctorialityViolated((e1, e2, e3))

    offsets = np.concatenate([[0], np.cumsum([g.order for g in groups])])
    n = int(offsets[-1])
    idem_of = np.repeat(np.arange(k), [g.order for g in groups])
    local = np.concatenate([np.arange(g.order) for g in groups])
    mul = np.empty((n, n), dtype=np.int64)
    for x in range(n):
        e, g = idem_of[x], local[x]
        for y in range(n):
            f, h = idem_of[y], local[y]
            m = meet[e, f]
            mul[x, y] = offsets[m] + groups[m].mul[pi(e, m)[g], pi(f, m)[h]]
    names = [f"{groups[e].elements[g]}@{labels[e]}" if groups[e].order > 1 else str(labels[e])
             for e, g in zip(idem_of, local)]
    zero = find_zero(mul)
    if zero is None:
        names, mul, zero = adjoin_zero(names, mul)
    meta = {"family": "clifford", "idempotent_labels": list(labels)}
    S = build_from_table(names, mul, zero, meta=meta)
    _check_central_idempotents(S)
    return S


def _check_central_idempotents(S: InverseSemigroup) -> None:
    E = S.idempotent_list()
    if (S.mul[E, :] != S.mul[:, E].T).any():
        raise SemigroupError("idempotents are not central")


def semilattice(labels: Sequence[str], meet) -> InverseSemigroup:
    return clifford(labels, meet)


def semilattice_from_sets(sets: Mapping[str, frozenset]) -> InverseSemigroup:
    """Semilattice of the given sets under intersection (must be closed under it)."""
    labels = list(sets)
    vals = [frozenset(sets[l]) for l in labels]
    pos = {v: i for i, v in enumerate(vals)}
    if len(pos) != len(vals):
        raise SemigroupError("sets must be distinct")
    try:
        meet = [[pos[a & b] for b in vals] for a in vals]
    except KeyError as exc:
        raise SemigroupError("family not closed under intersection") from exc
    return semilattice(labels, meet)


def chain(k: int) -> InverseSemigroup:
    """The chain e_0 < e_1 < ... < e_{k-1}; e_0 is the zero."""
    ar = np.arange(k)
    return semilattice([f"e{i}" if i else "0" for i in range(k)], np.minimum(ar[:, None], ar[None, :]))


def clifford_chain(groups: Sequence[GroupTable], homs: Mapping[tuple[int, int], Sequence[int]] | None = None) -> InverseSemigroup:
    """Clifford semigroup over the chain 1_0 < 1_1 < ... (index 0 is the bottom)."""
    k = len(groups)
    ar = np.arange(k)
    return clifford([f"1_{i}" for i in range(k)], np.minimum(ar[:, None], ar[None, :]), groups, homs)


# -- partial bijections -----------------------------------------------------------


def _compose_partial(s: tuple[int, ...], t: tuple[int, ...]) -> tuple[int, ...]:
    """s ∘ t (apply t first); -1 marks an undefined point."""
    return tuple(-1 if t[x] < 0 else s[t[x]] for x in range(len(t)))


def _invert_partial(s: tuple[int, ...]) -> tuple[int, ...]:
    out = [-1] * len(s)
    for x, y in enumerate(s):
        if y >= 0:
            out[y] = x
    return tuple(out)


def _partial_label(s: tuple[int, ...]) -> str:
    return "[" + ",".join(f"{x + 1}->{y + 1}" for x, y in enumerate(s) if y >= 0) + "]"


def _rank(s: tuple[int, ...]) -> int:
    return sum(1 for y in s if y >= 0)


def _semigroup_of_partials(maps: list[tuple[int, ...]], meta: dict) -> InverseSemigroup:
    maps = sorted(set(maps), key=lambda s: (_rank(s), [(x, y) for x, y in enumerate(s) if y >= 0]))
    index = {s: i for i, s in enumerate(maps)}
    n = len(maps)
    mul = np.array([[index[_compose_partial(s, t)] for t in maps] for s in maps], dtype=np.int64)
    zero = index[tuple([-1] * len(maps[0]))]
    S = build_from_table([_partial_label(s) for s in maps], mul, zero, meta=meta)
    S.meta["maps"] = maps
    return S


def symmetric_inverse_monoid(n: int) -> InverseSemigroup:
    """All partial bijections of {1..n} under composition (st = s∘t); the empty map is the zero."""
    if n > 4:
        raise TooLarge(f"symmetric inverse monoid I_{n} has {sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1))} elements")
    if n < 0:
        raise SemigroupError("n must be non-negative")
    maps = []
    for k in range(n + 1):
        for dom in combinations(range(n), k):
            for img in permutations(range(n), k):
                s = [-1] * n
                for x, y in zip(dom, img):
                    s[x] = y
                maps.append(tuple(s))
    if n == 0:
        return build_from_table(["[]"], [[0]], 0, meta={"family": "symmetric_inverse", "n": 0})
    return _semigroup_of_partials(maps, {"family": "symmetric_inverse", "n": n})


def from_partial_bijections(gens: Sequence[Sequence[int]], degree: int, limit: int = 2000) -> InverseSemigroup:
    """Inverse semigroup generated by partial bijections (0-based images, -1 = undefined), plus the empty map."""
    gens = [tuple(int(y) for y in g) for g in gens]
    for g in gens:
        img = [y for y in g if y >= 0]
        if len(g) != degree or len(set(img)) != len(img) or any(y >= degree for y in img):
            raise SemigroupError(f"not a partial bijection of degree {degree}: {g}")
    gens = gens + [_invert_partial(g) for g in gens]
    elems = {tuple([-1] * degree)} | set(gens)
    frontier = list(elems)
    while frontier:
        nxt = []
        for s in frontier:
            for g in gens:
                for p in (_compose_partial(s, g), _compose_partial(g, s)):
                    if p not in elems:
                        elems.add(p)
                        nxt.append(p)
        if len(elems) > limit:
            raise TooLarge(f"generated semigroup exceeds {limit} elements")
        frontier = nxt
    return _semigroup_of_partials(list(elems), {"family": "partial_bijections", "degree": degree})


# -- the no-faithful-trace family -----------------------------------------------------


def qdnotr_family(k: int, unital: bool = True) -> InverseSemigroup:
    """T = E+ x E+ plus zero with (f2,e2)(f1,e1) = (f2,e1) iff e2 = f1, and optionally a unit adjoined."""
    if k < 1:
        raise SemigroupError("k must be >= 1")
    pairs = list(product(range(k), range(k)))
    n = len(pairs) + 1 + int(unital)
    mul = np.zeros((n, n), dtype=np.int64)
    for i, (f2, e2) in enumerate(pairs, start=1):
        for j, (f1, e1) in enumerate(pairs, start=1):
            if e2 == f1:
                mul[i, j] = 1 + f2 * k + e1
    if unital:
        u = n - 1
        mul[u, :] = np.arange(n)
        mul[:, u] = np.arange(n)
    labels = ["0"] + [f"({f + 1},{e + 1})" for f, e in pairs] + (["1"] if unital else [])
    meta = {"family": "qdnotr", "k": k, "unital": unital}
    if unital:
        meta["unit"] = n - 1
    return build_from_table(labels, mul, 0, meta=meta)

