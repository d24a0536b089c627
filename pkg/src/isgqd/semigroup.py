"""Finite inverse semigroups as validated multiplication tables, with Green's relations.

Elements are dense integer indices carrying string labels.  A zero element is
mandatory.  Besides fully materialized semigroups we also support *windows*:
a finite set of elements of an infinite inverse semigroup whose table has
``-1`` wherever the product falls outside the window.  Windows are not closed
under multiplication, so every routine below treats ``-1`` as "unknown".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    BadZero,
    IdempotentsDontCommute,
    NoUniqueInverse,
    NotAssociative,
    NotIdempotent,
    NotSameDClass,
    SemigroupError,
)
from .groups import GroupTable, group_from_table

OUTSIDE = -1


@dataclass(frozen=True, eq=False)
class InverseSemigroup:
    elements: tuple[str, ...]
    mul: np.ndarray
    zero: int
    star: np.ndarray
    closed: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def padded(self) -> np.ndarray:
        """Table with an extra all-``OUTSIDE`` row and column, so that indexing by -1 is safe."""
        n = self.size
        out = np.full((n + 1, n + 1), OUTSIDE, dtype=np.int64)
        out[:n, :n] = self.mul
        return out

    @cached_property
    def source(self) -> np.ndarray:
        """s*s for every s."""
        return self.mul[self.star, np.arange(self.size)]

    @cached_property
    def range_(self) -> np.ndarray:
        """ss* for every s."""
        return self.mul[np.arange(self.size), self.star]

    @cached_property
    def idempotent_mask(self) -> np.ndarray:
        n = self.size
        return self.mul[np.arange(n), np.arange(n)] == np.arange(n)

    def idempotent_list(self) -> list[int]:
        return np.flatnonzero(self.idempotent_mask).tolist()

    def product(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def index(self, label: str) -> int:
        return self.elements.index(label)

    def unit(self) -> int | None:
        """Index of a two-sided identity, if there is one in the table."""
        ar = np.arange(self.size)
        for u in self.idempotent_list():
            if (self.mul[u] == ar).all() and (self.mul[:, u] == ar).all():
                return u
        return None


# -- validation -------------------------------------------------------------


def _check_associative(padded: np.ndarray, n: int, closed: bool, block_cells: int = 4_000_000) -> None:
    mul = padded[:n, :n]
    rows = max(1, block_cells // max(1, n * n))
    for start in range(0, n, rows):
        A = np.arange(start, min(n, start + rows))
        ab = mul[A]  # (b, n)
        left = padded[ab][:, :, :n]  # (ab)c
        right = np.take(padded[A], padded[:n, :n], axis=1)  # a(bc)
        if closed:
            bad = left != right
        else:
            bad = (left != right) & (left != OUTSIDE) & (right != OUTSIDE)
        if bad.any():
            i, b, c = np.argwhere(bad)[0]
            raise NotAssociative((A[i], b, c))


def _compute_star(padded: np.ndarray, n: int) -> np.ndarray:
    ar = np.arange(n)
    mul = padded[:n, :n]
    sts = padded[mul, ar[:, None]]  # [s, t] -> (st)s
    tst = padded[mul.T, ar[None, :]]  # [s, t] -> (ts)t
    cand = (sts == ar[:, None]) & (tst == ar[None, :])
    counts = cand.sum(axis=1)
    bad = np.flatnonzero(counts != 1)
    if bad.size:
        s = int(bad[0])
        raise NoUniqueInverse(s, np.flatnonzero(cand[s]))
    return np.argmax(cand, axis=1)


def _check_idempotents_commute(mul: np.ndarray) -> None:
    n = mul.shape[0]
    E = np.flatnonzero(mul[np.arange(n), np.arange(n)] == np.arange(n))
    sub = mul[np.ix_(E, E)]
    bad = np.argwhere(sub != sub.T)
    if bad.size:
        i, j = bad[0]
        raise IdempotentsDontCommute((E[i], E[j]))


def build_from_table(elements: Sequence[str], mul, zero: int, *, meta: dict | None = None) -> InverseSemigroup:
    """Validate a multiplication table and return the inverse semigroup it defines."""
    elements = tuple(str(e) for e in elements)
    mul = np.asarray(mul, dtype=np.int64)
    n = len(elements)
    if mul.ndim != 2 or mul.shape != (n, n):
        raise SemigroupError(f"table must be {n}x{n}, got {mul.shape}")
    if len(set(elements)) != n:
        raise SemigroupError("element labels must be distinct")
    if not 0 <= zero < n:
        raise BadZero(f"zero index {zero} out of range")
    if ((mul < 0) | (mul >= n)).any():
        raise SemigroupError("table entries out of range")
    if (mul[zero] != zero).any() or (mul[:, zero] != zero).any():
        raise BadZero(f"element {zero} is not a zero")
    padded = np.full((n + 1, n + 1), OUTSIDE, dtype=np.int64)
    padded[:n, :n] = mul
    _check_associative(padded, n, closed=True)
    star = _compute_star(padded, n)
    _check_idempotents_commute(mul)
    return InverseSemigroup(elements, mul, int(zero), star, True, dict(meta or {}))


def build_window(elements: Sequence[str], mul, zero: int, star, *, meta: dict | None = None,
                 check_associativity: bool = False) -> InverseSemigroup:
    """Wrap a partial table (``-1`` = product outside the window).

    Inverses are supplied by the caller (they are always inside a symmetric
    window) and cross-checked against the defining equations where defined.
    Full associativity is cubic; it is opt-in and skips undefined products.
    """
    elements = tuple(str(e) for e in elements)
    mul = np.asarray(mul, dtype=np.int64)
    star = np.asarray(star, dtype=np.int64)
    n = len(elements)
    if mul.shape != (n, n):
        raise SemigroupError(f"table must be {n}x{n}")
    if (mul[zero] != zero).any() or (mul[:, zero] != zero).any():
        raise BadZero(f"element {zero} is not a zero")
    padded = np.full((n + 1, n + 1), OUTSIDE, dtype=np.int64)
    padded[:n, :n] = mul
    computed = _compute_star(padded, n)
    if not (computed == star).all():
        s = int(np.flatnonzero(computed != star)[0])
        raise NoUniqueInverse(s, [computed[s], star[s]])
    if check_associativity:
        _check_associative(padded, n, closed=False)
    S = InverseSemigroup(elements, mul, int(zero), star, False, dict(meta or {}))
    diag = S.mul[np.arange(n), np.arange(n)]
    if (diag[S.source] != S.source).any() or (diag[S.range_] != S.range_).any():
        raise SemigroupError("s*s or ss* is not idempotent")
    return S


def adjoin_zero(elements: Sequence[str], mul, label: str = "0") -> tuple[list[str], np.ndarray, int]:
    """Append a fresh zero to a table; returns (elements, table, zero index)."""
    mul = np.asarray(mul, dtype=np.int64)
    n = len(elements)
    out = np.full((n + 1, n + 1), n, dtype=np.int64)
    out[:n, :n] = mul
    return list(elements) + [label], out, n


def find_zero(mul) -> int | None:
    mul = np.asarray(mul)
    n = mul.shape[0]
    for z in range(n):
        if (mul[z] == z).all() and (mul[:, z] == z).all():
            return z
    return None


def idempotents(S: InverseSemigroup) -> list[int]:
    return S.idempotent_list()


# -- natural partial order -------------------------------------------------


@dataclass(frozen=True, eq=False)
class PartialOrderOracle:
    leq: np.ndarray  # leq[s, t] is s <= t

    def __call__(self, s: int, t: int) -> bool:
        return bool(self.leq[s, t])


def natural_order(S: InverseSemigroup) -> PartialOrderOracle:
    """s <= t iff s = te for an idempotent e; cross-checked against s = ft."""
    n = S.size
    E = np.array(S.idempotent_list())
    right = np.zeros((n, n), dtype=bool)
    left = np.zeros((n, n), dtype=bool)
    ar = np.arange(n)
    for e in E:
        te = S.mul[:, e]
        ok = te >= 0
        right[te[ok], ar[ok]] = True
        ft = S.mul[e, :]
        ok = ft >= 0
        left[ft[ok], ar[ok]] = True
    if S.closed and not (left == right).all():
        s, t = np.argwhere(left != right)[0]
        raise SemigroupError(f"order tests disagree on ({s}, {t})")
    return PartialOrderOracle(right | left if not S.closed else right)


def natural_leq(S: InverseSemigroup, s: int, t: int) -> bool:
    """True iff s <= t in the natural partial order."""
    row = S.mul[t, S.idempotent_mask]
    col = S.mul[S.idempotent_mask, t]
    via_right = bool((row == s).any())
    via_left = bool((col == s).any())
    if S.closed and via_right != via_left:
        raise SemigroupError(f"order tests disagree on ({s}, {t})")
    return via_right or via_left


# -- Green's relations -----------------------------------------------------


def _dense_ids(keys: Sequence) -> np.ndarray:
    seen: dict = {}
    out = np.empty(len(keys), dtype=np.int64)
    for i, k in enumerate(keys):
        out[i] = seen.setdefault(k, len(seen))
    return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True, eq=False)
class MaximalSubgroup:
    idempotent: int
    members: tuple[int, ...]
    group: GroupTable | None  # None when the H-class is not materialized (windows)


@dataclass(frozen=True, eq=False)
class GreenClasses:
    l_class: np.ndarray
    r_class: np.ndarray
    h_class: np.ndarray
    d_class: np.ndarray
    d_idempotents: list[list[int]]
    max_subgroups: list[MaximalSubgroup]

    @property
    def n_d(self) -> int:
        return len(self.d_idempotents)

    def members(self, kind: str, cid: int) -> list[int]:
        arr = {"L": self.l_class, "R": self.r_class, "H": self.h_class, "D": self.d_class}[kind]
        return np.flatnonzero(arr == cid).tolist()

    def d_members(self, d: int) -> list[int]:
        return self.members("D", d)

    def count(self, kind: str) -> int:
        arr = {"L": self.l_class, "R": self.r_class, "H": self.h_class, "D": self.d_class}[kind]
        return int(arr.max()) + 1 if arr.size else 0

    def subgroup_at(self, e: int) -> MaximalSubgroup:
        for g in self.max_subgroups:
            if g.idempotent == e:
                return g
        raise NotIdempotent(f"{e} is not an idempotent")


def _hclass_group(S: InverseSemigroup, members: list[int], e: int) -> GroupTable:
    idx = {m: i for i, m in enumerate(members)}
    sub = S.mul[np.ix_(members, members)]
    try:
        table = np.vectorize(idx.__getitem__)(sub)
    except KeyError as exc:
        raise SemigroupError(f"H-class of {e} is not closed under multiplication") from exc
    return group_from_table([S.elements[m] for m in members], table, idx[e])


def green_partition(S: InverseSemigroup) -> GreenClasses:
    """L, R, H, D classes; D is computed both as closure(L u R) and as L∘R and the two must agree."""
    n = S.size
    src, rng = S.source, S.range_
    l_class = _dense_ids(src.tolist())
    r_class = _dense_ids(rng.tolist())
    h_class = _dense_ids(list(zip(src.tolist(), rng.tolist())))

    uf = _UnionFind(n)
    for s in range(n):
        uf.union(s, int(src[s]))  # s L s*s
        uf.union(s, int(rng[s]))  # s R ss*
    d_closure = _dense_ids([uf.find(s) for s in range(n)])

    # One step: s D t iff some u has u*u = s*s and uu* = tt*.
    E = S.idempotent_list()
    epos = {e: i for i, e in enumerate(E)}
    conn = np.zeros((len(E), len(E)), dtype=bool)
    conn[[epos[int(x)] for x in src], [epos[int(x)] for x in rng]] = True
    # conn must already be an equivalence relation on idempotents
    if not (conn == conn.T).all() or not np.diag(conn).all():
        raise SemigroupError("idempotent D-relation is not symmetric/reflexive")
    if ((conn.astype(np.int64) @ conn.astype(np.int64) > 0) & ~conn).any():
        raise SemigroupError("L∘R is not transitive on idempotents")
    comp = _dense_ids([tuple(np.flatnonzero(conn[epos[int(src[s])]]).tolist()) for s in range(n)])
    if not (_dense_ids(comp.tolist()) == d_closure).all():
        raise SemigroupError("closure(L u R) differs from L∘R")

    d_idem: list[list[int]] = [[] for _ in range(int(d_closure.max()) + 1)]
    for e in E:
        d_idem[int(d_closure[e])].append(e)

    subgroups = []
    for e in E:
        members = np.flatnonzero(h_class == h_class[e]).tolist()
        group = _hclass_group(S, members, e) if S.closed else None
        subgroups.append(MaximalSubgroup(e, tuple(members), group))
    return GreenClasses(l_class, r_class, h_class, d_closure, d_idem, subgroups)


def connecting_elements(S: InverseSemigroup, G: GreenClasses, d: int, e0: int) -> dict[int, int]:
    """For each idempotent f of D-class d, the smallest r with r*r = e0 and rr* = f (r_{e0} = e0)."""
    if not S.idempotent_mask[e0]:
        raise NotIdempotent(f"{e0} is not an idempotent")
    if G.d_class[e0] != d:
        raise NotSameDClass(f"{e0} is not in D-class {d}")
    out = {}
    for f in G.d_idempotents[d]:
        if f == e0:
            out[f] = e0
            continue
        cands = np.flatnonzero((S.source == e0) & (S.range_ == f))
        if not cands.size:
            raise SemigroupError(f"no connecting element from {e0} to {f}")
        out[f] = int(cands[0])
    return out


def hclass_bijection(S: InverseSemigroup, d: int, e0: int, G: GreenClasses | None = None) -> dict[int, int]:
    """The map s -> r*_{ss*} s r_{s*s} from D-class d onto the H-class of e0.

    Entries whose value falls outside a window are omitted.
    """
    G = G or green_partition(S)
    r = connecting_elements(S, G, d, e0)
    out = {}
    for s in G.d_members(d):
        a = S.padded[S.star[r[int(S.range_[s])]], s]
        b = S.padded[a, r[int(S.source[s])]]
        if b != OUTSIDE:
            out[s] = int(b)
    return out


def order_equality_on_dclasses(S: InverseSemigroup, G: GreenClasses | None = None) -> tuple[bool, tuple[int, int] | None]:
    """Checks that s D t and s >= t force s = t.  Returns (ok, witness (s, t) with s > t)."""
    G = G or green_partition(S)
    leq = natural_order(S).leq
    same_d = G.d_class[:, None] == G.d_class[None, :]
    strict = leq & same_d & ~np.eye(S.size, dtype=bool)  # strict[t, s]: t < s
    if strict.any():
        t, s = np.argwhere(strict)[0]
        return False, (int(s), int(t))
    return True, None


def is_0_bisimple(S: InverseSemigroup, G: GreenClasses | None = None) -> bool:
    G = G or green_partition(S)
    return G.n_d in (1, 2)


# -- exhaustive invariant checks ---------------------------------------------


def check_hclass_multiplication(S: InverseSemigroup, G: GreenClasses | None = None) -> None:
    """For every s and H-class H:
    H ⊆ s*s·S iff H meets s*s·S, and in that case sH = H_e^{s f s*} (same L-class as H).

    Raises SemigroupError on the first violation; undefined window products are skipped.
    """
    G = G or green_partition(S)
    n = S.size
    src, rng = S.source, S.range_
    # fixed[s, x]: s*s x == x, i.e. x ∈ s*s·S
    fixed = S.padded[src][:, :n] == np.arange(n)[None, :]
    nh = G.count("H")
    hsize = np.bincount(G.h_class, minlength=nh)
    for s in range(n):
        inside = np.bincount(G.h_class[fixed[s]], minlength=nh)
        partial = (inside > 0) & (inside < hsize)
        if partial.any():
            h = int(np.flatnonzero(partial)[0])
            raise SemigroupError(f"H-class {h} meets but is not contained in s*s·S for s={s}")
        xs = np.flatnonzero(fixed[s])
        if not xs.size:
            continue
        sx = S.mul[s, xs]
        ok = sx != OUTSIDE
        xs, sx = xs[ok], sx[ok]
        # same L-class: (sx)*(sx) = x*x
        if (src[sx] != src[xs]).any():
            raise SemigroupError(f"s x leaves the L-class of x for s={s}")
        # sH_e^f = H_e^{s f s*}
        sfs = S.padded[S.padded[s, rng[xs]], S.star[s]]
        good = sfs != OUTSIDE
        if (rng[sx][good] != sfs[good]).any():
            raise SemigroupError(f"s H_e^f is not H_e^(s f s*) for s={s}")
        # sH is a single H-class: the map x -> sx is injective and classes go to classes
        pairs = set(zip(G.h_class[xs].tolist(), G.h_class[sx].tolist()))
        if len({a for a, _ in pairs}) != len(pairs):
            raise SemigroupError(f"s maps an H-class into several H-classes for s={s}")
        if len(set(sx.tolist())) != len(sx):
            raise SemigroupError(f"left multiplication by s={s} is not injective on s*s·S")
        # injective between classes of equal size, hence onto the target class
        if S.closed and any(hsize[a] != hsize[b] for a, b in pairs):
            raise SemigroupError(f"s H is not a whole H-class for s={s}")


def check_inverse_axioms(S: InverseSemigroup) -> None:
    """(s*)* = s, s s* and s* s idempotent, order compatibility with * and left multiplication."""
    n = S.size
    ar = np.arange(n)
    if not (S.star[S.star] == ar).all():
        raise SemigroupError("(s*)* != s")
    idem = S.idempotent_mask
    if not idem[S.source].all() or not idem[S.range_].all():
        raise SemigroupError("s*s or ss* not idempotent")
    if not S.closed:
        return
    leq = natural_order(S).leq
    s_idx, t_idx = np.nonzero(leq)
    if not leq[S.star[s_idx], S.star[t_idx]].all():
        raise SemigroupError("s <= t does not imply s* <= t*")
    us = S.mul[:, s_idx]
    ut = S.mul[:, t_idx]
    if not leq[us, ut].all():
        raise SemigroupError("s <= t does not imply us <= ut")


def check_subgroups(G: GreenClasses) -> None:
    for sg in G.max_subgroups:
        if sg.group is None:
            continue
        g = sg.group
        # group_from_table already validated the axioms; check inverses explicitly once more
        if not (g.mul[np.arange(g.order), g.inverse] == g.unit).all():
            raise SemigroupError(f"maximal subgroup at {sg.idempotent} lacks inverses")
