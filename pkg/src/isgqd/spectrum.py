"""Filters of the idempotent semilattice, the θ-action, and the groupoid of germs.

Every filter of a finite semilattice is principal, so the spectrum is discrete and
filters are identified with the non-zero idempotents generating them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainViolation, InconsistentEquivalence, NotIdempotent, SemigroupError
from .semigroup import (
    OUTSIDE,
    GreenClasses,
    InverseSemigroup,
    green_partition,
    is_0_bisimple,
    order_equality_on_dclasses,
)


@dataclass(frozen=True)
class Filter:
    members: frozenset
    principal_at: int

    def __contains__(self, e: int) -> bool:
        return e in self.members


def _up_set(S: InverseSemigroup, e: int) -> frozenset:
    E = S.idempotent_list()
    return frozenset(f for f in E if S.mul[e, f] == e)


def is_filter(S: InverseSemigroup, members) -> bool:
    """Non-empty, avoids zero, upward closed and closed under products."""
    members = set(members)
    if not members or S.zero in members:
        return False
    E = S.idempotent_list()
    if not members <= set(E):
        return False
    for e in members:
        if not _up_set(S, e) <= members:
            return False
        for f in members:
            if int(S.mul[e, f]) not in members:
                return False
    return True


def principal_filter(S: InverseSemigroup, e: int) -> Filter:
    if not S.idempotent_mask[e] or e == S.zero:
        raise NotIdempotent(f"{e} is not a non-zero idempotent")
    return Filter(_up_set(S, e), e)


def enumerate_spectrum(S: InverseSemigroup) -> list[Filter]:
    """All filters, one per non-zero idempotent, ordered by element index."""
    out = []
    for e in S.idempotent_list():
        if e == S.zero:
            continue
        xi = principal_filter(S, e)
        # the product of all members is the least member, so nothing else can occur
        least = e
        for f in xi.members:
            least = int(S.mul[least, f])
        if least != e or not is_filter(S, xi.members):
            raise SemigroupError(f"up-set of {e} is not a principal filter")
        out.append(xi)
    return out


@dataclass(frozen=True)
class IsolationCertificate:
    idempotent: int
    cover: tuple[int, ...]
    valid: bool
    isolated_in_family: bool  # False only for the top of an untruncated tower


def isolated_certificate(S: InverseSemigroup, e: int) -> IsolationCertificate:
    """Maximal idempotents strictly below e.

    When only the zero lies below e the cover is {0}.
    """
    if not S.idempotent_mask[e]:
        raise NotIdempotent(f"{e} is not an idempotent")
    E = S.idempotent_list()
    below = [f for f in E if f != e and S.mul[e, f] == f]
    cover = tuple(f for f in below if not any(g != f and S.mul[g, f] == f for g in below))
    valid = all(any(S.mul[c, f] == f for c in cover) for f in below)
    in_family = True
    if S.meta.get("family") == "tower" and not S.meta.get("top_has_finite_cover", True):
        top = max(E, key=lambda f: len([g for g in E if S.mul[f, g] == g]))
        in_family = e != top
    return IsolationCertificate(e, cover, valid, in_family)


def theta(S: InverseSemigroup, s: int, xi: Filter) -> Filter:
    """θ_s(ξ) = {e : e >= s f s* for some f in ξ}, defined when s*s ∈ ξ."""
    if int(S.source[s]) not in xi.members:
        raise DomainViolation(f"s*s of element {s} is not in the filter")
    star = int(S.star[s])
    lows = set()
    for f in xi.members:
        sf = S.padded[s, f]
        sfs = S.padded[sf, star]
        if sfs == OUTSIDE:
            raise DomainViolation("s f s* leaves the window")
        lows.add(int(sfs))
    members = frozenset().union(*(_up_set(S, g) for g in lows))
    least = int(S.padded[S.padded[s, xi.principal_at], star])
    if not is_filter(S, members) or least not in members:
        raise SemigroupError("θ_s(ξ) is not a filter")
    return Filter(members, least)


@dataclass(frozen=True)
class Germ:
    s: int = field(compare=False)
    base: Filter
    canonical: int


def germ_canonical(S: InverseSemigroup, s: int, xi: Filter) -> Germ:
    """[s, ξ] with canonical representative s·(least element of ξ)."""
    if int(S.source[s]) not in xi.members:
        raise DomainViolation(f"s*s of element {s} is not in the filter")
    c = int(S.padded[s, xi.principal_at])
    if c == OUTSIDE:
        raise DomainViolation("canonical representative leaves the window")
    return Germ(s, xi, c)


def germs_equal_by_definition(S: InverseSemigroup, g: Germ, h: Germ) -> bool:
    """ξ = ζ and se = te for some e ∈ ξ."""
    if g.base != h.base:
        return False
    return any(S.padded[g.s, e] == S.padded[h.s, e] != OUTSIDE for e in g.base.members)


@dataclass(frozen=True, eq=False)
class GroupoidTable:
    germs: np.ndarray  # canonical element index per germ
    units: list[Filter]
    source: np.ndarray  # unit id per germ
    range_: np.ndarray
    compose: np.ndarray  # compose[g, h] = germ id of g·h, -1 if not composable or outside the window
    unit_germs: np.ndarray  # germ id of each unit

    def __len__(self) -> int:
        return len(self.germs)

    def to_json(self, S: InverseSemigroup) -> dict:
        return {
            "format_version": 1,
            "units": [S.elements[u.principal_at] for u in self.units],
            "germs": [
                {"rep": S.elements[int(g)], "source": int(s), "range": int(r)}
                for g, s, r in zip(self.germs, self.source, self.range_)
            ],
        }


def enumerate_groupoid(S: InverseSemigroup, validate: bool = True, sample: int = 20000, seed: int = 0) -> GroupoidTable:
    """All germs [s, ξ] in canonical form, with source, range and composition."""
    units = enumerate_spectrum(S)
    unit_of = {u.principal_at: i for i, u in enumerate(units)}
    canon = set()
    for u in units:
        e = u.principal_at
        for s in np.flatnonzero(S.mul[S.source, e] == e):
            # s*s >= e
            c = S.padded[s, e]
            if c != OUTSIDE:
                canon.add(int(c))
    germs = np.array(sorted(canon), dtype=np.int64)
    nonzero = np.array([x for x in range(S.size) if x != S.zero], dtype=np.int64)
    if not np.array_equal(germs, nonzero):
        raise SemigroupError("canonical representatives differ from the non-zero elements")
    gid = np.full(S.size, -1, dtype=np.int64)
    gid[germs] = np.arange(len(germs))
    source = np.array([unit_of[int(S.source[g])] for g in germs], dtype=np.int64)
    range_ = np.array([unit_of[int(S.range_[g])] for g in germs], dtype=np.int64)
    prod = S.padded[np.ix_(germs, germs)]
    composable = source[:, None] == range_[None, :]
    compose = np.where(composable & (prod != OUTSIDE), gid[np.where(prod == OUTSIDE, S.zero, prod)], -1)
    if (composable & (prod != OUTSIDE) & (compose < 0)).any():
        raise SemigroupError("composable germs multiplied to zero")
    unit_germs = np.array([gid[u.principal_at] for u in units], dtype=np.int64)
    table = GroupoidTable(germs, units, source, range_, compose, unit_germs)
    if validate:
        _validate_groupoid(S, table, sample, seed)
    return table


def _validate_groupoid(S: InverseSemigroup, T: GroupoidTable, sample: int, seed: int) -> None:
    n = len(T)
    ar = np.arange(n)
    # range(g) = θ_g(source(g))
    for i in range(min(n, 200)):
        g = int(T.germs[i])
        if theta(S, g, T.units[T.source[i]]) != T.units[T.range_[i]]:
            raise SemigroupError("range is not θ of the source")
    # units act trivially
    if (T.compose[T.unit_germs[T.range_], ar] != ar).any() or (T.compose[ar, T.unit_germs[T.source]] != ar).any():
        raise SemigroupError("unit laws fail")
    # inverses
    inv = np.full(S.size, -1, dtype=np.int64)
    inv[T.germs] = ar
    ginv = inv[S.star[T.germs]]
    if (T.compose[ginv, ar] != T.unit_germs[T.source]).any():
        raise SemigroupError("g^-1 g is not the source unit")
    # associativity on composable triples (exhaustive when small, sampled otherwise)
    if n ** 3 <= 8_000_000:
        triples = [(a, b, c) for a in range(n) for b in np.flatnonzero(T.compose[a] >= 0)
                   for c in np.flatnonzero(T.compose[b] >= 0)]
    else:
        rng = np.random.default_rng(seed)
        triples = []
        for a in rng.integers(0, n, size=sample):
            bs = np.flatnonzero(T.compose[a] >= 0)
            if not bs.size:
                continue
            b = int(rng.choice(bs))
            cs = np.flatnonzero(T.compose[b] >= 0)
            if cs.size:
                triples.append((int(a), b, int(rng.choice(cs))))
    for a, b, c in triples:
        ab, bc = T.compose[a, b], T.compose[b, c]
        if ab < 0 or bc < 0:
            continue
        l, r = T.compose[ab, c], T.compose[a, bc]
        if l >= 0 and r >= 0 and l != r:
            raise SemigroupError(f"groupoid composition not associative on {(a, b, c)}")


def is_minimal(S: InverseSemigroup, T: GroupoidTable | None = None) -> bool:
    """Every unit's orbit is the whole unit space (density = equality on a discrete space)."""
    T = T or enumerate_groupoid(S, validate=False)
    k = len(T.units)
    reach = np.zeros((k, k), dtype=bool)
    reach[T.source, T.range_] = True
    return bool(reach.all())


# -- structure checks ------------------------------------------------------------


@dataclass
class BrandtStructure:
    nonzero_idempotents: list[int]
    base: int
    subgroup: list[int]  # members of the H-class of the base idempotent
    phi: dict[int, int]
    coords: dict[int, tuple[int, int, int]]  # s -> (ss*, phi(s), s*s)


def brandt_structure(S: InverseSemigroup) -> BrandtStructure | None:
    """Try to build Φ(s) = (ss*, φ(s), s*s) onto E+ × H × E+; None if it is not an isomorphism.

    Built from s*s, ss* and the multiplication table directly, without the D-relation.
    """
    E = [e for e in S.idempotent_list() if e != S.zero]
    nonzero = [x for x in range(S.size) if x != S.zero]
    if not E:
        return BrandtStructure([], -1, [], {}, {}) if S.size == 1 else None
    e0 = E[0]
    src, rng = S.source, S.range_
    r = {e0: e0}
    for f in E[1:]:
        c = np.flatnonzero((src == e0) & (rng == f))
        if not c.size:
            return None
        r[f] = int(c[0])
    H = np.flatnonzero((src == e0) & (rng == e0)).tolist()
    phi = {}
    for s in nonzero:
        a = S.padded[S.star[r[int(rng[s])]], s]
        b = S.padded[a, r[int(src[s])]]
        if b != OUTSIDE:
            phi[s] = int(b)
    coords = {s: (int(rng[s]), phi[s], int(src[s])) for s in phi}
    if len(set(coords.values())) != len(coords):
        return None
    if S.closed and len(coords) != len(E) ** 2 * len(H):
        return None
    if set(phi.values()) - set(H):
        return None
    nz = np.array(sorted(phi))
    ph = np.full(S.size, OUTSIDE, dtype=np.int64)
    ph[nz] = [phi[s] for s in nz]
    prod = S.padded[np.ix_(nz, nz)]
    match = src[nz][:, None] == rng[nz][None, :]
    if (prod[~match] != S.zero).any():
        return None
    defined = match & (prod != OUTSIDE)
    p = np.where(defined, prod, S.zero)
    if (p[defined] == S.zero).any():
        return None
    if (rng[p][defined] != np.broadcast_to(rng[nz][:, None], p.shape)[defined]).any():
        return None
    if (src[p][defined] != np.broadcast_to(src[nz][None, :], p.shape)[defined]).any():
        return None
    hprod = S.padded[ph[nz][:, None], ph[nz][None, :]]
    ok = defined & (hprod != OUTSIDE) & (ph[p] != OUTSIDE)
    if (ph[p][ok] != hprod[ok]).any():
        return None
    return BrandtStructure(E, e0, H, phi, coords)


@dataclass
class StructureReport:
    minimal: bool
    zero_bisimple: bool
    order_equality: bool
    brandt: bool
    group_order: int | str | None
    n_nonzero_idempotents: int
    subgroups_amenable: bool
    qd: bool | None
    notes: list[str] = field(default_factory=list)

    @property
    def condition2(self) -> bool:
        return self.minimal

    @property
    def condition3(self) -> bool:
        return self.zero_bisimple and self.order_equality

    @property
    def condition4(self) -> bool:
        return self.brandt

    def to_json(self) -> dict:
        return {
            "minimal_and_finite": self.condition2,
            "zero_bisimple": self.zero_bisimple,
            "order_equality": self.order_equality,
            "zero_bisimple_and_order_equality": self.condition3,
            "brandt_structure": self.condition4,
            "group_order": self.group_order,
            "nonzero_idempotents": self.n_nonzero_idempotents,
            "subgroups_amenable": self.subgroups_amenable,
            "quasi_diagonal": self.qd,
            "notes": list(self.notes),
        }


def _subgroups_amenable(S: InverseSemigroup, G: GreenClasses) -> bool:
    if S.closed:
        return True  # finite groups
    grp = S.meta.get("group")
    return bool(getattr(grp, "amenable", False))


def grpdmin_check(S: InverseSemigroup, G: GreenClasses | None = None, T: GroupoidTable | None = None) -> StructureReport:
    """Evaluate minimality, {0-bisimple + order equality} and Brandt structure; they must agree."""
    G = G or green_partition(S)
    T = T or enumerate_groupoid(S, validate=False)
    minimal = is_minimal(S, T)
    bisimple = is_0_bisimple(S, G)
    ordeq, _ = order_equality_on_dclasses(S, G)
    B = brandt_structure(S)
    notes = [
        "finiteness of the reduced algebra is automatic for finite S, so it is reported together with minimality",
        "spectrum is discrete, so minimality is checked as transitivity of the unit orbits",
    ]
    if B is None:
        group_order = None
    elif S.closed:
        group_order = len(B.subgroup)
    else:
        group_order = "infinite"
    amen = _subgroups_amenable(S, G)
    rep = StructureReport(minimal, bisimple, ordeq, B is not None, group_order,
                          len([e for e in S.idempotent_list() if e != S.zero]), amen,
                          (B is not None and amen) if minimal else None, notes)
    verdicts = {rep.condition2, rep.condition3, rep.condition4}
    if len(verdicts) != 1:
        raise InconsistentEquivalence(
            f"structure verdicts disagree: minimal={rep.condition2}, bisimple+order={rep.condition3}, brandt={rep.condition4}"
        )
    return rep
