"""Finite group tables and descriptors for the infinite groups the package handles."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .errors import GroupAxiomError


@dataclass(frozen=True, eq=False)
class GroupTable:
    """A finite group given by its multiplication table.

    ``mul[i, j]`` is the index of ``elements[i] * elements[j]``.
    """

    elements: tuple[str, ...]
    mul: np.ndarray
    unit: int
    inverse: np.ndarray
    amenable: bool = field(default=True, init=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def finite(self) -> bool:
        return True

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.unit:
            x = int(self.mul[x, g])
            k += 1
        return k

    def is_abelian(self) -> bool:
        return bool((self.mul == self.mul.T).all())

    def to_json(self) -> dict:
        return {"elements": list(self.elements), "mul": self.mul.tolist(), "unit": self.unit}


def group_from_table(elements: Sequence[str], mul, unit: int | None = None) -> GroupTable:
    mul = np.asarray(mul, dtype=np.int64)
    n = len(elements)
    if mul.shape != (n, n) or n == 0:
        raise GroupAxiomError(f"group table must be non-empty and square, got {mul.shape}")
    if ((mul < 0) | (mul >= n)).any():
        raise GroupAxiomError("table entries out of range")
    if unit is None:
        units = [u for u in range(n) if (mul[u] == np.arange(n)).all() and (mul[:, u] == np.arange(n)).all()]
        if not units:
            raise GroupAxiomError("no two-sided unit")
        unit = units[0]
    ar = np.arange(n)
    if not ((mul[unit] == ar).all() and (mul[:, unit] == ar).all()):
        raise GroupAxiomError(f"{unit} is not a unit")
    if not (mul[mul] == np.take(mul, mul, axis=1)).all():
        raise GroupAxiomError("not associative")
    # Latin square + unit + associativity gives a group.
    for row in mul:
        if len(set(row.tolist())) != n:
            raise GroupAxiomError("row is not a permutation; no inverses")
    inverse = np.argmax(mul == unit, axis=1)
    return GroupTable(tuple(str(e) for e in elements), mul, int(unit), inverse)


def trivial_group() -> GroupTable:
    return group_from_table(["1"], [[0]], 0)


def cyclic_group(n: int) -> GroupTable:
    """Z/n written additively; element ``i`` has label ``str(i)`` and 0 is the unit."""
    if n < 1:
        raise GroupAxiomError("cyclic group needs n >= 1")
    ar = np.arange(n)
    return group_from_table([str(i) for i in range(n)], (ar[:, None] + ar[None, :]) % n, 0)


def direct_product(g: GroupTable, h: GroupTable) -> GroupTable:
    pairs = list(product(range(g.order), range(h.order)))
    index = {p: i for i, p in enumerate(pairs)}
    mul = np.empty((len(pairs), len(pairs)), dtype=np.int64)
    for i, (a, b) in enumerate(pairs):
        for j, (c, d) in enumerate(pairs):
            mul[i, j] = index[(int(g.mul[a, c]), int(h.mul[b, d]))]
    labels = [f"({g.elements[a]},{h.elements[b]})" for a, b in pairs]
    return group_from_table(labels, mul, index[(g.unit, h.unit)])


def compose_perm(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """(p ∘ q)[i] = p[q[i]] -- apply q first."""
    return p[q]


def permutation_closure(gens: Sequence[Sequence[int]], limit: int = 50_000) -> list[tuple[int, ...]]:
    """Elements of the permutation group generated by ``gens``, in BFS order from the identity."""
    gens = [np.asarray(g, dtype=np.int64) for g in gens]
    if not gens:
        raise GroupAxiomError("need at least one generator")
    d = len(gens[0])
    for g in gens:
        if len(g) != d or sorted(g.tolist()) != list(range(d)):
            raise GroupAxiomError(f"not a permutation of degree {d}: {g.tolist()}")
    ident = tuple(range(d))
    seen = {ident: 0}
    order = [ident]
    frontier = [np.arange(d)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(compose_perm(g, x).tolist())
                if y not in seen:
                    seen[y] = len(order)
                    order.append(y)
                    nxt.append(np.asarray(y))
                    if len(order) > limit:
                        raise GroupAxiomError(f"group order exceeds {limit}")
        frontier = nxt
    return order


def group_from_permutations(gens: Sequence[Sequence[int]], limit: int = 50_000) -> tuple[GroupTable, list[tuple[int, ...]]]:
    """Group table of the permutation group generated by ``gens`` and its element list."""
    perms = permutation_closure(gens, limit)
    index = {p: i for i, p in enumerate(perms)}
    arr = np.asarray(perms, dtype=np.int64)
    n = len(perms)
    mul = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        prod = arr[i][arr]  # row j: perms[i] ∘ perms[j]
        mul[i] = [index[tuple(r)] for r in prod.tolist()]
    labels = ["".join(map(str, p)) if len(p) <= 10 else ",".join(map(str, p)) for p in perms]
    return group_from_table(labels, mul, 0), perms


@dataclass(frozen=True)
class ZWindow:
    """The integers, materialized on the window [-N, N].

    Elements are ordered 0, 1, -1, 2, -2, ... so the unit comes first.
    """

    N: int
    amenable: bool = field(default=True, init=False)

    @property
    def finite(self) -> bool:
        return False

    @property
    def elements(self) -> tuple[int, ...]:
        out = [0]
        for h in range(1, self.N + 1):
            out += [h, -h]
        return tuple(out)

    @property
    def order(self) -> int:
        return 2 * self.N + 1

    def index(self, h: int) -> int:
        if abs(h) > self.N:
            raise IndexError(h)
        return 0 if h == 0 else (2 * h - 1 if h > 0 else -2 * h)

    def to_json(self) -> dict:
        return {"type": "Z", "window": self.N}


@dataclass(frozen=True)
class FreeGroupDescriptor:
    rank: int = 2
    amenable: bool = field(default=False, init=False)

    @property
    def finite(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"type": "free", "rank": self.rank}
