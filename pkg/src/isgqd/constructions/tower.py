"""Finite quotients of the free group F_2 and the truncated tower semigroup built from them.

Words are tuples over the letters 0 = a, 1 = a^-1, 2 = b, 3 = b^-1, always freely
reduced.  A level is a homomorphism F_2 -> Sym(d) given by the images of a and b.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from ..errors import DegenerateLevel, NotDescendingChain
from ..groups import GroupTable, group_from_permutations
from ..semigroup import InverseSemigroup
from .families import clifford_chain

LETTERS = "aAbB"


def inverse_letter(g: int) -> int:
    return g ^ 1


def word_str(w: Sequence[int]) -> str:
    return "".join(LETTERS[g] for g in w) or "1"


def parse_word(s: str) -> tuple[int, ...]:
    out: list[int] = []
    for ch in s.strip():
        if ch == "1":
            continue
        g = LETTERS.index(ch)
        if out and out[-1] == inverse_letter(g):
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def reduce_word(w: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for g in w:
        if out and out[-1] == inverse_letter(g):
            out.pop()
        else:
            out.append(g)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class FreeBall:
    """The ball of radius ``radius`` around 1 in the Cayley graph of F_2.

    ``left[g, i]`` is the index of g·words[i], or -1 if it leaves the ball.
    """

    radius: int
    words: tuple[tuple[int, ...], ...]
    index: dict
    length: np.ndarray
    left: np.ndarray

    def __len__(self) -> int:
        return len(self.words)

    def within(self, rho: int) -> np.ndarray:
        return np.flatnonzero(self.length <= rho)


def free_ball(radius: int) -> FreeBall:
    words: list[tuple[int, ...]] = [()]
    sphere: list[tuple[int, ...]] = [()]
    for _ in range(radius):
        nxt = []
        for w in sphere:
            for g in range(4):
                if w and w[0] == inverse_letter(g):
                    continue
                nxt.append((g,) + w)
        words += nxt
        sphere = nxt
    index = {w: i for i, w in enumerate(words)}
    length = np.array([len(w) for w in words], dtype=np.int64)
    left = np.full((4, len(words)), -1, dtype=np.int64)
    for i, w in enumerate(words):
        for g in range(4):
            gw = w[1:] if (w and w[0] == inverse_letter(g)) else (g,) + w
            left[g, i] = index.get(gw, -1)
    return FreeBall(radius, tuple(words), index, length, left)


def ball_size(radius: int) -> int:
    return 1 + 2 * (3 ** radius - 1)


def _letter_perms(a: np.ndarray, b: np.ndarray) -> list[np.ndarray]:
    return [a, np.argsort(a), b, np.argsort(b)]


@dataclass(eq=False)
class TowerLevel:
    a: np.ndarray
    b: np.ndarray
    images: np.ndarray  # images[i] = permutation q(words[i])

    @property
    def degree(self) -> int:
        return len(self.a)

    @cached_property
    def letters(self) -> list[np.ndarray]:
        return _letter_perms(self.a, self.b)

    def keys(self) -> list[bytes]:
        return [row.tobytes() for row in self.images]

    def image(self, word: Sequence[int]) -> np.ndarray:
        p = np.arange(self.degree)
        for g in reversed(word):
            p = self.letters[g][p]
        return p

    def group(self, limit: int = 50_000) -> tuple[GroupTable, list[tuple[int, ...]]]:
        return group_from_permutations([self.a, self.b], limit)


def _level_images(a: np.ndarray, b: np.ndarray, ball: FreeBall) -> np.ndarray:
    letters = _letter_perms(a, b)
    imgs = np.empty((len(ball), len(a)), dtype=np.int64)
    imgs[0] = np.arange(len(a))
    for i, w in enumerate(ball.words[1:], start=1):
        imgs[i] = letters[w[0]][imgs[ball.index[w[1:]]]]
    return imgs


@dataclass(eq=False)
class QuotientTower:
    levels: list[TowerLevel]
    ball: FreeBall
    meta: dict = field(default_factory=dict)

    @property
    def top_radius(self) -> int:
        return self.ball.radius

    @property
    def depth(self) -> int:
        return len(self.levels)

    def word_length(self, i: int) -> int:
        return int(self.ball.length[i])

    def truncate(self, m: int | None = None, limit: int = 2000) -> InverseSemigroup:
        """The finite Clifford semigroup H_0 ⊔ ... ⊔ H_m over the chain 1_0 < ... < 1_m."""
        m = self.depth - 1 if m is None else m
        tables, words = [], []
        for lvl in self.levels[: m + 1]:
            G, perms = lvl.group(limit)
            tables.append(G)
            words.append(_element_words(lvl, perms))
        homs = {}
        for k in range(m + 1):
            for j in range(k):
                target = {p: i for i, p in enumerate(self.levels[j].group(limit)[1])}
                homs[(k, j)] = [target[tuple(self.levels[j].image(w).tolist())] for w in words[k]]
        S = clifford_chain(tables, homs)
        S.meta.update({"family": "tower", "levels": m + 1, "top_has_finite_cover": False,
                       "top_group": "F2"})
        return S


def _element_words(level: TowerLevel, perms: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """A word for each group element, found by BFS over left multiplication by a^±1, b^±1."""
    found = {tuple(range(level.degree)): ()}
    frontier = [()]
    target = set(perms)
    while frontier and len(found) < len(target):
        nxt = []
        for w in frontier:
            p = level.image(w)
            for g in range(4):
                q = tuple(level.letters[g][p].tolist())
                if q not in found:
                    found[q] = reduce_word((g,) + w)
                    nxt.append(found[q])
        frontier = nxt
    return [found[p] for p in perms]


def quotient_tower(perm_gens: Sequence[tuple[Sequence[int], Sequence[int]]], top_radius: int,
                   meta: dict | None = None) -> QuotientTower:
    """Build a tower from per-level images of a and b, checking the kernels descend on the ball."""
    if not perm_gens:
        raise DegenerateLevel("tower needs at least one level")
    ball = free_ball(top_radius)
    levels = []
    for k, (a, b) in enumerate(perm_gens):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        d = len(a)
        if d == 0 or len(b) != d or sorted(a.tolist()) != list(range(d)) or sorted(b.tolist()) != list(range(d)):
            raise DegenerateLevel(f"level {k}: generators are not permutations of a common degree")
        levels.append(TowerLevel(a, b, _level_images(a, b, ball)))
    for k in range(1, len(levels)):
        fine, coarse = levels[k].keys(), levels[k - 1].keys()
        rep: dict[bytes, int] = {}
        for i, key in enumerate(fine):
            j = rep.setdefault(key, i)
            if coarse[j] != coarse[i]:
                raise NotDescendingChain(k, (word_str(ball.words[j]), word_str(ball.words[i])))
    return QuotientTower(levels, ball, dict(meta or {}))


def verify_ball_injectivity(tower: QuotientTower, m: int, rho: int) -> bool:
    """True iff q_m is injective on the ball of radius rho."""
    if rho > tower.top_radius:
        raise ValueError(f"radius {rho} exceeds the materialized ball ({tower.top_radius})")
    idx = tower.ball.within(rho)
    keys = tower.levels[m].images[idx]
    return len({row.tobytes() for row in keys}) == len(idx)


def injectivity_radius(tower: QuotientTower, m: int) -> int:
    """Largest rho <= top_radius on which q_m is verified injective (0 always holds)."""
    best = 0
    for rho in range(1, tower.top_radius + 1):
        if not verify_ball_injectivity(tower, m, rho):
            break
        best = rho
    return best


def direct_sum(p: Sequence[int], q: Sequence[int]) -> list[int]:
    """p ⊕ q acting on the disjoint union of their point sets."""
    return list(p) + [len(p) + x for x in q]


def search_injective_pair(degree: int, radius: int, seed: int, max_tries: int = 200) -> tuple[list[int], list[int], int]:
    """Seeded random search for a pair of degree-``degree`` permutations injective on B_radius.

    Returns (a, b, number of tries used).
    """
    rng = np.random.default_rng(seed)
    ball = free_ball(radius)
    for attempt in range(1, max_tries + 1):
        a = rng.permutation(degree)
        b = rng.permutation(degree)
        imgs = _level_images(a, b, ball)
        if len({row.tobytes() for row in imgs}) == len(ball):
            return a.tolist(), b.tolist(), attempt
    raise DegenerateLevel(f"no injective pair of degree {degree} on B_{radius} in {max_tries} tries")


# Small levels of the default tower: trivial, (Z/2)^2, and its product with S_3.
_TRIVIAL = ([0], [0])
_ABEL2 = ([1, 0, 2, 3], [0, 1, 3, 2])
_S3 = ([1, 0, 2], [0, 2, 1])


def default_tower_generators(seed: int = 20240601, degree: int = 24, radius: int = 6) -> list[tuple[list[int], list[int]]]:
    """Levels 0..3 of the default tower; each level is the previous one ⊕ a new representation."""
    lvl1 = _ABEL2
    lvl2 = (direct_sum(lvl1[0], _S3[0]), direct_sum(lvl1[1], _S3[1]))
    a, b, _ = search_injective_pair(degree, radius, seed)
    lvl3 = (direct_sum(lvl2[0], a), direct_sum(lvl2[1], b))
    return [(list(_TRIVIAL[0]), list(_TRIVIAL[1])), (list(lvl1[0]), list(lvl1[1])), lvl2, lvl3]
