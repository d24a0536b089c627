"""Finite-rank projections that asymptotically commute with the left regular representation.

Group-level witnesses p_n are transported to every H-class of a D-class by conjugating
with connecting elements, summed over D-classes, and checked numerically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from math import pi, sin, sqrt
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import norm as sparse_norm

from .constructions.tower import LETTERS, QuotientTower, verify_ball_injectivity
from .errors import (
    BadIdempotent,
    InfiniteGroupWithFull,
    InjectivityUnverified,
    NotBrandt,
    NotIdempotent,
    ScheduleUnachievable,
    UnsupportedWitness,
    WindowTooSmall,
)
from .groups import ZWindow, trivial_group
from .operators import (
    LinOp,
    commutator,
    dclass_block,
    diagonal,
    identity,
    left_regular,
    max_abs,
    opnorm,
    right_regular,
    window_of,
)
from .semigroup import GreenClasses, InverseSemigroup, connecting_elements, green_partition
from .spectrum import brandt_structure, isolated_certificate

TOL = 1e-9
PROJ_TOL = 1e-12


class Strategy(str, Enum):
    FULL = "full"
    BERG_Z = "berg"
    USER = "user"


# -- group witnesses -----------------------------------------------------------


def berg_projection(N: int, n: int) -> np.ndarray:
    """Rank 2n+1 projection on ℓ²([-N, N]) (basis in ZWindow order) almost commuting with the shift.

    One unit vector per residue class r mod 2n+1, spread over the representatives in
    [-2n, 2n] with weights cos and sin of π|h|/(2(2n+1)).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if N < 2 * n:
        raise WindowTooSmall(f"window N={N} is smaller than 2n={2 * n}")
    Z = ZWindow(N)
    M = 2 * n + 1
    vecs = np.zeros((M, Z.order))
    for r in range(-n, n + 1):
        reps = [r] if r == 0 else [r, r - M if r > 0 else r + M]
        for h in reps:
            vecs[r + n, Z.index(h)] = np.cos(pi * abs(h) / (2 * M))
    return vecs.T @ vecs


def berg_commutator(n: int) -> float:
    """Exact shift-commutator norm of ``berg_projection(N, n)``."""
    return sin(pi / (2 * (2 * n + 1)))


def berg_bound(n: int) -> float:
    return 2 * sin(pi / (2 * (n + 1)))


def _check_projection(p: np.ndarray, size: int) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (size, size):
        raise UnsupportedWitness(f"witness has shape {p.shape}, expected {(size, size)}")
    if np.abs(p - p.T).max() > PROJ_TOL or np.abs(p @ p - p).max() > PROJ_TOL:
        raise UnsupportedWitness("witness is not an orthogonal projection")
    return p


def group_qd_witness(group, strategy: Strategy | str, n: int, user: Callable[[int], np.ndarray] | None = None) -> np.ndarray:
    strategy = Strategy(strategy)
    if strategy is Strategy.FULL:
        if not group.finite:
            raise InfiniteGroupWithFull("FULL needs a finite group")
        return np.eye(group.order)
    if strategy is Strategy.BERG_Z:
        if not isinstance(group, ZWindow):
            raise UnsupportedWitness("BERG_Z needs the integer window")
        return berg_projection(group.N, n)
    if user is None:
        raise UnsupportedWitness("USER strategy needs a projection source")
    return _check_projection(user(n), group.order)


def load_user_witness(path: str | Path) -> Callable[[int], np.ndarray]:
    """JSON file {"projections": [p_1, p_2, ...]}; indices past the end reuse the last matrix."""
    data = json.loads(Path(path).read_text())
    mats = [np.asarray(m, dtype=np.float64) for m in data["projections"]]
    if not mats:
        raise UnsupportedWitness("empty witness file")
    return lambda n: mats[min(n, len(mats)) - 1]


@dataclass(frozen=True)
class QDWitness:
    group: object
    strategy: Strategy
    user: Callable[[int], np.ndarray] | None = None

    def projection(self, n: int) -> np.ndarray:
        return group_qd_witness(self.group, self.strategy, n, self.user)

    @property
    def max_index(self) -> int | None:
        """Largest index whose projection keeps a free collar inside the window."""
        if self.strategy is Strategy.BERG_Z:
            return (self.group.N - 1) // 2
        return None


# -- transport to H-classes ------------------------------------------------------


def hgroup_embedding(S: InverseSemigroup, G: GreenClasses, e0: int):
    """(group, members) where members[i] is the element of H_{e0} playing group element i."""
    sub = G.subgroup_at(e0)
    if S.closed:
        return sub.group, list(sub.members)
    if e0 == S.zero:
        return trivial_group(), [S.zero]
    grp = S.meta.get("group")
    coords = S.meta.get("coords")
    if not isinstance(grp, ZWindow) or coords is None:
        raise UnsupportedWitness("cannot identify the maximal subgroup of this window")
    members = sorted(sub.members, key=lambda x: grp.index(int(coords[x - 1, 1])))
    return grp, members


def embed(S: InverseSemigroup, members: Sequence[int], p: np.ndarray) -> LinOp:
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (len(members), len(members)):
        raise UnsupportedWitness(f"witness shape {p.shape} does not match |H| = {len(members)}")
    coo = sp.coo_matrix(p)
    idx = np.asarray(members)
    m = sp.csr_matrix((coo.data, (idx[coo.row], idx[coo.col])), shape=(S.size, S.size))
    return LinOp(m, window_of(S))


def conjugated_projection(S: InverseSemigroup, d: int, e0: int, e: int, f: int, p_n, G: GreenClasses | None = None) -> LinOp:
    """p^{e,f} = w_{r_e} v_{r_f} p v_{r_f}* w_{r_e}*, with range inside ℓ²(H_e^f).

    ``p_n`` is either a matrix on ℓ²(H_{e0}) in group order or an already embedded LinOp.
    """
    G = G or green_partition(S)
    E_D = G.d_idempotents[d]
    for x in (e0, e, f):
        if x not in E_D:
            raise BadIdempotent(f"{x} is not an idempotent of D-class {d}")
    r = connecting_elements(S, G, d, e0)
    P = p_n if isinstance(p_n, LinOp) else embed(S, hgroup_embedding(S, G, e0)[1], p_n)
    vf, we = left_regular(S, r[f]), right_regular(S, r[e])
    P0f = vf @ P @ vf.H
    if max_abs(vf @ P - P0f @ vf) != 0:
        raise AssertionError("v_{r_f} p^{e0,e0} != p^{e0,f} v_{r_f}")
    Pef = we @ P0f @ we.H
    if max_abs(we @ P0f - Pef @ we) != 0:
        raise AssertionError("w_{r_e} p^{e0,f} != p^{e,f} w_{r_e}")
    rows = np.unique(Pef.mat.nonzero()[0])
    if rows.size and not ((S.source[rows] == e) & (S.range_[rows] == f)).all():
        raise AssertionError("p^{e,f} has range outside ℓ²(H_e^f)")
    return Pef


def dclass_pieces(S: InverseSemigroup, d: int, e0: int, p_n, G: GreenClasses | None = None) -> dict:
    G = G or green_partition(S)
    P = embed(S, hgroup_embedding(S, G, e0)[1], p_n)
    E_D = G.d_idempotents[d]
    return {(e, f): conjugated_projection(S, d, e0, e, f, P, G) for e in E_D for f in E_D}


def _sum(S: InverseSemigroup, ops) -> LinOp:
    out = sp.csr_matrix((S.size, S.size))
    for op in ops:
        out = out + op.mat
    return LinOp(sp.csr_matrix(out), window_of(S))


def dclass_qd_projection(S: InverseSemigroup, d: int, e0: int, p_n, G: GreenClasses | None = None) -> LinOp:
    """q^D = Σ_{e,f ∈ E_D} p^{e,f}; a projection below 1_D."""
    G = G or green_partition(S)
    q = _sum(S, dclass_pieces(S, d, e0, p_n, G).values())
    if max_abs(q - dclass_block(S, d, G) @ q) != 0:
        raise AssertionError("q^D is not below 1_D")
    return q


def commutator_decomposition(S: InverseSemigroup, pieces: dict, s: int, v: LinOp | None = None) -> tuple[float, float]:
    """(‖[v_s, Σ p^{e,f}]‖, max over e and f <= s*s of ‖v_s p^{e,f} - p^{e,sfs*} v_s‖)."""
    v = v or left_regular(S, s)
    q = _sum(S, pieces.values())
    total = opnorm(commutator(v, q))
    ss = S.source[s]
    best = 0.0
    for (e, f), p in pieces.items():
        if S.mul[f, ss] != f:
            continue
        g = int(S.padded[S.padded[s, f], S.star[s]])
        best = max(best, opnorm(v @ p - pieces[(e, g)] @ v))
    return total, best


# -- global assembly -------------------------------------------------------------


@dataclass
class QDReport:
    n: int
    rank: int
    commutators: dict[str, float]
    max_commutator: float
    per_class: dict[int, dict]
    schedule_bound: float
    schedule_ok: bool
    defect: float
    residual_max: float
    converged: int
    probes: int
    is_identity: bool
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rank": self.rank,
            "commutators": {k: round(v, 15) for k, v in self.commutators.items()},
            "max_commutator": round(self.max_commutator, 15),
            "per_class": {str(k): v for k, v in self.per_class.items()},
            "schedule_bound": self.schedule_bound,
            "schedule_ok": self.schedule_ok,
            "defect": self.defect,
            "residual_max": round(self.residual_max, 15),
            "converged_probes": self.converged,
            "probes": self.probes,
            "is_identity": self.is_identity,
            "notes": list(self.notes),
        }

    def csv_row(self) -> list:
        return [self.n, self.rank, f"{self.max_commutator:.12g}", int(self.schedule_ok), f"{self.defect:.3g}"]


def window_defect(S: InverseSemigroup, q: LinOp, gens: Sequence[int]) -> float:
    """0 when clipping at the window edge cannot change [v_s, q], else the trivial bound 1.

    Clipped columns x are exact as long as q δ_x = 0: the true image sx then lies outside supp q.
    """
    if S.closed:
        return 0.0
    cols = np.zeros(S.size, dtype=bool)
    cols[np.unique(q.mat.nonzero()[1])] = True
    for s in gens:
        clipped = list(left_regular(S, s).clipped)
        if clipped and cols[clipped].any():
            return 1.0
    return 0.0


def default_witnesses(S: InverseSemigroup, G: GreenClasses, strategy: Strategy | str = Strategy.FULL,
                      user: Callable[[int], np.ndarray] | None = None) -> dict[int, QDWitness]:
    """FULL on finite subgroups; the requested strategy on infinite ones."""
    out = {}
    for d in range(G.n_d):
        e0 = min(G.d_idempotents[d])
        grp, _ = hgroup_embedding(S, G, e0)
        if grp.finite:
            st = Strategy.USER if Strategy(strategy) is Strategy.USER and len(G.d_members(d)) > 1 and user else Strategy.FULL
        else:
            st = Strategy(strategy)
            if st is Strategy.FULL:
                raise InfiniteGroupWithFull(f"D-class {d} has an infinite subgroup; choose berg or user")
        out[d] = QDWitness(grp, st, user if st is Strategy.USER else None)
    return out


def global_qd_projection(S: InverseSemigroup, n: int, F_n: Sequence[int], D_n: Sequence[int],
                         witnesses: dict[int, QDWitness], G: GreenClasses | None = None,
                         probes: Sequence[int] | None = None, advance: bool = True,
                         strict: bool = False) -> tuple[LinOp, QDReport]:
    """q_n = Σ_{D ∈ D_n} q_n^D, with each witness index advanced until ‖[v_s, q_n^D]‖ <= 1/n on F_n."""
    G = G or green_partition(S)
    bound = 1.0 / n
    vs = {s: left_regular(S, s) for s in F_n}
    blocks, per_class, notes = [], {}, []
    for d in D_n:
        e0 = min(G.d_idempotents[d])
        w = witnesses[d]
        k, best, prev = n, None, None
        while True:
            try:
                p_k = w.projection(k)
            except WindowTooSmall:
                break
            if prev is not None and np.array_equal(p_k, prev):
                break  # stationary witness: advancing further changes nothing
            prev = p_k
            pieces = dclass_pieces(S, d, e0, p_k, G)
            qd = _sum(S, pieces.values())
            worst = 0.0
            for s in F_n:
                total, piecewise = commutator_decomposition(S, pieces, s, vs[s])
                if abs(total - piecewise) > TOL:
                    raise AssertionError(f"commutator decomposition fails for s={s}: {total} vs {piecewise}")
                worst = max(worst, total)
            if best is None or worst < best[1]:
                best = (k, worst, qd)
            if worst <= bound + TOL or not advance:
                break
            k += 1
            if w.max_index is not None and k > w.max_index:
                break
            if k > n + 500:
                break
        if best is None:
            raise WindowTooSmall(f"no admissible witness index for D-class {d} at n={n}")
        k, worst, qd = best
        if worst > bound + TOL:
            notes.append(f"D-class {d}: schedule saturated at witness index {k}, best {worst:.6g}")
        blocks.append(qd)
        per_class[d] = {"witness_index": k, "strategy": w.strategy.value, "rank": int(round(qd.trace())),
                        "max_commutator": round(worst, 15), "idempotents": len(G.d_idempotents[d])}
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            if max_abs(blocks[i] @ blocks[j]) != 0:
                raise AssertionError("D-class projections are not orthogonal")
    q = _sum(S, blocks)
    if not q.is_projection(PROJ_TOL):
        raise AssertionError("q_n is not a projection")
    comms = {S.elements[s]: opnorm(commutator(vs[s], q)) for s in F_n}
    mx = max(comms.values(), default=0.0)
    class_max = max((c["max_commutator"] for c in per_class.values()), default=0.0)
    if abs(mx - class_max) > TOL:
        raise AssertionError(f"global commutator {mx} differs from the per-class maximum {class_max}")
    probes = list(range(S.size)) if probes is None else list(probes)
    resid = sparse_norm((q - identity(S)).mat[:, probes], axis=0) if probes else np.zeros(0)
    resid = np.asarray(resid).ravel()
    defect = window_defect(S, q, F_n)
    report = QDReport(
        n=n, rank=int(round(q.trace())), commutators=comms, max_commutator=mx, per_class=per_class,
        schedule_bound=bound, schedule_ok=mx <= bound + TOL, defect=defect,
        residual_max=float(resid.max()) if resid.size else 0.0,
        converged=int((resid <= PROJ_TOL).sum()), probes=len(probes),
        is_identity=S.closed and max_abs(q - identity(S)) <= PROJ_TOL, notes=notes,
    )
    if strict and not report.schedule_ok:
        raise ScheduleUnachievable(bound, mx)
    return q, report


def qd_series(S: InverseSemigroup, n_max: int, strategy: Strategy | str = Strategy.FULL,
              user: Callable[[int], np.ndarray] | None = None, G: GreenClasses | None = None,
              generators: Sequence[int] | None = None) -> list[QDReport]:
    """Reports for n = 1..n_max with F_n = ``generators`` (default: all elements) and all D-classes."""
    G = G or green_partition(S)
    W = default_witnesses(S, G, strategy, user)
    F = list(range(S.size)) if generators is None else list(generators)
    return [global_qd_projection(S, n, F, list(range(G.n_d)), W, G)[1] for n in range(1, n_max + 1)]


def brandt_generators(S: InverseSemigroup) -> list[int]:
    """For a windowed Brandt semigroup over Z: the elements (e,0,f) and (e,±1,f)."""
    coords = S.meta["coords"]
    return [i + 1 for i, (_, h, _) in enumerate(coords) if abs(int(h)) <= 1]


# -- isolated subgroups --------------------------------------------------------


def isolated_subgroup_projection(S: InverseSemigroup, e: int) -> tuple[LinOp, LinOp]:
    """p = join of v_f over the cover of e, q = v_e - p, which commutes with the subgroup at e.

    The range of q is span{δ_x : xx* = e}, the R-class of e.
    """
    if not S.idempotent_mask[e]:
        raise NotIdempotent(f"{e} is not an idempotent")
    cert = isolated_certificate(S, e)
    p = LinOp(sp.csr_matrix((S.size, S.size)), window_of(S))
    for f in cert.cover:
        vf = left_regular(S, f)
        p = p + vf - p @ vf
    q = left_regular(S, e) - p
    if not (p.is_projection(PROJ_TOL) and q.is_projection(PROJ_TOL)):
        raise AssertionError("isolated construction did not produce projections")
    for h in np.flatnonzero((S.source == e) & (S.range_ == e)):
        if max_abs(commutator(q, left_regular(S, int(h)))) != 0:
            raise AssertionError(f"q does not commute with v_h for h={h}")
    support = np.flatnonzero(np.abs(q.mat.diagonal()) > 0.5)
    if max_abs(q - diagonal(S, support)) != 0 or not np.array_equal(support, np.flatnonzero(S.range_ == e)):
        raise AssertionError("range of v_e - p differs from span{δ_x : xx* = e}")
    return p, q


def isolated_representation_bound(S: InverseSemigroup, e: int, trials: int = 20, seed: int = 0,
                                  G: GreenClasses | None = None) -> list[tuple[float, float]]:
    """Pairs (‖(Σ a_h v_h) q‖, ‖Σ a_h λ_h‖) for random real coefficient vectors a."""
    G = G or green_partition(S)
    sub = G.subgroup_at(e)
    if sub.group is None:
        raise UnsupportedWitness("needs a materialized subgroup")
    _, q = isolated_subgroup_projection(S, e)
    H = sub.group
    rng = np.random.default_rng(seed)
    vs = [left_regular(S, h) for h in sub.members]
    out = []
    for _ in range(trials):
        a = rng.normal(size=H.order)
        lam = np.zeros((H.order, H.order))
        for i in range(H.order):
            lam[H.mul[i], np.arange(H.order)] += a[i]
        A = _sum(S, [v * a[i] for i, v in enumerate(vs)])
        out.append((opnorm(A @ q), float(np.linalg.norm(lam, 2))))
    return out


# -- minimal (Brandt) case -------------------------------------------------------


def minimal_qd_projection(S: InverseSemigroup, F_n: Sequence[int], p_n, G: GreenClasses | None = None) -> LinOp:
    """q_n = v_0 + Σ_{e,f ∈ F_n} w_{r_e} v_{r_f} p_n v_{r_f}* w_{r_e}*."""
    B = brandt_structure(S)
    if B is None or not B.nonzero_idempotents:
        raise NotBrandt("semigroup is not of Brandt type")
    G = G or green_partition(S)
    e0 = B.base
    d = int(G.d_class[e0])
    P = embed(S, hgroup_embedding(S, G, e0)[1], p_n)
    q = left_regular(S, S.zero)
    for e in F_n:
        for f in F_n:
            q = q + conjugated_projection(S, d, e0, e, f, P, G)
    if not q.is_projection(PROJ_TOL):
        raise AssertionError("minimal construction is not a projection")
    return q


# -- free group example --------------------------------------------------------


@dataclass
class NonflReport:
    n: int
    m: int
    r: int
    orientation: str
    bound: float
    commutators: dict[str, float]
    max_commutator: float
    passes: bool
    orthogonality_error: float
    rank: int
    window_size: int
    defect: float
    identity_residual: float
    injectivity_radius_checked: int

    def to_json(self) -> dict:
        d = dict(vars(self))
        d["commutators"] = {k: round(v, 15) for k, v in self.commutators.items()}
        d["max_commutator"] = round(self.max_commutator, 15)
        d["orthogonality_error"] = float(f"{self.orthogonality_error:.3e}")
        d["identity_residual"] = round(self.identity_residual, 15)
        return d


def permutation_group_order(a, b) -> int:
    from sympy.combinatorics import Permutation, PermutationGroup

    return int(PermutationGroup([Permutation(list(a)), Permutation(list(b))]).order())


def qd_nonfl_projection(tower: QuotientTower, n: int, m: int, r: int, orientation: str = "corrected",
                        collar: int = 1) -> tuple[LinOp, NonflReport]:
    """Projection on ℓ²(F_2 ⊔ H_0 ⊔ ... ⊔ H_m) interpolating between the ball B_n and its image in H_m.

    ``orientation="corrected"`` puts weight ((n-ℓ)/n)^½ on the free copy of x and (ℓ/n)^½ on q_m(x),
    so the projection fixes δ_1; ``"literal"`` swaps the two weights.  The window is the
    lower levels, the ball B_{n+collar} and its image in H_m; it is exact when q_m is injective
    on B_{n+collar+1}.
    """
    if orientation not in ("corrected", "literal"):
        raise ValueError(orientation)
    if not 1 <= r <= n or not 0 <= m < tower.depth:
        raise ValueError("need 1 <= r <= n and a valid level")
    rho = max(n + r, n + collar + 1)
    if rho > tower.top_radius:
        raise WindowTooSmall(f"need the ball of radius {rho}, materialized {tower.top_radius}")
    if not verify_ball_injectivity(tower, m, rho):
        raise InjectivityUnverified(f"q_{m} is not injective on B_{rho}")
    ball = tower.ball
    lvl = tower.levels[m]

    lower_perms, offset = [], 0
    for k in range(m):
        _, perms = tower.levels[k].group()
        lower_perms.append((offset, perms))
        offset += len(perms)
    n_lower = offset
    bidx = ball.within(n + collar)
    nb = len(bidx)
    F0, H0 = n_lower, n_lower + nb  # free copy block, H_m block
    size = n_lower + 2 * nb

    mats = []
    for g in range(4):
        rows, cols = [], []
        for k, (off, perms) in enumerate(lower_perms):
            index = {p: i for i, p in enumerate(perms)}
            L = tower.levels[k].letters[g]
            for i, p in enumerate(perms):
                rows.append(off + index[tuple(L[np.asarray(p)].tolist())])
                cols.append(off + i)
        tgt = ball.left[g, bidx]
        inside = (tgt >= 0) & (tgt < nb)
        rows += (F0 + tgt[inside]).tolist() + (H0 + tgt[inside]).tolist()
        cols += (F0 + bidx[inside]).tolist() + (H0 + bidx[inside]).tolist()
        mats.append(sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size)))

    lens = ball.length[bidx]
    W = np.zeros((size, n_lower + nb))
    W[np.arange(n_lower), np.arange(n_lower)] = 1.0
    for j, ell in enumerate(lens):
        col = n_lower + j
        if ell <= n:
            a, b = sqrt((n - ell) / n), sqrt(ell / n)
            if orientation == "literal":
                a, b = b, a
            W[F0 + j, col] = a
            W[H0 + j, col] = b
        else:
            W[H0 + j, col] = 1.0
    gram = W.T @ W
    ortho_err = float(np.abs(gram - np.eye(gram.shape[0])).max())
    if ortho_err > PROJ_TOL:
        raise AssertionError(f"w-vectors are not orthonormal ({ortho_err})")
    P = W @ W.T
    Pop = LinOp(sp.csr_matrix(P))
    comms = {LETTERS[g]: opnorm(mats[g] @ P - P @ mats[g]) for g in range(4)}
    mx = max(comms.values())
    # clipped free-copy columns must be killed by P
    edge = np.flatnonzero(lens == n + collar)
    defect = 0.0 if np.abs(P[:, F0 + edge]).max(initial=0.0) <= PROJ_TOL else 1.0
    e1 = np.zeros(size)
    e1[F0] = 1.0
    rank = sum(len(p) for _, p in lower_perms) + permutation_group_order(lvl.a, lvl.b)
    report = NonflReport(
        n=n, m=m, r=r, orientation=orientation, bound=r / n, commutators=comms, max_commutator=mx,
        passes=mx <= r / n + TOL, orthogonality_error=ortho_err, rank=rank, window_size=size,
        defect=defect, identity_residual=float(np.linalg.norm(P @ e1 - e1)), injectivity_radius_checked=rho,
    )
    return Pop, report
