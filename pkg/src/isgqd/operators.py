"""Left and right regular representations on ℓ²(S) as sparse matrices.

The basis is indexed by element index, with δ_0 kept.  For windowed semigroups
products leaving the window are clipped and the clipped columns are recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.io
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .semigroup import OUTSIDE, GreenClasses, InverseSemigroup, green_partition

DENSE_LIMIT = 2000


@dataclass(frozen=True)
class BasisWindow:
    labels: tuple[str, ...]
    includes_zero: bool = True
    leaky: bool = False

    def __len__(self) -> int:
        return len(self.labels)


def window_of(S: InverseSemigroup) -> BasisWindow:
    return BasisWindow(S.elements, True, not S.closed)


@dataclass(frozen=True, eq=False)
class LinOp:
    mat: sp.csr_matrix
    window: BasisWindow | None = None
    clipped: frozenset = field(default_factory=frozenset)  # columns whose image left the window

    @property
    def shape(self) -> tuple[int, int]:
        return self.mat.shape

    def dense(self) -> np.ndarray:
        return self.mat.toarray()

    @property
    def H(self) -> "LinOp":
        return LinOp(self.mat.T.conj().tocsr(), self.window)

    def _wrap(self, m) -> "LinOp":
        return LinOp(sp.csr_matrix(m), self.window)

    def __matmul__(self, other: "LinOp") -> "LinOp":
        return self._wrap(self.mat @ _m(other))

    def __add__(self, other: "LinOp") -> "LinOp":
        return self._wrap(self.mat + _m(other))

    def __sub__(self, other: "LinOp") -> "LinOp":
        return self._wrap(self.mat - _m(other))

    def __mul__(self, c: float) -> "LinOp":
        return self._wrap(self.mat * c)

    __rmul__ = __mul__

    def trace(self) -> float:
        return float(self.mat.diagonal().sum())

    def is_projection(self, tol: float = 1e-12) -> bool:
        m = self.mat
        return max_abs(m - m.T.conj()) <= tol and max_abs(m @ m - m) <= tol

    def is_partial_isometry(self, tol: float = 1e-12) -> bool:
        m = self.mat
        return max_abs(m @ m.T.conj() @ m - m) <= tol

    def equals(self, other: "LinOp") -> bool:
        """Exact entrywise equality."""
        return (sp.csr_matrix(self.mat) != sp.csr_matrix(_m(other))).nnz == 0


def _m(x):
    return x.mat if isinstance(x, LinOp) else x


def max_abs(m) -> float:
    m = _m(m)
    if sp.issparse(m):
        m = m.tocsr()
        return float(np.abs(m.data).max()) if m.nnz else 0.0
    return float(np.abs(m).max()) if m.size else 0.0


def identity(S: InverseSemigroup) -> LinOp:
    return LinOp(sp.identity(S.size, dtype=np.float64, format="csr"), window_of(S))


def diagonal(S: InverseSemigroup, members: Iterable[int]) -> LinOp:
    d = np.zeros(S.size)
    d[list(members)] = 1.0
    return LinOp(sp.diags(d, format="csr"), window_of(S))


# -- actions ---------------------------------------------------------------------


def left_action(S: InverseSemigroup) -> np.ndarray:
    """act[s, x] = sx when s*s·x = x, else -1 (also -1 when sx leaves the window)."""
    P = S.padded
    n = S.size
    dom = P[S.source[:, None], np.arange(n)[None, :]] == np.arange(n)[None, :]
    return np.where(dom, S.mul, OUTSIDE)


def right_action(S: InverseSemigroup) -> np.ndarray:
    """act[s, x] = xs* when x·s*s = x, else -1."""
    P = S.padded
    n = S.size
    dom = P[np.arange(n)[None, :], S.source[:, None]] == np.arange(n)[None, :]
    return np.where(dom, P[np.arange(n)[None, :], S.star[:, None]], OUTSIDE)


def _domain(S: InverseSemigroup, s: int, side: str) -> np.ndarray:
    n = S.size
    ar = np.arange(n)
    e = S.source[s]
    if side == "left":
        return ar[S.padded[e, ar] == ar]
    return ar[S.padded[ar, e] == ar]


def _partial_permutation(S: InverseSemigroup, cols: np.ndarray, rows: np.ndarray) -> LinOp:
    keep = rows != OUTSIDE
    m = sp.csr_matrix((np.ones(int(keep.sum()), dtype=np.int64), (rows[keep], cols[keep])), shape=(S.size, S.size))
    return LinOp(m, window_of(S), frozenset(cols[~keep].tolist()))


def left_regular(S: InverseSemigroup, s: int) -> LinOp:
    """v_s δ_x = δ_{sx} if s*s x = x, else 0."""
    cols = _domain(S, s, "left")
    return _partial_permutation(S, cols, S.padded[s, cols])


def right_regular(S: InverseSemigroup, s: int) -> LinOp:
    """w_s δ_x = δ_{xs*} if x s*s = x, else 0."""
    cols = _domain(S, s, "right")
    return _partial_permutation(S, cols, S.padded[cols, S.star[s]])


def dclass_block(S: InverseSemigroup, d: int, G: GreenClasses | None = None) -> LinOp:
    G = G or green_partition(S)
    return diagonal(S, G.d_members(d))


# -- norms ---------------------------------------------------------------------


def opnorm(A, tol: float = 1e-12) -> float:
    """Largest singular value; dense SVD for small matrices, Lanczos (svds) above."""
    m = _m(A)
    if sp.issparse(m):
        m = m.tocsr()
        m.eliminate_zeros()
        rows = np.flatnonzero(np.diff(m.indptr))
        cols = np.unique(m.indices)
        if not rows.size:
            return 0.0
        m = m[rows][:, cols]
    else:
        m = np.asarray(m)
        m = m[np.abs(m).sum(axis=1) > 0][:, np.abs(m).sum(axis=0) > 0]
        if not m.size:
            return 0.0
    if max(m.shape) <= DENSE_LIMIT or min(m.shape) < 3:
        dense = m.toarray() if sp.issparse(m) else m
        return float(np.linalg.norm(dense, 2))
    s = spla.svds(sp.csr_matrix(m).astype(np.float64), k=1, return_singular_vectors=False, tol=tol)
    return float(s[0])


def commutator(A, B) -> LinOp:
    a, b = _m(A), _m(B)
    w = A.window if isinstance(A, LinOp) else None
    return LinOp(sp.csr_matrix(a @ b - b @ a), w)


def norm_equal_check(A, V, tol: float = 1e-9) -> tuple[float, float]:
    """For a partial isometry V with A(1 - VV*) = 0, returns (‖A‖, ‖AV‖) after checking the hypothesis."""
    a, v = _m(A), _m(V)
    vv = v @ v.conj().T
    n = vv.shape[0]
    eye = sp.identity(n, format="csr") if sp.issparse(vv) else np.eye(n)
    if max_abs(a @ (eye - vv)) > tol:
        raise ValueError("A(1 - VV*) is not zero")
    return opnorm(a), opnorm(a @ v)


# -- the span of {v_s} ---------------------------------------------------------


def regular_vectors(S: InverseSemigroup) -> sp.csr_matrix:
    """Row s is v_s flattened (entry x*n + sx), so that linear relations among the v_s are row relations."""
    act = left_action(S)
    n = S.size
    s_idx, x_idx = np.nonzero(act != OUTSIDE)
    data = np.ones(s_idx.size, dtype=np.int64)
    return sp.csr_matrix((data, (s_idx, x_idx * n + act[s_idx, x_idx])), shape=(n, n * n))


def regular_gram(S: InverseSemigroup) -> np.ndarray:
    V = regular_vectors(S)
    return (V @ V.T).toarray()


def algebra_dim(S: InverseSemigroup) -> int:
    """Dimension of span{v_s}, closed under products by multiplicativity."""
    return int(np.linalg.matrix_rank(regular_gram(S).astype(np.float64)))


def dependency_kernel(S: InverseSemigroup) -> np.ndarray:
    """Columns span {a : Σ a_s v_s = 0}."""
    return scipy.linalg.null_space(regular_gram(S).astype(np.float64))


def unit_expansion(S: InverseSemigroup, tol: float = 1e-9) -> np.ndarray | None:
    """Coefficients c with Σ c_s v_s = 1, or None when the identity is not in the span."""
    V = regular_vectors(S).astype(np.float64)
    n = S.size
    target = np.zeros(n * n)
    target[np.arange(n) * n + np.arange(n)] = 1.0
    c, *_ = np.linalg.lstsq(V.T.toarray(), target, rcond=None)
    if np.abs(V.T @ c - target).max() > tol:
        return None
    return c


def combination(S: InverseSemigroup, coeffs) -> LinOp:
    """Σ a_s v_s."""
    act = left_action(S)
    n = S.size
    s_idx, x_idx = np.nonzero(act != OUTSIDE)
    a = np.asarray(coeffs, dtype=np.float64)
    m = sp.coo_matrix((a[s_idx], (act[s_idx, x_idx], x_idx)), shape=(n, n)).tocsr()
    return LinOp(m, window_of(S))


@dataclass
class UnitSummand:
    unit: int
    z: LinOp
    coeffs: np.ndarray
    central: bool
    annihilates_rest: bool
    dim_S: int
    dim_T: int


def unit_summand(S: InverseSemigroup) -> UnitSummand:
    """For S = T ⊔ {1} with T an ideal: z = projection onto δ_1, a central element of the span.

    Then span{v_s} = span{v_t : t ∈ T} ⊕ C z.
    """
    u = S.unit()
    if u is None:
        raise ValueError("semigroup has no adjoined unit")
    z = diagonal(S, [u])
    V = regular_vectors(S).astype(np.float64).toarray()
    target = z.dense().T.reshape(-1)  # column-major flatten matches x*n + y
    c, *_ = np.linalg.lstsq(V.T, target, rcond=None)
    in_span = np.abs(V.T @ c - target).max() <= 1e-9
    vs = [left_regular(S, s) for s in range(S.size)]
    central = in_span and all(max_abs(commutator(z, v)) == 0 for v in vs)
    others = [s for s in range(S.size) if s != u]
    annihilates = all(max_abs(z @ vs[s]) == 0 and max_abs(vs[s] @ z) == 0 for s in others)
    # v_t kills δ_1 for t in T, so this is the dimension of the algebra of T on ℓ²(T)
    dim_T = int(np.linalg.matrix_rank(V[others]))
    return UnitSummand(u, z, c, bool(central), bool(annihilates), algebra_dim(S), dim_T)


# -- exhaustive identity checks ------------------------------------------------


@dataclass
class IdentityReport:
    multiplicative: bool
    star_preserving: bool
    left_right_commute: bool
    right_multiplicative: bool
    dclass_central: bool
    injective: bool

    @property
    def ok(self) -> bool:
        return all(vars(self).values())


def check_regular_identities(S: InverseSemigroup, G: GreenClasses | None = None, via_matrices: bool | None = None) -> IdentityReport:
    """v_s v_t = v_st, v_s* = v_s^T, [v_s, w_t] = 0, w_s w_t = w_st, [v_s, 1_D] = 0, s ≠ t ⇒ v_s ≠ v_t.

    Partial permutation matrices are determined by their column actions, so for large S the
    checks run on the action arrays; for small S they run on the sparse integer matrices.
    """
    G = G or green_partition(S)
    n = S.size
    if via_matrices is None:
        via_matrices = n <= 70
    # matrix products cannot tell a clipped column from a genuine zero, so windows use the actions
    via_matrices = via_matrices and S.closed
    L, R = left_action(S), right_action(S)
    pad = lambda a: np.concatenate([a, np.full((1, a.shape[1]), OUTSIDE)], axis=0)  # noqa: E731
    Lp = np.concatenate([pad(L), np.full((n + 1, 1), OUTSIDE)], axis=1)
    Rp = np.concatenate([pad(R), np.full((n + 1, 1), OUTSIDE)], axis=1)
    ar = np.arange(n)

    if via_matrices:
        vs = [left_regular(S, s) for s in range(n)]
        ws = [right_regular(S, s) for s in range(n)]
        mult = all((vs[s] @ vs[t]).equals(vs[int(S.mul[s, t])]) for s in range(n) for t in range(n))
        rmult = all((ws[s] @ ws[t]).equals(ws[int(S.mul[s, t])]) for s in range(n) for t in range(n))
        star = all(vs[int(S.star[s])].equals(vs[s].H) for s in range(n))
        lr = all(max_abs(commutator(vs[s], ws[t])) == 0 for s in range(n) for t in range(n))
        blocks = [dclass_block(S, d, G) for d in range(G.n_d)]
        dc = all(max_abs(commutator(v, b)) == 0 for v in vs for b in blocks)
        inj = len({(v.mat.indices.tobytes(), v.mat.indptr.tobytes()) for v in vs}) == n
        return IdentityReport(mult, star, lr, rmult, dc, inj)

    # column actions; -1 means "column is zero" (or left the window)
    dt = np.int16 if n < 2**15 - 1 else np.int32
    L, R, Lp, Rp = (a.astype(dt) for a in (L, R, Lp, Rp))
    prod = S.padded[:n, :n]
    defined = prod != OUTSIDE
    Lnz, Rnz = L != OUTSIDE, R != OUTSIDE
    mult = rmult = lr = True
    for s in range(n):
        row = np.where(defined[s], prod[s], 0)
        for act, actp, nz, flag in ((L, Lp, Lnz, "l"), (R, Rp, Rnz, "r")):
            lhs = actp[s][act]  # (t, x): s·(t·x), or (x·t*)·s* on the right
            rhs = act[row]
            if S.closed:
                ok = np.array_equal(lhs, rhs)
            else:
                # on windows compare only where every intermediate product exists
                ok = bool(((lhs == rhs) | ~defined[s][:, None] | (lhs == OUTSIDE)).all())
            if flag == "l":
                mult &= ok
            else:
                rmult &= ok
        a = Lp[s][R]  # v_s w_t, shape (t, x)
        b = Rp[:n][:, L[s]]  # w_t v_s
        lr &= np.array_equal(a, b) if S.closed else bool(((a == b) | (a == OUTSIDE) | (b == OUTSIDE)).all())
    L, Lp = L.astype(np.int64), Lp.astype(np.int64)
    # v_{s*} = v_s^T: each action inverts the other on its support
    inv = Lp[S.star]
    fwd = np.take_along_axis(inv, L, axis=1)  # s*·(s·x)
    bwd = np.take_along_axis(Lp[:n], inv[:, :n], axis=1)  # s·(s*·y)
    star = bool(((L == OUTSIDE) | (fwd == ar)).all() and ((inv[:, :n] == OUTSIDE) | (bwd == ar)).all())
    dc = bool(((L == OUTSIDE) | (G.d_class[np.where(L == OUTSIDE, 0, L)] == G.d_class[None, :])).all())
    inj = len({row.tobytes() for row in L}) == n
    return IdentityReport(mult, star, lr, rmult, dc, inj)


def mmwrite(path, A: LinOp | sp.spmatrix) -> None:
    """Matrix Market export for cross-checking in external tools."""
    scipy.io.mmwrite(str(path), sp.coo_matrix(_m(A)))
