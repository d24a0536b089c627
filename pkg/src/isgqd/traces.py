"""Linear functionals on span{v_s}: traciality, positivity, faithfulness, and trace spaces."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

from .errors import InconsistentOnDependencies, NotBrandt, NotUnital
from .operators import dependency_kernel, unit_expansion
from .semigroup import InverseSemigroup
from .spectrum import brandt_structure
from .constructions.families import qdnotr_family

TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TraceFunctional:
    """τ determined by its values τ(v_s) on the spanning set."""

    S: InverseSemigroup
    coeffs: np.ndarray

    def __call__(self, a) -> float:
        return float(np.dot(self.coeffs, np.asarray(a, dtype=np.float64)))

    def value(self, s: int) -> float:
        return float(self.coeffs[s])

    def to_json(self) -> dict:
        return {"values": {lab: round(float(c), 15) for lab, c in zip(self.S.elements, self.coeffs)}}


def _check_dependencies(S: InverseSemigroup, tau: TraceFunctional, tol: float = TOL) -> None:
    K = dependency_kernel(S)
    if K.size and np.abs(tau.coeffs @ K).max() > tol:
        raise InconsistentOnDependencies("τ is not constant on linear relations among the v_s")


def is_tracial(S: InverseSemigroup, tau: TraceFunctional, tol: float = TOL) -> bool:
    """τ(v_s v_t) = τ(v_t v_s) for all pairs."""
    _check_dependencies(S, tau, tol)
    c = tau.coeffs
    return bool(np.abs(c[S.mul] - c[S.mul.T]).max() <= tol)


def gram_matrix(S: InverseSemigroup, tau: TraceFunctional) -> np.ndarray:
    """G[t, s] = τ(v_t* v_s) = τ(v_{t*s})."""
    return tau.coeffs[S.mul[S.star[:, None], np.arange(S.size)[None, :]]]


def unit_value(S: InverseSemigroup, tau: TraceFunctional) -> float:
    c = unit_expansion(S)
    if c is None:
        raise NotUnital("the identity is not in span{v_s}")
    return tau(c)


def is_state(S: InverseSemigroup, tau: TraceFunctional, tol: float = TOL) -> bool:
    if abs(unit_value(S, tau) - 1.0) > tol:
        return False
    G = gram_matrix(S, tau)
    return bool(np.linalg.eigvalsh((G + G.T) / 2).min() >= -tol)


def _restricted_gram(S: InverseSemigroup, tau: TraceFunctional) -> np.ndarray:
    """Gram matrix on an orthonormal complement of the dependency kernel."""
    G = gram_matrix(S, tau)
    G = (G + G.T) / 2
    K = dependency_kernel(S)
    C = scipy.linalg.null_space(K.T) if K.size else np.eye(S.size)
    return C.T @ G @ C


def is_faithful(S: InverseSemigroup, tau: TraceFunctional, tol: float = TOL) -> tuple[bool, float]:
    """(faithful, margin): faithful iff the Gram null space is exactly the dependency kernel.

    The margin is the smallest eigenvalue of G on a complement of that kernel.
    """
    ev = np.linalg.eigvalsh(_restricted_gram(S, tau))
    margin = float(ev.min()) if ev.size else 0.0
    return margin > tol, margin


# -- constructions -------------------------------------------------------------


def grpdmin_trace(S: InverseSemigroup, literal: bool = False) -> TraceFunctional:
    """Faithful tracial state on a finite Brandt semigroup E+ x H x E+ ⊔ {0}.

    τ(v_0) = ½, τ(v_e) = ½ + 1/(2k) on non-zero idempotents, and τ(v_s) = ½ on
    every other non-zero element, i.e. ½χ_0 + ½·(normalized canonical trace) written
    in the spanning set (each v_s contains the matrix unit at δ_0).

    ``literal=True`` gives weight 0 to the non-idempotent elements instead; that
    functional is not tracial once there are off-diagonal elements.
    """
    B = brandt_structure(S)
    if B is None or not B.nonzero_idempotents or not S.closed:
        raise NotBrandt("grpdmin_trace needs a finite Brandt semigroup")
    k = len(B.nonzero_idempotents)
    c = np.full(S.size, 0.0 if literal else 0.5)
    c[S.zero] = 0.5
    for e in B.nonzero_idempotents:
        c[e] = 0.5 + 1.0 / (2 * k)
    return TraceFunctional(S, c)


def canonical_group_trace(S: InverseSemigroup, faithful: bool = True) -> TraceFunctional:
    """On a group with zero: ½χ_0 + ½·canonical (faithful), or τ(v_s) = [s = 1] (not faithful)."""
    u = S.unit()
    if u is None or len(S.idempotent_list()) != 2:
        raise NotBrandt("needs a group with zero")
    c = np.zeros(S.size)
    c[u] = 1.0
    if faithful:
        c = np.full(S.size, 0.5)
        c[u] = 1.0
    return TraceFunctional(S, c)


@dataclass
class TraceSpace:
    particular: np.ndarray
    basis: np.ndarray  # columns

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def point(self, t) -> np.ndarray:
        return self.particular + self.basis @ np.asarray(t, dtype=np.float64)


def trace_constraints(S: InverseSemigroup) -> tuple[np.ndarray, np.ndarray]:
    """Rows of A τ = b: traciality, vanishing on dependencies, τ(1) = 1."""
    n = S.size
    pairs = {tuple(sorted((int(S.mul[s, t]), int(S.mul[t, s])))) for s, t in combinations(range(n), 2)}
    rows = []
    for a, b in sorted(pairs):
        if a != b:
            r = np.zeros(n)
            r[a], r[b] = 1.0, -1.0
            rows.append(r)
    K = dependency_kernel(S)
    rows += list(K.T)
    c = unit_expansion(S)
    if c is None:
        raise NotUnital("the identity is not in span{v_s}")
    A = np.vstack(rows + [c]) if rows else c[None, :]
    b = np.zeros(A.shape[0])
    b[-1] = 1.0
    return A, b


def trace_space(S: InverseSemigroup) -> TraceSpace:
    """Affine space of tracial functionals with τ(1) = 1 (positivity not imposed)."""
    A, b = trace_constraints(S)
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.abs(A @ x - b).max() > TOL:
        raise InconsistentOnDependencies("trace constraints are inconsistent")
    N = scipy.linalg.null_space(A)
    # drop directions that only move τ along dependencies of the v_s
    return TraceSpace(x, N)


# -- the no-faithful-trace family -----------------------------------------------


def qdnotr_trace(k: int, rho, delta, unital: bool = True) -> TraceFunctional:
    """τ(v_0) = ρ, τ(v_(e,e)) = δ, τ(v_(f,e)) = ρ for f ≠ e, τ(v_1) = 1."""
    S = qdnotr_family(k, unital)
    c = np.full(S.size, float(rho))
    for e in range(k):
        c[1 + e * k + e] = float(delta)
    if unital:
        c[S.meta["unit"]] = 1.0
    return TraceFunctional(S, c)


def qdnotr_positive_elements(k: int) -> dict[str, np.ndarray]:
    """Coefficient vectors of v_0, v_(e,e) - v_0 and 1 - v_0 - Σ(v_(e,e) - v_0); all are projections."""
    S = qdnotr_family(k)
    n = S.size
    out = {}
    z = np.zeros(n)
    z[0] = 1.0
    out["v_0"] = z
    total = z.copy()
    for e in range(k):
        p = np.zeros(n)
        p[1 + e * k + e] = 1.0
        p[0] = -1.0
        out[f"v_({e + 1},{e + 1})-v_0"] = p
        total = total + p
    one = np.zeros(n)
    one[S.meta["unit"]] = 1.0
    out["1-sum"] = one - total
    return out


def _affine_form(k: int, vec: np.ndarray) -> tuple[Fraction, Fraction, Fraction]:
    """τ(vec) = c0 + cρ ρ + cδ δ, read off exactly by evaluating at three points."""
    ev = lambda r, d: Fraction(qdnotr_trace(k, r, d)(vec)).limit_denominator(10**6)  # noqa: E731
    c0 = ev(0, 0)
    return c0, ev(1, 0) - c0, ev(0, 1) - c0


@dataclass
class MarginResult:
    k: int
    margin: Fraction
    rho: Fraction
    delta: Fraction
    linprog_value: float
    is_state: bool

    def to_json(self) -> dict:
        return {"k": self.k, "margin": str(self.margin), "margin_float": float(self.margin),
                "rho": str(self.rho), "delta": str(self.delta),
                "linprog": round(self.linprog_value, 12), "optimizer_is_state": self.is_state}


def qdnotr_trace_margin(k: int) -> MarginResult:
    """max (δ - ρ) over tracial states of qdnotr_family(k), solved exactly by vertex enumeration."""
    cons = [_affine_form(k, v) for v in qdnotr_positive_elements(k).values()]  # each >= 0
    # distinct constraint lines
    lines = list(dict.fromkeys(cons))
    best = None
    for (a0, a1, a2), (b0, b1, b2) in combinations(lines, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        rho = (-a0 * b2 + a2 * b0) / det
        delta = (-a1 * b0 + a0 * b1) / det
        if all(c0 + c1 * rho + c2 * delta >= 0 for c0, c1, c2 in lines):
            val = delta - rho
            if best is None or val > best[0] or (val == best[0] and (rho, delta) < best[1:]):
                best = (val, rho, delta)
    A_ub = np.array([[-float(c1), -float(c2)] for _, c1, c2 in lines])
    b_ub = np.array([float(c0) for c0, _, _ in lines])
    lp = linprog([1.0, -1.0], A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * 2, method="highs")
    val, rho, delta = best
    tau = qdnotr_trace(k, rho, delta)
    state = is_tracial(tau.S, tau) and is_state(tau.S, tau)
    return MarginResult(k, val, rho, delta, float(-lp.fun), state)


def unit_summand_trace(k: int) -> TraceFunctional:
    """τ(v_1) = 1 and τ = 0 on T: the state factoring through the ⊕C summand."""
    return qdnotr_trace(k, 0, 0)
