"""Positive definiteness, conditional negative definiteness and Schoenberg
compatibility on finite balls, decided by Gram-matrix eigenvalues.

The Gram matrix of a symbol m over elements (g_1..g_n) is A_ij = m(g_i^-1 g_j).
All tolerances default to 1e-10 scaled by the max-norm of the matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import groups as gr
from .errors import DomainError, EigenResidualError, SymmetryError
from .symbols import AuditReport, LengthFunction

DEFAULT_EIG_TOL = 1e-10


@dataclass
class HermitianMatrix:
    """Dense self-adjoint matrix; symmetrized at construction so that
    A == A* holds exactly in storage."""

    data: np.ndarray
    provenance: str = "float"  # or "exact-rational-promoted"

    def __post_init__(self):
        a = np.asarray(self.data)
        self.data = 0.5 * (a + a.conj().T)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def max_norm(self) -> float:
        return float(np.abs(self.data).max(initial=0.0))


@dataclass
class EigenResult:
    eigenvalues: np.ndarray  # ascending
    residual: float  # max ||A v - lambda v||_2 over eigenpairs
    method: str = "eigh"


def eigendecomposition(A: HermitianMatrix) -> EigenResult:
    w, v = np.linalg.eigh(A.data)
    res = float(np.abs(A.data @ v - v * w[None, :]).max(initial=0.0))
    scale = max(A.max_norm(), 1.0)
    if A.n <= 2000 and res > 1e-10 * scale * max(A.n, 1):
        raise EigenResidualError(f"eigh residual {res:.2e} too large for n={A.n}")
    return EigenResult(eigenvalues=w, residual=res)


def gram_matrix(m: Callable, elements, G: gr.GroupSpec) -> HermitianMatrix:
    """A_ij = m(g_i^-1 g_j); m must satisfy m(g) == m(g^-1) on the closure of
    pairwise quotients (checked to 1e-12)."""
    n = len(elements)
    vals = {}
    exact = True

    def get(g):
        if g not in vals:
            v = m(g)
            exact_here = isinstance(v, (Fraction, int))
            vals[g] = (float(v), exact_here)
        return vals[g]

    A = np.empty((n, n))
    for i, gi in enumerate(elements):
        gi_inv = gr.inverse(G, gi)
        for j, gj in enumerate(elements):
            q = gr.multiply(G, gi_inv, gj)
            v, ex = get(q)
            exact = exact and ex
            A[i, j] = v
    for g in list(vals):
        vg, _ = vals[g]
        vinv, _ = get(gr.inverse(G, g))
        if abs(vg - vinv) > 1e-12:
            raise SymmetryError(f"m({g!r}) = {vg} but m(inverse) = {vinv}")
    return HermitianMatrix(A, provenance="exact-rational-promoted" if exact else "float")


def is_positive_definite(
    m: Callable, ball: gr.EnumeratedBall, tol: float = DEFAULT_EIG_TOL
) -> tuple[bool, float, np.ndarray | None]:
    """(passes, min eigenvalue, witness eigenvector on failure) for the Gram
    of m over the ball; passes iff lambda_min >= -tol * max(1, ||A||_max)."""
    A = gram_matrix(m, ball.elements, ball.group)
    w, v = np.linalg.eigh(A.data)
    res = float(np.abs(A.data @ v - v * w[None, :]).max(initial=0.0))
    scale = max(A.max_norm(), 1.0)
    if res > 1e-10 * scale * max(A.n, 1):
        raise EigenResidualError(f"eigh residual {res:.2e} too large")
    lam = float(w[0])
    ok = lam >= -tol * scale
    return ok, lam, (None if ok else v[:, 0])


def _zero_sum_basis(n: int) -> np.ndarray:
    """Orthonormal basis of {c : sum c_i = 0} by Gram-Schmidt on e_i - e_1."""
    Q = np.zeros((n, n - 1))
    for i in range(1, n):
        v = np.zeros(n)
        v[i], v[0] = 1.0, -1.0
        for k in range(i - 1):
            v -= (Q[:, k] @ v) * Q[:, k]
        Q[:, i - 1] = v / np.linalg.norm(v)
    return Q


def is_cnd(ell: LengthFunction, ball: gr.EnumeratedBall, tol: float = DEFAULT_EIG_TOL) -> tuple[bool, float]:
    """Conditional negative definiteness of ell on the ball: the Gram form
    restricted to zero-sum vectors must be <= tol. Returns (passes, max value
    of the compressed form)."""
    e = gr.identity(ball.group)
    if abs(ell(e)) > 1e-12:
        raise DomainError(f"length must vanish at the identity, got {ell(e)}")
    A = gram_matrix(lambda g: ell(g), ball.elements, ball.group)
    Q = _zero_sum_basis(A.n)
    B = HermitianMatrix(Q.T @ A.data @ Q)
    w = eigendecomposition(B).eigenvalues
    top = float(w[-1])
    return top <= tol * max(A.max_norm(), 1.0), top


def schoenberg_check(
    ell: LengthFunction,
    ball: gr.EnumeratedBall,
    t_grid,
    tol: float = DEFAULT_EIG_TOL,
) -> AuditReport:
    """e^{-t ell} must pass is_positive_definite for every t on the grid;
    reports the min over t of the minimal Gram eigenvalue."""
    import math

    worst = None
    all_ok = True
    for t in t_grid:
        ok, lam, _ = is_positive_definite(lambda g: math.exp(-t * ell(g)), ball, tol=tol)
        all_ok = all_ok and ok
        if worst is None or lam < worst[0]:
            worst = (lam, float(t))
    rep = AuditReport(
        condition="schoenberg",
        params={"length": ell.name, "t_grid": [float(t) for t in t_grid], "tol": tol},
        best_constant=worst[0],
        witness={"index": worst[1], "point": "min-eigenvalue"},
        domain=f"ball radius {ball.radius} of {ball.group.label} ({len(ball)} elements)",
        passed=all_ok,
        requested_bound=-tol,
    )
    return rep


def cp_scalar_bound(m: Callable, ball: gr.EnumeratedBall) -> float:
    """max_g |m(g)| over the ball for a unital positive definite symbol; the
    scalar multiplier-norm lower certificate, always <= 1 when the
    preconditions hold (checked)."""
    e = gr.identity(ball.group)
    if abs(float(m(e)) - 1.0) > 1e-12:
        raise DomainError(f"symbol is not unital: m(e) = {m(e)}")
    ok, lam, _ = is_positive_definite(m, ball)
    if not ok:
        raise DomainError(f"symbol is not positive definite on the ball (lambda_min = {lam:.3e})")
    return max(abs(float(m(g))) for g in ball.elements)
