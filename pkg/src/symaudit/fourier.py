"""Truncated Fourier analysis on groups: coefficient spaces, multipliers,
regular-representation matrices for finite groups, normalized Schatten norms,
column/row sequence-norm certificates and the abelian maximal experiments.

Traces are normalized throughout (tau(1) = 1), so for a finite group the
p-norm of Sum x^(g) lambda(g) is computed from the singular values of the
|G| x |G| permutation-matrix sum with the mean replacing the sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import groups as gr
from .errors import DomainError


@dataclass
class FourierCoeffs:
    """Finitely supported map g -> complex coefficient."""

    group: gr.GroupSpec
    coeffs: dict

    def __post_init__(self):
        self.coeffs = {gr.validate_element(self.group, g): complex(v) for g, v in self.coeffs.items()}

    def items(self):
        return sorted(self.coeffs.items())

    def support(self):
        return [g for g, _ in self.items()]


@dataclass
class GroupAlgebraMatrix:
    """Sum of coefficient-weighted left-translation permutation matrices."""

    group: gr.GroupSpec
    data: np.ndarray

    @property
    def n(self) -> int:
        return self.data.shape[0]


@dataclass
class SequenceNormReport:
    p: float
    column: float
    row: float
    cr_value: float
    splittings: list[str] = field(default_factory=list)

    def to_dict(self):
        return {
            "p": self.p,
            "column": self.column,
            "row": self.row,
            "cr_value": self.cr_value,
            "splittings": self.splittings,
        }


def apply_multiplier(m: Callable, x: FourierCoeffs, domain=None) -> FourierCoeffs:
    """Rescale each coefficient by m(g); error if the support leaves a
    declared domain."""
    out = {}
    for g, v in x.coeffs.items():
        if domain is not None and g not in domain:
            raise DomainError(f"support point {g!r} escapes the multiplier domain")
        out[g] = m(g) * v
    return FourierCoeffs(x.group, out)


def plancherel_norm(x: FourierCoeffs) -> float:
    return float(np.sqrt(sum(abs(v) ** 2 for v in x.coeffs.values())))


def regular_representation(G: gr.GroupSpec, x: FourierCoeffs) -> GroupAlgebraMatrix:
    """Sum x^(g) P_g with P_g the permutation matrix of left translation
    (lambda(g) delta_h = delta_{gh}); finite groups only."""
    if not gr.is_finite(G):
        raise DomainError(f"{G.label} is infinite; regular representation matrices need a finite group")
    els = gr.enumerate_group(G)
    index = {g: i for i, g in enumerate(els)}
    n = len(els)
    A = np.zeros((n, n), dtype=complex)
    for g, v in x.coeffs.items():
        for j, h in enumerate(els):
            A[index[gr.multiply(G, g, h)], j] += v
    return GroupAlgebraMatrix(G, A)


def matrix_to_coefficients(A: GroupAlgebraMatrix) -> FourierCoeffs:
    """Inverse of regular_representation: x^(g) = tau(A P_{g^-1})."""
    G = A.group
    els = gr.enumerate_group(G)
    index = {g: i for i, g in enumerate(els)}
    n = len(els)
    out = {}
    for g in els:
        ginv = gr.inverse(G, g)
        # tau(A P_{g^-1}): the h-th diagonal entry of A P_{g^-1} is A[h, g^-1 h]
        val = sum(A.data[index[h], index[gr.multiply(G, ginv, h)]] for h in els) / n
        if val != 0:
            out[g] = val
    return FourierCoeffs(G, out)


def singular_values(A: GroupAlgebraMatrix) -> np.ndarray:
    """Singular values via the eigenvalues of A* A, ascending.

    Eigenvalues below the numerical-rank threshold are flushed to zero so the
    square root does not amplify round-off into spurious tiny singular values.
    """
    w = np.linalg.eigvalsh(A.data.conj().T @ A.data)
    w = np.clip(w, 0.0, None)
    tol = w.max(initial=0.0) * A.n * np.finfo(float).eps
    w[w < tol] = 0.0
    return np.sqrt(w)


def schatten_norm(A: GroupAlgebraMatrix, p: float) -> float:
    """(tau(|A|^p))^(1/p) with the normalized trace; operator norm at p=inf."""
    if p < 1:
        raise DomainError("Schatten exponent must satisfy p >= 1")
    s = singular_values(A)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float((np.mean(s**p)) ** (1.0 / p))


def _psd_power_norm(M: np.ndarray, p: float) -> float:
    # || M^(1/2) ||_p for a psd matrix M, normalized trace
    w = np.clip(np.linalg.eigvalsh(M), 0.0, None)
    if np.isinf(p):
        return float(np.sqrt(w.max(initial=0.0)))
    return float(np.mean(w ** (p / 2.0)) ** (1.0 / p))


def cr_sequence_norm(xs: Sequence[GroupAlgebraMatrix], p: float) -> SequenceNormReport:
    """Column/row square-function norms of a finite operator sequence.

    For p >= 2 the combined value is the max of column and row norms; for
    p < 2 the true norm is an infimum over decompositions, and the value
    reported here is the min over three canonical splittings (column-only,
    row-only, even half-split) -- an upper bound of undetermined tightness.
    """
    if not xs:
        raise DomainError("empty sequence")
    G = xs[0].group
    if any(x.group != G for x in xs):
        raise DomainError("sequence elements live on different groups")
    col_M = sum(x.data.conj().T @ x.data for x in xs)
    row_M = sum(x.data @ x.data.conj().T for x in xs)
    col = _psd_power_norm(col_M, p)
    row = _psd_power_norm(row_M, p)
    if p >= 2:
        return SequenceNormReport(p, col, row, max(col, row), ["max(column,row)"])
    candidates = {
        "column-only": col,
        "row-only": row,
        "half-split": 0.5 * col + 0.5 * row,
    }
    winner = min(candidates, key=candidates.get)
    return SequenceNormReport(p, col, row, candidates[winner], [winner])


def commutative_maximal_norm(G: gr.GroupSpec, fs: Sequence[np.ndarray], p: float) -> float:
    """|| max_n |f_n| ||_p under normalized counting measure, for functions on
    a finite abelian group (arrays over enumerate_group order)."""
    if not gr.is_finite(G) or not gr.is_abelian(G):
        raise DomainError(f"{G.label} is not a finite abelian group")
    n = gr.group_order(G)
    stack = np.stack([np.asarray(f) for f in fs])
    if stack.shape[1] != n:
        raise DomainError(f"functions must have {n} values")
    sup = np.abs(stack).max(axis=0)
    if np.isinf(p):
        return float(sup.max())
    return float((np.mean(sup**p)) ** (1.0 / p))


# ---------------------------------------------------------------------------
# abelian Fejer maximal experiment


def _cyclic_fejer_table(n: int, d: int) -> np.ndarray:
    """m_N tables for the cube-family Fejer symbol on (Z/n)^d, N = 0..n,
    computed exactly from the indicator autocorrelation via FFT."""
    shape = (n,) * d
    tables = np.empty((n + 1,) + shape)
    for N in range(n + 1):
        ind1 = np.zeros(n)
        for a in range(-N, N + 1):
            ind1[a % n] = 1.0
        ind = ind1
        for _ in range(d - 1):
            ind = np.multiply.outer(ind, ind1)
        F = np.fft.fftn(ind)
        counts = np.rint(np.real(np.fft.ifftn(F * np.conj(F))))
        tables[N] = counts / ind.sum()
    return tables


def fejer_maximal_experiment(n: int, d: int, p: float, trials: int, seed: int, cap: int = 10**6) -> dict:
    """Empirical sup-ratio ||sup_N F_N f||_p / ||f||_p over seeded random
    complex-Gaussian f on (Z/n)^d, N <= n; deterministic given the seed."""
    if trials < 1:
        raise DomainError("need at least one trial")
    if n**d > cap:
        raise DomainError(f"group size {n**d} exceeds cap {cap}")
    tables = _cyclic_fejer_table(n, d)  # (n+1, n^d grid)
    shape = (n,) * d
    ratios = []
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
        f = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        fh = np.fft.fftn(f)
        sup = np.zeros(shape)
        for N in range(n + 1):
            FN = np.fft.ifftn(tables[N] * fh)
            np.maximum(sup, np.abs(FN), out=sup)
        num = float(np.mean(sup**p) ** (1.0 / p))
        den = float(np.mean(np.abs(f) ** p) ** (1.0 / p))
        ratios.append(num / den)
    return {
        "n": n,
        "d": d,
        "p": p,
        "trials": trials,
        "seed": seed,
        "ratios": ratios,
        "max_ratio": float(max(ratios)),
        "mean_ratio": float(sum(ratios) / len(ratios)),
    }
