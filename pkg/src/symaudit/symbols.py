"""Multiplier symbol families and the audits of their decay/regularity hypotheses.

A :class:`SymbolFamily` is an indexed family of real-valued functions on an
opaque point domain (group elements, fusion labels, or plain integers for
radial symbols).  Discrete families are indexed by integers, continuous ones
by t > 0.  The audits measure the best constant in inequalities comparing a
family to a length function, always returning the exact maximum over the
enumerated audit domain together with the witness that attains it; pass/fail
is decided only against a caller-supplied bound.

Symbol grammar understood by :func:`parse_symbol`:
``fejer:word``, ``fejer:cube``, ``br:delta=<x>``, ``radial:<measure>``,
``heat``, ``poisson``.  Measure grammar for :func:`parse_measure`:
``dirac:<y>``, ``atoms:[(y,w),...]``, ``grid:<k>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from . import groups as gr
from .errors import (
    DegenerateLengthError,
    DomainError,
    GrammarError,
    NumericDerivativeError,
    NumericError,
)

DEFAULT_GRID_RATIO = 2.0 ** (1.0 / 8.0)


def geometric_grid(t_min: float, t_max: float, ratio: float = DEFAULT_GRID_RATIO) -> np.ndarray:
    """t_min * ratio^i up to and including the first point >= t_max."""
    if t_min <= 0 or ratio <= 1:
        raise DomainError("geometric grid needs t_min > 0 and ratio > 1")
    n = max(1, math.ceil(math.log(t_max / t_min, ratio)))
    return t_min * ratio ** np.arange(n + 1)


@dataclass
class SymbolFamily:
    """An indexed family of scalar symbols with optional analytic t-derivatives."""

    name: str
    index_kind: str  # "discrete" or "continuous"
    eval_fn: Callable  # (index, point) -> float
    deriv_fn: Callable | None = None  # (order, t, point) -> float, continuous only
    eta: int = 0  # highest derivative order deriv_fn supports
    params: dict = field(default_factory=dict)
    batch_fn: Callable | None = None  # (index, points) -> np.ndarray, optional fast path

    def value(self, index, point) -> float:
        return float(self.eval_fn(index, point))

    def values(self, index, points) -> np.ndarray:
        if self.batch_fn is not None:
            return np.asarray(self.batch_fn(index, points), dtype=float)
        return np.array([self.eval_fn(index, p) for p in points], dtype=float)

    def derivative(self, order: int, t: float, point) -> float:
        if self.index_kind != "continuous":
            raise DomainError(f"{self.name} is not a continuous family")
        if self.deriv_fn is not None and order <= self.eta:
            return float(self.deriv_fn(order, t, point))
        return fd_derivative(lambda s: self.eval_fn(s, point), t, order)

    def has_analytic_derivatives(self) -> bool:
        return self.deriv_fn is not None

    def check_derivatives(self, t_grid, points, rel_tol: float = 1e-6) -> float:
        """Worst relative gap between analytic derivatives and central
        finite differences on the grid; raises if it exceeds rel_tol."""
        if self.deriv_fn is None:
            return 0.0
        worst = 0.0
        for t in t_grid:
            for p in points:
                a = self.deriv_fn(1, t, p)
                f = fd_derivative(lambda s: self.eval_fn(s, p), t, 1)
                scale = max(abs(a), abs(f), 1e-9)
                worst = max(worst, abs(a - f) / scale)
        if worst > rel_tol:
            raise NumericDerivativeError(
                f"{self.name}: analytic and finite-difference derivatives disagree ({worst:.2e})"
            )
        return worst


@dataclass
class LengthFunction:
    """Nonnegative symmetric length with l(base) = 0."""

    name: str
    eval_fn: Callable
    alpha_tag: float = 1.0

    def __call__(self, g) -> float:
        return float(self.eval_fn(g))


@dataclass
class AtomicMeasure:
    """Finite atomic probability measure on [-1, 1]."""

    atoms: list[tuple[float, float]]  # (location, weight)
    name: str = "atoms"

    def __post_init__(self):
        if not self.atoms:
            raise DomainError("measure needs at least one atom")
        for y, w in self.atoms:
            if abs(y) > 1 + 1e-15:
                raise DomainError(f"atom location {y} outside [-1, 1]")
            if w <= 0:
                raise DomainError(f"atom weight {w} must be positive")

    @property
    def mass(self) -> float:
        return float(sum(w for _, w in self.atoms))

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.mass - 1.0) <= tol


@dataclass
class AuditReport:
    """Record of one audited inequality.

    ``best_constant`` is the exact maximum of the defining ratio over the
    enumerated domain, ``witness`` the (index, point) attaining it.  ``passed``
    is None when no bound was requested.  ``gamma_assumption`` carries the
    declared (never computed) uniform multiplier norm.
    """

    condition: str
    params: dict
    best_constant: float
    witness: dict
    domain: str
    passed: bool | None = None
    requested_bound: float | None = None
    derivative_source: str | None = None
    refinement_delta: float | None = None
    gamma_assumption: float | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "condition": self.condition,
            "params": self.params,
            "best_constant": self.best_constant,
            "witness": self.witness,
            "domain": self.domain,
            "passed": self.passed,
            "requested_bound": self.requested_bound,
        }
        if self.derivative_source is not None:
            out["derivative_source"] = self.derivative_source
        if self.refinement_delta is not None:
            out["refinement_delta"] = self.refinement_delta
        if self.gamma_assumption is not None:
            out["gamma_assumption"] = self.gamma_assumption
        if self.extras:
            out["extras"] = self.extras
        return out


# ---------------------------------------------------------------------------
# finite differences: 5-point central stencils with one Richardson halving


_STENCILS = {
    1: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
    2: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
    3: np.array([-1.0, 2.0, 0.0, -2.0, 1.0]) / 2.0,
    4: np.array([1.0, -4.0, 6.0, -4.0, 1.0]),
}


def fd_derivative(f: Callable[[float], float], t: float, order: int, rel_step: float = 1e-3) -> float:
    if order not in _STENCILS:
        raise DomainError(f"finite differences support orders 1..4, got {order}")

    def stencil(h):
        vals = np.array([f(t + j * h) for j in (-2, -1, 0, 1, 2)])
        return float(_STENCILS[order] @ vals) / h**order

    h = max(abs(t), 1.0) * rel_step
    d1, d2 = stencil(h), stencil(h / 2)
    scale = max(abs(d1), abs(d2))
    if scale > 1e-12 and abs(d1 - d2) / scale > 1e-3:
        raise NumericDerivativeError(
            f"order-{order} finite difference unstable at t={t}: {d1!r} vs {d2!r}"
        )
    # one Richardson extrapolation step (stencils are O(h^2) or better)
    p = 4 if order <= 2 else 2
    return (2**p * d2 - d1) / (2**p - 1)


# ---------------------------------------------------------------------------
# concrete symbols


def fejer_symbol(G: gr.GroupSpec, ball_family: str, N: int, g, cap: int | None = None) -> Fraction:
    """|K_N ∩ g K_N| / |K_N| as an exact rational."""
    count = gr.ball_intersection_count(G, N, g, family=ball_family, cap=cap)
    total = len(gr.ball(G, N, family=ball_family, cap=cap))
    return Fraction(count, total)


def fejer_family(G: gr.GroupSpec, ball_family: str = "word", cap: int | None = None) -> SymbolFamily:
    def ev(N, g):
        return float(fejer_symbol(G, ball_family, int(N), g, cap=cap))

    def batch(N, points):
        counts = gr.intersection_count_table(G, int(N), list(points), family=ball_family, cap=cap)
        total = len(gr.ball(G, int(N), family=ball_family, cap=cap))
        return counts / total

    return SymbolFamily(
        name=f"fejer:{ball_family}@{G.label}",
        index_kind="discrete",
        eval_fn=ev,
        batch_fn=batch,
        params={"group": G.label, "ball_family": ball_family},
    )


def bochner_riesz_symbol(N: float, delta: float, k: int) -> float:
    """(1 - k^2/N^2)^delta for k <= N, else 0."""
    if delta <= 0:
        raise DomainError("bochner-riesz exponent delta must be > 0")
    if N <= 0:
        raise DomainError("bochner-riesz radius must be > 0")
    if k > N:
        return 0.0
    return (1.0 - (k / N) ** 2) ** delta


def bochner_riesz_family(delta: float, eta: int = 3) -> SymbolFamily:
    """Bochner-Riesz symbols in the dilation parameter: m_t(k) = (1-k^2/t^2)^delta.

    Piecewise smooth in t (kink at t = k); derivatives are analytic away
    from the kink.
    """
    import sympy as sp

    t, k = sp.symbols("t k", positive=True)
    expr = (1 - k**2 / t**2) ** sp.Rational(delta).limit_denominator(10**6)
    derivs = [sp.lambdify((t, k), sp.diff(expr, t, v), "numpy") for v in range(eta + 1)]

    def ev(tt, kk):
        return bochner_riesz_symbol(float(tt), delta, kk)

    def dv(order, tt, kk):
        if kk == 0:
            return 1.0 if order == 0 else 0.0
        if kk >= tt:
            return 0.0
        return float(derivs[order](float(tt), float(kk)))

    return SymbolFamily(
        name=f"br:delta={delta}",
        index_kind="continuous",
        eval_fn=ev,
        deriv_fn=dv,
        eta=eta,
        params={"delta": delta},
    )


def radial_kernel_symbol(measure: AtomicMeasure, t: float, k: int) -> float:
    """sum_i w_i (y_i/t + e^{-2/t})^k; needs t >= min_t0() and unit mass."""
    if not measure.is_normalized():
        raise DomainError(f"measure mass {measure.mass} != 1")
    if t < min_t0():
        raise DomainError(f"t = {t} below t0 = {min_t0():.6f}: base may leave [-1, 1]")
    return float(sum(w * (y / t + math.exp(-2.0 / t)) ** k for y, w in measure.atoms))


_radial_derivs = None


def _radial_deriv_fns(max_order: int = 4):
    global _radial_derivs
    if _radial_derivs is None:
        import sympy as sp

        t, y, n = sp.symbols("t y n", positive=True)
        f = y / t + sp.exp(-2 / t)
        _radial_derivs = [sp.lambdify((t, y, n), sp.diff(f**n, t, v), "numpy") for v in range(max_order + 1)]
    return _radial_derivs


def radial_kernel_family(measure: AtomicMeasure, eta: int = 4) -> SymbolFamily:
    fns = _radial_deriv_fns(eta)

    def ev(t, k):
        return radial_kernel_symbol(measure, float(t), k)

    def dv(order, t, k):
        if k == 0:
            return 1.0 if order == 0 else 0.0
        return float(sum(w * fns[order](float(t), y, k) for y, w in measure.atoms))

    return SymbolFamily(
        name=f"radial:{measure.name}",
        index_kind="continuous",
        eval_fn=ev,
        deriv_fn=dv,
        eta=eta,
        params={"measure": measure.name, "atoms": measure.atoms},
    )


_MIN_T0_CACHE: list[float] = []


def min_t0() -> float:
    """Smallest t (to 1e-6, by bisection) from which both base-point
    inequalities e^{-2/t} - 1/t >= e^{-4/t} and 1/t + e^{-2/t} < e^{-2/(3t)}
    hold; both are re-verified at the returned value and at twice it."""
    if _MIN_T0_CACHE:
        return _MIN_T0_CACHE[0]

    def ok(t):
        return math.exp(-2 / t) - 1 / t >= math.exp(-4 / t) and 1 / t + math.exp(-2 / t) < math.exp(-2 / (3 * t))

    lo, hi = 1.0, 100.0
    if ok(lo) or not ok(hi):
        raise NumericError("unexpected bracket for t0 bisection")
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    if not (ok(hi) and ok(2 * hi)):
        raise NumericError("t0 verification failed at the bisection result")
    _MIN_T0_CACHE.append(hi)
    return hi


def semigroup_symbol(length: LengthFunction, t: float, kind: str, g) -> float:
    """e^{-t l(g)} (heat) or e^{-t sqrt(l(g))} (poisson)."""
    if t < 0:
        raise DomainError("semigroup time must be >= 0")
    lv = length(g)
    if kind == "heat":
        return math.exp(-t * lv)
    if kind == "poisson":
        return math.exp(-t * math.sqrt(lv))
    raise GrammarError(kind, "semigroup kind must be heat or poisson")


_heat_derivs = None


def _heat_deriv_fns(max_order: int = 4):
    global _heat_derivs
    if _heat_derivs is None:
        import sympy as sp

        t, x = sp.symbols("t x", positive=True)
        _heat_derivs = [sp.lambdify((t, x), sp.diff(sp.exp(-x / t), t, v), "numpy") for v in range(max_order + 1)]
    return _heat_derivs


def heat_family(length: LengthFunction) -> SymbolFamily:
    """Approximate-identity heat symbols m_t = e^{-l/t} (t -> infinity)."""
    fns = _heat_deriv_fns()

    def dv(order, t, g):
        x = length(g)
        if x == 0.0:
            return 1.0 if order == 0 else 0.0
        return float(fns[order](float(t), x))

    return SymbolFamily(
        name=f"heat[{length.name}]",
        index_kind="continuous",
        eval_fn=lambda t, g: math.exp(-length(g) / t),
        deriv_fn=dv,
        eta=4,
        params={"length": length.name},
    )


def lacunary_heat_family(length: LengthFunction) -> SymbolFamily:
    """Discrete family m_N = e^{-l/2^N}, N in Z."""
    return SymbolFamily(
        name=f"heat-lacunary[{length.name}]",
        index_kind="discrete",
        eval_fn=lambda N, g: math.exp(-length(g) / 2.0 ** float(N)),
        params={"length": length.name},
    )


# ---------------------------------------------------------------------------
# audits


def _domain_lengths(length: LengthFunction, domain: Sequence, base_point) -> np.ndarray:
    lv = np.array([length(g) for g in domain], dtype=float)
    for g, v in zip(domain, lv):
        is_base = base_point is not None and g == base_point
        if v == 0.0 and not is_base:
            raise DegenerateLengthError(f"length vanishes at non-base point {g!r}")
    return lv


def _finish(report: AuditReport, beta_request) -> AuditReport:
    if beta_request is not None:
        report.requested_bound = float(beta_request)
        report.passed = bool(report.best_constant <= beta_request)
    return report


def audit_a1(
    family: SymbolFamily,
    length: LengthFunction,
    alpha: float,
    domain: Sequence,
    n_range: Sequence[int],
    base_point=None,
    beta_request: float | None = None,
    gamma_assumption: float | None = None,
) -> AuditReport:
    """Best beta for |1-m_N| <= beta l^alpha / 2^N and |m_N| <= beta 2^N / l^alpha."""
    pts = [g for g in domain if not (base_point is not None and g == base_point)]
    lv = _domain_lengths(length, pts, None) ** alpha
    best, wit = -1.0, {}
    base_ok = True
    for N in n_range:
        vals = family.values(N, pts)
        two_n = 2.0 ** float(N)
        r1 = np.abs(1.0 - vals) * two_n / lv
        r2 = np.abs(vals) * lv / two_n
        r = np.maximum(r1, r2)
        i = int(np.argmax(r))
        if r[i] > best:
            best, wit = float(r[i]), {"index": int(N), "point": repr(pts[i])}
        if base_point is not None and abs(family.value(N, base_point) - 1.0) > 1e-12:
            base_ok = False
    rep = AuditReport(
        condition="A1",
        params={"alpha": alpha, "n_range": [int(n) for n in n_range], "family": family.name, "length": length.name},
        best_constant=best,
        witness=wit,
        domain=f"{len(pts)} points",
        gamma_assumption=gamma_assumption,
        extras={"base_point_unital": base_ok},
    )
    return _finish(rep, beta_request)


def audit_difference(
    family: SymbolFamily,
    length: LengthFunction,
    alpha: float,
    domain: Sequence,
    n_range: Sequence[int],
    base_point=None,
    beta_request: float | None = None,
) -> AuditReport:
    """Best beta for |1-m_N| <= beta l^alpha/N, |m_N| <= beta N/l^alpha and
    the consecutive-difference bound |m_{N+1}-m_N| <= beta/N."""
    pts = [g for g in domain if not (base_point is not None and g == base_point)]
    lv = _domain_lengths(length, pts, None) ** alpha
    best, wit = -1.0, {}
    for N in n_range:
        if N <= 0:
            raise DomainError("difference condition is indexed by N >= 1")
        vals = family.values(N, pts)
        nxt = family.values(N + 1, pts)
        r = np.maximum(np.abs(1.0 - vals) * N / lv, np.abs(vals) * lv / N)
        r = np.maximum(r, N * np.abs(nxt - vals))
        i = int(np.argmax(r))
        if r[i] > best:
            best, wit = float(r[i]), {"index": int(N), "point": repr(pts[i])}
    rep = AuditReport(
        condition="difference",
        params={"alpha": alpha, "n_range": [int(n) for n in n_range], "family": family.name, "length": length.name},
        best_constant=best,
        witness=wit,
        domain=f"{len(pts)} points",
    )
    return _finish(rep, beta_request)


def audit_a2(
    family: SymbolFamily,
    length: LengthFunction,
    alpha: float,
    eta: int,
    t_grid: Sequence[float],
    domain: Sequence,
    base_point=None,
    beta_request: float | None = None,
    gamma_assumption: float | None = None,
    refinement: bool = True,
) -> AuditReport:
    """Best beta covering |1-m_t| <= beta l^a/t, |m_t| <= beta t/l^a and
    |d^k m_t/dt^k| <= beta/t^k for 1 <= k <= eta, over grid x domain."""
    pts = [g for g in domain if not (base_point is not None and g == base_point)]
    lv = _domain_lengths(length, pts, None) ** alpha

    def sweep(grid):
        best, wit = -1.0, {}
        for t in grid:
            vals = family.values(t, pts)
            r = np.maximum(np.abs(1.0 - vals) * t / lv, np.abs(vals) * lv / t)
            for k in range(1, eta + 1):
                dk = np.array([family.derivative(k, t, p) for p in pts])
                r = np.maximum(r, np.abs(dk) * t**k)
            i = int(np.argmax(r))
            if r[i] > best:
                best, wit = float(r[i]), {"index": float(t), "point": repr(pts[i])}
        return best, wit

    best, wit = sweep(t_grid)
    delta = None
    if refinement:
        g = np.asarray(t_grid, dtype=float)
        fine = np.sort(np.concatenate([g, np.sqrt(g[:-1] * g[1:])]))
        b2, _ = sweep(fine)
        delta = abs(b2 - best)
        best = max(best, b2)
    rep = AuditReport(
        condition="A2",
        params={"alpha": alpha, "eta": eta, "family": family.name, "length": length.name,
                "t_grid": [float(t) for t in t_grid]},
        best_constant=best,
        witness=wit,
        domain=f"{len(pts)} points x {len(t_grid)} grid",
        derivative_source="analytic" if family.has_analytic_derivatives() else "finite-difference",
        refinement_delta=delta,
        gamma_assumption=gamma_assumption,
    )
    return _finish(rep, beta_request)


def lacunary_l2_bound(
    family: SymbolFamily,
    f: Callable,
    a: float,
    domain: Sequence,
    n_range: Sequence[int],
    factor_request: float | None = None,
) -> AuditReport:
    """Audit the envelope |m_N| <= beta a^N f/(a^N+f)^2, then verify the
    row sums sum_N |m_N|^2 <= C beta^2 a^2/(a^2-1) and report the observed C."""
    if a <= 1:
        raise DomainError("lacunary base must satisfy a > 1")
    fv = np.array([f(g) for g in domain], dtype=float)
    if (fv < 0).any():
        raise DomainError("f must be nonnegative")
    beta = 0.0
    beta_wit = {}
    sums = np.zeros(len(domain))
    for N in n_range:
        vals = family.values(N, list(domain))
        an = a ** float(N)
        env = an * fv / (an + fv) ** 2
        zero = fv == 0.0
        if (np.abs(vals[zero]) > 0).any():
            i = int(np.nonzero(zero & (np.abs(vals) > 0))[0][0])
            raise DomainError(f"envelope degenerate: f = 0 but m_{N} != 0 at {domain[i]!r}")
        ratio = np.zeros_like(vals)
        nz = ~zero
        ratio[nz] = np.abs(vals[nz]) / env[nz]
        i = int(np.argmax(ratio))
        if ratio[i] > beta:
            beta, beta_wit = float(ratio[i]), {"index": int(N), "point": repr(domain[i])}
        sums += vals**2
    bound_unit = a * a / (a * a - 1.0)
    denom = max(beta, 1e-300) ** 2 * bound_unit
    c_obs = float(sums.max() / denom)
    i = int(np.argmax(sums))
    rep = AuditReport(
        condition="lacunary-l2",
        params={"a": a, "n_range": [int(n) for n in n_range], "family": family.name},
        best_constant=c_obs,
        witness={"point": repr(domain[i]), "row_sum": float(sums[i])},
        domain=f"{len(domain)} points",
        extras={"envelope_beta": beta, "envelope_witness": beta_wit, "a2_over_a2m1": bound_unit},
    )
    return _finish(rep, factor_request)


def k_constant(
    family: SymbolFamily,
    f: Callable,
    t_grid: Sequence[float],
    domain: Sequence,
) -> tuple[float, dict]:
    """K = sum_j a_j^(1/2) (a_j^(1/2) + b_j^(1/2)) with a_j, b_j the exact
    maxima of |m_t| and t|dm_t/dt| over the dyadic annuli 2^(j-2) < f/t <= 2^j
    of the discretized (t, point) set.  Empty annuli contribute zero; the
    inhabited j-range is the truncation and is returned with the table."""
    fv = [float(f(g)) for g in domain]
    aj: dict[int, float] = {}
    bj: dict[int, float] = {}
    for t in t_grid:
        for g, x in zip(domain, fv):
            if x <= 0:
                continue
            q = x / t
            # q lies in annulus j iff 2^(j-2) < q <= 2^j: two consecutive j
            jhi = math.floor(math.log2(q)) if q > 0 else 0
            while 2.0**jhi < q:
                jhi += 1
            while 2.0 ** (jhi - 1) >= q:
                jhi -= 1
            for j in (jhi, jhi + 1):
                if 2.0 ** (j - 2) < q <= 2.0**j:
                    m = abs(family.value(t, g))
                    d = abs(family.derivative(1, t, g)) * t
                    aj[j] = max(aj.get(j, 0.0), m)
                    bj[j] = max(bj.get(j, 0.0), d)
    total = sum(math.sqrt(aj[j]) * (math.sqrt(aj[j]) + math.sqrt(bj.get(j, 0.0))) for j in aj)
    table = {
        "a_j": {str(j): aj[j] for j in sorted(aj)},
        "b_j": {str(j): bj.get(j, 0.0) for j in sorted(aj)},
        "inhabited_j": sorted(aj),
        "truncation_tail": 0.0,  # outside the inhabited range the discretized annuli are empty
    }
    return float(total), table


# ---------------------------------------------------------------------------
# multi-order differences


def _rho(s: int) -> float:
    return 2.0 ** (2.0 ** (-s - 1))


def multiorder_difference(family: SymbolFamily, s_list: Sequence[int], t: float, point) -> float:
    """The iterated difference of the family at scales rho_i = 2^(2^(-s_i-1)),
    computed by the signed-sum expansion over {0,1}^v."""
    s_list = list(s_list)
    if not s_list:
        raise DomainError("need at least one difference order")
    if any(b >= a for a, b in zip(s_list, s_list[1:])):
        raise DomainError("s-list must be strictly decreasing")
    v = len(s_list)
    total = 0.0
    for eps in iter_product((0, 1), repeat=v):
        scale = 1.0
        for e, s in zip(eps, s_list):
            if e:
                scale *= _rho(s)
        total += (-1.0) ** (v + sum(eps)) * family.value(scale * t, point)
    return total


def multiorder_difference_recursive(family: SymbolFamily, s_list: Sequence[int], t: float, point) -> float:
    """Reference recursion; must agree with the signed-sum expansion."""
    s_list = list(s_list)
    if len(s_list) == 1:
        return family.value(_rho(s_list[0]) * t, point) - family.value(t, point)
    head = s_list[:-1]
    r = _rho(s_list[-1])
    return multiorder_difference_recursive(family, head, r * t, point) - multiorder_difference_recursive(
        family, head, t, point
    )


def _multiorder_derivative(family: SymbolFamily, s_list, k: int, t: float, point) -> float:
    v = len(s_list)
    total = 0.0
    for eps in iter_product((0, 1), repeat=v):
        scale = 1.0
        for e, s in zip(eps, s_list):
            if e:
                scale *= _rho(s)
        total += (-1.0) ** (v + sum(eps)) * scale**k * family.derivative(k, scale * t, point)
    return total


def audit_multiorder_derivatives(
    family: SymbolFamily,
    s_list: Sequence[int],
    k: int,
    t_grid: Sequence[float],
    domain: Sequence,
    bound_request: float | None = None,
) -> AuditReport:
    """Best constant for |d^k psi^[s1..sv]_t / dt^k| * t^k * 2^(s1+..+sv) / (2k+2v)^v."""
    v = len(s_list)
    if k + v > family.eta and family.deriv_fn is not None:
        raise DomainError(f"k+v = {k + v} exceeds family smoothness eta = {family.eta}")
    norm = 2.0 ** sum(s_list) / (2 * k + 2 * v) ** v
    best, wit = -1.0, {}
    for t in t_grid:
        for g in domain:
            val = abs(_multiorder_derivative(family, list(s_list), k, float(t), g)) * float(t) ** k * norm
            if val > best:
                best, wit = float(val), {"index": float(t), "point": repr(g)}
    rep = AuditReport(
        condition="multiorder-derivative",
        params={"s_list": [int(s) for s in s_list], "k": k, "family": family.name},
        best_constant=best,
        witness=wit,
        domain=f"{len(domain)} points x {len(t_grid)} grid",
        derivative_source="analytic" if family.has_analytic_derivatives() else "finite-difference",
    )
    return _finish(rep, bound_request)


# ---------------------------------------------------------------------------
# scalar quadrature checks


def bochner_riesz_composition_check(alpha: float, beta: float, s_grid: Sequence[float]) -> float:
    """Max over the grid of |(1-s^2)^(a+b) - C_{a,b} Int_s^1 (1-t^2)^(b-1) t^(2a+1) (1-s^2/t^2)^a dt|
    with C_{a,b} = 2 Gamma(a+b+1) / (Gamma(a+1) Gamma(b)), radius normalized to 1."""
    if alpha <= -1 or beta <= 0:
        raise DomainError("composition check needs alpha > -1 and beta > 0")
    c = 2.0 * math.gamma(alpha + beta + 1) / (math.gamma(alpha + 1) * math.gamma(beta))
    worst = 0.0
    for s in s_grid:
        if not 0.0 <= s <= 1.0:
            raise DomainError("s-grid must lie in [0, 1]")
        if s == 1.0:
            val = 0.0
        else:
            val, err = integrate.quad(
                lambda t: (1 - t * t) ** (beta - 1) * t ** (2 * alpha + 1) * (1 - s * s / (t * t)) ** alpha,
                s,
                1.0,
                epsabs=1e-13,
                epsrel=1e-13,
                limit=200,
            )
            if err > 1e-9:
                raise NumericError(f"composition quadrature did not converge at s={s} (err {err:.2e})")
            val *= c
        worst = max(worst, abs((1 - s * s) ** (alpha + beta) - val))
    return worst


def square_function_constant(alpha: float, k: int = 1) -> float:
    """Quadrature of Int_k^inf (k^4/r^4) (1-k^2/r^2)^(2 alpha) dr/r; the value
    is k-independent with closed form 1/(2(2a+1)(2a+2))."""
    if alpha <= -0.5:
        raise DomainError("square-function integral diverges for alpha <= -1/2")
    if k < 1:
        raise DomainError("frequency k must be >= 1")
    val, err = integrate.quad(
        lambda r: k**4 / r**5 * (1 - (k / r) ** 2) ** (2 * alpha),
        float(k),
        np.inf,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=200,
    )
    if err > 1e-9:
        raise NumericError(f"square-function quadrature did not converge (err {err:.2e})")
    return float(val)


def square_function_closed_form(alpha: float) -> float:
    return 1.0 / (2.0 * (2 * alpha + 1) * (2 * alpha + 2))


def subordination_check(u: float) -> float:
    """|Int_0^inf phi(s) e^{-su} ds - e^{-sqrt(u)}| for the classical
    subordination density phi(s) = e^{-1/4s} / (2 sqrt(pi) s^{3/2})."""
    val, err = integrate.quad(
        lambda s: math.exp(-1.0 / (4 * s)) / (2 * math.sqrt(math.pi) * s**1.5) * math.exp(-s * u),
        0.0,
        np.inf,
        epsabs=1e-12,
        limit=400,
    )
    return abs(val - math.exp(-math.sqrt(u)))


def rapid_decay_truncation_bound(N: int) -> tuple[float, float]:
    """(value, N^2 * value) where value = sum_{r > N^2} e^{-r/N} (r+1),
    in closed form from the arithmetico-geometric series
    sum_{r >= M} (r+1) x^r = x^M (M+1-Mx)/(1-x)^2 with x = e^{-1/N}."""
    if N < 1:
        raise DomainError("N must be >= 1")
    x = math.exp(-1.0 / N)
    M = N * N + 1
    value = x**M * ((M + 1) - M * x) / (1 - x) ** 2
    return value, N * N * value


# ---------------------------------------------------------------------------
# grammars


def parse_measure(text: str) -> AtomicMeasure:
    t = text.strip()
    if t.startswith("dirac:"):
        try:
            y = float(t[6:])
        except ValueError:
            raise GrammarError(text, "dirac location must be a number", position=6)
        return AtomicMeasure([(y, 1.0)], name=t)
    if t.startswith("grid:"):
        try:
            k = int(t[5:])
        except ValueError:
            raise GrammarError(text, "grid size must be an integer", position=5)
        if k < 1:
            raise GrammarError(text, "grid size must be >= 1", position=5)
        locs = [0.0] if k == 1 else [-1.0 + 2.0 * i / (k - 1) for i in range(k)]
        return AtomicMeasure([(y, 1.0 / k) for y in locs], name=t)
    if t.startswith("atoms:"):
        body = t[6:]
        import ast

        try:
            pairs = ast.literal_eval(body)
            atoms = [(float(y), float(w)) for y, w in pairs]
        except (ValueError, SyntaxError, TypeError):
            raise GrammarError(text, "expected atoms:[(y,w),...]", position=6)
        return AtomicMeasure(atoms, name=t)
    raise GrammarError(text, "expected dirac:<y>, atoms:[...] or grid:<k>", position=0)


def parse_symbol(text: str, G: gr.GroupSpec | None = None, length: LengthFunction | None = None) -> SymbolFamily:
    t = text.strip()
    if t in ("fejer:word", "fejer:cube"):
        if G is None:
            raise GrammarError(text, "fejer symbols need a group")
        return fejer_family(G, ball_family=t.split(":")[1])
    if t.startswith("br:delta="):
        try:
            delta = float(t[len("br:delta="):])
        except ValueError:
            raise GrammarError(text, "bad delta", position=len("br:delta="))
        return bochner_riesz_family(delta)
    if t.startswith("radial:"):
        return radial_kernel_family(parse_measure(t[len("radial:"):]))
    if t in ("heat", "poisson"):
        if length is None:
            raise GrammarError(text, f"{t} family needs a length function")
        if t == "heat":
            return heat_family(length)
        return SymbolFamily(
            name=f"poisson[{length.name}]",
            index_kind="continuous",
            eval_fn=lambda tt, g: math.exp(-math.sqrt(length(g)) / tt),
            params={"length": length.name},
        )
    raise GrammarError(text, "unknown symbol family", position=0)


def word_length_function(G: gr.GroupSpec) -> LengthFunction:
    return LengthFunction(name=f"word-length@{G.label}", eval_fn=lambda g: float(gr.word_length(G, g)))
