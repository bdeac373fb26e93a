"""Construction of conditionally negative definite lengths from approximating
families: subsequence selection, the sqrt(2)-weighted series, its two-sided
comparison with sqrt(2)^J, and the Dirichlet-type symbol audit.

The length built from a family (phi_s) along a subsequence (s_j) is

    l(p) = sum_{j >= 0} sqrt(2)^j (1 - phi_{s_j}(p)),

evaluated as an interval: terms up to a truncation level are summed exactly,
and the remainder is bounded through the selection inequality (strict form
``1 - phi_{s_{N+1}} <= 2^-N`` on E_{s_N}, or the relaxed form
``<= 2^(J(p)-N)`` accepted with an audited envelope constant).  The interval
width is exactly the analytic tail bound at the truncation level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import groups as gr
from .errors import DomainError, NonConvergenceError
from .symbols import AuditReport, lacunary_l2_bound, SymbolFamily

SQRT2 = math.sqrt(2.0)


@dataclass
class ApproximatingFamily:
    """Family s -> phi_s with finite supports E_s increasing to the domain.

    ``support_fn(s)`` must return a container with membership and iteration
    (an EnumeratedBall works).  ``range_cap`` bounds |1 - phi_s| from above
    (1 for [0,1]-valued families such as Fejer symbols, else 2).
    """

    name: str
    eval_fn: Callable  # (s, point) -> float
    support_fn: Callable  # (s) -> container of points
    unital: bool = True
    range_cap: float = 1.0
    batch_fn: Callable | None = None  # (s, points) -> np.ndarray
    max_index: int | None = None  # largest evaluable s, None = unbounded

    def value(self, s: int, point) -> float:
        return float(self.eval_fn(s, point))

    def values(self, s: int, points) -> np.ndarray:
        if self.batch_fn is not None:
            return np.asarray(self.batch_fn(s, points), dtype=float)
        return np.array([self.eval_fn(s, p) for p in points], dtype=float)

    def support(self, s: int):
        return self.support_fn(s)


@dataclass
class SelectionResult:
    subsequence: list[int]  # s_1, s_2, ...
    verify_window: int
    relaxed: bool
    verified: dict = field(default_factory=dict)  # per-level verified window


def select_subsequence(
    family: ApproximatingFamily,
    horizon: int,
    verify_window: int,
    count: int | None = None,
    relaxed: bool = False,
) -> SelectionResult:
    """Pick s_1 = 1 and then each s_{N+1} minimal above s_N so that
    |1 - phi_{s'}(p)| <= 2^-N for all p in E_{s_N} and every s' in the
    verified window [s_{N+1}, s_{N+1} + verify_window].

    In relaxed mode the threshold is 2^(J(p) - N) with J computed from the
    partial subsequence.  Raises NonConvergenceError (with the blocking
    point) when no admissible index exists below the horizon.
    """
    s_list = [1]
    j_of: dict = {}
    for p in family.support(1):
        j_of.setdefault(p, 1)
    verified = {1: (1, 1 + verify_window)}
    while count is None or len(s_list) < count:
        N = len(s_list)
        s_n = s_list[-1]
        pts = list(family.support(s_n))
        found = None
        blocking = None
        for cand in range(s_n + 1, horizon + 1):
            ok = True
            for sp in range(cand, min(cand + verify_window, horizon) + 1):
                vals = family.values(sp, pts)
                if relaxed:
                    thr = np.array([2.0 ** (j_of.get(p, N) - N) for p in pts])
                else:
                    thr = 2.0 ** (-N)
                bad = np.abs(1.0 - vals) > thr + 1e-12
                if bad.any():
                    ok = False
                    blocking = pts[int(np.nonzero(bad)[0][0])]
                    break
            if ok:
                found = cand
                break
        if found is None:
            if count is None:
                break
            raise NonConvergenceError(N, horizon, blocking)
        s_list.append(found)
        verified[len(s_list)] = (found, min(found + verify_window, horizon))
        for p in family.support(found):
            j_of.setdefault(p, len(s_list))
        if found >= horizon:
            break
    if count is not None and len(s_list) < count:
        raise NonConvergenceError(len(s_list), horizon, None)
    return SelectionResult(s_list, verify_window, relaxed, verified)


def verify_selection(family: ApproximatingFamily, result: SelectionResult) -> bool:
    """Replay the selection inequality on the recorded verified windows."""
    s = result.subsequence
    j_of: dict = {}
    for level, sn in enumerate(s, start=1):
        for p in family.support(sn):
            j_of.setdefault(p, level)
    for N in range(1, len(s)):
        pts = list(family.support(s[N - 1]))
        lo, hi = result.verified[N + 1]
        for sp in range(lo, hi + 1):
            vals = family.values(sp, pts)
            if result.relaxed:
                thr = np.array([2.0 ** (j_of.get(p, N) - N) for p in pts])
            else:
                thr = 2.0 ** (-N)
            if (np.abs(1.0 - vals) > thr + 1e-12).any():
                return False
    return True


@dataclass
class CndLength:
    """The truncated-series length with interval evaluation.

    ``subsequence`` is j-indexed from 0 (s_0, s_1, ...); E_j = support(s_j);
    J(p) = min{j : p in E_j}.  Terms with j <= truncation level are summed
    exactly; beyond it each term is bounded by
    ``range_cap`` and ``envelope_constant * 2^(J - (j-1))`` (relaxed) or
    ``2^-(j-1)`` (strict), giving [l_lo, l_hi].
    """

    family: ApproximatingFamily
    subsequence: list[int]
    relaxed: bool = False
    envelope_constant: float = 1.0
    max_eval_level: int | None = None  # cap on evaluated j, on top of j_max
    base_point: object = None
    _j_cache: dict = field(default_factory=dict, repr=False)

    def j_index(self, point) -> int:
        if point in self._j_cache:
            return self._j_cache[point]
        for j, s in enumerate(self.subsequence):
            if point in self.family.support(s):
                self._j_cache[point] = j
                return j
        raise DomainError(f"point {point!r} outside every support up to s = {self.subsequence[-1]}")

    def _eval_level(self, j_max: int) -> int:
        lvl = min(j_max, len(self.subsequence) - 1)
        if self.max_eval_level is not None:
            lvl = min(lvl, self.max_eval_level)
        if self.family.max_index is not None:
            while lvl > 0 and self.subsequence[lvl] > self.family.max_index:
                lvl -= 1
        return lvl

    def _term_bound(self, J: int, j: int) -> float:
        if self.relaxed:
            b = self.envelope_constant * 2.0 ** (J - (j - 1))
        else:
            b = 2.0 ** (-(j - 1))
        return min(self.family.range_cap, b)

    def tail_bound(self, J: int, level: int) -> float:
        """sum_{j > level} sqrt(2)^j * min(cap, selection bound)."""
        total = 0.0
        j = level + 1
        while True:
            term = SQRT2**j * self._term_bound(J, j)
            total += term
            j += 1
            if term < 1e-16 * max(total, 1.0) or j > level + 600:
                break
        return total

    def evaluate(self, point, j_max: int | None = None) -> tuple[float, float]:
        J = self.j_index(point)
        if j_max is None:
            j_max = J + 40
        level = self._eval_level(j_max)
        lo = 0.0
        for j in range(level + 1):
            lo += SQRT2**j * (1.0 - self.family.value(self.subsequence[j], point))
        width = self.tail_bound(J, level)
        return lo, lo + width

    def evaluate_batch(self, points, j_levels: np.ndarray, j_max_offset: int = 40) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized interval evaluation given precomputed J values."""
        pts = list(points)
        J = np.asarray(j_levels, dtype=np.int64)
        level = self._eval_level(int(J.max(initial=0)) + j_max_offset)
        lo = np.zeros(len(pts))
        for j in range(level + 1):
            lo += SQRT2**j * (1.0 - self.family.values(self.subsequence[j], pts))
        tail_by_J = {int(Jv): self.tail_bound(int(Jv), level) for Jv in np.unique(J)}
        widths = np.array([tail_by_J[int(Jv)] for Jv in J])
        return lo, lo + widths


def build_cnd_length(
    family: ApproximatingFamily,
    subsequence: Sequence[int],
    point,
    j_max: int | None = None,
    relaxed: bool = False,
    envelope_constant: float = 1.0,
) -> tuple[float, float]:
    """Interval [l_lo, l_hi] for the series length at one point."""
    ell = CndLength(family, list(subsequence), relaxed=relaxed, envelope_constant=envelope_constant)
    return ell.evaluate(point, j_max=j_max)


def audit_relaxed_envelope(family: ApproximatingFamily, ell: CndLength, domain, j_levels) -> float:
    """Best constant in 1 - phi_{s_j}(p) <= c * 2^(J(p) - (j-1)) over the
    evaluable levels; recorded and reused as the tail extrapolation constant."""
    best = 0.0
    level = ell._eval_level(10**9)
    J = np.asarray(j_levels, dtype=float)
    pts = list(domain)
    for j in range(1, level + 1):
        vals = family.values(ell.subsequence[j], pts)
        ratio = (1.0 - vals) * 2.0 ** ((j - 1) - J)
        best = max(best, float(ratio.max(initial=0.0)))
    return best


def verify_length_equivalence(ell: CndLength, domain, j_levels=None) -> AuditReport:
    """c1 = min of l_lo / sqrt(2)^J and c2 = max of l_hi / sqrt(2)^J over the
    domain minus the base point (interval-safe on both ends)."""
    pts = [p for p in domain if p != ell.base_point]
    if j_levels is None:
        J = np.array([ell.j_index(p) for p in pts], dtype=np.int64)
    else:
        J = np.asarray(j_levels, dtype=np.int64)
    lo, hi = ell.evaluate_batch(pts, J)
    scale = SQRT2 ** J.astype(float)
    r_lo = lo / scale
    r_hi = hi / scale
    i1, i2 = int(np.argmin(r_lo)), int(np.argmax(r_hi))
    c1, c2 = float(r_lo[i1]), float(r_hi[i2])
    return AuditReport(
        condition="length-equivalence",
        params={"subsequence": list(ell.subsequence), "relaxed": ell.relaxed,
                "envelope_constant": ell.envelope_constant},
        best_constant=c2 / c1 if c1 > 0 else math.inf,
        witness={"argmin": repr(pts[i1]), "argmax": repr(pts[i2])},
        domain=f"{len(pts)} points",
        extras={"c1": c1, "c2": c2},
    )


def dirichlet_symbol_audit(
    ell: CndLength,
    n_range: Sequence[int],
    domain,
    j_levels=None,
    factor_request: float | None = None,
) -> AuditReport:
    """Audit of the Dirichlet-vs-Poisson difference symbols
    phi_N(p) = 1_{K_N}(p) - e^{-sqrt(l(p)) / 2^(N/4)} with K_N = E_{s_N}:
    best envelope constant for |phi_N| <= c sqrt(l) 2^(N/4) / (2^(N/4)+sqrt(l))^2,
    then the lacunary row-sum bound with f = sqrt(l) and a = 2^(1/4)."""
    pts = list(domain)
    if j_levels is None:
        J = np.array([ell.j_index(p) for p in pts], dtype=np.int64)
    else:
        J = np.asarray(j_levels, dtype=np.int64)
    lo, hi = ell.evaluate_batch(pts, J)
    mid = 0.5 * (lo + hi)
    ellv = {p: float(v) for p, v in zip(pts, mid)}
    if ell.base_point is not None:
        ellv[ell.base_point] = 0.0
    sq = {p: math.sqrt(max(v, 0.0)) for p, v in ellv.items()}

    def phi(N, p):
        inK = 1.0 if J[pts.index(p)] <= N else 0.0
        return inK - math.exp(-sq[p] / 2.0 ** (N / 4.0))

    # vectorized envelope sweep
    a = 2.0 ** 0.25
    best_env, wit = 0.0, {}
    sqv = np.array([sq[p] for p in pts])
    for N in n_range:
        an = a ** float(N)
        inK = (J <= N).astype(float)
        vals = inK - np.exp(-sqv / an)
        env = an * sqv / (an + sqv) ** 2
        nz = sqv > 0
        ratio = np.zeros_like(vals)
        ratio[nz] = np.abs(vals[nz]) / env[nz]
        if (np.abs(vals[~nz]) > 1e-12).any():
            raise DomainError("phi_N must vanish where the length vanishes")
        i = int(np.argmax(ratio))
        if ratio[i] > best_env:
            best_env, wit = float(ratio[i]), {"index": int(N), "point": repr(pts[i])}

    fam = SymbolFamily(
        name="dirichlet-difference",
        index_kind="discrete",
        eval_fn=lambda N, p: phi(int(N), p),
        batch_fn=lambda N, ps: (J <= int(N)).astype(float) - np.exp(-sqv / a ** float(N)),
    )
    l2rep = lacunary_l2_bound(fam, lambda p: sq[p], a, pts, n_range)
    rep = AuditReport(
        condition="dirichlet",
        params={"n_range": [int(n) for n in n_range], "a": a},
        best_constant=best_env,
        witness=wit,
        domain=f"{len(pts)} points",
        extras={"envelope_constant": best_env, "l2_row_sum_factor": l2rep.best_constant,
                "l2_envelope_beta": l2rep.extras["envelope_beta"]},
    )
    if factor_request is not None:
        rep.requested_bound = factor_request
        rep.passed = bool(best_env <= factor_request)
    return rep


# ---------------------------------------------------------------------------
# group Fejer instances


def fejer_approximating_family(G: gr.GroupSpec, cap: int | None = None) -> ApproximatingFamily:
    """The Fejer symbols m_s along word balls as an approximating family;
    supp m_s is the ball of radius 2s."""

    def ev(s, g):
        from .symbols import fejer_symbol

        return float(fejer_symbol(G, "word", int(s), g, cap=cap))

    def batch(s, points):
        counts = gr.intersection_count_table(G, int(s), list(points), cap=cap)
        return counts / len(gr.ball(G, int(s), cap=cap))

    return ApproximatingFamily(
        name=f"fejer@{G.label}",
        eval_fn=ev,
        support_fn=lambda s: gr.ball(G, 2 * int(s), cap=cap),
        range_cap=1.0,
        batch_fn=batch,
    )


def lacunary_powers(j_max: int) -> list[int]:
    """The subsequence s_j = 2^j, j = 0..j_max."""
    return [2**j for j in range(j_max + 1)]


class _IntInterval:
    """{(k,) : |k| <= r} with containment and iteration, no materialization."""

    def __init__(self, r: int):
        self.r = r

    def __contains__(self, p):
        return abs(p[0]) <= self.r

    def __iter__(self):
        return iter([(k,) for k in range(-self.r, self.r + 1)])


def z_cube_fejer_family() -> ApproximatingFamily:
    """Cube-family Fejer symbols on Z in closed form,
    m_s(k) = (1 - |k|/(2s+1))_+ with supp = [-2s, 2s]; evaluable at
    arbitrarily large s, so deep truncation levels are exact."""

    def ev(s, p):
        if s == 0:
            return 1.0 if p == (0,) else 0.0
        return max(0.0, 1.0 - abs(p[0]) / (2.0 * s + 1.0))

    def batch(s, pts):
        ks = np.array([abs(p[0]) for p in pts], dtype=float)
        if s == 0:
            return (ks == 0).astype(float)
        return np.maximum(0.0, 1.0 - ks / (2.0 * s + 1.0))

    return ApproximatingFamily(
        name="fejer-cube@zd:1",
        eval_fn=ev,
        support_fn=lambda s: _IntInterval(2 * int(s)),
        batch_fn=batch,
        range_cap=1.0,
    )
