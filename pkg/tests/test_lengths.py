import math

import numpy as np
import pytest

from symaudit import groups as gr
from symaudit import lengths as ln
from symaudit import positivity as pos
from symaudit import symbols as sym
from symaudit.errors import DomainError, NonConvergenceError

SQRT2 = math.sqrt(2.0)
Z1 = gr.parse_group("zd:1")
HEIS = gr.parse_group("heis3")


IntSet = ln._IntInterval
z_cube_fejer_family = ln.z_cube_fejer_family


def const_rate_family():
    return ln.ApproximatingFamily(
        name="const-rate",
        eval_fn=lambda s, p: 1.0 - 2.0 ** (-float(s)),
        support_fn=lambda s: IntSet(int(s)),
    )


def test_select_constant_rate():
    res = ln.select_subsequence(const_rate_family(), horizon=40, verify_window=3, count=6)
    assert res.subsequence == [1, 2, 3, 4, 5, 6]
    assert ln.verify_selection(const_rate_family(), res)


def test_select_all_ones():
    fam = ln.ApproximatingFamily("one", lambda s, p: 1.0, lambda s: IntSet(int(s)))
    res = ln.select_subsequence(fam, horizon=20, verify_window=2, count=5)
    assert res.subsequence == [1, 2, 3, 4, 5]


def test_select_strict_on_z():
    # hand trace: the window max is 2 s_N / (2s'+1), so
    # s_{N+1} = ceil((2^N * 2 s_N - 1) / 2) and the sequence is 1,2,8,64,1024
    res = ln.select_subsequence(z_cube_fejer_family(), horizon=2000, verify_window=4, count=5)
    assert res.subsequence == [1, 2, 8, 64, 1024]
    assert ln.verify_selection(z_cube_fejer_family(), res)


def test_select_nonconvergence_blocking_point():
    fam = ln.fejer_approximating_family(HEIS)
    with pytest.raises(NonConvergenceError) as ei:
        ln.select_subsequence(fam, horizon=10, verify_window=2, count=5)
    assert ei.value.horizon == 10
    # without a count the search stops quietly at the horizon
    res = ln.select_subsequence(fam, horizon=10, verify_window=2)
    assert res.subsequence[0] == 1 and len(res.subsequence) >= 2


def step_family():
    # phi_{s}(p) = 1 for p <= s, else 0, over nonnegative integer points
    ev = lambda s, p: 1.0 if p[0] <= s else 0.0
    return ln.ApproximatingFamily(
        "step",
        ev,
        lambda s: IntSet(int(s)),
        batch_fn=lambda s, pts: np.array([1.0 if p[0] <= s else 0.0 for p in pts]),
    )


def test_step_family_closed_form():
    fam = step_family()
    sub = list(range(0, 50))  # s_j = j, so J(p) = p for p >= 0
    for p in (1, 3, 7):
        lo, hi = ln.build_cnd_length(fam, sub, (p,))
        expect = (SQRT2**p - 1.0) / (SQRT2 - 1.0)
        assert lo == pytest.approx(expect, rel=1e-12)
        assert hi - lo <= 1e-4 * SQRT2**p  # analytic tail at level J+40


def test_base_point_evaluates_to_zero():
    fam = step_family()
    lo, hi = ln.build_cnd_length(fam, list(range(0, 50)), (0,))
    assert lo == 0.0
    assert hi <= 1e-5


def test_interval_shrinks_with_truncation_level():
    fam = z_cube_fejer_family()
    sub = ln.lacunary_powers(60)
    widths = []
    for j_max in (6, 10, 20, 40):
        lo, hi = ln.build_cnd_length(fam, sub, (9,), j_max=j_max)
        widths.append(hi - lo)
    assert all(a >= b for a, b in zip(widths, widths[1:]))
    assert widths[-1] < widths[0]


def test_width_equals_tail_bound():
    fam = z_cube_fejer_family()
    ell = ln.CndLength(fam, ln.lacunary_powers(60))
    p = (5,)
    J = ell.j_index(p)
    lo, hi = ell.evaluate(p)
    assert hi - lo == pytest.approx(ell.tail_bound(J, ell._eval_level(J + 40)), rel=1e-12)


def test_symmetric_family_symmetric_length():
    fam = z_cube_fejer_family()
    ell = ln.CndLength(fam, ln.lacunary_powers(60))
    for k in (1, 4, 11):
        assert ell.evaluate((k,)) == ell.evaluate((-k,))


def test_j_index_outside_supports():
    fam = step_family()
    ell = ln.CndLength(fam, [0, 1, 2, 3])
    with pytest.raises(DomainError):
        ell.j_index((50,))


def test_equivalence_z_lacunary_sqrt_comparison():
    # on Z with s_j = 2^j the length is throttled by sqrt(2)^J and also by
    # sqrt|k| (J is within 1 of log2|k|)
    fam = z_cube_fejer_family()
    ell = ln.CndLength(fam, ln.lacunary_powers(80), base_point=(0,))
    domain = [(k,) for k in range(-32, 33)]
    rep = ln.verify_length_equivalence(ell, domain)
    c1, c2 = rep.extras["c1"], rep.extras["c2"]
    assert 0 < c1 <= c2 < math.inf
    assert c2 / c1 <= 16.0
    for k in (1, 2, 5, 17, 32):
        lo, hi = ell.evaluate((k,))
        mid = 0.5 * (lo + hi)
        assert 0.4 <= mid / math.sqrt(abs(k)) <= 4.0


def test_equivalence_stability_under_domain_doubling():
    fam = z_cube_fejer_family()
    ell = ln.CndLength(fam, ln.lacunary_powers(80), base_point=(0,))
    r16 = ln.verify_length_equivalence(ell, [(k,) for k in range(-16, 17)])
    r32 = ln.verify_length_equivalence(ell, [(k,) for k in range(-32, 33)])
    assert abs(r32.extras["c1"] - r16.extras["c1"]) <= 0.25 * r16.extras["c1"]
    assert abs(r32.extras["c2"] - r16.extras["c2"]) <= 0.25 * r16.extras["c2"]


def test_built_length_is_cnd_and_schoenberg():
    # the truncated series (lower end) is an exact positive combination of
    # CND terms, so it must pass the eigenvalue checks
    fam = z_cube_fejer_family()
    ell = ln.CndLength(fam, ln.lacunary_powers(60), base_point=(0,))
    ball = gr.ball(Z1, 12)
    lf = sym.LengthFunction("built", lambda g: ell.evaluate(g)[0])
    ok, top = pos.is_cnd(lf, ball, tol=1e-8)
    assert ok, top
    rep = pos.schoenberg_check(lf, ball, [2.0**k / 8.0 for k in range(0, 9, 2)], tol=1e-8)
    assert rep.passed


def test_relaxed_envelope_audit_heisenberg():
    fam = ln.fejer_approximating_family(HEIS)
    sub = ln.lacunary_powers(3)  # s = 1,2,4,8
    ell = ln.CndLength(fam, sub, relaxed=True, base_point=(0, 0, 0))
    B = gr.ball(HEIS, 8)
    pts = [g for g in B.elements if g != (0, 0, 0)]
    J = np.array([ell.j_index(p) for p in pts])
    env = ln.audit_relaxed_envelope(fam, ell, pts, J)
    assert 0 < env < 4.0
    ell2 = ln.CndLength(fam, sub, relaxed=True, envelope_constant=env, base_point=(0, 0, 0))
    rep = ln.verify_length_equivalence(ell2, pts, j_levels=J)
    assert math.isfinite(rep.best_constant)


def test_dirichlet_audit_on_z():
    fam = z_cube_fejer_family()
    ell = ln.CndLength(fam, ln.lacunary_powers(80), base_point=(0,))
    domain = [(k,) for k in range(-24, 25)]
    rep = ln.dirichlet_symbol_audit(ell, range(0, 12), domain)
    assert math.isfinite(rep.best_constant) and rep.best_constant > 0
    assert math.isfinite(rep.extras["l2_row_sum_factor"])
    assert rep.extras["l2_envelope_beta"] >= 1.0 - 1e-9


def test_dirichlet_base_point_vanishes():
    fam = z_cube_fejer_family()
    ell = ln.CndLength(fam, ln.lacunary_powers(40), base_point=(0,))
    # phi_N at the base point: indicator 1 minus e^0 = 0
    pts = [(0,), (3,)]
    J = np.array([ell.j_index(p) for p in pts])
    lo, hi = ell.evaluate_batch(pts, J)
    assert lo[0] == 0.0
