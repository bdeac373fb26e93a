import math
from fractions import Fraction

import numpy as np
import pytest

from symaudit import groups as gr
from symaudit import symbols as sym
from symaudit.errors import DegenerateLengthError, DomainError, GrammarError, NumericDerivativeError

Z1 = gr.parse_group("zd:1")
HEIS = gr.parse_group("heis3")
FREE2 = gr.parse_group("free:2")


def test_fejer_symbol_basics():
    assert sym.fejer_symbol(Z1, "word", 3, (0,)) == 1
    # intro formula on Z with the cube family: m_N(k) = (1 - |k|/(2N+1))_+
    assert sym.fejer_symbol(Z1, "cube", 2, (3,)) == Fraction(2, 5)
    for N in range(1, 8):
        for k in range(-2 * N - 2, 2 * N + 3):
            expect = Fraction(max(0, 2 * N + 1 - abs(k)), 2 * N + 1)
            assert sym.fejer_symbol(Z1, "cube", N, (k,)) == expect


def test_fejer_symbol_heisenberg_oracle():
    # independent set-intersection oracle
    B = gr.ball(HEIS, 3)
    g = (1, 1, 1)  # a*b
    ginv = gr.inverse(HEIS, g)
    count = sum(1 for h in B.elements if gr.multiply(HEIS, ginv, h) in B.index)
    assert sym.fejer_symbol(HEIS, "word", 3, g) == Fraction(count, len(B))
    assert 0 < sym.fejer_symbol(HEIS, "word", 3, g) < 1


def test_fejer_family_symmetry_and_vanishing():
    fam = sym.fejer_family(FREE2)
    B = gr.ball(FREE2, 4)
    for g in B.elements[::5]:
        v = fam.value(2, g)
        assert v == fam.value(2, gr.inverse(FREE2, g))
        assert 0.0 <= v <= 1.0
        if gr.word_length(FREE2, g) > 4:
            assert v == 0.0


def test_bochner_riesz_symbol():
    assert sym.bochner_riesz_symbol(4.0, 1.0, 0) == 1.0
    assert sym.bochner_riesz_symbol(4.0, 2.5, 4) == 0.0
    assert sym.bochner_riesz_symbol(4.0, 1.0, 2) == pytest.approx(0.75)
    with pytest.raises(DomainError):
        sym.bochner_riesz_symbol(4.0, -1.0, 2)


def test_radial_kernel_symbol():
    nu = sym.parse_measure("dirac:0")
    t = 5.0
    assert sym.radial_kernel_symbol(nu, t, 0) == 1.0
    for k in (1, 2, 5):
        assert sym.radial_kernel_symbol(nu, t, k) == pytest.approx(math.exp(-2.0 * k / t))
    two = sym.parse_measure("atoms:[(-1,0.5),(1,0.5)]")
    v = sym.radial_kernel_symbol(two, 5.0, 2)
    e = math.exp(-0.4)
    assert v == pytest.approx(0.5 * ((e + 0.2) ** 2 + (e - 0.2) ** 2), abs=1e-15)
    with pytest.raises(DomainError):
        sym.radial_kernel_symbol(nu, 1.0, 3)  # below t0
    with pytest.raises(DomainError):
        sym.radial_kernel_symbol(sym.AtomicMeasure([(0.0, 0.5)]), 5.0, 1)  # mass != 1


def test_min_t0():
    t0 = sym.min_t0()
    assert t0 <= 5.0

    def gaps(t):
        return (
            math.exp(-2 / t) - 1 / t - math.exp(-4 / t),
            math.exp(-2 / (3 * t)) - 1 / t - math.exp(-2 / t),
        )

    assert all(g >= 0 for g in gaps(5.0))
    assert all(g >= 0 for g in gaps(t0))
    assert gaps(1.0)[1] < 0  # 1 + e^{-2} > e^{-2/3}
    for t in np.geomspace(t0, 100.0, 64):
        assert all(g >= -1e-15 for g in gaps(t))


def test_semigroup_symbol_and_subordination():
    ell = sym.word_length_function(FREE2)
    assert sym.semigroup_symbol(ell, 0.0, "heat", (1, 2)) == 1.0
    assert sym.semigroup_symbol(ell, 3.0, "poisson", ()) == 1.0
    assert sym.semigroup_symbol(ell, 2.0, "heat", (1,)) == pytest.approx(math.exp(-2.0))
    for u in (0.25, 1.0, 4.0, 16.0):
        assert sym.subordination_check(u) < 1e-6


def word_domain(G, R):
    B = gr.ball(G, R)
    return B.elements


def test_audit_a1_heat_lacunary():
    ell = sym.word_length_function(FREE2)
    fam = sym.lacunary_heat_family(ell)
    dom = word_domain(FREE2, 3)
    rep = sym.audit_a1(fam, ell, 1.0, dom, range(-4, 9), base_point=(), beta_request=1.0 + 1e-12)
    # |1-e^{-x}| <= x and e^{-x} <= 1/x give beta <= 1 analytically
    assert rep.best_constant <= 1.0 + 1e-12
    assert rep.passed is True
    assert rep.extras["base_point_unital"]


def test_audit_a1_constant_family():
    ell = sym.word_length_function(FREE2)
    const = sym.SymbolFamily("one", "discrete", lambda N, g: 1.0)
    dom = word_domain(FREE2, 3)
    rep = sym.audit_a1(const, ell, 1.0, dom, [0, 1, 2], base_point=())
    expect = max(gr.word_length(FREE2, g) for g in dom) / 2.0**0
    assert rep.best_constant == pytest.approx(expect)


def test_audit_a1_degenerate_length():
    bad = sym.LengthFunction("bad", lambda g: 0.0)
    fam = sym.lacunary_heat_family(sym.word_length_function(FREE2))
    with pytest.raises(DegenerateLengthError):
        sym.audit_a1(fam, bad, 1.0, word_domain(FREE2, 2), [0, 1], base_point=())


def test_audit_a1_monotone_in_domain():
    ell = sym.word_length_function(HEIS)
    fam = sym.fejer_family(HEIS)
    small = sym.audit_a1(fam, ell, 2.0, word_domain(HEIS, 4), [0, 1, 2], base_point=(0, 0, 0))
    large = sym.audit_a1(fam, ell, 2.0, word_domain(HEIS, 6), [0, 1, 2], base_point=(0, 0, 0))
    assert small.best_constant <= large.best_constant
    assert math.isfinite(large.best_constant)


def test_audit_a2_heat_k0():
    ell = sym.word_length_function(FREE2)
    fam = sym.heat_family(ell)
    grid = sym.geometric_grid(0.5, 64.0)
    rep = sym.audit_a2(fam, ell, 1.0, 0, grid, word_domain(FREE2, 3), base_point=())
    assert rep.best_constant <= 1.0 + 1e-12


def test_audit_a2_bochner_riesz_dilation():
    fam = sym.bochner_riesz_family(2.0, eta=1)
    ell = sym.LengthFunction("k", lambda k: float(k))
    dom = list(range(1, 20))
    grid = sym.geometric_grid(1.0, 64.0)
    rep = sym.audit_a2(fam, ell, 1.0, 1, grid, dom, beta_request=None)
    assert math.isfinite(rep.best_constant) and rep.best_constant > 0
    assert rep.derivative_source == "analytic"


def test_audit_a2_radial_eta3():
    fam = sym.radial_kernel_family(sym.parse_measure("grid:3"), eta=3)
    ell = sym.LengthFunction("k", lambda k: float(k))
    t0 = sym.min_t0() * 1.01
    grid = sym.geometric_grid(t0, 64 * t0)
    rep = sym.audit_a2(fam, ell, 1.0, 3, grid, list(range(1, 15)))
    assert math.isfinite(rep.best_constant)
    # analytic derivatives agree with finite differences on the audit grid
    fam.check_derivatives(grid[:6], [1, 3, 7])


def test_audit_difference_constant_and_cube():
    ell = sym.word_length_function(Z1)
    const = sym.SymbolFamily("one", "discrete", lambda N, g: 1.0)
    dom = word_domain(Z1, 8)
    rep = sym.audit_difference(const, ell, 1.0, dom, range(1, 6), base_point=(0,))
    # the difference ratio vanishes; only |m_N| l/N survives
    expect = max(gr.word_length(Z1, g) for g in dom) / 1.0
    assert rep.best_constant == pytest.approx(expect)

    fam = sym.fejer_family(Z1, "cube")
    rep2 = sym.audit_difference(fam, ell, 1.0, dom, range(1, 12), base_point=(0,))
    # exact rational differences: N |m_{N+1}-m_N| = N |k| 2/((2N+1)(2N+3)) <= 1/2-ish
    diffs = [
        N * abs(sym.fejer_symbol(Z1, "cube", N + 1, (k,)) - sym.fejer_symbol(Z1, "cube", N, (k,)))
        for N in range(1, 12)
        for k in range(-8, 9)
    ]
    assert rep2.best_constant >= float(max(diffs))
    assert math.isfinite(rep2.best_constant)


def test_lacunary_l2_bound():
    # exact envelope family, f == 1, a = 2: row sums over Z stay below C * 4/3
    f = lambda g: 1.0
    fam = sym.SymbolFamily("env", "discrete", lambda N, g: 2.0**N / (2.0**N + 1.0) ** 2)
    dom = [object(), object()]
    rep = sym.lacunary_l2_bound(fam, f, 2.0, dom, range(-40, 41))
    assert rep.extras["envelope_beta"] == pytest.approx(1.0)
    brute = sum((2.0**N / (2.0**N + 1.0) ** 2) ** 2 for N in range(-40, 41))
    assert rep.witness["row_sum"] == pytest.approx(brute)
    assert rep.best_constant == pytest.approx(brute / (4.0 / 3.0))
    assert rep.best_constant <= 2.0

    # f = 0 forces m_N = 0
    fam_bad = sym.SymbolFamily("bad", "discrete", lambda N, g: 0.5)
    with pytest.raises(DomainError):
        sym.lacunary_l2_bound(fam_bad, lambda g: 0.0, 2.0, [1], range(0, 3))

    # one-hot family: a single term survives
    onehot = sym.SymbolFamily(
        "onehot", "discrete", lambda N, g: (2.0 / 4.0) if N == 0 else 0.0
    )
    rep3 = sym.lacunary_l2_bound(onehot, f, 2.0, [0], range(-10, 11))
    assert rep3.witness["row_sum"] == pytest.approx(0.25)


def test_k_constant_constant_family():
    const = sym.SymbolFamily("one", "continuous", lambda t, g: 1.0, deriv_fn=lambda o, t, g: 0.0, eta=2)
    dom = [1.0, 2.0, 5.0]
    grid = sym.geometric_grid(0.5, 16.0)
    K, table = sym.k_constant(const, lambda g: g, grid, dom)
    assert K == pytest.approx(len(table["inhabited_j"]))
    assert all(v == 0.0 for v in table["b_j"].values())


def test_k_constant_scaled_family():
    fam = sym.SymbolFamily(
        "scaled",
        "continuous",
        lambda t, g: min(t / g, g / t),
        deriv_fn=lambda o, t, g: (1.0 / g if t < g else -g / t**2) if o == 1 else 0.0,
        eta=1,
    )
    grid = sym.geometric_grid(0.25, 64.0, ratio=2 ** (1 / 16))
    K, table = sym.k_constant(fam, lambda g: g, grid, [1.0, 3.0, 9.0])
    for j, a in table["a_j"].items():
        assert a <= 2.0 ** (-abs(int(j)) + 2)
    assert math.isfinite(K)


def test_k_constant_radial_difference():
    # phi_t = m_t - e^{-sqrt(l)/sqrt(t)}: the difference family used to
    # compare radial means against the subordinated semigroup
    nu = sym.parse_measure("grid:3")
    rad = sym.radial_kernel_family(nu)

    def ev(t, k):
        return rad.value(t, k) - math.exp(-math.sqrt(k) / math.sqrt(t)) if k else 0.0

    fam = sym.SymbolFamily("phi", "continuous", ev)
    t0 = sym.min_t0() * 1.01
    grid = sym.geometric_grid(t0, 256.0)
    K, table = sym.k_constant(fam, lambda k: float(k), grid, list(range(1, 30)))
    assert math.isfinite(K) and K > 0


def test_multiorder_difference():
    inv = sym.SymbolFamily("1/t", "continuous", lambda t, g: 1.0 / t)
    rho = 2.0 ** (2.0 ** (-3.0 - 1.0))
    got = sym.multiorder_difference(inv, [3], 2.0, None)
    assert got == pytest.approx((1.0 / rho - 1.0) / 2.0)

    const = sym.SymbolFamily("c", "continuous", lambda t, g: 0.7)
    for s_list in ([2], [3, 1], [4, 2, 0]):
        assert sym.multiorder_difference(const, s_list, 5.0, None) == pytest.approx(0.0, abs=1e-15)

    rad = sym.radial_kernel_family(sym.parse_measure("atoms:[(-1,0.5),(1,0.5)]"))
    for s_list in ([3], [4, 2], [5, 3, 1]):
        for t in (5.0, 11.0):
            for k in (0, 1, 4):
                a = sym.multiorder_difference(rad, s_list, t, k)
                b = sym.multiorder_difference_recursive(rad, s_list, t, k)
                assert abs(a - b) <= 1e-12

    with pytest.raises(DomainError):
        sym.multiorder_difference(const, [1, 2], 5.0, None)  # not decreasing


def test_audit_multiorder_derivatives():
    const = sym.SymbolFamily("c", "continuous", lambda t, g: 0.7, deriv_fn=lambda o, t, g: 0.0, eta=4)
    grid = sym.geometric_grid(1.0, 16.0)
    rep = sym.audit_multiorder_derivatives(const, [2], 1, grid, [None])
    assert rep.best_constant == 0.0

    ell = sym.LengthFunction("k", lambda k: float(k))
    heat = sym.heat_family(ell)
    rep2 = sym.audit_multiorder_derivatives(heat, [3, 1], 1, grid, [1, 2, 5])
    assert math.isfinite(rep2.best_constant) and rep2.best_constant > 0

    rad = sym.radial_kernel_family(sym.parse_measure("dirac:0"))
    t0 = sym.min_t0() * 1.01
    rep3 = sym.audit_multiorder_derivatives(rad, [4, 2], 1, sym.geometric_grid(t0, 64.0), [0, 1, 3, 8])
    assert math.isfinite(rep3.best_constant)


def test_composition_identity():
    # endpoints are exact by Beta-function normalization
    assert sym.bochner_riesz_composition_check(1.0, 2.0, [0.0, 1.0]) < 1e-12
    assert sym.bochner_riesz_composition_check(1.0, 2.0, [0.5]) < 1e-8
    grid = np.linspace(0, 1, 64)
    for a, b in [(1.0, 2.0), (0.5, 1.5), (2.0, 3.0)]:
        assert sym.bochner_riesz_composition_check(a, b, grid) < 1e-8


def test_square_function_constant():
    assert sym.square_function_constant(0.0) == pytest.approx(0.25, abs=1e-10)
    for alpha in (0.0, 0.5, 1.0, 2.0):
        cf = sym.square_function_closed_form(alpha)
        vals = [sym.square_function_constant(alpha, k) for k in (1, 8, 32)]
        assert all(abs(v - cf) < 1e-8 for v in vals)
        assert max(vals) - min(vals) < 1e-8
    # decreasing in alpha
    cs = [sym.square_function_closed_form(a) for a in (0.0, 1.0, 2.0, 5.0, 20.0)]
    assert cs == sorted(cs, reverse=True)
    with pytest.raises(DomainError):
        sym.square_function_constant(-0.6)


def test_rapid_decay_truncation():
    # brute series oracle at N = 1
    value, normalized = sym.rapid_decay_truncation_bound(1)
    brute = sum(math.exp(-r) * (r + 1) for r in range(2, 400))
    assert value == pytest.approx(brute, rel=1e-12)
    assert normalized == pytest.approx(brute, rel=1e-12)
    # sweep: one recorded constant bounds N^2 * tail for all N <= 64
    vals = [sym.rapid_decay_truncation_bound(N)[1] for N in range(1, 65)]
    assert max(vals) == pytest.approx(23.978648296622527, rel=1e-9)
    assert max(vals) < 24.0
    # the normalized value settles down for large N
    assert vals[63] < 1e-3


def test_measure_grammar():
    m = sym.parse_measure("grid:5")
    assert len(m.atoms) == 5 and m.is_normalized()
    assert m.atoms[0][0] == -1.0 and m.atoms[-1][0] == 1.0
    assert sym.parse_measure("dirac:0").atoms == [(0.0, 1.0)]
    with pytest.raises(GrammarError):
        sym.parse_measure("dirac:zz")
    with pytest.raises(GrammarError):
        sym.parse_measure("atoms:nonsense")
    with pytest.raises(DomainError):
        sym.parse_measure("atoms:[(2.0,1.0)]")


def test_symbol_grammar():
    assert sym.parse_symbol("fejer:word", G=FREE2).index_kind == "discrete"
    assert sym.parse_symbol("br:delta=2").params["delta"] == 2.0
    assert sym.parse_symbol("radial:dirac:0").index_kind == "continuous"
    ell = sym.word_length_function(FREE2)
    assert sym.parse_symbol("heat", length=ell).value(4.0, (1,)) == pytest.approx(math.exp(-0.25))
    with pytest.raises(GrammarError):
        sym.parse_symbol("fejer:word")  # missing group
    with pytest.raises(GrammarError):
        sym.parse_symbol("wavelet")


def test_fd_derivative():
    assert sym.fd_derivative(math.sin, 1.0, 1) == pytest.approx(math.cos(1.0), abs=1e-10)
    assert sym.fd_derivative(math.sin, 1.0, 2) == pytest.approx(-math.sin(1.0), abs=1e-8)
    assert sym.fd_derivative(lambda t: t**3, 2.0, 3) == pytest.approx(6.0, abs=1e-4)
    rng = np.random.default_rng(0)
    with pytest.raises(NumericDerivativeError):
        sym.fd_derivative(lambda t: math.sin(1e6 * t), 1.0, 1)
