from fractions import Fraction

import pytest

from symaudit import fusion as fu
from symaudit import groups as gr
from symaudit import symbols as sym
from symaudit.errors import DomainError, FusionWindowError, GrammarError

SU2 = fu.su2_fusion_ring(40)
Z3D = fu.group_dual_ring(gr.parse_group("zmod:3"))
Z12D = fu.group_dual_ring(gr.parse_group("zmod:12"))
D3D = fu.group_dual_ring(gr.parse_group("dihedral:3"))


def test_su2_structure_constants():
    assert SU2.multiplicity(1, 1, 0) == 1
    assert SU2.multiplicity(1, 1, 1) == 0
    assert SU2.multiplicity(1, 1, 2) == 1
    assert sum(SU2.multiplicity(1, 1, c) * SU2.dim(c) for c in SU2.labels) == SU2.dim(1) ** 2
    for b in range(5):
        for c in range(5):
            assert SU2.multiplicity(0, b, c) == (1 if b == c else 0)


def test_su2_window_error():
    with pytest.raises(FusionWindowError):
        SU2.tensor(30, 20)
    # single structure constants inside the window never need the full product
    assert SU2.multiplicity(30, 20, 40) == 1
    assert SU2.multiplicity(30, 20, 39) == 0


def test_group_dual_basics():
    assert Z3D.multiplicity((1,), (1,), (2,)) == 1
    g = (1,)
    fused = Z3D.tensor(Z3D.conj(g), g)
    assert fused == {Z3D.trivial: 1}
    # dihedral(3) fusion matches the multiplication table
    G = gr.parse_group("dihedral:3")
    for a in D3D.labels:
        for b in D3D.labels:
            assert D3D.tensor(a, b) == {gr.multiply(G, a, b): 1}


def test_weighted_cardinality():
    assert fu.weighted_cardinality(SU2, [0, 1]) == 5
    assert fu.weighted_cardinality(Z12D, Z12D.labels[:7]) == 7
    assert fu.weighted_cardinality(SU2, []) == 0


def test_boundary():
    assert fu.boundary(SU2, [0, 1], 1) == {1, 2}
    assert fu.boundary(SU2, [0, 1, 2, 3], 0) == set()
    # windowed Z dual: one-sided translation boundary of an interval; the
    # full {+-N, +-(N+1)} picture is the union over the two generators
    Z1 = gr.parse_group("zd:1")
    ZW = fu.group_dual_ring(Z1, window_radius=10)
    F = [(k,) for k in range(-4, 5)]
    assert fu.boundary(ZW, F, (1,)) == {(4,), (-5,)}
    both = fu.boundary(ZW, F, (1,)) | fu.boundary(ZW, F, (-1,))
    assert both == {(-4,), (4,), (-5,), (5,)}
    with pytest.raises(FusionWindowError):
        fu.boundary(ZW, [(k,) for k in range(-10, 11)], (1,))


def test_folner_ratio():
    assert fu.folner_ratio(SU2, range(0, 5), 0) == 0
    # |{4,5}|_w / |{0..4}|_w = (25+36)/55
    assert fu.folner_ratio(SU2, range(0, 5), 1) == Fraction(61, 55)
    big = fu.su2_fusion_ring(64)
    assert fu.folner_ratio(big, range(0, 33), 1) < fu.folner_ratio(big, range(0, 9), 1)


def test_quantum_fejer():
    assert fu.quantum_fejer(SU2, range(0, 7), 0) == 1
    assert fu.quantum_fejer(SU2, [0, 1], 1) == Fraction(2, 5)
    for n in (2, 5, 9):
        for p in range(0, 6):
            v = fu.quantum_fejer(SU2, range(0, n + 1), p)
            assert 0 <= v <= 1


def test_quantum_fejer_monotone_trend():
    vals = [fu.quantum_fejer(SU2, range(0, n + 1), 2) for n in (2, 4, 8, 16, 32)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > Fraction(9, 10)


def test_group_dual_degenerates_to_fejer():
    G = gr.parse_group("zmod:24")
    ring = fu.group_dual_ring(G)
    for N in range(0, 11):
        K = list(gr.ball(G, N))
        for g in ring.labels:
            assert fu.quantum_fejer(ring, K, g) == sym.fejer_symbol(G, "word", N, g)


def test_fejer_folner_chain():
    ring = fu.su2_fusion_ring(64)
    for n in (4, 8, 16):
        K = list(range(0, n + 1))
        for p in range(0, 64 - n + 1):
            assert 1 - fu.quantum_fejer(ring, K, p) <= fu.folner_ratio(ring, K, p)


def test_validate_rings_clean():
    assert fu.validate_ring(SU2).passed
    assert fu.validate_ring(Z12D).passed
    assert fu.validate_ring(D3D).passed


def test_validate_flags_corruption():
    ring = fu.su2_fusion_ring(6)
    orig = ring.tensor_fn

    def bad_tensor(a, b):
        dec = dict(orig(a, b))
        if (a, b) == (2, 2):
            dec[4] = dec.get(4, 0) + 1  # corrupt N(2,2,4)
        return dec

    ring.tensor_fn = bad_tensor
    rep = fu.validate_ring(ring)
    assert not rep.passed
    flagged = rep.extras["violations"]
    assert flagged
    for v in flagged:
        assert "2" in " ".join(v["labels"]) and "4" in " ".join(v["labels"]) or v["kind"] == "dimension-identity"


def test_ring_grammar():
    assert fu.parse_ring("su2:64").name == "su2:64"
    assert fu.parse_ring("groupdual:zmod:12").name.startswith("groupdual:zmod:12")
    assert fu.parse_ring("groupdual:dihedral:6").trivial == (0, 0)
    with pytest.raises(GrammarError):
        fu.parse_ring("su2:x")
    with pytest.raises(GrammarError):
        fu.parse_ring("groupdual:free:2")
    with pytest.raises(GrammarError):
        fu.parse_ring("so3:4")


def test_label_window_guard():
    with pytest.raises(DomainError):
        SU2.multiplicity(99, 0, 0)
