import random
from fractions import Fraction

import pytest

from hlx.exactnum import QQ, PrimeField, val_p
from hlx.lattice import (
    LatticeError,
    canonicalize,
    compare_lattices,
    conjecture_cp0_report,
    dvr_smith_valuations,
    lattice_closure,
    reduce_mod_p,
    tensor_lattice,
)
from hlx.modrep import (
    drinfeld_polynomial,
    eval_weyl_module,
    tensor,
    weyl0_from_roots,
)


def test_canonicalize_unique_and_integral():
    p = 3
    rows = [
        [Fraction(3), Fraction(6), Fraction(0)],
        [Fraction(1), Fraction(2), Fraction(1)],
        [Fraction(0), Fraction(9), Fraction(3)],
    ]
    basis = canonicalize(rows, p)
    # order independence
    rng = random.Random(5)
    for _ in range(6):
        shuffled = list(rows)
        rng.shuffle(shuffled)
        assert canonicalize(shuffled, p) == basis
    for r in basis:
        for c in r:
            if c:
                assert val_p(c, p) >= 0


def test_closure_rank2_eval():
    a = Fraction(2)
    m = eval_weyl_module(QQ, 1, a)
    lat = lattice_closure(m, m.hw_vector(), 3)
    assert lat.rank == 2
    assert lat.weights == (1, -1)


def test_closure_weyl0_repeated_root():
    # L1 = A-span of {v0, v1, v2, v3} in W0((1-au)^2)
    a = Fraction(1)
    m = weyl0_from_roots(QQ, [a, a], margin=10)
    lat = lattice_closure(m, m.hw_vector(), 3)
    assert lat.rank == 4
    assert sorted(lat.weights, reverse=True) == [2, 0, 0, -2]
    # the four basis vectors are unit multiples of v0, v1, v3, v2
    for r in lat.rows:
        nz = [i for i, c in enumerate(r) if c]
        assert len(nz) == 1


def test_closure_full_tensor_lattice():
    # distinct unit roots: the closure is a full lattice (rank = dim)
    m = tensor(eval_weyl_module(QQ, 1, Fraction(1)), eval_weyl_module(QQ, 1, Fraction(4)))
    lat = lattice_closure(m, m.hw_vector(), 3)
    assert lat.rank == 4


def test_closure_rejects_nonunit_parameter():
    m = eval_weyl_module(QQ, 1, Fraction(3))
    with pytest.raises(LatticeError):
        lattice_closure(m, m.hw_vector(), 3)


def test_reduce_mod_p_weyl1():
    b = Fraction(5)
    m = eval_weyl_module(QQ, 1, b)
    lat = lattice_closure(m, m.hw_vector(), 3)
    red = reduce_mod_p(lat)
    assert red.dim == 2
    F = PrimeField(3)
    poly, report = drinfeld_polynomial(red)
    assert poly.polys[0].coeffs == (F.one, -F(5))
    assert report["plus_polynomial"] and report["minus_matches"]


def test_reduce_preserves_weight_multiplicities():
    m = tensor(eval_weyl_module(QQ, 1, Fraction(1)), eval_weyl_module(QQ, 1, Fraction(4)))
    lat = lattice_closure(m, m.hw_vector(), 3)
    red = reduce_mod_p(lat)
    amb_mult = m.weight_multiplicities()
    red_mult = red.weight_multiplicities()
    assert amb_mult == red_mult


def test_reduction_with_coincident_residues():
    # W0((1-u)(1-4u)) mod 3 gives a 4-dimensional module with Drinfeld
    # polynomial (1-u)^2 over F_3
    m = tensor(eval_weyl_module(QQ, 1, Fraction(1)), eval_weyl_module(QQ, 1, Fraction(4)))
    lat = lattice_closure(m, m.hw_vector(), 3)
    red = reduce_mod_p(lat)
    assert red.dim == 4
    F = PrimeField(3)
    poly, _ = drinfeld_polynomial(red)
    assert poly.polys[0].coeffs == (F(1), F(-2), F(1))


def test_tell_functoriality():
    # (L1 ⊗ L2)_F ≅ L1_F ⊗ L2_F: same dimension, weights and Drinfeld data
    f1 = eval_weyl_module(QQ, 1, Fraction(2))
    f2 = eval_weyl_module(QQ, 1, Fraction(5))
    amb = tensor(f1, f2)
    l1 = lattice_closure(f1, f1.hw_vector(), 3)
    l2 = lattice_closure(f2, f2.hw_vector(), 3)
    big = tensor_lattice(l1, l2, amb)
    red_big = reduce_mod_p(big)
    t = tensor(reduce_mod_p(l1), reduce_mod_p(l2))
    assert red_big.dim == t.dim
    assert sorted(red_big.weights) == sorted(t.weights)
    p1, _ = drinfeld_polynomial(red_big)
    p2, _ = drinfeld_polynomial(t)
    assert p1 == p2


def test_compare_lattices_equal_and_strict():
    # residues distinct: L = L'; val(a-b) = 1: colength 4
    for b, expect_total in ((Fraction(2), 0), (Fraction(4), 4)):
        w4 = weyl0_from_roots(QQ, [Fraction(1), Fraction(1)], margin=10)
        w2 = eval_weyl_module(QQ, 1, b)
        amb = tensor(w4, w2)
        lat = lattice_closure(amb, amb.hw_vector(), 3)
        l1 = lattice_closure(w4, w4.hw_vector(), 3)
        l2 = lattice_closure(w2, w2.hw_vector(), 3)
        big = tensor_lattice(l1, l2, amb)
        div = compare_lattices(lat, big)
        assert div.total == expect_total
        if expect_total == 0:
            assert div.is_equality()


def test_compare_self():
    m = eval_weyl_module(QQ, 2, Fraction(1))
    lat = lattice_closure(m, m.hw_vector(), 3)
    div = compare_lattices(lat, lat)
    assert div.is_equality()


def test_smith_valuations():
    p = 3
    rows = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(9)]]
    assert dvr_smith_valuations(rows, p) == [0, 2]
    rows = [
        [Fraction(1), Fraction(0), Fraction(-1)],
        [Fraction(0), Fraction(1), Fraction(2)],
        [Fraction(1), Fraction(4), Fraction(16)],
    ]
    vals = dvr_smith_valuations(rows, p)
    assert sum(vals) == 2  # det = (1-4)^2 = 9


def test_conjecture_report_deg1():
    rep = conjecture_cp0_report([Fraction(2)], 3)
    assert rep["status"] == "VERIFIED"
    assert rep["lower"] == rep["upper"] == 2


def test_conjecture_report_deg2():
    rep = conjecture_cp0_report([Fraction(1), Fraction(4)], 3)
    assert rep["lower"] == 4
    assert rep["upper"] == 4
    assert rep["status"] == "VERIFIED"
    assert "part_b" not in rep  # residues coincide


def test_conjecture_report_part_b():
    rep = conjecture_cp0_report([Fraction(1), Fraction(2)], 3)
    assert rep["status"] == "VERIFIED"
    assert rep["part_b"]["equal"] is True


def test_rank_equality_higher_weight_tensor():
    # irreducible tensor ambient with distinct unit parameters: full lattice
    m = tensor(eval_weyl_module(QQ, 2, Fraction(1)), eval_weyl_module(QQ, 1, Fraction(2)))
    lat = lattice_closure(m, m.hw_vector(), 3)
    assert lat.rank == m.dim == 6
