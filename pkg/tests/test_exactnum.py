import random

import pytest

from hlx.exactnum import (
    QQ,
    Dvr,
    DvrElem,
    FiniteField,
    Fraction,
    INFINITY,
    MPoly,
    Poly,
    PrimeField,
    SymField,
    TruncatedSeries,
    integer_binomial,
    irreducible_mod_p,
    lucas_binom,
    parse_rational,
    rational_str,
    residue,
    series_exp,
    series_inv,
    series_log,
    val_p,
)


def test_rational_roundtrip():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert rational_str(Fraction(-6, 4)) == "-3/2"
    assert rational_str(Fraction(5)) == "5"


def test_val_p_basics():
    assert val_p(Fraction(1), 3) == 0
    assert val_p(Fraction(9), 3) == 2
    assert val_p(Fraction(4, 3), 3) == -1
    assert val_p(Fraction(0), 5) == INFINITY


def test_val_p_multiplicative_additive():
    rng = random.Random(7)
    for _ in range(200):
        p = rng.choice([2, 3, 5])
        x = Fraction(rng.randint(-40, 40), rng.randint(1, 40))
        y = Fraction(rng.randint(-40, 40), rng.randint(1, 40))
        if x == 0 or y == 0:
            continue
        assert val_p(x * y, p) == val_p(x, p) + val_p(y, p)
        if x + y != 0:
            assert val_p(x + y, p) >= min(val_p(x, p), val_p(y, p))


def test_residue():
    assert residue(Fraction(4), 3).v == 1
    assert residue(Fraction(1, 2), 3).v == 2
    assert residue(Fraction(3), 3).v == 0
    with pytest.raises(ZeroDivisionError):
        residue(Fraction(1, 3), 3)


def test_residue_is_ring_hom():
    rng = random.Random(11)
    for _ in range(200):
        p = rng.choice([2, 3, 5])
        x = Fraction(rng.randint(-30, 30), rng.choice([1, 2, 7, 11]))
        y = Fraction(rng.randint(-30, 30), rng.choice([1, 2, 7, 11]))
        if x.denominator % p == 0 or y.denominator % p == 0:
            continue
        assert residue(x * y, p) == residue(x, p) * residue(y, p)
        assert residue(x + y, p) == residue(x, p) + residue(y, p)


def test_lucas_examples():
    assert lucas_binom(5, 3, 3) == 10 % 3 == 1
    assert lucas_binom(7, 9, 2) == 0
    for p in (2, 3, 5):
        for r in range(4):
            assert lucas_binom(p ** r, p ** r, p) == 1


def test_lucas_exhaustive_matches_integer_binomial():
    for p in (2, 3, 5):
        for m in range(-30, 31):
            for k in range(0, 31):
                assert lucas_binom(m, k, p) == integer_binomial(m, k) % p


def test_prime_field_axioms():
    rng = random.Random(3)
    for p in (2, 3, 5, 7):
        F = PrimeField(p)
        els = F.elements()
        for _ in range(100):
            a, b, c = rng.choice(els), rng.choice(els), rng.choice(els)
            assert (a + b) + c == a + (b + c)
            assert a * (b + c) == a * b + a * c
            assert (a * b) * c == a * (b * c)
        for a in els:
            if F.is_unit(a):
                assert a * F.inv(a) == F.one


def test_prime_field_parse_fmt():
    F = PrimeField(3)
    assert F.parse("1/2").v == 2
    assert F.fmt(F(5)) == "2"
    assert str(F(5)) == "2 mod 3"


def test_finite_field_construction_and_inverse():
    rng = random.Random(5)
    for (p, d) in [(2, 2), (2, 3), (3, 2), (2, 4), (5, 2)]:
        F = FiniteField(p, d)
        assert irreducible_mod_p(list(F.poly), p)
        els = F.elements()
        assert len(els) == p ** d
        for _ in range(50):
            a, b = rng.choice(els), rng.choice(els)
            assert (a + b) * (a + b) == a * a + a * b + b * a + b * b
        for a in els:
            if F.is_unit(a):
                assert a * F.inv(a) == F.one


def test_finite_field_rejects_reducible():
    with pytest.raises(ValueError):
        FiniteField(2, 2, poly=[1, 0, 1])  # x^2+1 = (x+1)^2 mod 2


def test_dvr_elem():
    x = DvrElem(Fraction(9, 2), 3)
    assert x.val() == 2
    assert x.residue().v == 0
    with pytest.raises(ValueError):
        DvrElem(Fraction(1, 3), 3)
    A = Dvr(3)
    assert A.is_unit(A.parse("2/5"))
    assert not A.is_unit(A.parse("6"))
    assert A.inv(A.parse("2")) == A.parse("1/2")
    with pytest.raises(ZeroDivisionError):
        A.inv(A.parse("3"))


def test_poly_arithmetic():
    f = Poly(QQ, [Fraction(1), Fraction(-2)])
    g = Poly(QQ, [Fraction(1), Fraction(3)])
    assert (f * g).coeffs == (Fraction(1), Fraction(1), Fraction(-6))
    assert f.eval(Fraction(1, 2)) == 0
    assert Poly(QQ, [Fraction(0)]).is_zero()


def test_series_inv_geometric():
    a = Fraction(5)
    s = TruncatedSeries(QQ, [Fraction(1), -a], 6)
    inv = series_inv(s)
    assert list(inv.coeffs) == [a ** k for k in range(6)]
    assert series_inv(inv) == s


def test_series_exp_log_roundtrip():
    s = TruncatedSeries(QQ, [Fraction(0), Fraction(2), Fraction(-1, 3)], 7)
    assert series_log(series_exp(s)) == s


def test_series_exp_binomial_pattern():
    # exp(-(h u + h u^2/2)) to order 2 is 1 - h u + (h^2 - h)/2 u^2
    K = SymField(("h",))
    h = K.var("h")
    minus = K.from_int(-1)
    s = TruncatedSeries(K, [K.zero, minus * h, minus * h * K.inv(K.from_int(2))], 3)
    e = series_exp(s)
    half = K.inv(K.from_int(2))
    assert e.coeffs[0] == K.one
    assert e.coeffs[1] == minus * h
    assert e.coeffs[2] == (h * h - h) * half


def test_series_preconditions():
    s = TruncatedSeries(QQ, [Fraction(1), Fraction(1)], 4)
    with pytest.raises(ValueError):
        series_exp(s)
    z = TruncatedSeries(QQ, [Fraction(0), Fraction(1)], 4)
    with pytest.raises(ValueError):
        series_inv(z)


def test_sym_field_fractions():
    K = SymField(("a", "b"))
    a, b = K.var("a"), K.var("b")
    expr = (a - b) * (a - b)
    expanded = a * a - K.from_int(2) * a * b + b * b
    assert expr == expanded
    assert K.inv(a) * a == K.one
    assert str((a - b) * (a - b)) == "a**2 - 2*a*b + b**2"


def test_mpoly_eval_and_content():
    names = ("a", "b")
    poly = MPoly(names, {(2, 1): Fraction(3), (1, 1): Fraction(-1)})
    assert poly.monomial_content() == (1, 1)
    assert poly.eval({"a": 2, "b": 5}) == 3 * 4 * 5 - 2 * 5


def test_dvr_and_sym_axioms():
    rng = random.Random(13)
    A = Dvr(3)
    els = [A.parse(s) for s in ("0", "1", "-2", "1/2", "9", "-3/5")]
    for _ in range(100):
        a, b, c = rng.choice(els), rng.choice(els), rng.choice(els)
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
    K = SymField(("t",))
    t = K.var("t")
    sels = [K.zero, K.one, t, t * t - K.one, K.inv(t + K.one)]
    for _ in range(60):
        a, b, c = rng.choice(sels), rng.choice(sels), rng.choice(sels)
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
