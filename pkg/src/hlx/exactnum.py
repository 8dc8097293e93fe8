"""Exact arithmetic kernels.

Everything downstream (symbolic normal ordering, module matrices, lattice
reduction) assumes coefficient arithmetic is exact, so this module provides
only exact types: arbitrary-precision rationals, prime fields F_p, small
extensions F_{p^d} with d <= 4, the localization of the integers at p (a
discrete valuation ring), sparse multivariate polynomials with a fraction
field on top (for symbolic unit parameters), dense polynomials and truncated
power series.

Rings are exposed as descriptor objects (QQ, PrimeField(p), ...) whose
elements support +, -, * and ==; division goes through ``ring.inv`` so that
non-field rings can refuse it.  Descriptors compare equal when they describe
the same ring.
"""

from __future__ import annotations

import math
from fractions import Fraction

INFINITY = math.inf

Rational = Fraction


def parse_rational(s):
    """Parse "num/den" or "num" into a Fraction."""
    return Fraction(str(s).strip())


def rational_str(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def integer_binomial(m, k):
    """binom(m, k) for any integer m, nonnegative integer k."""
    if k < 0:
        raise ValueError("negative lower index")
    if m >= 0:
        return math.comb(m, k)
    # standard extension m(m-1)...(m-k+1)/k!
    return (-1) ** k * math.comb(k - m - 1, k)


def lucas_binom(m, k, p):
    """binom(m, k) mod p, as an integer in [0, p).

    Nonnegative m uses the Lucas digit product; negative m falls back on the
    integer extension and reduces.
    """
    if k < 0:
        return 0
    if m < 0:
        return integer_binomial(m, k) % p
    out = 1
    while k:
        out = out * math.comb(m % p, k % p) % p
        if out == 0:
            return 0
        m //= p
        k //= p
    return out


def val_p(x, p):
    """p-adic valuation of a rational (or DvrElem); val_p(0) = +infinity."""
    if isinstance(x, DvrElem):
        x = x.q
    x = Fraction(x)
    if x == 0:
        return INFINITY
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def residue(x, p):
    """Image of x in F_p; requires val_p(x) >= 0."""
    if isinstance(x, DvrElem):
        p = x.p
        x = x.q
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ZeroDivisionError("negative valuation: %s has no residue mod %d" % (x, p))
    v = x.numerator * pow(x.denominator, -1, p) % p
    return PrimeField(p)(v)


# ---------------------------------------------------------------------------
# ring descriptors
# ---------------------------------------------------------------------------


class _Rationals:
    kind = "Q"
    char = 0
    card = None

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def parse(self, s):
        return parse_rational(s)

    def fmt(self, x):
        return rational_str(x)

    def is_zero(self, x):
        return x == 0

    def is_unit(self, x):
        return x != 0

    def inv(self, x):
        return Fraction(1) / x

    def to_json(self):
        return {"kind": "Q"}

    def __eq__(self, other):
        return isinstance(other, _Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


QQ = _Rationals()


class FpElem:
    __slots__ = ("p", "v")

    def __init__(self, p, v):
        self.p = p
        self.v = v % p

    def __add__(self, other):
        return FpElem(self.p, self.v + other.v)

    def __sub__(self, other):
        return FpElem(self.p, self.v - other.v)

    def __neg__(self):
        return FpElem(self.p, -self.v)

    def __mul__(self, other):
        return FpElem(self.p, self.v * other.v)

    def __eq__(self, other):
        return isinstance(other, FpElem) and self.p == other.p and self.v == other.v

    def __hash__(self):
        return hash((self.p, self.v))

    def __str__(self):
        return "%d mod %d" % (self.v, self.p)

    def __repr__(self):
        return "FpElem(%d, %d)" % (self.p, self.v)


def is_prime(n):
    if n < 2:
        return False
    for q in range(2, int(n ** 0.5) + 1):
        if n % q == 0:
            return False
    return True


class PrimeField:
    kind = "Fp"

    _instances = {}

    def __new__(cls, p):
        if p not in cls._instances:
            if not is_prime(p):
                raise ValueError("%d is not prime" % p)
            inst = object.__new__(cls)
            inst.p = p
            cls._instances[p] = inst
        return cls._instances[p]

    @property
    def char(self):
        return self.p

    @property
    def card(self):
        return self.p

    @property
    def zero(self):
        return FpElem(self.p, 0)

    @property
    def one(self):
        return FpElem(self.p, 1)

    def __call__(self, n):
        return FpElem(self.p, n)

    def from_int(self, n):
        return FpElem(self.p, n)

    def parse(self, s):
        s = str(s).strip()
        if "mod" in s:
            s = s.split("mod")[0].strip()
        if "/" in s:
            num, den = s.split("/")
            return FpElem(self.p, int(num) * pow(int(den), -1, self.p))
        return FpElem(self.p, int(s))

    def fmt(self, x):
        return str(x.v)

    def is_zero(self, x):
        return x.v == 0

    def is_unit(self, x):
        return x.v != 0

    def inv(self, x):
        return FpElem(self.p, pow(x.v, -1, self.p))

    def elements(self):
        return [FpElem(self.p, v) for v in range(self.p)]

    def units(self):
        return [FpElem(self.p, v) for v in range(1, self.p)]

    def to_json(self):
        return {"kind": "Fp", "p": self.p}

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return "PrimeField(%d)" % self.p


# ---------------------------------------------------------------------------
# small extensions F_{p^d}
# ---------------------------------------------------------------------------


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _fppoly_mulmod(a, b, f, p):
    # a, b dense int lists, f monic of degree d
    d = len(f) - 1
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    for i in range(len(out) - 1, d - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(d):
                out[i - d + j] = (out[i - d + j] - c * f[j]) % p
    return _poly_trim(out[:d] + [0] * max(0, d - len(out)))


def _fppoly_divmod(a, b, p):
    a = list(a)
    binv = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * binv % p
        if c:
            q[i] = c
            for j, bj in enumerate(b):
                a[i + j] = (a[i + j] - c * bj) % p
    return q, _poly_trim(a[: len(b) - 1])


def irreducible_mod_p(f, p):
    """Irreducibility of a monic integer-coefficient polynomial mod p, deg <= 4.

    Degree 2 and 3 reduce to root absence; degree 4 additionally excludes
    monic quadratic factors by trial division.
    """
    f = [c % p for c in f]
    d = len(f) - 1
    if d < 1 or d > 4:
        raise ValueError("only degrees 1..4 supported")
    if d == 1:
        return True
    for x in range(p):
        acc = 0
        for c in reversed(f):
            acc = (acc * x + c) % p
        if acc == 0:
            return False
    if d == 4:
        for c0 in range(p):
            for c1 in range(p):
                g = [c0, c1, 1]
                _, r = _fppoly_divmod(f, g, p)
                if not r:
                    return False
    return True


def _default_defining_poly(p, d):
    # lexicographically first monic irreducible of degree d
    def candidates():
        for tail in range(p ** d):
            coeffs = []
            t = tail
            for _ in range(d):
                coeffs.append(t % p)
                t //= p
            yield coeffs + [1]

    for f in candidates():
        if irreducible_mod_p(f, p):
            return f
    raise RuntimeError("no irreducible polynomial found")


class FqElem:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        c = [x % field.p for x in coeffs]
        c = c[: field.d] + [0] * max(0, field.d - len(c))
        self.field = field
        self.coeffs = tuple(c)

    def __add__(self, other):
        return FqElem(self.field, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return FqElem(self.field, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return FqElem(self.field, [-a for a in self.coeffs])

    def __mul__(self, other):
        c = _fppoly_mulmod(list(self.coeffs), list(other.coeffs), self.field.poly, self.field.p)
        return FqElem(self.field, c)

    def __eq__(self, other):
        return (
            isinstance(other, FqElem)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.field.d, self.coeffs))

    def __str__(self):
        return "[%s] mod (%s, %d)" % (
            ",".join(str(c) for c in self.coeffs),
            ",".join(str(c) for c in self.field.poly),
            self.field.p,
        )

    __repr__ = __str__


class FiniteField:
    kind = "Fq"

    def __init__(self, p, d, poly=None):
        if not is_prime(p):
            raise ValueError("%d is not prime" % p)
        if d < 1 or d > 4:
            raise ValueError("extension degree must be in [1, 4]")
        self.p = p
        self.d = d
        if poly is None:
            poly = _default_defining_poly(p, d)
        poly = [c % p for c in poly]
        if len(poly) != d + 1 or poly[-1] != 1:
            raise ValueError("defining polynomial must be monic of degree d")
        if not irreducible_mod_p(poly, p):
            raise ValueError("defining polynomial is reducible mod %d" % p)
        self.poly = tuple(poly)

    @property
    def char(self):
        return self.p

    @property
    def card(self):
        return self.p ** self.d

    @property
    def zero(self):
        return FqElem(self, [0])

    @property
    def one(self):
        return FqElem(self, [1])

    def gen(self):
        return FqElem(self, [0, 1])

    def from_int(self, n):
        return FqElem(self, [n])

    def parse(self, s):
        if isinstance(s, (list, tuple)):
            return FqElem(self, list(s))
        s = str(s).strip()
        if s.startswith("["):
            body = s[1 : s.index("]")]
            return FqElem(self, [int(c) for c in body.split(",") if c.strip() != ""])
        return FqElem(self, [int(s)])

    def fmt(self, x):
        return "[" + ",".join(str(c) for c in x.coeffs) + "]"

    def is_zero(self, x):
        return all(c == 0 for c in x.coeffs)

    def is_unit(self, x):
        return not self.is_zero(x)

    def inv(self, x):
        if self.is_zero(x):
            raise ZeroDivisionError("inverse of zero in F_%d^%d" % (self.p, self.d))
        # extended Euclid in F_p[x]
        r0, r1 = list(self.poly), _poly_trim(list(x.coeffs))
        s0, s1 = [], [1]
        while r1:
            q, r = _fppoly_divmod(r0, r1, self.p)
            r0, r1 = r1, r
            qs = [0] * (len(q) + len(s1) - 1) if q and s1 else []
            for i, qi in enumerate(q):
                for j, sj in enumerate(s1):
                    qs[i + j] = (qs[i + j] + qi * sj) % self.p
            news = [(a - b) % self.p for a, b in
                    zip(s0 + [0] * max(0, len(qs) - len(s0)),
                        qs + [0] * max(0, len(s0) - len(qs)))]
            s0, s1 = s1, _poly_trim(news)
        lead_inv = pow(r0[-1], -1, self.p)
        return FqElem(self, [c * lead_inv % self.p for c in s0])

    def elements(self):
        out = []
        for n in range(self.card):
            coeffs = []
            t = n
            for _ in range(self.d):
                coeffs.append(t % self.p)
                t //= self.p
            out.append(FqElem(self, coeffs))
        return out

    def units(self):
        return [x for x in self.elements() if self.is_unit(x)]

    def to_json(self):
        return {"kind": "Fq", "p": self.p, "d": self.d, "poly": list(self.poly)}

    def __eq__(self, other):
        return (
            isinstance(other, FiniteField)
            and other.p == self.p
            and other.d == self.d
            and other.poly == self.poly
        )

    def __hash__(self):
        return hash(("Fq", self.p, self.d, self.poly))

    def __repr__(self):
        return "FiniteField(%d, %d)" % (self.p, self.d)


# ---------------------------------------------------------------------------
# the localization Z_(p)
# ---------------------------------------------------------------------------


class DvrElem:
    """Element of Z localized at p: a rational with denominator coprime to p."""

    __slots__ = ("q", "p")

    def __init__(self, q, p):
        q = Fraction(q)
        if q.denominator % p == 0:
            raise ValueError("%s is not in Z_(%d)" % (q, p))
        self.q = q
        self.p = p

    def val(self):
        return val_p(self.q, self.p)

    def residue(self):
        return residue(self.q, self.p)

    def __add__(self, other):
        return DvrElem(self.q + other.q, self.p)

    def __sub__(self, other):
        return DvrElem(self.q - other.q, self.p)

    def __neg__(self):
        return DvrElem(-self.q, self.p)

    def __mul__(self, other):
        return DvrElem(self.q * other.q, self.p)

    def __truediv__(self, other):
        out = self.q / other.q
        if out.denominator % self.p == 0:
            raise ZeroDivisionError("%s / %s leaves Z_(%d)" % (self.q, other.q, self.p))
        return DvrElem(out, self.p)

    def __eq__(self, other):
        return isinstance(other, DvrElem) and self.p == other.p and self.q == other.q

    def __hash__(self):
        return hash((self.p, self.q))

    def __str__(self):
        return rational_str(self.q)

    def __repr__(self):
        return "DvrElem(%s, %d)" % (rational_str(self.q), self.p)


class Dvr:
    kind = "Zp"
    card = None

    _instances = {}

    def __new__(cls, p):
        if p not in cls._instances:
            if not is_prime(p):
                raise ValueError("%d is not prime" % p)
            inst = object.__new__(cls)
            inst.p = p
            cls._instances[p] = inst
        return cls._instances[p]

    @property
    def char(self):
        return 0

    @property
    def zero(self):
        return DvrElem(0, self.p)

    @property
    def one(self):
        return DvrElem(1, self.p)

    def from_int(self, n):
        return DvrElem(n, self.p)

    def parse(self, s):
        return DvrElem(parse_rational(s), self.p)

    def fmt(self, x):
        return rational_str(x.q)

    def is_zero(self, x):
        return x.q == 0

    def is_unit(self, x):
        return x.q != 0 and val_p(x.q, self.p) == 0

    def inv(self, x):
        if not self.is_unit(x):
            raise ZeroDivisionError("%s is not a unit in Z_(%d)" % (x, self.p))
        return DvrElem(1 / x.q, self.p)

    def residue_field(self):
        return PrimeField(self.p)

    def fraction_field(self):
        return QQ

    def to_json(self):
        return {"kind": "Zp", "p": self.p}

    def __eq__(self, other):
        return isinstance(other, Dvr) and other.p == self.p

    def __hash__(self):
        return hash(("Zp", self.p))

    def __repr__(self):
        return "Dvr(%d)" % self.p


# ---------------------------------------------------------------------------
# sparse multivariate polynomials and their fraction field
# ---------------------------------------------------------------------------


class MPoly:
    """Sparse multivariate polynomial over Q; terms is {exponent tuple: Fraction}."""

    __slots__ = ("names", "terms")

    def __init__(self, names, terms=None):
        self.names = tuple(names)
        clean = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def const(cls, names, c):
        n = len(names)
        return cls(names, {(0,) * n: Fraction(c)})

    @classmethod
    def var(cls, names, name):
        e = [0] * len(names)
        e[list(names).index(name)] = 1
        return cls(names, {tuple(e): Fraction(1)})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MPoly(self.names, out)

    def __neg__(self):
        return MPoly(self.names, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MPoly(self.names, out)

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.names == other.names and self.terms == other.terms

    def __hash__(self):
        return hash((self.names, tuple(sorted(self.terms.items()))))

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def monomial_content(self):
        """Componentwise min exponent over all terms (zero poly -> zeros)."""
        if not self.terms:
            return (0,) * len(self.names)
        mins = [min(e[i] for e in self.terms) for i in range(len(self.names))]
        return tuple(mins)

    def shift_down(self, shift):
        return MPoly(
            self.names,
            {tuple(a - b for a, b in zip(e, shift)): c for e, c in self.terms.items()},
        )

    def lead(self):
        """Leading (graded-lex max) term as (exponent, coeff)."""
        e = max(self.terms, key=lambda t: (sum(t), t))
        return e, self.terms[e]

    def as_univariate(self):
        """Dense coefficient list when only one variable actually occurs."""
        used = [i for i in range(len(self.names)) if any(e[i] for e in self.terms)]
        if len(used) > 1:
            return None
        i = used[0] if used else 0
        d = max((e[i] for e in self.terms), default=0)
        out = [Fraction(0)] * (d + 1)
        for e, c in self.terms.items():
            out[e[i]] = c
        return i, out

    def eval(self, values):
        """values: dict name -> Fraction."""
        out = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    t *= Fraction(values[self.names[i]]) ** k
            out += t
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=lambda t: (sum(t), t), reverse=True):
            c = self.terms[e]
            mono = "*".join(
                ("%s" % n if k == 1 else "%s**%d" % (n, k))
                for n, k in zip(self.names, e)
                if k
            )
            if not mono:
                bits.append(rational_str(c))
            elif c == 1:
                bits.append(mono)
            elif c == -1:
                bits.append("-" + mono)
            else:
                bits.append(rational_str(c) + "*" + mono)
        s = " + ".join(bits)
        return s.replace("+ -", "- ")

    __repr__ = __str__


def _uni_gcd(a, b):
    # dense univariate gcd over Q, monic output
    a = [Fraction(c) for c in a]
    b = [Fraction(c) for c in b]

    def trim(x):
        while x and x[-1] == 0:
            x.pop()
        return x

    a, b = trim(a), trim(b)
    while b:
        # a mod b
        r = list(a)
        inv = 1 / b[-1]
        for i in range(len(r) - len(b), -1, -1):
            c = r[i + len(b) - 1] * inv
            if c:
                for j, bj in enumerate(b):
                    r[i + j] -= c * bj
        a, b = b, trim(r[: len(b) - 1])
    if not a:
        return [Fraction(1)]
    inv = 1 / a[-1]
    return [c * inv for c in a]


def _uni_divexact(a, b):
    # exact dense univariate division
    a = [Fraction(c) for c in a]
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    inv = 1 / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    if any(a[: len(b) - 1]):
        raise ArithmeticError("inexact division")
    return q


class SymElem:
    """Rational function num/den over MPoly.

    Reduction is by monomial content always, and by polynomial gcd when the
    fraction is effectively univariate; equality cross-multiplies so it never
    depends on reduction.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        num, den = self._reduce(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def _reduce(num, den):
        if num.is_zero():
            return num, MPoly.const(den.names, 1)
        sn = num.monomial_content()
        sd = den.monomial_content()
        shift = tuple(min(a, b) for a, b in zip(sn, sd))
        if any(shift):
            num = num.shift_down(shift)
            den = den.shift_down(shift)
        un = num.as_univariate()
        ud = den.as_univariate()
        if un is not None and ud is not None and (un[0] == ud[0] or len(un[1]) == 1 or len(ud[1]) == 1):
            i = un[0] if len(un[1]) > 1 else ud[0]
            g = _uni_gcd(un[1], ud[1])
            if len(g) > 1:
                qn = _uni_divexact(un[1], g)
                qd = _uni_divexact(ud[1], g)

                def rebuild(coeffs):
                    terms = {}
                    for k, c in enumerate(coeffs):
                        if c:
                            e = [0] * len(num.names)
                            e[i] = k
                            terms[tuple(e)] = c
                    return MPoly(num.names, terms)

                num, den = rebuild(qn), rebuild(qd)
        # normalize: den's leading coefficient 1
        _, lc = den.lead()
        if lc != 1:
            inv = 1 / lc
            num = MPoly(num.names, {e: c * inv for e, c in num.terms.items()})
            den = MPoly(den.names, {e: c * inv for e, c in den.terms.items()})
        return num, den

    def __add__(self, other):
        return SymElem(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        return SymElem(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self):
        return SymElem(-self.num, self.den)

    def __mul__(self, other):
        return SymElem(self.num * other.num, self.den * other.den)

    def __eq__(self, other):
        if not isinstance(other, SymElem):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den == MPoly.const(self.den.names, 1):
            return str(self.num)
        return "(%s)/(%s)" % (self.num, self.den)

    __repr__ = __str__


class SymField:
    """Field of rational functions Q(names)."""

    kind = "Sym"
    char = 0
    card = None

    def __init__(self, names):
        self.names = tuple(names)

    @property
    def zero(self):
        return SymElem(MPoly.const(self.names, 0), MPoly.const(self.names, 1))

    @property
    def one(self):
        return SymElem(MPoly.const(self.names, 1), MPoly.const(self.names, 1))

    def from_int(self, n):
        return SymElem(MPoly.const(self.names, n), MPoly.const(self.names, 1))

    def var(self, name):
        return SymElem(MPoly.var(self.names, name), MPoly.const(self.names, 1))

    def from_mpoly(self, poly):
        return SymElem(poly, MPoly.const(self.names, 1))

    def parse(self, s):
        s = str(s).strip()
        if s in self.names:
            return self.var(s)
        return SymElem(MPoly.const(self.names, parse_rational(s)), MPoly.const(self.names, 1))

    def fmt(self, x):
        return str(x)

    def is_zero(self, x):
        return x.num.is_zero()

    def is_unit(self, x):
        return not x.num.is_zero()

    def inv(self, x):
        if x.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return SymElem(x.den, x.num)

    def to_json(self):
        return {"kind": "Sym", "names": list(self.names)}

    def __eq__(self, other):
        return isinstance(other, SymField) and other.names == self.names

    def __hash__(self):
        return hash(("Sym", self.names))

    def __repr__(self):
        return "SymField(%s)" % (self.names,)


def ring_from_json(desc):
    kind = desc["kind"]
    if kind == "Q":
        return QQ
    if kind == "Fp":
        return PrimeField(desc["p"])
    if kind == "Fq":
        return FiniteField(desc["p"], desc["d"], desc.get("poly"))
    if kind == "Zp":
        return Dvr(desc["p"])
    if kind == "Sym":
        return SymField(desc["names"])
    raise ValueError("unknown ring kind %r" % kind)


# ---------------------------------------------------------------------------
# dense polynomials and truncated series over a ring descriptor
# ---------------------------------------------------------------------------


class Poly:
    """Dense polynomial; coefficient list ascending, no trailing zeros."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        c = list(coeffs)
        while c and ring.is_zero(c[-1]):
            c.pop()
        self.ring = ring
        self.coeffs = tuple(c)

    @classmethod
    def const(cls, ring, c):
        return cls(ring, [c])

    @classmethod
    def one_minus_au(cls, ring, a):
        return cls(ring, [ring.one, -a])

    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __getitem__(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.ring.zero

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.ring, [self[i] + other[i] for i in range(n)])

    def __neg__(self):
        return Poly(self.ring, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return Poly(self.ring, [])
        out = [self.ring.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.ring, out)

    def scale(self, c):
        return Poly(self.ring, [c * x for x in self.coeffs])

    def eval(self, x):
        acc = self.ring.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.ring == other.ring
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def fmt(self):
        return [self.ring.fmt(c) for c in self.coeffs]

    def __repr__(self):
        return "Poly(%r)" % (self.fmt(),)


class TruncatedSeries:
    """Power series known modulo u^prec; coeffs has exactly prec entries."""

    __slots__ = ("ring", "coeffs", "prec")

    def __init__(self, ring, coeffs, prec):
        c = list(coeffs)[:prec]
        c += [ring.zero] * (prec - len(c))
        self.ring = ring
        self.coeffs = tuple(c)
        self.prec = prec

    @classmethod
    def from_poly(cls, poly, prec):
        return cls(poly.ring, list(poly.coeffs), prec)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __add__(self, other):
        prec = min(self.prec, other.prec)
        return TruncatedSeries(self.ring, [self[i] + other[i] for i in range(prec)], prec)

    def __neg__(self):
        return TruncatedSeries(self.ring, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        prec = min(self.prec, other.prec)
        out = [self.ring.zero] * prec
        for i in range(prec):
            a = self[i]
            if self.ring.is_zero(a):
                continue
            for j in range(prec - i):
                out[i + j] = out[i + j] + a * other[j]
        return TruncatedSeries(self.ring, out, prec)

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries)
            and self.ring == other.ring
            and self.prec == other.prec
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return "TruncatedSeries(%r, prec=%d)" % ([self.ring.fmt(c) for c in self.coeffs], self.prec)


def series_inv(s):
    """Multiplicative inverse; constant term must be a unit."""
    ring = s.ring
    if not ring.is_unit(s[0]):
        raise ValueError("constant term is not a unit")
    c0inv = ring.inv(s[0])
    out = [c0inv]
    for n in range(1, s.prec):
        acc = ring.zero
        for j in range(1, n + 1):
            acc = acc + s[j] * out[n - j]
        out.append(-(c0inv * acc))
    return TruncatedSeries(ring, out, s.prec)


def series_exp(s):
    """exp of a series with zero constant term; needs characteristic zero."""
    ring = s.ring
    if ring.char != 0:
        raise ValueError("series_exp needs characteristic zero")
    if not ring.is_zero(s[0]):
        raise ValueError("constant term must be zero")
    out = [ring.one]
    for n in range(1, s.prec):
        acc = ring.zero
        for j in range(1, n + 1):
            acc = acc + ring.from_int(j) * s[j] * out[n - j]
        out.append(ring.inv(ring.from_int(n)) * acc)
    return TruncatedSeries(ring, out, s.prec)


def series_log(s):
    """log of a series with constant term 1; needs characteristic zero."""
    ring = s.ring
    if ring.char != 0:
        raise ValueError("series_log needs characteristic zero")
    if s[0] != ring.one:
        raise ValueError("constant term must be one")
    # log(s)' = s'/s
    inv = series_inv(s)
    der = TruncatedSeries(ring, [ring.from_int(n + 1) * s[n + 1] for n in range(s.prec - 1)], s.prec)
    prod = der * inv
    out = [ring.zero]
    for n in range(1, s.prec):
        out.append(ring.inv(ring.from_int(n)) * prod[n - 1])
    return TruncatedSeries(ring, out, s.prec)
