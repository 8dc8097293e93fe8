"""Drinfeld polynomials, general ell-weights, spectral characters.

A DrinfeldPoly holds one constant-term-1 polynomial per Dynkin node; an
EllWeight is a canonical multiset of (parameter, weight) pairs with the
parameter nonzero and the weights allowed to be non-dominant.  Factorization
is by exhaustive root enumeration over finite fields and rational root search
over Q; nothing is ever extended silently.
"""

from __future__ import annotations

from fractions import Fraction

from .cartan import Weight
from .exactnum import Poly, TruncatedSeries, series_inv


class FieldExtensionNeeded(ValueError):
    """Roots lie outside the certified field; carries a suggested degree."""

    def __init__(self, message, suggested_degree=None):
        super().__init__(message)
        self.suggested_degree = suggested_degree


class DrinfeldPoly:
    """Tuple of constant-term-1 polynomials, one per node."""

    __slots__ = ("ring", "polys")

    def __init__(self, ring, polys):
        polys = tuple(polys)
        for f in polys:
            if f.is_zero() or not ring.is_zero(f.coeffs[0] - ring.one):
                raise ValueError("Drinfeld polynomials need constant term 1")
        self.ring = ring
        self.polys = polys

    @classmethod
    def sl2(cls, ring, coeffs):
        return cls(ring, [Poly(ring, coeffs)])

    @classmethod
    def from_roots_sl2(cls, ring, roots):
        f = Poly.const(ring, ring.one)
        for a in roots:
            f = f * Poly(ring, [ring.one, -a])
        return cls(ring, [f])

    @property
    def rank(self):
        return len(self.polys)

    def degree_weight(self):
        return Weight([f.degree() for f in self.polys])

    def is_plus_plus(self):
        """Leading coefficients are units (the ++ condition)."""
        return all(self.ring.is_unit(f.coeffs[-1]) for f in self.polys)

    def __mul__(self, other):
        assert self.ring == other.ring and self.rank == other.rank
        return DrinfeldPoly(self.ring, [f * g for f, g in zip(self.polys, other.polys)])

    def __eq__(self, other):
        return (
            isinstance(other, DrinfeldPoly)
            and self.ring == other.ring
            and self.polys == other.polys
        )

    def __hash__(self):
        return hash((self.ring, self.polys))

    def fmt(self):
        return [f.fmt() for f in self.polys]

    def __repr__(self):
        return "DrinfeldPoly(%r)" % (self.fmt(),)


def minus_involution(f):
    """f(u) = prod(1 - a_j u)  ->  f^-(u) = prod(1 - a_j^{-1} u).

    Computed root-free as the reversed coefficient list over the leading
    coefficient, which must be a unit.
    """
    ring = f.ring
    if f.is_zero() or ring.is_zero(f.coeffs[0]):
        raise ValueError("zero constant term")
    if not ring.is_unit(f.coeffs[-1]):
        raise ValueError("leading coefficient must be a unit")
    inv = ring.inv(f.coeffs[-1])
    return Poly(ring, [inv * c for c in reversed(f.coeffs)])


def _roots_in_field(f):
    """All roots (with multiplicity) of f in its coefficient field, plus the
    nonsplit residual polynomial (constant when f splits)."""
    ring = f.ring
    roots = []
    g = f
    if ring.card is not None:
        candidates = ring.elements()
    else:
        candidates = None
    while g.degree() >= 1:
        found = None
        if candidates is not None:
            for x in candidates:
                if ring.is_zero(g.eval(x)):
                    found = x
                    break
        else:
            found = _rational_root(g)
        if found is None:
            break
        g = _deflate(g, found)
        roots.append(found)
    return roots, g


def _deflate(f, root):
    # synthetic division by (u - root); f(root) = 0
    ring = f.ring
    out = [ring.zero] * f.degree()
    acc = ring.zero
    for k in range(f.degree(), 0, -1):
        acc = f.coeffs[k] + root * acc
        out[k - 1] = acc
    return Poly(ring, out)


def _rational_root(f):
    """One rational root of a Q-coefficient polynomial, or None."""
    from math import gcd

    mult = 1
    for c in f.coeffs:
        mult = mult * c.denominator // gcd(mult, c.denominator)
    ints = [int(c * mult) for c in f.coeffs]
    lead = ints[-1]
    # strip u^k factor: constant term is nonzero for Drinfeld-type inputs
    const = ints[0]
    if const == 0:
        return Fraction(0)

    def divisors(n):
        n = abs(n)
        out = set()
        d = 1
        while d * d <= n:
            if n % d == 0:
                out.add(d)
                out.add(n // d)
            d += 1
        return sorted(out)

    for p in divisors(const):
        for q in divisors(lead):
            for sign in (1, -1):
                cand = Fraction(sign * p, q)
                if f.eval(cand) == 0:
                    return cand
    return None


def factor_poly_unit_roots(f):
    """Multiset {root a_j: multiplicity} of f = prod (1 - a_j u).

    The roots of f as a polynomial in u are the reciprocals 1/a_j, so a_j
    runs over the roots of the reversed polynomial.  Raises
    FieldExtensionNeeded when f does not split over its field.
    """
    ring = f.ring
    if f.degree() <= 0:
        return {}
    rev = Poly(ring, list(reversed(f.coeffs)))
    roots, residual = _roots_in_field(rev)
    if residual.degree() >= 1:
        hint = _extension_hint(f)
        raise FieldExtensionNeeded(
            "roots not in certified field %r (residual degree %d)"
            % (ring.to_json(), residual.degree()),
            suggested_degree=hint,
        )
    out = {}
    for a in roots:
        for seen in out:
            if seen == a:
                out[seen] += 1
                break
        else:
            out[a] = 1
    return out


def _extension_hint(f):
    from .exactnum import FiniteField, PrimeField

    ring = f.ring
    if isinstance(ring, PrimeField):
        base_p, base_d = ring.p, 1
    elif isinstance(ring, FiniteField):
        base_p, base_d = ring.p, ring.d
    else:
        return None
    for d in range(base_d + 1, 5):
        if d % base_d != 0:
            continue
        ext = FiniteField(base_p, d)
        lifted = Poly(ext, [ext.parse(list(_embed_coeff(c, ring))) for c in f.coeffs])
        rev = Poly(ext, list(reversed(lifted.coeffs)))
        _, residual = _roots_in_field(rev)
        if residual.degree() < 1:
            return d
    return None


def _embed_coeff(c, ring):
    from .exactnum import PrimeField

    if isinstance(ring, PrimeField):
        return [c.v]
    return list(c.coeffs)


class EllWeight:
    """Canonical multiset of (parameter, Weight) pairs with integer weights;
    identified with prod_j omega_{mu_j, a_j}."""

    __slots__ = ("ring", "pairs", "rank")

    def __init__(self, ring, pairs, rank=1):
        merged = []
        for a, mu in pairs:
            if not ring.is_unit(a):
                raise ValueError("parameters must be nonzero")
            if not isinstance(mu, Weight):
                mu = Weight([mu] if isinstance(mu, int) else mu)
            for item in merged:
                if item[0] == a:
                    item[1] = item[1] + mu
                    break
            else:
                merged.append([a, mu])
        merged = [(a, mu) for a, mu in merged if any(mu.coords)]
        merged.sort(key=lambda t: _param_sort_key(ring, t[0]))
        self.ring = ring
        self.pairs = tuple(merged)
        self.rank = self.pairs[0][1].coords.__len__() if self.pairs else rank

    @classmethod
    def one(cls, ring, rank=1):
        return cls(ring, [], rank=rank)

    @classmethod
    def fundamental(cls, ring, a, mu):
        return cls(ring, [(a, mu)])

    def __mul__(self, other):
        assert self.ring == other.ring
        return EllWeight(self.ring, list(self.pairs) + list(other.pairs), rank=self.rank)

    def inverse(self):
        return EllWeight(self.ring, [(a, -mu) for a, mu in self.pairs], rank=self.rank)

    def wt(self):
        if not self.pairs:
            return Weight([0] * self.rank)
        acc = Weight([0] * self.rank)
        for _, mu in self.pairs:
            acc = acc + mu
        return acc

    def is_dominant(self):
        return all(mu.is_dominant() for _, mu in self.pairs)

    def star(self, cd):
        """prod omega_{-w0 mu_j, a_j}."""
        return EllWeight(
            self.ring,
            [(a, -cd.longest_element_action(mu)) for a, mu in self.pairs],
            rank=self.rank,
        )

    def spectral_character(self, cd):
        out = SpectralCharacter(self.ring, cd)
        for a, mu in self.pairs:
            out = out + SpectralCharacter.point(self.ring, cd, a, mu)
        return out

    def to_drinfeld(self):
        """The DrinfeldPoly when all exponents are dominant."""
        if not self.is_dominant():
            raise ValueError("not a dominant ell-weight")
        ring = self.ring
        polys = []
        for i in range(self.rank):
            f = Poly.const(ring, ring.one)
            for a, mu in self.pairs:
                for _ in range(mu[i]):
                    f = f * Poly(ring, [ring.one, -a])
            polys.append(f)
        return DrinfeldPoly(ring, polys)

    def series(self, i, prec, sign=1):
        """Expansion of prod (1 - a u)^{±mu_j(h_i)} to the given precision;
        sign=-1 expands with the inverted parameters."""
        ring = self.ring
        acc = TruncatedSeries(ring, [ring.one], prec)
        for a, mu in self.pairs:
            m = mu[i]
            base = a if sign == 1 else ring.inv(a)
            lin = TruncatedSeries(ring, [ring.one, -base], prec)
            if m >= 0:
                for _ in range(m):
                    acc = acc * lin
            else:
                inv = series_inv(lin)
                for _ in range(-m):
                    acc = acc * inv
        return acc

    def __eq__(self, other):
        return isinstance(other, EllWeight) and self.ring == other.ring and self.pairs == other.pairs

    def __hash__(self):
        return hash((self.ring, self.pairs))

    def fmt(self):
        return [[self.ring.fmt(a), list(mu.coords)] for a, mu in self.pairs]

    def __repr__(self):
        if not self.pairs:
            return "EllWeight(1)"
        return "EllWeight(%s)" % ", ".join(
            "omega_{%s,%s}" % (list(mu.coords), self.ring.fmt(a)) for a, mu in self.pairs
        )


def _param_sort_key(ring, a):
    return ring.fmt(a)


def factor(obj, ring=None):
    """Canonical multiset {(a_j, mu_j)} of a DrinfeldPoly (or pass-through of
    an EllWeight's pairs).  Raises FieldExtensionNeeded when roots escape."""
    if isinstance(obj, EllWeight):
        return list(obj.pairs)
    assert isinstance(obj, DrinfeldPoly)
    acc = []  # [param, coords] with params pairwise distinct
    for i, f in enumerate(obj.polys):
        for a, mult in factor_poly_unit_roots(f).items():
            for item in acc:
                if item[0] == a:
                    item[1][i] += mult
                    break
            else:
                coords = [0] * obj.rank
                coords[i] = mult
                acc.append([a, coords])
    pairs = [(a, Weight(coords)) for a, coords in acc]
    pairs.sort(key=lambda t: _param_sort_key(obj.ring, t[0]))
    return pairs


def ell_weight_from_poly(poly):
    return EllWeight(poly.ring, factor(poly), rank=poly.rank)


class SpectralCharacter:
    """Finitely supported map from nonzero field elements to P/Q."""

    __slots__ = ("ring", "cd", "values")

    def __init__(self, ring, cd, values=None):
        vals = []
        for a, cls_ in (values or []):
            if cls_.is_zero():
                continue
            vals.append((a, cls_))
        vals.sort(key=lambda t: _param_sort_key(ring, t[0]))
        self.ring = ring
        self.cd = cd
        self.values = tuple(vals)

    @classmethod
    def point(cls, ring, cd, a, mu):
        return cls(ring, cd, [(a, cd.weight_class(mu))])

    def __add__(self, other):
        assert self.ring == other.ring
        acc = []
        for a, c in list(self.values) + list(other.values):
            for item in acc:
                if item[0] == a:
                    item[1] = item[1] + c
                    break
            else:
                acc.append([a, c])
        return SpectralCharacter(self.ring, self.cd, [(a, c) for a, c in acc])

    def __neg__(self):
        return SpectralCharacter(self.ring, self.cd, [(a, -c) for a, c in self.values])

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self):
        return not self.values

    def __eq__(self, other):
        return (
            isinstance(other, SpectralCharacter)
            and self.ring == other.ring
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.ring, self.values))

    def fmt(self):
        return {self.ring.fmt(a): list(c.residues) for a, c in self.values}

    def __repr__(self):
        return "SpectralCharacter(%r)" % (self.fmt(),)


def ell_root_lattice_member(varpi, cd):
    """Whether an EllWeight is a product of ell-simple roots alpha_{i,a} =
    omega_{alpha_i, a} with integer (possibly negative) exponents: at each
    parameter the weight must lie in the root lattice Q."""
    for _, mu in varpi.pairs:
        if not cd.weight_class(mu).is_zero():
            return False
        # solve C x = mu over the integers
        if _root_coords(cd, mu) is None:
            return False
    return True


def _root_coords(cd, mu):
    from fractions import Fraction as F

    n = cd.rank
    a = [[F(cd.matrix[i][j]) for j in range(n)] for i in range(n)]
    b = [F(c) for c in mu.coords]
    for col in range(n):
        piv = None
        for i in range(col, n):
            if a[i][col] != 0:
                piv = i
                break
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        for i in range(n):
            if i != col and a[i][col] != 0:
                c = a[i][col] / a[col][col]
                for j in range(n):
                    a[i][j] -= c * a[col][j]
                b[i] -= c * b[col]
    out = []
    for i in range(n):
        x = b[i] / a[i][i]
        if x.denominator != 1:
            return None
        out.append(int(x))
    return out


def wmsc_shadow_check(omega, varpi, cd):
    """Necessary conditions for varpi to be an ell-weight of a module with
    ell-highest weight omega: equal spectral characters, the weight sandwich
    w0 wt(omega) <= wt(varpi) <= wt(omega), and (rank 1 only) the exact
    monoid condition omega varpi^{-1} in Q+ by exponent bookkeeping."""
    if omega.ring != varpi.ring:
        return False
    if omega.spectral_character(cd) != varpi.spectral_character(cd):
        return False
    diff_hi = omega.wt() - varpi.wt()
    diff_lo = varpi.wt() - cd.longest_element_action(omega.wt())
    quotient = omega * varpi.inverse()
    if cd.rank == 1:
        # Q+_F is generated by omega_{2,a}: all exponents even and >= 0
        for _, mu in quotient.pairs:
            if mu[0] < 0 or mu[0] % 2 != 0:
                return False
        return True
    # higher rank: the character and weight shadow only (best effort)
    return all(c >= 0 for c in diff_hi.coords) and all(c >= 0 for c in diff_lo.coords)


def block_partition(entries, ring, cd):
    """Group (label, spectral character or None) pairs by character.

    Entries with inconsistent or unavailable characters are reported apart.
    Returns (groups, flagged) with groups a list of {"character", "members"}.
    """
    groups = []
    flagged = []
    for label, chi in entries:
        if chi is None:
            flagged.append(label)
            continue
        for g in groups:
            if g["character"] == chi:
                g["members"].append(label)
                break
        else:
            groups.append({"character": chi, "members": [label]})
    groups.sort(key=lambda g: sorted(g["members"]))
    return groups, flagged
