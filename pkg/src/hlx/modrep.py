"""Concrete finite-dimensional modules as exact matrices, sl2 only.

A LoopModule carries its coefficient ring, a weight for every basis vector
and lazily memoized operator tables:

    op(kind, r, k)   the divided power (x±_r)^(k),
    cartan_binom(k)  binom(h, k), always diagonal by basis weight,
    lam(r)           the Garland series coefficient Lambda_r.

Matrices act on column vectors; entry (i, j) is the coefficient of basis
vector i in the image of basis vector j.  Construction is by recipe: hyper
evaluation modules, tensor products via the divided-power comultiplication,
duals via the antipode, Frobenius and parameter twists, straightened Weyl
modules in characteristic zero, and explicit tables (lattice reductions,
composition factors).

Modules are immutable after construction apart from the lazily memoized
tables; once a table is materialized it is never rewritten, so concurrent
readers are safe and cross-module operations stay pure.
"""

from __future__ import annotations

from fractions import Fraction

from . import looppbw
from .drinfeld import DrinfeldPoly, EllWeight, FieldExtensionNeeded, factor_poly_unit_roots
from .exactnum import QQ, Poly, PrimeField, integer_binomial
from .linalg import Mat, kernel, rref
from .looppbw import CARTAN, LOWER, RAISE, HyperElement

KINDS = (LOWER, RAISE)
KIND_NAMES = {LOWER: "lower", RAISE: "raise"}


def _binom_in_ring(ring, m, k):
    return ring.from_int(integer_binomial(m, k))


class LoopModule:
    # structurally built modules over F_q have operator tables that are
    # F_q-combinations of geometric sequences c^r, hence (q-1)-periodic in r;
    # lattice reductions lose this (basis inversion introduces denominators)
    # and fall back on the dim^2 window, sound because the residue entries
    # still satisfy a linear recurrence of that order in r
    r_periodic = True

    def __init__(self, ring, weights, recipe, hw_index=None):
        self.ring = ring
        self.weights = tuple(int(w) for w in weights)
        self.dim = len(self.weights)
        self.recipe = recipe
        self.hw_index = hw_index
        self._op_cache = {}
        self._lam_cache = {}
        self._np_cache = {}

    # -- operator access ------------------------------------------------------

    def op(self, kind, r, k):
        if k < 0:
            raise ValueError("negative divided power")
        if k == 0:
            return Mat.identity(self.ring, self.dim)
        key = (kind, r, k)
        if key not in self._op_cache:
            self._op_cache[key] = self._op(kind, r, k)
        return self._op_cache[key]

    def lam(self, r):
        if r == 0:
            return Mat.identity(self.ring, self.dim)
        if r not in self._lam_cache:
            self._lam_cache[r] = self._lam(r)
        return self._lam_cache[r]

    def cartan_binom(self, k):
        return Mat.diag(self.ring, [_binom_in_ring(self.ring, w, k) for w in self.weights])

    # -- numpy mirrors (prime fields): same tables as int64 arrays mod p ------

    def op_np(self, kind, r, k):
        import numpy as np

        if not isinstance(self.ring, PrimeField):
            raise TypeError("numpy tables are only kept for prime fields")
        if k == 0:
            return np.eye(self.dim, dtype=np.int64)
        key = ("op", kind, r, k)
        if key not in self._np_cache:
            self._np_cache[key] = self._op_np(kind, r, k)
        return self._np_cache[key]

    def lam_np(self, r):
        import numpy as np

        if not isinstance(self.ring, PrimeField):
            raise TypeError("numpy tables are only kept for prime fields")
        if r == 0:
            return np.eye(self.dim, dtype=np.int64)
        key = ("lam", r)
        if key not in self._np_cache:
            self._np_cache[key] = self._lam_np(r)
        return self._np_cache[key]

    def cartan_binom_np(self, k):
        import numpy as np
        from .exactnum import lucas_binom

        p = self.ring.char
        return np.diag(
            np.array([lucas_binom(w, k, p) for w in self.weights], dtype=np.int64)
        )

    def _op_np(self, kind, r, k):
        from .linalg import to_np

        return to_np(self.op(kind, r, k))

    def _lam_np(self, r):
        from .linalg import to_np

        return to_np(self.lam(r))

    # -- policies --------------------------------------------------------------

    def r_window(self):
        """Window of loop degrees whose tables determine every operator.

        Over F_q, periodic tables need only [0, q-1); otherwise the ratio
        count (with multiplicity) is bounded by dim^2, and the tables for
        consecutive r in the window determine all r through the linear
        recurrence with characteristic polynomial prod (X - c_i).
        """
        if self.ring.card is not None and self.r_periodic:
            return min(self.dim ** 2, self.ring.card - 1)
        return self.dim ** 2

    def lam_precision(self):
        top = max((abs(w) for w in self.weights), default=0)
        return 2 * top + 2

    def max_exponent(self):
        if not self.weights:
            return 0
        return max(0, (max(self.weights) - min(self.weights)) // 2)

    # -- misc -------------------------------------------------------------------

    def weight_multiplicities(self):
        out = {}
        for w in self.weights:
            out[w] = out.get(w, 0) + 1
        return out

    def hw_vector(self):
        if self.hw_index is None:
            raise ValueError("module has no designated highest vector")
        v = [self.ring.zero] * self.dim
        v[self.hw_index] = self.ring.one
        return v

    def to_json(self):
        return {
            "ring": self.ring.to_json(),
            "dim": self.dim,
            "weights": list(self.weights),
            "recipe": self.recipe,
        }

    def __repr__(self):
        return "LoopModule(dim=%d, ring=%r)" % (self.dim, self.ring)


# ---------------------------------------------------------------------------
# evaluation Weyl modules
# ---------------------------------------------------------------------------


class _EvalWeyl(LoopModule):
    """W(lambda, a): basis v_0..v_lambda with v_j of weight lambda - 2j and
    (x±_r)^(k) acting through the hyper evaluation map as a^{rk} (x±)^(k)."""

    def __init__(self, ring, lam, a):
        if lam < 0:
            raise ValueError("weight must be nonnegative")
        if not ring.is_unit(a):
            raise ValueError("evaluation parameter must be a unit")
        self.lam_weight = lam
        self.a = a
        recipe = {"eval_weyl": {"lambda": lam, "a": ring.fmt(a)}}
        super().__init__(ring, [lam - 2 * j for j in range(lam + 1)], recipe, hw_index=0)

    def _param_power(self, e):
        ring = self.ring
        if e >= 0:
            out = ring.one
            for _ in range(e):
                out = out * self.a
            return out
        inv = ring.inv(self.a)
        out = ring.one
        for _ in range(-e):
            out = out * inv
        return out

    def _op(self, kind, r, k):
        ring = self.ring
        n = self.dim
        rows = [[ring.zero] * n for _ in range(n)]
        scal = self._param_power(r * k)
        lam = self.lam_weight
        for j in range(n):
            if kind == LOWER:
                i = j + k
                if i < n:
                    rows[i][j] = scal * _binom_in_ring(ring, j + k, k)
            else:
                i = j - k
                if i >= 0:
                    rows[i][j] = scal * _binom_in_ring(ring, lam - j + k, k)
        return Mat(ring, rows)

    def _lam(self, r):
        # hev_a(Lambda_r) = (-a)^r binom(h, |r|)
        ring = self.ring
        scal = self._param_power(r)
        if abs(r) % 2 == 1:
            scal = -scal
        return Mat.diag(
            ring,
            [scal * _binom_in_ring(ring, w, abs(r)) for w in self.weights],
        )


def eval_weyl_module(ring, lam, a):
    return _EvalWeyl(ring, lam, a)


# ---------------------------------------------------------------------------
# tensor product
# ---------------------------------------------------------------------------


class _Tensor(LoopModule):
    def __init__(self, left, right):
        if left.ring != right.ring:
            raise ValueError("tensor factors live over different rings")
        self.left = left
        self.right = right
        weights = [wl + wr for wl in left.weights for wr in right.weights]
        hw = None
        if left.hw_index is not None and right.hw_index is not None:
            hw = left.hw_index * right.dim + right.hw_index
        recipe = {"tensor": [left.recipe, right.recipe]}
        super().__init__(left.ring, weights, recipe, hw_index=hw)

    def _op(self, kind, r, k):
        if isinstance(self.ring, PrimeField):
            from .linalg import from_np

            return from_np(self.op_np(kind, r, k), self.ring)
        acc = None
        for l in range(k + 1):
            term = self.left.op(kind, r, l).kron(self.right.op(kind, r, k - l))
            acc = term if acc is None else acc + term
        return acc

    def _lam(self, r):
        if isinstance(self.ring, PrimeField):
            from .linalg import from_np

            return from_np(self.lam_np(r), self.ring)
        sign = 1 if r > 0 else -1
        acc = None
        for l in range(abs(r) + 1):
            term = self.left.lam(sign * l).kron(self.right.lam(sign * (abs(r) - l)))
            acc = term if acc is None else acc + term
        return acc

    def _op_np(self, kind, r, k):
        import numpy as np

        p = self.ring.char
        acc = np.zeros((self.dim, self.dim), dtype=np.int64)
        for l in range(k + 1):
            acc += np.kron(self.left.op_np(kind, r, l), self.right.op_np(kind, r, k - l))
        return acc % p

    def _lam_np(self, r):
        import numpy as np

        p = self.ring.char
        sign = 1 if r > 0 else -1
        acc = np.zeros((self.dim, self.dim), dtype=np.int64)
        for l in range(abs(r) + 1):
            acc += np.kron(self.left.lam_np(sign * l), self.right.lam_np(sign * (abs(r) - l)))
        return acc % p


def tensor(*mods):
    assert mods
    out = mods[0]
    for m in mods[1:]:
        out = _Tensor(out, m)
    return out


# ---------------------------------------------------------------------------
# duality via the antipode
# ---------------------------------------------------------------------------


class _Dual(LoopModule):
    def __init__(self, inner):
        self.inner = inner
        super().__init__(
            inner.ring,
            [-w for w in inner.weights],
            {"dual": inner.recipe},
            hw_index=None,
        )

    def _op(self, kind, r, k):
        # S((x±_r)^(k)) = (-1)^k (x±_r)^(k)
        m = self.inner.op(kind, r, k).transpose()
        if k % 2 == 1:
            m = -m
        return m

    def _lam(self, r):
        # S(Lambda±(u)) = Lambda±(u)^{-1}: invert the matrix series
        sign = 1 if r > 0 else -1
        n = abs(r)
        inv = self._lam_inverse_series(sign, n)
        return inv[n].transpose()

    def _lam_inverse_series(self, sign, upto):
        key = ("lamser", sign)
        cache = self._op_cache.setdefault(key, [Mat.identity(self.ring, self.inner.dim)])
        while len(cache) <= upto:
            n = len(cache)
            acc = Mat.zeros(self.ring, self.inner.dim, self.inner.dim)
            for j in range(1, n + 1):
                acc = acc + self.inner.lam(sign * j) * cache[n - j]
            cache.append(-acc)
        return cache

    def _op_np(self, kind, r, k):
        p = self.ring.char
        m = self.inner.op_np(kind, r, k).T
        if k % 2 == 1:
            m = -m
        return m % p

    def _lam_np(self, r):
        import numpy as np

        p = self.ring.char
        sign = 1 if r > 0 else -1
        n = abs(r)
        key = ("nplamser", sign)
        cache = self._np_cache.setdefault(key, [np.eye(self.inner.dim, dtype=np.int64)])
        while len(cache) <= n:
            j = len(cache)
            acc = np.zeros((self.inner.dim, self.inner.dim), dtype=np.int64)
            for i in range(1, j + 1):
                acc = (acc + self.inner.lam_np(sign * i) @ cache[j - i]) % p
            cache.append((-acc) % p)
        return cache[n].T % p


def dual(m):
    return _Dual(m)


# ---------------------------------------------------------------------------
# Frobenius and parameter twists
# ---------------------------------------------------------------------------


class _Frobenius(LoopModule):
    """Pull-back along the m-th arithmetic Frobenius: divided powers divide
    their exponents by p^m (zero unless divisible), weights scale by p^m."""

    def __init__(self, inner, m):
        if m < 0:
            raise ValueError("twist exponent must be nonnegative")
        p = inner.ring.char
        if p == 0:
            raise ValueError("Frobenius twist needs positive characteristic")
        self.inner = inner
        self.m = m
        self.pm = p ** m
        super().__init__(
            inner.ring,
            [w * self.pm for w in inner.weights],
            {"frobenius_twist": {"m": m, "of": inner.recipe}},
            hw_index=inner.hw_index,
        )

    def _op(self, kind, r, k):
        if k % self.pm != 0:
            return Mat.zeros(self.ring, self.dim, self.dim)
        return self.inner.op(kind, r, k // self.pm)

    def _lam(self, r):
        if r % self.pm != 0:
            return Mat.zeros(self.ring, self.dim, self.dim)
        return self.inner.lam(r // self.pm)

    def _op_np(self, kind, r, k):
        import numpy as np

        if k % self.pm != 0:
            return np.zeros((self.dim, self.dim), dtype=np.int64)
        return self.inner.op_np(kind, r, k // self.pm)

    def _lam_np(self, r):
        import numpy as np

        if r % self.pm != 0:
            return np.zeros((self.dim, self.dim), dtype=np.int64)
        return self.inner.lam_np(r // self.pm)


def frobenius_twist(m, steps):
    if steps == 0:
        return m
    return _Frobenius(m, steps)


class _Psi(LoopModule):
    """Pull-back along psi_a: (x±_r)^(k) -> a^{rk} (x±_r)^(k)."""

    def __init__(self, inner, a):
        if not inner.ring.is_unit(a):
            raise ValueError("twist parameter must be a unit")
        self.inner = inner
        self.a = a
        super().__init__(
            inner.ring,
            inner.weights,
            {"psi_twist": {"a": inner.ring.fmt(a), "of": inner.recipe}},
            hw_index=inner.hw_index,
        )

    def _scal(self, e):
        ring = self.ring
        base = self.a if e >= 0 else ring.inv(self.a)
        out = ring.one
        for _ in range(abs(e)):
            out = out * base
        return out

    def _op(self, kind, r, k):
        return self.inner.op(kind, r, k).scale(self._scal(r * k))

    def _lam(self, r):
        return self.inner.lam(r).scale(self._scal(r))

    def _op_np(self, kind, r, k):
        p = self.ring.char
        return self.inner.op_np(kind, r, k) * self._scal(r * k).v % p

    def _lam_np(self, r):
        p = self.ring.char
        return self.inner.lam_np(r) * self._scal(r).v % p


def psi_twist(m, a):
    return _Psi(m, a)


# ---------------------------------------------------------------------------
# irreducibles via Steinberg digits
# ---------------------------------------------------------------------------


def irreducible_module(ring, lam, a):
    """V(lambda, a) over a field of characteristic p, built as the tensor of
    Frobenius twists of the restricted evaluation factors V(lambda_k, a^{p^k})."""
    p = ring.char
    if p == 0:
        raise ValueError("needs positive characteristic")
    if lam < 0:
        raise ValueError("weight must be dominant")
    if not ring.is_unit(a):
        raise ValueError("parameter must be a unit")
    if lam == 0:
        return eval_weyl_module(ring, 0, a)
    digits = []
    rest = lam
    while rest:
        digits.append(rest % p)
        rest //= p
    factors = []
    for k, dk in enumerate(digits):
        if dk == 0:
            continue
        ak = a
        for _ in range(k):
            apow = ring.one
            for _ in range(p):
                apow = apow * ak
            ak = apow
        factors.append(frobenius_twist(eval_weyl_module(ring, dk, ak), k))
    out = tensor(*factors)
    out.recipe = {"irreducible": {"lambda": lam, "a": ring.fmt(a), "p": p}}
    return out


# ---------------------------------------------------------------------------
# straightened Weyl modules in characteristic zero
# ---------------------------------------------------------------------------


class _Weyl0(LoopModule):
    """W0(omega) over a characteristic-zero field, with basis the surviving
    straightening monomials applied to the highest vector.  Lowering
    operators act by monomial merging plus rewrite rules; everything else is
    evaluated through the symbolic engine against the highest-weight data."""

    def __init__(self, ring, omega_coeffs, margin=6, max_sweeps=6):
        if ring.char != 0:
            raise ValueError("straightened Weyl modules are built in characteristic zero")
        sat = looppbw.weyl_upper_bound(omega_coeffs, ring, max_sweeps=max_sweeps, margin=margin)
        if not sat.stabilized:
            raise RuntimeError("straightening did not stabilize; enlarge the windows")
        self.sat = sat
        self.omega = list(omega_coeffs)
        lam = sat.lam
        self.lam_weight = lam
        self.basis_monomials = list(sat.basis)
        self._hs_cache = {}
        weights = [lam - 2 * sum(k for _, k in m) for m in self.basis_monomials]
        recipe = {"weyl0": {"omega": [ring.fmt(c) for c in omega_coeffs]}}
        super().__init__(ring, weights, recipe, hw_index=self.basis_monomials.index(()))

    # h_{s} eigenvalue on the highest vector: Newton power sums of the roots,
    # from e_i = (-1)^i omega_i without factoring
    def _h_eig(self, s):
        if s == 0:
            return self.ring.from_int(self.lam_weight)
        key = s
        if key not in self._hs_cache:
            ring = self.ring
            sign = 1 if s > 0 else -1
            coeffs = self.omega if sign > 0 else _minus_coeffs(self.omega, ring)
            n = abs(s)
            # p_n = e_1 p_{n-1} - e_2 p_{n-2} + ... + (-1)^{n-1} n e_n
            es = [(ring.from_int((-1) ** i)) * c for i, c in enumerate(coeffs)]
            ps = [ring.from_int(self.lam_weight)]
            for m in range(1, n + 1):
                acc = ring.zero
                for i in range(1, m):
                    if i < len(es):
                        acc = acc + ring.from_int((-1) ** (i - 1)) * es[i] * ps[m - i]
                if m < len(es):
                    acc = acc + ring.from_int((-1) ** (m - 1) * m) * es[m]
                ps.append(acc)
                self._hs_cache[sign * m] = ps[m]
        return self._hs_cache[key]

    def _cartan_value(self, entries):
        """Value of a pure-Cartan PBW block on the highest vector."""
        ring = self.ring
        out = ring.one
        for kind, r, k in entries:
            assert kind == CARTAN
            if r == 0:
                out = out * _binom_in_ring(ring, self.lam_weight, k)
            else:
                v = self._h_eig(r)
                for _ in range(k):
                    out = out * v
        return out

    def _reduce_or_raise(self, vec):
        coords = self.sat.reduce(vec)
        if coords is None:
            raise RuntimeError(
                "monomial left the straightening window; rebuild with a larger margin"
            )
        return coords

    def _op(self, kind, r, k):
        ring = self.ring
        cols = []
        if kind == LOWER:
            for mono in self.basis_monomials:
                if sum(kk for _, kk in mono) + k > self.lam_weight:
                    cols.append([ring.zero] * self.dim)
                    continue
                merged, coeff = looppbw._merge_lower(mono, ((r, k),), ring)
                cols.append([coeff * c for c in self._reduce_or_raise({merged: ring.one})])
        else:
            elem = HyperElement.gen(RAISE, r, k)
            for mono in self.basis_monomials:
                cols.append(self._apply_symbolic(elem, mono))
        return Mat(ring, list(zip(*cols)))

    def _lam(self, r):
        elem = looppbw.lambda_element(r)
        cols = [self._apply_symbolic(elem, mono) for mono in self.basis_monomials]
        return Mat(self.ring, list(zip(*cols)))

    def _apply_symbolic(self, elem, mono):
        """Coordinates of elem . (monomial v) via normal ordering."""
        ring = self.ring
        ximono = HyperElement({tuple((LOWER, s, k) for s, k in mono): Fraction(1)})
        prod = elem * ximono
        vec = {}
        for pbw, c in prod.coeffs.items():
            if any(kind == RAISE for kind, _, _ in pbw):
                continue
            lower = tuple((s, k) for kind, s, k in pbw if kind == LOWER)
            if sum(k for _, k in lower) > self.lam_weight:
                continue
            cart = tuple(t for t in pbw if t[0] == CARTAN)
            scal = ring.from_int(c.numerator) * ring.inv(ring.from_int(c.denominator))
            scal = scal * self._cartan_value(cart)
            if not ring.is_zero(scal):
                vec[lower] = vec.get(lower, ring.zero) + scal
        coords = self._reduce_or_raise(vec)
        return coords


def _minus_coeffs(omega, ring):
    lead = omega[-1]
    inv = ring.inv(lead)
    return [inv * c for c in reversed(omega)]


def weyl0_module(ring, omega_coeffs, margin=6):
    return _Weyl0(ring, omega_coeffs, margin=margin)


def weyl0_from_roots(ring, roots, margin=6):
    f = Poly.const(ring, ring.one)
    for a in roots:
        f = f * Poly(ring, [ring.one, -a])
    return _Weyl0(ring, list(f.coeffs), margin=margin)


# ---------------------------------------------------------------------------
# explicit tables (lattice reductions, composition factors)
# ---------------------------------------------------------------------------


class _Explicit(LoopModule):
    """Module given by stored tables plus optional on-demand functions.

    ops: {(kind, r, k): Mat}; when r_period is set (structural finite-field
    modules) loop degrees reduce modulo it, otherwise tables must cover the
    certified dim^2 window.  op_fn / lam_fn compute missing tables (lattice
    reductions and chop factors keep a handle on their parents this way).
    """

    def __init__(
        self, ring, weights, ops, lams, recipe,
        hw_index=None, r_period=None, lam_fn=None, op_fn=None,
    ):
        super().__init__(ring, weights, recipe, hw_index=hw_index)
        self._ops = ops
        self._lams = lams
        self._period = r_period
        self._lam_fn = lam_fn
        self._op_fn = op_fn
        self.r_periodic = r_period is not None

    def _op(self, kind, r, k):
        if self._period:
            r %= self._period
        key = (kind, r, k)
        if key in self._ops:
            return self._ops[key]
        if k > self.max_exponent():
            return Mat.zeros(self.ring, self.dim, self.dim)
        if self._op_fn is not None:
            return self._op_fn(kind, r, k)
        # compose from stored p-power tables: x^(k) = unit * prod x^(p^j)^(k_j)
        p = self.ring.char
        if p == 0:
            raise KeyError("operator (%s, %d, %d) not stored" % (KIND_NAMES[kind], r, k))
        digits = []
        rest = k
        while rest:
            digits.append(rest % p)
            rest //= p
        acc = Mat.identity(self.ring, self.dim)
        mult = 1
        total = 0
        for j, dj in enumerate(digits):
            for _ in range(dj):
                step = (kind, r, p ** j)
                if step not in self._ops:
                    raise KeyError("operator (%s, %d, %d) not stored" % (KIND_NAMES[kind], r, p ** j))
                acc = acc * self._ops[step]
                mult = mult * integer_binomial(total + p ** j, p ** j)
                total += p ** j
        # acc = prod x^(p^j) (each dj times) = mult * x^(k), mult a unit mod p
        inv = self.ring.inv(self.ring.from_int(mult % p))
        return acc.scale(inv)

    def _lam(self, r):
        if r in self._lams:
            return self._lams[r]
        if self._lam_fn is not None:
            return self._lam_fn(r)
        raise KeyError("Lambda_%d not stored (precision too small)" % r)


def explicit_module(
    ring, weights, ops, lams, recipe,
    hw_index=None, r_period=None, lam_fn=None, op_fn=None,
):
    return _Explicit(
        ring, weights, ops, lams, recipe,
        hw_index=hw_index, r_period=r_period, lam_fn=lam_fn, op_fn=op_fn,
    )


# ---------------------------------------------------------------------------
# ell-weight analysis
# ---------------------------------------------------------------------------


def ell_hw_vectors(m, r_window=None, kmax=None):
    """Echelonized basis of the joint kernel of all raising divided powers in
    the certified window; over F_q only p-power exponents are needed."""
    ring = m.ring
    if r_window is None:
        r_window = m.r_window()
    if kmax is None:
        kmax = max(1, m.max_exponent())
    p = ring.char
    if p:
        ks = []
        pk = 1
        while pk <= kmax:
            ks.append(pk)
            pk *= p
    else:
        ks = [1]
    if isinstance(ring, PrimeField):
        import numpy as np
        from .linalg import np_nullspace

        blocks = []
        for r in range(-r_window, r_window + 1):
            for k in ks:
                mat = m.op_np(RAISE, r, k)
                if mat.any():
                    blocks.append(mat)
        if not blocks:
            return [list(row) for row in Mat.identity(ring, m.dim).rows]
        ker = np_nullspace(np.concatenate(blocks, axis=0), ring.p)
        return [[ring(int(c)) for c in row] for row in ker]
    rows = []
    for r in range(-r_window, r_window + 1):
        for k in ks:
            mat = m.op(RAISE, r, k)
            if not mat.is_zero():
                rows.extend(mat.rows)
    if not rows:
        return [list(row) for row in Mat.identity(ring, m.dim).rows]
    return kernel(Mat(ring, rows))


def drinfeld_polynomial(m, v=None, prec=None):
    """Drinfeld data on an ell-highest-weight vector.

    Returns (DrinfeldPoly, report) where the report records the eigenvalue
    checks: v is a joint Lambda eigenvector, the plus series is a polynomial
    of degree = weight of v, and the minus series matches its minus
    involution (the identity Lambda_{lam} Lambda_{-r} v = Lambda_{lam-r} v).
    """
    ring = m.ring
    if v is None:
        if m.hw_index is not None:
            v = m.hw_vector()
        else:
            vs = ell_hw_vectors(m)
            if len(vs) != 1:
                raise ValueError("ell-highest-weight space has dimension %d" % len(vs))
            v = vs[0]
    if prec is None:
        prec = m.lam_precision()
    # weight of v
    idxs = [i for i, c in enumerate(v) if not ring.is_zero(c)]
    wts = {m.weights[i] for i in idxs}
    if len(wts) != 1:
        raise ValueError("vector is not weight homogeneous")
    lam = wts.pop()
    if lam < 0:
        raise ValueError("vector weight is not dominant")

    if isinstance(ring, PrimeField):
        import numpy as np

        p = ring.p
        vnp = np.array([c.v for c in v], dtype=np.int64)

        def eig(r):
            img = m.lam_np(r) @ vnp % p
            i0 = idxs[0]
            cand = img[i0] * pow(int(vnp[i0]), -1, p) % p
            if ((cand * vnp - img) % p).any():
                raise ValueError("vector is not a joint Lambda eigenvector")
            return ring(int(cand))

    else:

        def eig(r):
            img = m.lam(r).apply(v)
            ratio = img[idxs[0]] * ring.inv(v[idxs[0]])
            chk = [ratio * c for c in v]
            if any(not ring.is_zero(a - b) for a, b in zip(chk, img)):
                raise ValueError("vector is not a joint Lambda eigenvector")
            return ratio

    plus = [eig(r) for r in range(0, prec)]
    minus = [eig(-r) for r in range(0, prec)]
    report = {"plus_polynomial": True, "minus_matches": True, "degree": lam}
    for r in range(lam + 1, prec):
        if not ring.is_zero(plus[r]):
            report["plus_polynomial"] = False
    coeffs = plus[: lam + 1]
    poly = DrinfeldPoly.sl2(ring, coeffs)
    if not ring.is_unit(coeffs[-1]):
        report["plus_polynomial"] = False
    else:
        from .drinfeld import minus_involution

        expected = minus_involution(poly.polys[0])
        for r in range(0, prec):
            want = expected[r] if r <= expected.degree() else ring.zero
            if not ring.is_zero(minus[r] - want):
                report["minus_matches"] = False
    return poly, report


def _restricted_matrix(mat, basis_rows, ring):
    """Matrix of mat on the span of basis_rows, in those coordinates."""
    from .linalg import solve_right

    big = Mat(ring, basis_rows).transpose()  # columns are basis vectors
    restricted_cols = []
    for row in basis_rows:
        img = mat.apply(list(row))
        coords = solve_right(big, img)
        if coords is None:
            raise ArithmeticError("subspace is not invariant")
        restricted_cols.append(coords)
    return Mat(ring, list(zip(*restricted_cols)))


def _nil_power(mat, n):
    power = mat
    for _ in range(max(1, n.bit_length())):
        power = power * power
    return power


def _generalized_eigenspace_split(mat, basis_rows, ring):
    """Split the span of basis_rows into generalized eigenspaces of mat.

    Returns (list of (eigenvalue, rows), opaque_rows) where opaque_rows spans
    the invariant complement with no eigenvalue in the field.
    """
    n = len(basis_rows)
    if n == 0:
        return [], []
    if n == 1:
        v = basis_rows[0]
        img = mat.apply(list(v))
        idx = next(i for i, c in enumerate(v) if not ring.is_zero(c))
        ratio = img[idx] * ring.inv(v[idx])
        if all(ring.is_zero(a - ratio * b) for a, b in zip(img, v)):
            return [(ratio, basis_rows)], []
        raise ArithmeticError("1-dimensional block is not invariant")
    rmat = _restricted_matrix(mat, basis_rows, ring)
    if ring.card is None:
        raise ValueError("generalized eigenspaces need a finite field")

    def lift(coord_vecs):
        m0 = len(basis_rows[0])
        out = []
        for kv in coord_vecs:
            vec = [ring.zero] * m0
            for j in range(n):
                if not ring.is_zero(kv[j]):
                    vec = [a + kv[j] * b for a, b in zip(vec, basis_rows[j])]
            out.append(vec)
        return out

    found = []
    total = 0
    ident = Mat.identity(ring, n)
    for nu in ring.elements():
        ker = kernel(_nil_power(rmat - ident.scale(nu), n))
        if ker:
            found.append((nu, lift(ker)))
            total += len(ker)
        if total == n:
            break
    if total < n:
        prod = ident
        for nu, _ in found:
            prod = prod * _nil_power(rmat - ident.scale(nu), n)
        img_rows, _ = rref(list(zip(*prod.rows)), ring)
        return found, lift(img_rows)
    return found, []


def ell_weight_decomposition(m, r_window=None):
    """Joint generalized eigenspace decomposition of the Lambda operators,
    refining the weight decomposition.

    Returns a list of blocks {weight, dim, series_plus, series_minus,
    ell_weight} where ell_weight is an EllWeight when the eigenvalue series
    factors over the certified field and None (opaque) otherwise.
    """
    ring = m.ring
    if ring.card is None:
        raise ValueError("ell-weight decomposition needs finite field coefficients")
    prec = m.lam_precision()
    if r_window is None:
        r_window = prec - 1
    rs = [r for rr in range(1, r_window + 1) for r in (rr, -rr)]
    if isinstance(ring, PrimeField):
        blocks = _np_block_refinement(m, rs)
    else:
        blocks = _generic_block_refinement(m, rs)
    out = []
    for w, rows, eigs in blocks:
        opaque = any(r not in eigs for r in rs)
        if opaque:
            series_plus = series_minus = None
            ellw = None
        else:
            series_plus = [ring.one] + [eigs[r] for r in range(1, prec)]
            series_minus = [ring.one] + [eigs[-r] for r in range(1, prec)]
            ellw = _match_ell_weight(ring, w, series_plus, series_minus, prec, m)
        out.append(
            {
                "weight": w,
                "dim": len(rows),
                "rows": rows,
                "series_plus": series_plus,
                "series_minus": series_minus,
                "ell_weight": ellw,
            }
        )
    return out


def _generic_block_refinement(m, rs):
    ring = m.ring
    blocks = []
    for w in sorted(set(m.weights), reverse=True):
        rows = []
        for i, wi in enumerate(m.weights):
            if wi == w:
                row = [ring.zero] * m.dim
                row[i] = ring.one
                rows.append(row)
        blocks.append((w, rows, {}))
    for r in rs:
        mat = m.lam(r)
        nxt = []
        for w, rows, eigs in blocks:
            found, opaque = _generalized_eigenspace_split(mat, rows, ring)
            for nu, vecs in found:
                e = dict(eigs)
                e[r] = nu
                nxt.append((w, vecs, e))
            if opaque:
                nxt.append((w, opaque, dict(eigs)))  # no eigenvalue at r
        blocks = nxt
    return blocks


def _np_block_refinement(m, rs):
    import numpy as np
    from .linalg import np_nullspace, np_rref

    ring = m.ring
    p = ring.p
    blocks = []
    for w in sorted(set(m.weights), reverse=True):
        idxs = [i for i, wi in enumerate(m.weights) if wi == w]
        rows = np.zeros((len(idxs), m.dim), dtype=np.int64)
        for j, i in enumerate(idxs):
            rows[j, i] = 1
        blocks.append((w, rows, list(idxs), {}))
    for r in rs:
        mat = m.lam_np(r)
        nxt = []
        for w, rows, pivots, eigs in blocks:
            s = rows.shape[0]
            imgs = rows @ mat.T % p
            # coordinates against the RREF rows: entries at pivot columns
            coords = imgs[:, pivots] % p
            if ((coords @ rows - imgs) % p).any():
                raise ArithmeticError("weight block is not Lambda invariant")
            rmat = coords.T % p  # restricted matrix, column action
            if s == 1:
                e = dict(eigs)
                e[r] = ring(int(rmat[0, 0]))
                nxt.append((w, rows, pivots, e))
                continue
            found_total = 0
            prod = np.eye(s, dtype=np.int64)
            for nu in range(p):
                shifted = (rmat - nu * np.eye(s, dtype=np.int64)) % p
                power = shifted
                for _ in range(max(1, s.bit_length())):
                    power = power @ power % p
                ker = np_nullspace(power, p)
                if ker.shape[0]:
                    lifted = ker @ rows % p
                    red, piv = np_rref(lifted, p)
                    e = dict(eigs)
                    e[r] = ring(nu)
                    nxt.append((w, red, piv, e))
                    found_total += ker.shape[0]
                    prod = prod @ power % p
                if found_total == s:
                    break
            if found_total < s:
                img_rows, piv = np_rref(prod.T % p, p)
                if img_rows.shape[0]:
                    lifted = img_rows @ rows % p
                    red, piv2 = np_rref(lifted, p)
                    nxt.append((w, red, piv2, dict(eigs)))
        blocks = nxt
    out = []
    for w, rows, pivots, eigs in blocks:
        ring_rows = [[ring(int(c)) for c in row] for row in rows]
        out.append((w, ring_rows, eigs))
    return out


def _match_ell_weight(ring, w, series_plus, series_minus, prec, m):
    """Identify the rational series omega/pi with wt = w; None when opaque."""
    top = max((abs(x) for x in m.weights), default=0)
    for dpi in range(0, top + 1):
        dom = dpi + w
        if dom < 0 or dom > top:
            continue
        if dom + dpi + 1 > prec:
            break
        pi = _solve_denominator(ring, series_plus, dom, dpi, prec)
        if pi is None:
            continue
        om = _series_times_poly(ring, series_plus, pi, dom)
        if om is None:
            continue
        # verify minus side: series_minus must equal om^-(u) / pi^-(u)
        try:
            from .drinfeld import minus_involution

            omp = Poly(ring, om)
            pip = Poly(ring, pi)
            if omp.degree() != dom or pip.degree() != dpi:
                continue
            if not (ring.is_unit(omp.coeffs[-1]) if dom else True):
                continue
            if not (ring.is_unit(pip.coeffs[-1]) if dpi else True):
                continue
            minus_num = minus_involution(omp) if dom else omp
            minus_den = minus_involution(pip) if dpi else pip
            from .exactnum import TruncatedSeries, series_inv

            num_s = TruncatedSeries.from_poly(minus_num, prec)
            den_s = series_inv(TruncatedSeries.from_poly(minus_den, prec))
            want = num_s * den_s
            if any(not ring.is_zero(want[r] - series_minus[r]) for r in range(prec)):
                continue
            rootsn = factor_poly_unit_roots(omp)
            rootsd = factor_poly_unit_roots(pip)
        except (FieldExtensionNeeded, ValueError):
            continue
        pairs = [(a, mult) for a, mult in rootsn.items()]
        pairs += [(a, -mult) for a, mult in rootsd.items()]
        return EllWeight(ring, pairs)
    return None


def _solve_denominator(ring, series, dom, dpi, prec):
    """Find pi with pi_0 = 1, deg <= dpi, (series * pi) truncating to degree
    <= dom through precision."""
    if dpi == 0:
        if all(ring.is_zero(series[r]) for r in range(dom + 1, prec)):
            return [ring.one]
        return None
    if isinstance(ring, PrimeField):
        import numpy as np
        from .linalg import np_rref

        p = ring.p
        nrows = prec - dom - 1
        a = np.zeros((nrows, dpi + 1), dtype=np.int64)
        for i, mdeg in enumerate(range(dom + 1, prec)):
            for j in range(1, dpi + 1):
                if mdeg - j >= 0:
                    a[i, j - 1] = series[mdeg - j].v
            a[i, dpi] = (-series[mdeg].v) % p
        red, pivots = np_rref(a, p)
        if dpi in pivots:
            return None
        x = np.zeros(dpi, dtype=np.int64)
        for row, col in zip(red, pivots):
            x[col] = row[dpi]
        # verify (system may be underdetermined)
        if ((a[:, :dpi] @ x - a[:, dpi]) % p).any():
            return None
        return [ring.one] + [ring(int(c)) for c in x]
    rows = []
    rhs = []
    for mdeg in range(dom + 1, prec):
        row = []
        for j in range(1, dpi + 1):
            row.append(series[mdeg - j] if 0 <= mdeg - j else ring.zero)
        rows.append(row)
        rhs.append(-series[mdeg])
    from .linalg import solve_right

    sol = solve_right(Mat(ring, rows), rhs)
    if sol is None:
        return None
    return [ring.one] + sol


def _series_times_poly(ring, series, pi, dom):
    out = []
    for mdeg in range(dom + 1):
        acc = ring.zero
        for j, pj in enumerate(pi):
            if 0 <= mdeg - j < len(series):
                acc = acc + pj * series[mdeg - j]
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# JSON recipes
# ---------------------------------------------------------------------------


def build_module(recipe, ring=None):
    """Build a LoopModule from a JSON recipe {"ring": ..., "build": ...}."""
    from .exactnum import ring_from_json

    if ring is None:
        ring = ring_from_json(recipe["ring"])
        node = recipe["build"]
    else:
        node = recipe
    if "eval_weyl" in node:
        spec = node["eval_weyl"]
        return eval_weyl_module(ring, int(spec["lambda"]), ring.parse(spec["a"]))
    if "irreducible" in node:
        spec = node["irreducible"]
        return irreducible_module(ring, int(spec["lambda"]), ring.parse(spec["a"]))
    if "tensor" in node:
        return tensor(*[build_module(sub, ring) for sub in node["tensor"]])
    if "dual" in node:
        return dual(build_module(node["dual"], ring))
    if "frobenius_twist" in node:
        spec = node["frobenius_twist"]
        return frobenius_twist(build_module(spec["of"], ring), int(spec["m"]))
    if "psi_twist" in node:
        spec = node["psi_twist"]
        return psi_twist(build_module(spec["of"], ring), ring.parse(spec["a"]))
    if "weyl0" in node:
        spec = node["weyl0"]
        if "roots" in spec:
            roots = [ring.parse(s) for s in spec["roots"]]
            return weyl0_from_roots(ring, roots, margin=int(spec.get("margin", 6)))
        coeffs = [ring.parse(s) for s in spec["omega"]]
        return weyl0_module(ring, coeffs, margin=int(spec.get("margin", 6)))
    if "from_lattice" in node:
        from . import lattice as _lattice

        spec = node["from_lattice"]
        p = int(spec["p"])
        ambient = build_module(spec["ambient"], QQ)
        basis = _lattice.lattice_closure(ambient, ambient.hw_vector(), p)
        return _lattice.reduce_mod_p(basis)
    raise ValueError("unknown recipe node %r" % sorted(node))
