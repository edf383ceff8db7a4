"""Factorization of multivariate rational polynomials into irreducibles.

Pipeline: rational content and monomial content come out first, the input is
compressed onto its active variables, and the residue is factored either
directly (univariate) or through a Kronecker substitution that maps it to a
single-variable integer polynomial.  Univariate integer factorization is
classic Zassenhaus: squarefree part via a primitive PRS gcd, distinct-degree
and equal-degree splitting modulo a small odd prime, quadratic Hensel lifting
to a power of p beyond the Mignotte bound, then subset recombination with
exact trial division.

Irreducibility here means irreducibility over the rationals.  Real
irreducibles of degree 2 such as x^2 - 2 would split further over R; every
construction in this package only relies on polynomials whose rational and
real factorizations agree.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import InvalidArgumentError, ResourceLimitError
from .poly import Poly, VarSpace

__all__ = ["Factorization", "normalize", "factorize", "is_irreducible", "DEFAULT_DEGREE_BOUND"]

DEFAULT_DEGREE_BOUND = 12

_SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67)


# ---------------------------------------------------------------------------
# Dense univariate helpers.  Polynomials are lists of ints, low degree first,
# normalized so the last entry is nonzero ([] is the zero polynomial).


def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _deg(a: list) -> int:
    return len(a) - 1


def _zz_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return _trim(out)


def _zz_content(a: list) -> int:
    c = 0
    for x in a:
        c = gcd(c, x)
    return c


def _zz_primitive(a: list) -> list:
    c = _zz_content(a)
    if c in (0, 1):
        return list(a)
    return [x // c for x in a]


def _zz_diff(a: list) -> list:
    return _trim([i * a[i] for i in range(1, len(a))])


def _zz_pseudo_rem(a: list, b: list) -> list:
    """lc(b)^(deg a - deg b + 1) * a reduced modulo b, all over the integers."""
    r = list(a)
    lb = b[-1]
    db = _deg(b)
    while _deg(r) >= db and r:
        lead = r[-1]
        shift = _deg(r) - db
        r = [c * lb for c in r]
        for i, cb in enumerate(b):
            r[shift + i] -= lead * cb
        _trim(r)
    return r


def _zz_gcd(a: list, b: list) -> list:
    """Primitive-PRS gcd; result primitive with positive leading coefficient."""
    a, b = _zz_primitive(_trim(list(a))), _zz_primitive(_trim(list(b)))
    if not a:
        g = b
    elif not b:
        g = a
    else:
        if _deg(a) < _deg(b):
            a, b = b, a
        while b:
            r = _zz_primitive(_zz_pseudo_rem(a, b))
            a, b = b, r
        g = a
    g = _zz_primitive(g)
    if g and g[-1] < 0:
        g = [-c for c in g]
    return g


def _zz_div_exact(a: list, b: list) -> list | None:
    """Quotient a/b over Z when it exists, else None.

    For primitive operands divisibility over Q forces an integer quotient, so
    a non-integer step or runaway coefficient growth rejects immediately.
    """
    r = _trim(list(a))
    db = _deg(b)
    if not r:
        return []
    if _deg(r) < db:
        return None
    lb = b[-1]
    q = [0] * (len(r) - len(b) + 1)
    # a true quotient never exceeds the factor coefficient bound; anything
    # growing far past the dividend is a failing division
    limit = max(abs(c) for c in r).bit_length() + len(r) + 16
    while r and _deg(r) >= db:
        c, rem = divmod(r[-1], lb)
        if rem or c.bit_length() > limit:
            return None
        shift = _deg(r) - db
        q[shift] = c
        for i, cb in enumerate(b):
            r[shift + i] -= c * cb
        _trim(r)
    return None if r else q


# ---------------------------------------------------------------------------
# Arithmetic modulo an integer (a small prime, or a prime power for the
# lifting stage), with packed-integer multiplication: coefficients are packed
# into one big integer so CPython's fast multiply performs the convolution.


def _packed_mul(a: list, b: list, mod: int) -> list:
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if len(a) * len(b) <= 64:
        out = [0] * n
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return _trim([c % mod for c in out])
    # byte-aligned digit width with room for the carry-free convolution sum
    width = 2 * (mod - 1).bit_length() + min(len(a), len(b)).bit_length() + 1
    nbytes = (width + 7) // 8
    pa = int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in a), "little")
    pb = int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in b), "little")
    raw = (pa * pb).to_bytes((len(a) + len(b)) * nbytes, "little")
    out = [
        int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") % mod
        for i in range(n)
    ]
    return _trim(out)


class _ModCtx:
    """Fast reduction modulo a fixed monic polynomial over Z/mZ.

    Uses the reversal trick: the quotient of u by f is read off from a
    product with the power-series inverse of the reversed divisor, extended
    by Newton iteration on demand.
    """

    __slots__ = ("f", "m", "n", "rf", "inv", "prec")

    def __init__(self, f: list, m: int):
        self.f = f
        self.m = m
        self.n = _deg(f)
        self.rf = list(reversed(f))  # constant term 1 since f is monic
        self.inv = [1]
        self.prec = 1

    def _ensure(self, k: int) -> None:
        while self.prec < k:
            k2 = 2 * self.prec
            t = _packed_mul(self.rf[:k2], self.inv, self.m)[:k2]
            corr = [(-c) % self.m for c in t]
            if corr:
                corr[0] = (2 - t[0]) % self.m
            else:
                corr = [2 % self.m]
            self.inv = _packed_mul(self.inv, corr, self.m)[:k2]
            self.prec = k2

    def divrem(self, u: list) -> tuple:
        du = _deg(u)
        if du < self.n:
            return [], list(u)
        k = du - self.n + 1
        self._ensure(k)
        ru = list(reversed(u))[:k]
        qrev = _packed_mul(ru, self.inv[:k], self.m)[:k]
        qrev = qrev + [0] * (k - len(qrev))
        q = list(reversed(qrev))
        qf = _packed_mul(q, self.f, self.m)
        r = [
            (u[i] - (qf[i] if i < len(qf) else 0)) % self.m
            for i in range(min(self.n, len(u)))
        ]
        return _trim(q), _trim(r)

    def rem(self, u: list) -> list:
        return self.divrem(u)[1]

    def mulrem(self, a: list, b: list) -> list:
        return self.rem(_packed_mul(a, b, self.m))

    def powmod(self, a: list, e: int) -> list:
        result = [1]
        base = self.rem(a)
        while e:
            if e & 1:
                result = self.mulrem(result, base)
            base = self.mulrem(base, base)
            e >>= 1
        return result


def _zp_norm(a: list, p: int) -> list:
    return _trim([c % p for c in a])


def _zp_mul(a: list, b: list, p: int) -> list:
    return _packed_mul(a, b, p)


def _zp_divmod(a: list, b: list, p: int) -> tuple:
    inv = pow(b[-1], -1, p)
    r = list(a)
    db = _deg(b)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while r and _deg(r) >= db:
        c = (r[-1] * inv) % p
        shift = _deg(r) - db
        q[shift] = c
        for i, cb in enumerate(b):
            r[shift + i] = (r[shift + i] - c * cb) % p
        _trim(r)
    return _trim(q), r


def _zp_rem(a: list, b: list, p: int) -> list:
    return _zp_divmod(a, b, p)[1]


def _zp_monic(a: list, p: int) -> list:
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [(c * inv) % p for c in a]


def _zp_gcd(a: list, b: list, p: int) -> list:
    a, b = _zp_norm(a, p), _zp_norm(b, p)
    while b:
        a, b = b, _zp_rem(a, b, p)
    return _zp_monic(a, p)


def _zp_sub(a: list, b: list, p: int) -> list:
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        ca = a[i] if i < len(a) else 0
        cb = b[i] if i < len(b) else 0
        out[i] = (ca - cb) % p
    return _trim(out)


# ---------------------------------------------------------------------------
# Factorization modulo p of a monic squarefree polynomial.

_DDD_BLOCK = 6


def _distinct_degree(f: list, p: int) -> list:
    """Split monic squarefree f mod p into (degree, product-of-factors) parts.

    Frobenius powers accumulate over blocks so one gcd covers several degrees;
    a block with a nontrivial gcd is refined degree by degree.
    """
    out = []
    v = list(f)
    ctx = _ModCtx(v, p)
    h = ctx.rem([0, 1])
    d = 0
    while _deg(v) > 0:
        if 2 * (d + 1) > _deg(v):
            out.append((_deg(v), v))
            break
        dmax = min(d + _DDD_BLOCK, _deg(v) // 2)
        block = []
        prod = [1]
        for dd in range(d + 1, dmax + 1):
            h = ctx.powmod(h, p)
            block.append((dd, h))
            prod = ctx.mulrem(prod, _zp_sub(h, [0, 1], p) or [0])
        g = _zp_gcd(prod, v, p)
        if _deg(g) > 0:
            removed = [1]
            for dd, hh in block:
                gd = _zp_gcd(_zp_sub(hh, [0, 1], p), g, p)
                if _deg(gd) > 0:
                    out.append((dd, gd))
                    g = _zp_divmod(g, gd, p)[0]
                    removed = _zp_mul(removed, gd, p)
            if _deg(removed) > 0:
                v = _zp_divmod(v, removed, p)[0]
                if _deg(v) == 0:
                    break
                ctx = _ModCtx(v, p)
                h = ctx.rem(h)
        d = dmax
    return out


def _equal_degree(f: list, d: int, p: int, rng: random.Random) -> list:
    """Cantor-Zassenhaus split of a product of degree-d irreducibles mod p."""
    n = _deg(f)
    if n == d:
        return [f]
    exp = (p**d - 1) // 2
    ctx = _ModCtx(f, p)
    while True:
        r = [rng.randrange(p) for _ in range(n)]
        r = _trim(r)
        if _deg(r) < 1:
            continue
        b = ctx.powmod(r, exp)
        g = _zp_gcd(_zp_sub(b, [1], p), f, p)
        if 0 < _deg(g) < n:
            rest = _zp_divmod(f, g, p)[0]
            return _equal_degree(g, d, p, rng) + _equal_degree(rest, d, p, rng)


def _factor_mod_p(f: list, p: int, pieces: list = None) -> list:
    rng = random.Random(0x5EED ^ (p * 7919) ^ _deg(f))
    out = []
    for d, part in pieces if pieces is not None else _distinct_degree(f, p):
        out.extend(_equal_degree(part, d, p, rng))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# Quadratic Hensel lifting (two factors plus Bezout data, then a binary tree).


def _mod_poly(a: list, m: int) -> list:
    return _trim([c % m for c in a])


def _m_mul(a, b, m):
    return _packed_mul(a, b, m)


def _m_add(a, b, m):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % m for i in range(n)])


def _m_sub(a, b, m):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % m for i in range(n)])


def _m_divmod_monic(a, b, m):
    if _deg(b) >= 32 and _deg(a) - _deg(b) >= 16:
        return _ModCtx(b, m).divrem(_trim([c % m for c in a]))
    r = list(a)
    db = _deg(b)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while r and _deg(r) >= db:
        c = r[-1] % m
        shift = _deg(r) - db
        q[shift] = c
        for i, cb in enumerate(b):
            r[shift + i] = (r[shift + i] - c * cb) % m
        _trim(r)
    return _trim(q), _trim(r)


def _bezout_mod_p(g: list, h: list, p: int) -> tuple:
    """s, t with s*g + t*h = 1 mod p, deg s < deg h, deg t < deg g."""
    r0, r1 = _zp_norm(g, p), _zp_norm(h, p)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _zp_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _zp_sub(s0, _zp_mul(q, s1, p), p)
        t0, t1 = t1, _zp_sub(t0, _zp_mul(q, t1, p), p)
    inv = pow(r0[0], -1, p)
    s = [(c * inv) % p for c in s0]
    t = [(c * inv) % p for c in t0]
    s = _zp_rem(s, h, p)
    num = _zp_sub([1], _zp_mul(s, g, p), p)
    t = _zp_divmod(num, h, p)[0]
    return s, t


def _hensel_step(m, f, g, h, s, t):
    """Lift f = g*h (mod m), s*g + t*h = 1 (mod m), h monic, to modulus m^2."""
    mm = m * m
    e = _m_sub(_mod_poly(f, mm), _m_mul(g, h, mm), mm)
    q, r = _m_divmod_monic(_m_mul(s, e, mm), h, mm)
    g1 = _m_add(g, _m_add(_m_mul(t, e, mm), _m_mul(q, g, mm), mm), mm)
    h1 = _m_add(h, r, mm)
    b = _m_sub(_m_add(_m_mul(s, g1, mm), _m_mul(t, h1, mm), mm), [1], mm)
    c, d = _m_divmod_monic(_m_mul(s, b, mm), h1, mm)
    s1 = _m_sub(s, d, mm)
    t1 = _m_sub(t, _m_add(_m_mul(t, b, mm), _m_mul(c, g1, mm), mm), mm)
    return g1, h1, s1, t1


def _hensel_lift_list(f: list, factors: list, p: int, target: int) -> list:
    """Lift monic pairwise-coprime factors with f = lc(f) f_1 ... f_r (mod p)
    to the same congruence mod ``target`` = p^(2^j); the leading coefficient
    rides along in the left half of each split."""
    if len(factors) == 1:
        inv = pow(f[-1] % target, -1, target)
        return [_mod_poly([c * inv for c in f], target)]
    mid = len(factors) // 2
    g = [f[-1] % p]
    for u in factors[:mid]:
        g = _zp_mul(g, u, p)
    h = [1]
    for u in factors[mid:]:
        h = _zp_mul(h, u, p)
    s, t = _bezout_mod_p(g, h, p)
    m = p
    while m < target:
        g, h, s, t = _hensel_step(m, f, g, h, s, t)
        m = m * m
    g, h = _mod_poly(g, target), _mod_poly(h, target)
    return _hensel_lift_list(g, factors[:mid], p, target) + _hensel_lift_list(
        h, factors[mid:], p, target
    )


def _sym(a: list, m: int) -> list:
    half = m // 2
    return _trim([c - m if c > half else c for c in a])


# ---------------------------------------------------------------------------
# Zassenhaus for a monic squarefree integer polynomial.


def _pick_prime(f: list) -> tuple:
    """Choose a prime with squarefree reduction and few modular factors.

    Candidates are compared by factor count alone, which the distinct-degree
    pieces give without running the equal-degree splitting.
    """
    found = []
    for p in _SMALL_PRIMES:
        fp = _zp_norm(f, p)
        if _deg(fp) != _deg(f):
            continue
        if _deg(_zp_gcd(fp, _zp_norm(_zz_diff(f), p), p)) != 0:
            continue
        pieces = _distinct_degree(_zp_monic(fp, p), p)
        count = sum(_deg(part) // d for d, part in pieces)
        found.append((count, p, pieces))
        if count <= 9 or len(found) >= 2:
            break
    if not found:
        raise ResourceLimitError("no suitable small prime for modular factorization")
    found.sort(key=lambda item: item[0])
    count, p, pieces = found[0]
    fp = _zp_monic(_zp_norm(f, p), p)
    return p, _factor_mod_p(fp, p, pieces)


def _primitive_pos(a: list) -> list:
    a = _zz_primitive(a)
    if a and a[-1] < 0:
        a = [-c for c in a]
    return a


def _factor_squarefree_zz(f: list) -> list:
    """Zassenhaus for a primitive squarefree integer polynomial, lc > 0."""
    n = _deg(f)
    if n == 1:
        return [list(f)]
    p, modular = _pick_prime(f)
    if len(modular) == 1:
        return [list(f)]
    lc = f[-1]
    # factor-coefficient bound times (n + 2) so candidate values at 0 and 1
    # also stay inside the symmetric range of the lifted modulus
    bound = (1 << n) * (isqrt(sum(c * c for c in f)) + 1) * lc * (n + 2)
    target = p
    while target < 2 * bound + 1:
        target = target * target
    lifted = _hensel_lift_list(_mod_poly(f, target), modular, p, target)
    result = []
    remaining = list(lifted)
    fcur = list(f)
    half = target // 2

    def _scalar_ok(value_mod, reference):
        # symmetric representative of the candidate's value at a point must
        # divide the corresponding value of lc * fcur; kills most subsets
        # before any polynomial product is formed
        v = value_mod - target if value_mod > half else value_mod
        if v == 0:
            return reference == 0
        return reference % v == 0

    size = 1
    while 2 * size <= len(remaining):
        found = False
        at0 = [w[0] % target for w in remaining]
        at1 = [sum(w) % target for w in remaining]
        lc_cur = fcur[-1]
        f_at0 = fcur[0] * lc_cur
        f_at1 = sum(fcur) * lc_cur
        for combo in itertools.combinations(range(len(remaining)), size):
            c0 = lc_cur % target
            c1 = c0
            for i in combo:
                c0 = (c0 * at0[i]) % target
                c1 = (c1 * at1[i]) % target
            if not _scalar_ok(c0, f_at0) or not _scalar_ok(c1, f_at1):
                continue
            prod = [lc_cur % target]
            for i in combo:
                prod = _m_mul(prod, remaining[i], target)
            cand = _primitive_pos(_sym(prod, target))
            q = _zz_div_exact(fcur, cand)
            if q is not None:
                result.append(cand)
                fcur = q
                remaining = [u for i, u in enumerate(remaining) if i not in combo]
                found = True
                break
        if not found:
            size += 1
    if _deg(fcur) > 0:
        result.append(_primitive_pos(fcur))
    return result


def _factor_univariate_int(f: list) -> list:
    """Irreducible factors with multiplicity of a primitive integer polynomial.

    Returns a list of (primitive positive-lc factor, multiplicity); the input
    sign is the caller's business.
    """
    f = _primitive_pos(_trim(list(f)))
    out = []
    k = 0
    while f and f[0] == 0:
        f = f[1:]
        k += 1
    if k:
        out.append(([0, 1], k))
    if _deg(f) < 1:
        return out
    if _deg(f) == 1:
        out.append((f, 1))
        return out
    # a squarefree reduction modulo any good prime certifies squarefreeness
    # over Z, skipping the expensive integer PRS gcd in the common case
    w = None
    df = _zz_diff(f)
    for p in _SMALL_PRIMES[:4]:
        fp = _zp_norm(f, p)
        if _deg(fp) != _deg(f):
            continue
        if _deg(_zp_gcd(fp, _zp_norm(df, p), p)) == 0:
            w = list(f)
            break
    if w is None:
        sqf = _zz_gcd(f, df)
        w = _primitive_pos(_zz_div_exact(f, sqf))
    for g in sorted(_factor_squarefree_zz(w)):
        mult = 0
        while True:
            q = _zz_div_exact(f, g)
            if q is None:
                break
            f = q
            mult += 1
        out.append((g, mult))
    return out


# ---------------------------------------------------------------------------
# Multivariate layer: Kronecker substitution and exact division.


def poly_divide_exact(f: Poly, g: Poly) -> Poly | None:
    """Quotient f/g when the division is exact, else None."""
    if g.is_zero():
        raise InvalidArgumentError("division by the zero polynomial")
    if f.is_zero():
        return f
    glm = g.leading_monomial()
    glc = g.terms[glm]
    q: dict = {}
    r = f
    while not r.is_zero():
        rlm = r.leading_monomial()
        diff = tuple(a - b for a, b in zip(rlm, glm))
        if any(d < 0 for d in diff):
            return None
        c = r.terms[rlm] / glc
        q[diff] = q.get(diff, Fraction(0)) + c
        r = r - Poly.monomial(f.space, diff, c) * g
    return Poly(f.space, q)


@dataclass(frozen=True)
class Factorization:
    """unit * product(factor^multiplicity), factors normalized irreducible."""

    unit: Fraction
    factors: tuple  # ((Poly, int), ...) in canonical order
    space: VarSpace

    def expand(self) -> Poly:
        out = Poly.const(self.space, self.unit)
        for g, m in self.factors:
            out = out * g**m
        return out

    def factor_multiset(self) -> tuple:
        flat = []
        for g, m in self.factors:
            flat.extend([g] * m)
        return tuple(flat)


def normalize(f: Poly):
    """Split f into (leading graded-lex coefficient, normalized polynomial).

    The zero polynomial maps to (1, 0) by convention.
    """
    if f.is_zero():
        return Fraction(1), f
    c = f.leading_coeff()
    return c, f * (Fraction(1) / c)


_factor_cache: dict = {}


def _embed_univariate(coeffs: list, space: VarSpace, var: int) -> Poly:
    terms = {}
    for k, c in enumerate(coeffs):
        if c:
            e = [0] * space.nvars
            e[var] = k
            terms[tuple(e)] = Fraction(c)
    return Poly(space, terms)


def _kronecker_strides(degs: list) -> list:
    strides = []
    acc = 1
    for d in degs:
        strides.append(acc)
        acc *= d + 1
    return strides


def _kronecker_image(f: Poly, active: list, strides: list) -> list:
    n = 1 + max(
        sum(e[v] * s for v, s in zip(active, strides)) for e in f.terms
    )
    out = [0] * n
    for e, c in f.terms.items():
        out[sum(e[v] * s for v, s in zip(active, strides))] = int(c)
    return _trim(out)


def _kronecker_preimage(coeffs: list, space: VarSpace, active: list, degs: list) -> Poly:
    terms = {}
    for k, c in enumerate(coeffs):
        if not c:
            continue
        e = [0] * space.nvars
        rem = k
        for v, d in zip(active, degs):
            e[v] = rem % (d + 1)
            rem //= d + 1
        terms[tuple(e)] = Fraction(c)
    return Poly(space, terms)


def _primitive_sign(f: Poly) -> Poly:
    """Integer-primitive representative with positive leading coefficient."""
    nums = [c.numerator for c in f.terms.values()]
    dens = [c.denominator for c in f.terms.values()]
    g = 0
    for x in nums:
        g = gcd(g, x)
    l = 1
    for x in dens:
        l = l * x // gcd(l, x)
    scaled = f * Fraction(l, g)
    if scaled.leading_coeff() < 0:
        scaled = -scaled
    return scaled


def _multiset_candidates(counts: list, degrees: list):
    """Sub-multisets ordered by total degree, then lexicographically."""
    ranges = [range(c + 1) for c in counts]
    options = []
    for take in itertools.product(*ranges):
        total = sum(t * d for t, d in zip(take, degrees))
        if total == 0:
            continue
        options.append((total, take))
    options.sort()
    return [take for _, take in options]


def _factor_int_poly(f: Poly) -> list:
    """Factor a primitive integer Poly; returns [(primitive factor Poly, mult)]."""
    space = f.space
    active = list(f.variables_used())
    if len(active) == 1:
        parts = _factor_univariate_int(
            [int(c) for c in _univariate_coeffs(f, active[0])]
        )
        return [(_embed_univariate(g, space, active[0]), m) for g, m in parts]

    degs = [f.degree_in(v) for v in active]
    strides = _kronecker_strides(degs)
    image = _kronecker_image(f, active, strides)
    uni = _factor_univariate_int(image)
    factor_polys = [g for g, _ in uni]
    counts = [m for _, m in uni]
    degrees = [_deg(g) for g in factor_polys]

    result = []
    fcur = f
    while True:
        total_deg_left = sum(c * d for c, d in zip(counts, degrees))
        if total_deg_left == 0:
            break
        accepted = False
        for take in _multiset_candidates(counts, degrees):
            if 2 * sum(t * d for t, d in zip(take, degrees)) > total_deg_left:
                break
            prod = [1]
            for g, t in zip(factor_polys, take):
                for _ in range(t):
                    prod = _zz_mul(prod, g)
            cand = _primitive_sign(_kronecker_preimage(prod, space, active, degs))
            if cand.is_constant():
                continue
            q = poly_divide_exact(fcur, cand)
            if q is None:
                continue
            mult = 1
            while True:
                q2 = poly_divide_exact(q, cand)
                if q2 is None:
                    break
                q = q2
                mult += 1
            result.append((cand, mult))
            fcur = q
            counts = [c - mult * t for c, t in zip(counts, take)]
            accepted = True
            break
        if not accepted:
            leftover = _primitive_sign(fcur)
            result.append((leftover, 1))
            break
    return result


def _univariate_coeffs(f: Poly, var: int) -> list:
    d = f.degree_in(var)
    out = [Fraction(0)] * (d + 1)
    for e, c in f.terms.items():
        out[e[var]] = c
    return out


def factorize(f: Poly, degree_bound: int = DEFAULT_DEGREE_BOUND) -> Factorization:
    """Complete factorization over Q with deterministic canonical ordering."""
    if f.is_zero():
        raise InvalidArgumentError("cannot factor the zero polynomial")
    if f.total_degree() > degree_bound:
        raise ResourceLimitError(
            f"total degree {f.total_degree()} exceeds the configured bound {degree_bound}"
        )
    cached = _factor_cache.get(f)
    if cached is not None:
        return cached

    space = f.space
    if f.is_constant():
        result = Factorization(f.constant_value(), (), space)
        _factor_cache[f] = result
        return result

    work = _primitive_sign(f)
    pieces: list = []

    # monomial content: each variable with a uniformly positive exponent
    mins = [min(e[i] for e in work.terms) for i in range(space.nvars)]
    if any(mins):
        shifted = {
            tuple(a - b for a, b in zip(e, mins)): c for e, c in work.terms.items()
        }
        work = Poly(space, shifted)
        for i, m in enumerate(mins):
            if m:
                pieces.append((Poly.variable(space, i), m))

    if not work.is_constant():
        pieces.extend(_factor_int_poly(work))

    unit = Fraction(1)
    normalized = []
    for g, m in pieces:
        c, gn = normalize(g)
        unit *= c**m
        normalized.append((gn, m))
    normalized.sort(key=lambda item: (item[0].sort_key(), item[1]))
    # the residual constant: f / (unit * prod) must be a rational unit
    total = Poly.const(space, unit)
    for g, m in normalized:
        total = total * g**m
    ratio = _constant_ratio(f, total)
    unit *= ratio
    result = Factorization(unit, tuple(normalized), space)
    _factor_cache[f] = result
    return result


def _constant_ratio(f: Poly, g: Poly) -> Fraction:
    lm = f.leading_monomial()
    cg = g.terms.get(lm)
    if not cg:
        raise InvalidArgumentError("internal factorization mismatch")
    ratio = f.terms[lm] / cg
    if not (g * ratio == f):
        raise InvalidArgumentError("internal factorization mismatch")
    return ratio


def is_irreducible(f: Poly, degree_bound: int = DEFAULT_DEGREE_BOUND) -> bool:
    """True when f is a unit times a single irreducible over Q."""
    if f.is_zero() or f.is_constant():
        raise InvalidArgumentError("irreducibility is decided for non-constant polynomials")
    fac = factorize(f, degree_bound)
    return len(fac.factors) == 1 and fac.factors[0][1] == 1
