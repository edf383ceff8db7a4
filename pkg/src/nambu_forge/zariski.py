"""Zariski quantization: the semigroup algebra over irreducible-factor
multisets, its Abelian nu-deformation, Leibniz-postulated derivations with
their Frobenius failure, and the Taylor algebra that repairs it.

The basis element Z_u of the classical algebra is a multiset of normalized
irreducible polynomials (the factorization of u); the empty multiset is the
unit.  The deformed product of two basis elements evaluates a symmetrized
star product over the combined factor multiset and re-factors every nu
coefficient of the result back into the algebra.  By construction the
deformed product discards positive nu powers of its operands: it is
R-linear, not linear over series in nu.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InvalidArgumentError
from .factor import factorize, is_irreducible, normalize
from .poly import NuObject, Poly, VarSpace, coordinate_space, grlex_key
from .star import StarProduct, moyal_product, partial_moyal_product, star_mul

__all__ = [
    "ZMonomial",
    "ZElem",
    "ZNu",
    "TaylorElem",
    "zariski_space",
    "zariski_star",
    "zmonomial",
    "zelem_from_poly",
    "alpha",
    "eval_T",
    "times_alpha",
    "zeta",
    "z_mul_classical",
    "z_mul_nu",
    "znu_mul_classical",
    "znu_power_nu",
    "delta",
    "FrobeniusWitness",
    "frobenius_counterexample_search",
    "jmap",
    "taylor_unit",
    "taylor_mul_classical",
    "a_mul_nu",
    "delta_y",
    "quantum_nambu",
    "classical_nambu",
]


def zariski_space(n: int = 3) -> VarSpace:
    """R^n with the pairing used by the evaluation map: all of it for even n,
    the first n-1 coordinates for odd n."""
    if n < 2:
        raise InvalidArgumentError("the construction needs at least two variables")
    return coordinate_space(n, paired=n // 2)


def zariski_star(n: int = 3) -> StarProduct:
    space = zariski_space(n)
    if n % 2 == 0:
        return moyal_product(space)
    return partial_moyal_product(space)


# ---------------------------------------------------------------------------
# The semigroup algebra


class ZMonomial:
    """Canonical multiset of normalized irreducible factors."""

    __slots__ = ("factors", "_hash")

    def __init__(self, factors: Iterable[Poly], trusted: bool = False):
        factors = sorted(factors, key=lambda f: f.sort_key(), reverse=True)
        if not trusted:
            for f in factors:
                if f.is_zero() or f.is_constant():
                    raise InvalidArgumentError("factors must be non-constant polynomials")
                if f.leading_coeff() != 1:
                    raise InvalidArgumentError(f"factor {f} is not normalized")
                if not is_irreducible(f):
                    raise InvalidArgumentError(f"factor {f} is not irreducible")
        object.__setattr__(self, "factors", tuple(factors))
        object.__setattr__(self, "_hash", hash(tuple(factors)))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("ZMonomial is immutable")

    def __len__(self):
        return len(self.factors)

    def __eq__(self, other):
        return isinstance(other, ZMonomial) and self.factors == other.factors

    def __hash__(self):
        return object.__getattribute__(self, "_hash")

    def degree(self) -> int:
        return sum(f.total_degree() for f in self.factors)

    def product_poly(self, space: VarSpace) -> Poly:
        out = Poly.const(space, 1)
        for f in self.factors:
            out = out * f
        return out

    def union(self, other: "ZMonomial") -> "ZMonomial":
        return ZMonomial(self.factors + other.factors, trusted=True)

    def sort_key(self):
        return (self.degree(), tuple(f.sort_key() for f in self.factors))

    def __repr__(self):
        inner = "; ".join(str(f) for f in self.factors)
        return f"Z[{inner}]"


def zmonomial(factors: Iterable[Poly]) -> ZMonomial:
    """Validated construction from explicit factors."""
    return ZMonomial(factors)


_Z_UNIT = ZMonomial((), trusted=True)


class ZElem:
    """Finite rational combination of factor multisets."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[ZMonomial, Fraction]):
        clean = {}
        for m, c in terms.items():
            c = Fraction(c)
            if c:
                clean[m] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("ZElem is immutable")

    @classmethod
    def zero(cls) -> "ZElem":
        return cls({})

    @classmethod
    def unit(cls, c: Fraction = Fraction(1)) -> "ZElem":
        return cls({_Z_UNIT: Fraction(c)})

    @classmethod
    def basis(cls, m: ZMonomial, c: Fraction = Fraction(1)) -> "ZElem":
        return cls({m: Fraction(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, ZElem):
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return ZElem(out)

    def __neg__(self):
        return ZElem({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ZElem):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "ZElem":
        c = Fraction(c)
        if not c:
            return ZElem.zero()
        return ZElem({m: v * c for m, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, ZElem) and self.terms == other.terms

    def __repr__(self):
        return f"ZElem({render_zelem(self)})"

    def __str__(self):
        return render_zelem(self)


def zelem_from_poly(u: Poly) -> ZElem:
    """The image Z_u, using Z_{cu} = c Z_u and a full factorization of u."""
    if u.is_zero():
        return ZElem.zero()
    if u.is_constant():
        return ZElem.unit(u.constant_value())
    fac = factorize(u)
    mono = ZMonomial(fac.factor_multiset(), trusted=True)
    return ZElem.basis(mono, fac.unit)


class ZNu:
    """Polynomial in nu with ZElem coefficients (non-negative powers)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, ZElem]):
        clean = {}
        for k, z in coeffs.items():
            if k < 0:
                raise InvalidArgumentError("ZNu supports non-negative nu powers only")
            if not z.is_zero():
                clean[int(k)] = z
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("ZNu is immutable")

    @classmethod
    def zero(cls) -> "ZNu":
        return cls({})

    @classmethod
    def from_zelem(cls, z: ZElem) -> "ZNu":
        return cls({0: z})

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int) -> ZElem:
        return self.coeffs.get(k, ZElem.zero())

    def classical(self) -> ZElem:
        return self.coefficient(0)

    def nu_shift(self, k: int) -> "ZNu":
        return ZNu({r + k: z for r, z in self.coeffs.items()})

    def __add__(self, other):
        if isinstance(other, ZElem):
            other = ZNu.from_zelem(other)
        if not isinstance(other, ZNu):
            return NotImplemented
        out = dict(self.coeffs)
        for k, z in other.coeffs.items():
            s = out.get(k, ZElem.zero()) + z
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return ZNu(out)

    def __neg__(self):
        return ZNu({k: -z for k, z in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, ZElem):
            other = ZNu.from_zelem(other)
        if not isinstance(other, ZNu):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "ZNu":
        return ZNu({k: z.scale(c) for k, z in self.coeffs.items()})

    def __eq__(self, other):
        if isinstance(other, ZElem):
            other = ZNu.from_zelem(other)
        return isinstance(other, ZNu) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"ZNu({render_znu(self)})"

    def __str__(self):
        return render_znu(self)


def _as_znu(x) -> ZNu:
    if isinstance(x, ZNu):
        return x
    if isinstance(x, ZElem):
        return ZNu.from_zelem(x)
    raise InvalidArgumentError(f"expected a Zariski element, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# alpha, the evaluation map, and the deformed product


def alpha(p, space: VarSpace = None):
    """Factor multiset of the classical part of a normalized nu-polynomial.

    Returns a tuple of irreducible factors, or None when the classical part
    vanishes (the zero tensor).
    """
    if isinstance(p, Poly):
        p = NuObject.from_poly(p)
    if not isinstance(p, NuObject):
        raise InvalidArgumentError("alpha expects a polynomial or nu-polynomial")
    if p.is_zero():
        return None
    low = p.coefficient(p.min_power())
    if low.leading_coeff() != 1:
        raise InvalidArgumentError(
            f"operand is not normalized: lowest nu coefficient has leading coefficient "
            f"{low.leading_coeff()}"
        )
    classical = p.classical()
    if classical.is_zero():
        return None
    fac = factorize(classical)
    if fac.unit != 1:
        raise InvalidArgumentError(
            f"operand is not normalized: classical part has unit {fac.unit}"
        )
    return fac.factor_multiset()


_T_CACHE: dict = {}


def eval_T(factors: Sequence[Poly], s: StarProduct) -> NuObject:
    """Symmetrized star product over all orderings of the factor multiset.

    Computed by the recursion T(S) = sum over distinct u of
    (mult(u)/|S|) T(S - u) * u, which shares every sub-multiset.
    """
    key = (s, tuple(sorted(factors, key=lambda f: f.sort_key())))
    got = _T_CACHE.get(key)
    if got is not None:
        return got
    factors = key[1]
    if not factors:
        out = NuObject.one(s.space)
    else:
        k = len(factors)
        out = NuObject.zero(s.space)
        prev = None
        for i, u in enumerate(factors):
            if u == prev:
                continue
            prev = u
            mult = factors.count(u)
            rest = factors[:i] + factors[i + 1 :]
            out = out + star_mul(s, eval_T(rest, s), u) * Fraction(mult, k)
    _T_CACHE[key] = out
    return out


def times_alpha(p, q, s: StarProduct) -> NuObject:
    """The Abelian product: evaluation of the combined factor multisets."""
    fa = alpha(p)
    fb = alpha(q)
    if fa is None or fb is None:
        return NuObject.zero(s.space)
    return eval_T(tuple(fa) + tuple(fb), s)


def zeta(x: NuObject) -> ZNu:
    """Coefficientwise injection of a nu-polynomial into the algebra."""
    out = {}
    for r, p in x.coeffs.items():
        if r < 0:
            raise InvalidArgumentError("zeta expects non-negative nu powers")
        out[r] = zelem_from_poly(p)
    return ZNu(out)


def z_mul_classical(a: ZElem, b: ZElem) -> ZElem:
    """Z_u . Z_v = Z_{uv}: multiset union, extended bilinearly."""
    out: dict = {}
    for mu, cu in a.terms.items():
        for mv, cv in b.terms.items():
            m = mu.union(mv)
            s = out.get(m, Fraction(0)) + cu * cv
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return ZElem(out)


_ZBASIS_CACHE: dict = {}


def _z_basis_mul_nu(mu: ZMonomial, mv: ZMonomial, s: StarProduct) -> ZNu:
    union = mu.union(mv)
    key = (s, union)
    got = _ZBASIS_CACHE.get(key)
    if got is None:
        t = eval_T(union.factors, s)
        coeffs = {0: ZElem.basis(union)}
        for r, p in t.coeffs.items():
            if r > 0:
                coeffs[r] = zelem_from_poly(p)
        got = ZNu(coeffs)
        _ZBASIS_CACHE[key] = got
    return got


def z_mul_nu(a, b, s: StarProduct) -> ZNu:
    """Deformed product; positive nu powers of the operands are discarded."""
    a0 = _as_znu(a).classical()
    b0 = _as_znu(b).classical()
    out = ZNu.zero()
    for mu, cu in a0.terms.items():
        for mv, cv in b0.terms.items():
            out = out + _z_basis_mul_nu(mu, mv, s).scale(cu * cv)
    return out


def znu_mul_classical(a: ZNu, b: ZNu) -> ZNu:
    """nu-bilinear extension of the classical product."""
    out = ZNu.zero()
    for r, za in a.coeffs.items():
        for t, zb in b.coeffs.items():
            out = out + ZNu({r + t: z_mul_classical(za, zb)})
    return out


def znu_power_nu(a, m: int, s: StarProduct) -> ZNu:
    """m-fold deformed product of a with itself, folded from the left."""
    if m < 1:
        raise InvalidArgumentError("power needs m >= 1")
    out = _as_znu(a)
    for _ in range(m - 1):
        out = z_mul_nu(out, a, s)
    return out


# ---------------------------------------------------------------------------
# Leibniz-postulated derivations and the Frobenius failure


def delta(i: int, a: ZElem) -> ZElem:
    """Derivation fixed by d(Z_u) = Z_{du} on irreducibles plus the Leibniz
    rule across each factor multiset (1-based axis index)."""
    out = ZElem.zero()
    for mono, c in a.terms.items():
        factors = mono.factors
        seen = None
        for j, f in enumerate(factors):
            if f == seen:
                continue
            seen = f
            mult = factors.count(f)
            d = f.diff(i - 1)
            if d.is_zero():
                continue
            rest = ZMonomial(factors[:j] + factors[j + 1 :], trusted=True)
            out = out + z_mul_classical(
                zelem_from_poly(d), ZElem.basis(rest)
            ).scale(c * mult)
    return out


@dataclass(frozen=True)
class FrobeniusWitness:
    u: Poly  # normalized irreducible
    i: int
    j: int
    lhs: ZElem  # delta_i delta_j Z_u
    rhs: ZElem  # delta_j delta_i Z_u

    def verify(self) -> bool:
        zu = ZElem.basis(ZMonomial((self.u,), trusted=True))
        lhs = delta(self.i, delta(self.j, zu))
        rhs = delta(self.j, delta(self.i, zu))
        return lhs == self.lhs and rhs == self.rhs and lhs != rhs


def _candidate_polys(space: VarSpace, degree: int):
    """Deterministic stream of small-coefficient bivariate candidates."""
    monos = []
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            e = [0] * space.nvars
            e[0], e[1] = a, b
            monos.append(tuple(e))
    monos.sort(key=grlex_key, reverse=True)
    coeff_pool = (1, -1, 2, -2, 3, -3)
    for k in (2, 3):
        for combo in itertools.combinations(monos, k):
            if max(sum(e) for e in combo) != degree:
                continue
            for coeffs in itertools.product(coeff_pool, repeat=k):
                if coeffs[0] < 0:
                    continue
                yield Poly(space, dict(zip(combo, map(Fraction, coeffs))))


def frobenius_counterexample_search(max_degree: int, space: VarSpace = None):
    """Find an irreducible u with non-commuting second derivations.

    Scans small-coefficient candidates by increasing degree; inequality of the
    two mixed derivations is established exactly, and irreducibility of the
    candidate is checked last because it is the expensive step.  Returns a
    FrobeniusWitness or None when the bound is too small.
    """
    if space is None:
        space = zariski_space(3)
    if max_degree < 3:
        return None
    seen = set()
    for degree in range(3, max_degree + 1):
        for cand in _candidate_polys(space, degree):
            _, u = normalize(cand)
            if u in seen:
                continue
            seen.add(u)
            zu = ZElem.basis(ZMonomial((u,), trusted=True))
            for i, j in ((1, 2), (1, 3), (2, 3)):
                lhs = delta(i, delta(j, zu))
                rhs = delta(j, delta(i, zu))
                if lhs != rhs:
                    if is_irreducible(u):
                        witness = FrobeniusWitness(u, i, j, lhs, rhs)
                        if witness.verify():
                            return witness
                    break
    return None


# ---------------------------------------------------------------------------
# The Taylor algebra


class TaylorElem:
    """Polynomial in formal translation variables y with ZNu coefficients.

    ``in_a`` marks elements constructed from images of the Taylor expansion
    map (and their sums and products); the deformed product is only defined
    on that subalgebra.
    """

    __slots__ = ("space", "terms", "in_a")

    def __init__(self, space: VarSpace, terms: Mapping[tuple, ZNu], in_a: bool = False):
        clean = {}
        for e, z in terms.items():
            if not z.is_zero():
                clean[tuple(e)] = z
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "in_a", in_a)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("TaylorElem is immutable")

    @classmethod
    def zero(cls, space: VarSpace) -> "TaylorElem":
        return cls(space, {}, in_a=True)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, e: tuple) -> ZNu:
        return self.terms.get(tuple(e), ZNu.zero())

    def y_constant(self) -> ZNu:
        return self.coefficient((0,) * self.space.nvars)

    def __add__(self, other):
        if not isinstance(other, TaylorElem):
            return NotImplemented
        if self.space != other.space:
            raise InvalidArgumentError("TaylorElem spaces differ")
        out = dict(self.terms)
        for e, z in other.terms.items():
            s = out.get(e, ZNu.zero()) + z
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return TaylorElem(self.space, out, in_a=self.in_a and other.in_a)

    def __neg__(self):
        return TaylorElem(self.space, {e: -z for e, z in self.terms.items()}, in_a=self.in_a)

    def __sub__(self, other):
        if not isinstance(other, TaylorElem):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "TaylorElem":
        return TaylorElem(self.space, {e: z.scale(c) for e, z in self.terms.items()}, in_a=self.in_a)

    def nu_shift(self, k: int) -> "TaylorElem":
        return TaylorElem(self.space, {e: z.nu_shift(k) for e, z in self.terms.items()}, in_a=self.in_a)

    def __eq__(self, other):
        return (
            isinstance(other, TaylorElem)
            and self.space == other.space
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"TaylorElem({render_taylor(self)})"

    def __str__(self):
        return render_taylor(self)


def taylor_unit(space: VarSpace = None) -> TaylorElem:
    if space is None:
        space = zariski_space(3)
    return TaylorElem(space, {(0,) * space.nvars: ZNu.from_zelem(ZElem.unit())}, in_a=True)


def jmap(z: ZElem, space: VarSpace = None) -> TaylorElem:
    """Taylor expansion J(Z_u) = sum_I y^I / I! Z_{d^I u}, additive in z."""
    if space is None:
        space = zariski_space(3)
    n = space.nvars
    out: dict = {}

    def accumulate(u: Poly, c: Fraction, e: tuple, fact: int, start: int):
        val = zelem_from_poly(u).scale(Fraction(c, fact))
        if not val.is_zero():
            prev = out.get(e, ZElem.zero())
            s = prev + val
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        for i in range(start, n):
            d = u.diff(i)
            if d.is_zero():
                continue
            e2 = list(e)
            e2[i] += 1
            accumulate(d, c, tuple(e2), fact * e2[i], i)

    for mono, c in z.terms.items():
        u = mono.product_poly(space)
        accumulate(u, c, (0,) * n, 1, 0)
    return TaylorElem(space, {e: ZNu.from_zelem(v) for e, v in out.items()}, in_a=True)


def taylor_mul_classical(a: TaylorElem, b: TaylorElem) -> TaylorElem:
    """The undeformed product: y-graded with nu-bilinear coefficients."""
    if a.space != b.space:
        raise InvalidArgumentError("TaylorElem spaces differ")
    out: dict = {}
    for ea, za in a.terms.items():
        for eb, zb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            prod = znu_mul_classical(za, zb)
            s = out.get(e)
            s = prod if s is None else s + prod
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
    return TaylorElem(a.space, out, in_a=a.in_a and b.in_a)


def a_mul_nu(a: TaylorElem, b: TaylorElem, s: StarProduct) -> TaylorElem:
    """Deformed Abelian product on the Taylor subalgebra, y-graded."""
    if a.space != b.space:
        raise InvalidArgumentError("TaylorElem spaces differ")
    if not (a.in_a and b.in_a):
        raise InvalidArgumentError("the deformed product is defined on the Taylor subalgebra only")
    out: dict = {}
    for ea, za in a.terms.items():
        for eb, zb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            prod = z_mul_nu(za, zb, s)
            if prod.is_zero():
                continue
            cur = out.get(e)
            cur = prod if cur is None else cur + prod
            if cur.is_zero():
                out.pop(e, None)
            else:
                out[e] = cur
    return TaylorElem(a.space, out, in_a=True)


def delta_y(axis: int, a: TaylorElem) -> TaylorElem:
    """Formal derivative with respect to y^axis (1-based)."""
    i = axis - 1
    if not 0 <= i < a.space.nvars:
        raise InvalidArgumentError("axis out of range")
    out = {}
    for e, z in a.terms.items():
        if e[i]:
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = z.scale(e[i])
    return TaylorElem(a.space, out, in_a=a.in_a)


_S3 = tuple(
    (perm, sign)
    for perm, sign in (
        ((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
        ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1),
    )
)


def quantum_nambu(a: TaylorElem, b: TaylorElem, c: TaylorElem, s: StarProduct) -> TaylorElem:
    """Alternating sum of deformed triple products of y-derivatives."""
    args = (a, b, c)
    out = TaylorElem.zero(a.space)
    for perm, sign in _S3:
        d1 = delta_y(perm[0] + 1, args[0])
        d2 = delta_y(perm[1] + 1, args[1])
        d3 = delta_y(perm[2] + 1, args[2])
        term = a_mul_nu(a_mul_nu(d1, d2, s), d3, s)
        out = out + (term if sign > 0 else -term)
    return out


def classical_nambu(a: TaylorElem, b: TaylorElem, c: TaylorElem) -> TaylorElem:
    args = (a, b, c)
    out = TaylorElem.zero(a.space)
    for perm, sign in _S3:
        term = taylor_mul_classical(
            taylor_mul_classical(delta_y(perm[0] + 1, args[0]), delta_y(perm[1] + 1, args[1])),
            delta_y(perm[2] + 1, args[2]),
        )
        out = out + (term if sign > 0 else -term)
    return out


# ---------------------------------------------------------------------------
# Rendering


def _fmt_coeff(c: Fraction, body: str) -> tuple:
    neg = c < 0
    mag = -c if neg else c
    if body and mag == 1:
        return neg, body
    text = str(mag) if not body else f"{mag}*{body}"
    return neg, text


def _join(parts: list) -> str:
    if not parts:
        return "0"
    out = []
    for i, (neg, body) in enumerate(parts):
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def _zmono_text(m: ZMonomial) -> str:
    return "Z[" + "; ".join(str(f) for f in m.factors) + "]"


def render_zelem(z: ZElem) -> str:
    parts = []
    for m in sorted(z.terms, key=lambda m: m.sort_key(), reverse=True):
        parts.append(_fmt_coeff(z.terms[m], _zmono_text(m)))
    return _join(parts)


def render_znu(x: ZNu) -> str:
    parts = []
    for k in sorted(x.coeffs):
        nu = "" if k == 0 else ("nu" if k == 1 else f"nu^{k}")
        z = x.coeffs[k]
        for m in sorted(z.terms, key=lambda m: m.sort_key(), reverse=True):
            body = "*".join(s for s in (nu, _zmono_text(m)) if s)
            parts.append(_fmt_coeff(z.terms[m], body))
    return _join(parts)


def render_taylor(t: TaylorElem) -> str:
    parts = []
    names = tuple(f"y{i + 1}" for i in range(t.space.nvars))
    for e in sorted(t.terms, key=grlex_key):
        ymono = "*".join(
            (n if k == 1 else f"{n}^{k}") for n, k in zip(names, e) if k
        )
        x = t.terms[e]
        for knu in sorted(x.coeffs):
            nu = "" if knu == 0 else ("nu" if knu == 1 else f"nu^{knu}")
            z = x.coeffs[knu]
            for m in sorted(z.terms, key=lambda m: m.sort_key(), reverse=True):
                body = "*".join(s for s in (ymono, nu, _zmono_text(m)) if s)
                parts.append(_fmt_coeff(z.terms[m], body))
    return _join(parts)
