"""Sun products: Abelian quantizations built by symmetrizing a star product
over monomial decompositions, their closed form on su(2)* through Euler and
Bernoulli coefficient tables, the quantized Nambu bracket they induce, and
the equivalence / triviality framework for generalized deformations.

A sun product annihilates nonzero nu powers of its operands, so it factors
through the ordinary product of classical parts: F sun G = lift(FG) where
lift replaces each monomial by the symmetrized star product of its
coordinate factors (or by the q-power / p-power recombination rule for the
Moyal-standard split).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import InvalidArgumentError, ResourceLimitError
from .numbers import secant_coefficient, tangent_coefficient
from .poly import NuObject, Poly, TSeries, VarSpace, jacobian_det, qp_space, su2_space
from .star import StarProduct, moyal_product, star_mul, su2_product
from .zariski import eval_T

__all__ = [
    "SunProduct",
    "USUAL_PRODUCT",
    "sun_su2",
    "sun_moyal_standard",
    "sun_lift",
    "sun_mul",
    "SunCoefficients",
    "sun_coefficients",
    "a_recursion",
    "a_closed_form",
    "big_a",
    "z_coefficient",
    "eta_operator",
    "sun_closed_form",
    "sun_homogeneous_form",
    "quantized_nambu_sun",
    "fi_residual_sun",
    "weak_leibniz_residual",
    "DiffOp",
    "DiffOpSeries",
    "identity_series",
    "weak_trivializer",
    "apply_equivalence",
    "sun_exponential",
    "sun_power",
]

SYMMETRIZATION_BOUND = 7  # largest factor multiset expanded by brute force


@dataclass(frozen=True)
class SunProduct:
    star: StarProduct
    alpha_kind: str  # "coordinate_monomial" | "moyal_standard_split"

    @property
    def space(self) -> VarSpace:
        return self.star.space


class _Usual:
    """Marker for the undeformed product in equivalence checks."""

    def __repr__(self):
        return "usual-product"


USUAL_PRODUCT = _Usual()


def sun_su2() -> SunProduct:
    return SunProduct(su2_product(), "coordinate_monomial")


def sun_moyal_standard() -> SunProduct:
    return SunProduct(moyal_product(qp_space()), "moyal_standard_split")


def _as_nu(x, space: VarSpace) -> NuObject:
    if isinstance(x, NuObject):
        return x
    if isinstance(x, Poly):
        return NuObject.from_poly(x)
    if isinstance(x, (int, Fraction)):
        return NuObject.from_poly(Poly.const(space, x))
    raise InvalidArgumentError(f"cannot interpret {type(x).__name__} as an operand")


def _coordinate_factors(space: VarSpace, e: tuple) -> tuple:
    out = []
    for i, k in enumerate(e):
        out.extend([Poly.variable(space, i)] * k)
    return tuple(out)


def sun_lift(sp: SunProduct, x) -> NuObject:
    """The unary map underlying the product: monomially symmetrized star
    evaluation of the classical part."""
    xo = _as_nu(x, sp.space)
    f = xo.classical()
    out = NuObject.zero(sp.space)
    if sp.alpha_kind == "coordinate_monomial":
        high = {}
        for e, c in f.terms.items():
            if sum(e) > SYMMETRIZATION_BOUND:
                if sp.star.kind != "su2":
                    raise ResourceLimitError(
                        f"monomial degree {sum(e)} exceeds the symmetrization bound "
                        f"{SYMMETRIZATION_BOUND}"
                    )
                high[e] = c
                continue
            out = out + eval_T(_coordinate_factors(sp.space, e), sp.star) * c
        if high:
            # past the brute-force bound the closed form is the product
            out = out + _su2_closed_lift(Poly(sp.space, high))
        return out
    if sp.alpha_kind == "moyal_standard_split":
        q = Poly.variable(sp.space, 0)
        p = Poly.variable(sp.space, 1)
        for e, c in f.terms.items():
            out = out + star_mul(sp.star, q ** e[0], p ** e[1]) * c
        return out
    raise InvalidArgumentError(f"unknown sun-product kind {sp.alpha_kind!r}")


def sun_mul(sp: SunProduct, f, g) -> NuObject:
    """Abelian product: positive nu powers of both operands are discarded."""
    fo = _as_nu(f, sp.space)
    go = _as_nu(g, sp.space)
    return sun_lift(sp, fo.classical() * go.classical())


def sun_power(sp: SunProduct, h: Poly, r: int) -> NuObject:
    """r-fold product of h with itself; one factor means h itself (the unit
    is not neutral here, so folding in an extra 1 would add quantum terms)."""
    if r == 0:
        return NuObject.one(sp.space)
    out = NuObject.from_poly(h)
    for _ in range(r - 1):
        out = sun_mul(sp, out, h)
    return out


def sun_exponential(sp: SunProduct, h: Poly, t_order: int) -> TSeries:
    """Formal exponential with the sun product replacing the star product.

    The r-th coefficient is (1/r!) (1/2 nu)^r times the r-fold sun power;
    powers fold left on classical parts before the Laurent scaling, since the
    product discards nu powers of its operands.
    """
    if t_order < 0:
        raise InvalidArgumentError("t_order must be non-negative")
    coeffs = [NuObject.one(sp.space)]
    power = NuObject.one(sp.space)
    for r in range(1, t_order + 1):
        power = NuObject.from_poly(h) if r == 1 else sun_mul(sp, power, h)
        coeffs.append(power.nu_shift(-r) * Fraction(1, 2**r * factorial(r)))
    return TSeries(t_order, tuple(coeffs))


# ---------------------------------------------------------------------------
# Coefficient tables: recursion and Euler/Bernoulli closed form


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _partitions_exact(k: int, p: int, cap: int = None):
    """Partitions of k into exactly p positive nonincreasing parts."""
    if cap is None:
        cap = k
    if p == 0:
        if k == 0:
            yield ()
        return
    for first in range(min(k - p + 1, cap), 0, -1):
        for rest in _partitions_exact(k - first, p - 1, first):
            yield (first,) + rest


_A_REC: dict = {}


def a_recursion(n: int, r: int) -> Fraction:
    """a(n, r) from a(n,0) = 1 = a(0,r) and
    a(n,r) = ((n-2r) a(n-1,r) + (n-2r+2) a(n-1,r-1)) / n."""
    if r == 0 or n == 0:
        return Fraction(1)
    got = _A_REC.get((n, r))
    if got is None:
        got = (
            Fraction(n - 2 * r) * a_recursion(n - 1, r)
            + Fraction(n - 2 * r + 2) * a_recursion(n - 1, r - 1)
        ) / n
        _A_REC[(n, r)] = got
    return got


def a_closed_form(n: int, r: int) -> Fraction:
    """Sum over compositions of r of two secant and n-2r tangent coefficients;
    defined for n >= 2r."""
    if n < 2 * r:
        raise InvalidArgumentError("closed form requires n >= 2r")
    slots = n - 2 * r + 2
    total = Fraction(0)
    for js in _compositions(r, slots):
        term = secant_coefficient(js[0]) * secant_coefficient(js[1])
        for j in js[2:]:
            term *= tangent_coefficient(j)
        total += term
    return total


def big_a(k: int) -> Fraction:
    """A_k = sum_{i+j=k} gamma_i gamma_j."""
    return sum(
        (secant_coefficient(i) * secant_coefficient(k - i) for i in range(k + 1)),
        Fraction(0),
    )


def z_coefficient(p: int, r: int) -> Fraction:
    """z_{p,r} = sum_{k=p}^{r} A_{r-k} sum over length-p partitions of k of
    the tangent-coefficient product divided by the part multiplicities."""
    if not 1 <= p <= r:
        raise InvalidArgumentError("z coefficient needs 1 <= p <= r")
    total = Fraction(0)
    for k in range(p, r + 1):
        inner = Fraction(0)
        for parts in _partitions_exact(k, p):
            mults: dict = {}
            for v in parts:
                mults[v] = mults.get(v, 0) + 1
            denom = 1
            for m in mults.values():
                denom *= factorial(m)
            term = Fraction(1, denom)
            for v in parts:
                term *= tangent_coefficient(v)
            inner += term
        total += big_a(r - k) * inner
    return total


@dataclass(frozen=True)
class SunCoefficients:
    n_max: int
    r_max: int
    recursion: dict  # (n, r) -> Fraction, full grid
    closed: dict     # (n, r) -> Fraction, n >= 2r only
    gamma: tuple
    tau: tuple
    big_a: tuple
    z: dict          # (p, r) -> Fraction

    def agree(self) -> bool:
        return all(self.recursion[key] == val for key, val in self.closed.items())


def sun_coefficients(n_max: int, r_max: int) -> SunCoefficients:
    if n_max < 0 or r_max < 0:
        raise InvalidArgumentError("table bounds must be non-negative")
    rec = {(n, r): a_recursion(n, r) for n in range(n_max + 1) for r in range(r_max + 1)}
    closed = {
        (n, r): a_closed_form(n, r)
        for n in range(n_max + 1)
        for r in range(r_max + 1)
        if n >= 2 * r
    }
    gamma = tuple(secant_coefficient(k) for k in range(r_max + 1))
    tau = tuple(tangent_coefficient(k) for k in range(r_max + 1))
    bigs = tuple(big_a(k) for k in range(r_max + 1))
    zs = {(p, r): z_coefficient(p, r) for r in range(1, r_max + 1) for p in range(1, r + 1)}
    return SunCoefficients(n_max, r_max, rec, closed, gamma, tau, bigs, zs)


# ---------------------------------------------------------------------------
# Differential operators and the closed form


class DiffOp:
    """Finite sum of (polynomial coefficient, derivative multi-index) terms."""

    __slots__ = ("space", "terms")

    def __init__(self, space: VarSpace, terms: dict):
        clean = {}
        for idx, c in terms.items():
            if isinstance(c, (int, Fraction)):
                c = Poly.const(space, c)
            if not c.is_zero():
                clean[tuple(idx)] = c
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("DiffOp is immutable")

    @classmethod
    def identity(cls, space: VarSpace) -> "DiffOp":
        return cls(space, {(0,) * space.nvars: Poly.const(space, 1)})

    @classmethod
    def laplacian(cls, space: VarSpace) -> "DiffOp":
        terms = {}
        for i in range(space.nvars):
            e = [0] * space.nvars
            e[i] = 2
            terms[tuple(e)] = Poly.const(space, 1)
        return cls(space, terms)

    @classmethod
    def euler(cls, space: VarSpace) -> "DiffOp":
        terms = {}
        for i in range(space.nvars):
            e = [0] * space.nvars
            e[i] = 1
            terms[tuple(e)] = Poly.variable(space, i)
        return cls(space, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def apply(self, f: Poly) -> Poly:
        out = Poly.zero(self.space)
        for idx, c in self.terms.items():
            d = f.diff_multi(idx)
            if not d.is_zero():
                out = out + c * d
        return out

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DiffOp(self.space, {(0,) * self.space.nvars: other})
        out = dict(self.terms)
        for idx, c in other.terms.items():
            s = out.get(idx, Poly.zero(self.space)) + c
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
        return DiffOp(self.space, out)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DiffOp(self.space, {(0,) * self.space.nvars: other})
        return self + DiffOp(self.space, {i: -c for i, c in other.terms.items()})

    def scale(self, c) -> "DiffOp":
        return DiffOp(self.space, {i: p * c for i, p in self.terms.items()})

    def compose(self, other: "DiffOp") -> "DiffOp":
        """Operator composition: (self o other)(f) = self(other(f))."""
        out: dict = {}
        nv = self.space.nvars
        for i1, c1 in self.terms.items():
            for i2, c2 in other.terms.items():
                # d^{i1} (c2 * d^{i2} f) expands by the Leibniz rule
                for split in itertools.product(*(range(k + 1) for k in i1)):
                    dc2 = c2.diff_multi(split)
                    if dc2.is_zero():
                        continue
                    coeff = c1 * dc2
                    for axis in range(nv):
                        coeff = coeff * comb(i1[axis], split[axis])
                    idx = tuple(i1[a] - split[a] + i2[a] for a in range(nv))
                    cur = out.get(idx)
                    cur = coeff if cur is None else cur + coeff
                    if cur.is_zero():
                        out.pop(idx, None)
                    else:
                        out[idx] = cur
        return DiffOp(self.space, out)

    def __eq__(self, other):
        return (
            isinstance(other, DiffOp)
            and self.space == other.space
            and self.terms == other.terms
        )


def eta_operator(r: int, space: VarSpace = None) -> DiffOp:
    """The nu^{2r} cochain of the su(2)* sun product as a differential
    operator: (A_r + sum_p z_{p,r} D(D-1)...(D-p+1)) Delta^r."""
    if space is None:
        space = su2_space()
    if r < 1:
        raise InvalidArgumentError("eta_operator is defined for r >= 1")
    euler_op = DiffOp.euler(space)
    head = DiffOp.identity(space).scale(big_a(r))
    for p in range(1, r + 1):
        ff = euler_op - (p - 1)
        for t in range(p - 2, -1, -1):
            ff = (euler_op - t).compose(ff)
        head = head + ff.scale(z_coefficient(p, r))
    lap = DiffOp.laplacian(space)
    lap_r = DiffOp.identity(space)
    for _ in range(r):
        lap_r = lap.compose(lap_r)
    return head.compose(lap_r)


_ETA_CACHE: dict = {}


def _eta(r: int, space: VarSpace) -> DiffOp:
    got = _ETA_CACHE.get((r, space))
    if got is None:
        got = eta_operator(r, space)
        _ETA_CACHE[(r, space)] = got
    return got


def _su2_closed_lift(prod: Poly) -> NuObject:
    out = {0: prod}
    r = 1
    while 2 * r <= prod.total_degree():
        term = _eta(r, prod.space).apply(prod)
        if not term.is_zero():
            out[2 * r] = term
        r += 1
    return NuObject(prod.space, out)


def sun_closed_form(f: Poly, g: Poly, coeffs: SunCoefficients = None) -> NuObject:
    """F sun G = FG + sum_r nu^{2r} eta_r(FG), exact (the series stops once
    the iterated Laplacian kills the product)."""
    if g.space != f.space:
        raise InvalidArgumentError("operands live on different spaces")
    return _su2_closed_lift(f * g)


def sun_homogeneous_form(f: Poly, g: Poly) -> NuObject:
    """The simpler display for homogeneous operands of equal degree n:
    sum_r nu^{2r} a(2n, r) Delta^r(FG)."""
    space = f.space
    for h in (f, g):
        degs = {sum(e) for e in h.terms}
        if len(degs) > 1:
            raise InvalidArgumentError("operands must be homogeneous")
    n = f.total_degree()
    if g.total_degree() != n:
        raise InvalidArgumentError("operands must have equal degree")
    prod = f * g
    lap = DiffOp.laplacian(space)
    out = {0: prod}
    cur = prod
    r = 1
    while True:
        cur = lap.apply(cur)
        if cur.is_zero():
            break
        out[2 * r] = cur * a_recursion(2 * n, r)
        r += 1
    return NuObject(space, out)


# ---------------------------------------------------------------------------
# Quantized Nambu bracket through the sun product


def quantized_nambu_sun(f, g, h, sp: SunProduct) -> NuObject:
    """Lift of the classical Jacobian of the classical parts."""
    if sp.space.nvars != 3:
        raise InvalidArgumentError("the quantized Nambu bracket needs three variables")
    fs = [_as_nu(x, sp.space).classical() for x in (f, g, h)]
    return sun_lift(sp, jacobian_det(fs, (0, 1, 2)))


def fi_residual_sun(sp: SunProduct, fs) -> NuObject:
    """Fundamental Identity residual for the quantized bracket on 5 inputs."""
    fs = list(fs)
    if len(fs) != 5:
        raise InvalidArgumentError("the order-3 Fundamental Identity needs 5 arguments")
    lhs = quantized_nambu_sun(fs[0], fs[1], quantized_nambu_sun(fs[2], fs[3], fs[4], sp), sp)
    rhs = NuObject.zero(sp.space)
    for k in range(3):
        inner = quantized_nambu_sun(fs[0], fs[1], fs[2 + k], sp)
        args = fs[2:]
        args[k] = inner
        rhs = rhs + quantized_nambu_sun(args[0], args[1], args[2], sp)
    return lhs - rhs


def _nu_diff(x: NuObject, axis: int) -> NuObject:
    return NuObject(x.space, {k: p.diff(axis) for k, p in x.coeffs.items()})


def weak_leibniz_residual(sp: SunProduct, f: Poly, g: Poly, h: Poly, axis: int) -> NuObject:
    """F sun (d_i(G sun H) - G sun d_i H - d_i G sun H); vanishes because the
    inner combination has zero classical part."""
    gh = sun_mul(sp, g, h)
    inner = _nu_diff(gh, axis) - sun_mul(sp, g, h.diff(axis)) - sun_mul(sp, g.diff(axis), h)
    return sun_mul(sp, f, inner)


# ---------------------------------------------------------------------------
# Equivalence and triviality


@dataclass(frozen=True)
class DiffOpSeries:
    """Formally invertible series Id + sum_{r>=1} nu^r S_r of operators."""

    space: VarSpace
    terms: tuple  # ((r, DiffOp), ...) with r >= 1

    def __post_init__(self):
        for r, op in self.terms:
            if r < 1:
                raise InvalidArgumentError("series terms start at nu^1")
            if op.space != self.space:
                raise InvalidArgumentError("operator space mismatch")

    def operator(self, r: int) -> DiffOp:
        if r == 0:
            return DiffOp.identity(self.space)
        for k, op in self.terms:
            if k == r:
                return op
        return DiffOp(self.space, {})

    def orders(self) -> tuple:
        return (0,) + tuple(r for r, _ in self.terms)

    def apply(self, x) -> NuObject:
        xo = _as_nu(x, self.space)
        out = dict(xo.coeffs)
        for r, op in self.terms:
            for k, p in xo.coeffs.items():
                v = op.apply(p)
                if v.is_zero():
                    continue
                cur = out.get(r + k, Poly.zero(self.space))
                cur = cur + v
                if cur.is_zero():
                    out.pop(r + k, None)
                else:
                    out[r + k] = cur
        return NuObject(self.space, out)


def identity_series(space: VarSpace) -> DiffOpSeries:
    return DiffOpSeries(space, ())


def weak_trivializer(r_max: int, space: VarSpace = None) -> DiffOpSeries:
    """S with S_{2r} = eta_r; satisfies S(F G) = F sun G on su(2)*."""
    if space is None:
        space = su2_space()
    return DiffOpSeries(space, tuple((2 * r, _eta(r, space)) for r in range(1, r_max + 1)))


def _product_apply(prod, x: NuObject, y: NuObject) -> NuObject:
    if prod is USUAL_PRODUCT:
        return x * y
    if isinstance(prod, SunProduct):
        return sun_mul(prod, x, y)
    raise InvalidArgumentError("expected a sun product or the usual product")


def _product_cochain(prod, r: int, h: Poly) -> Poly:
    if prod is USUAL_PRODUCT:
        return h if r == 0 else Poly.zero(h.space)
    if isinstance(prod, SunProduct):
        return sun_lift(prod, h).coefficient(r)
    raise InvalidArgumentError("expected a sun product or the usual product")


def apply_equivalence(
    s: DiffOpSeries,
    mode: str,
    p1,
    p2,
    f: Poly,
    g: Poly,
    nu_order: int,
) -> NuObject:
    """Residual of the equivalence relation between two products.

    Mode "B": S(F o1 G) - S(F) o2 S(G), truncated at nu_order.  Mode "A":
    the double cochain expansion sum nu^{r+s} S_s(rho_r(FG)) minus
    sum nu^{r+s+s'} rho'_r(S_s(F) S_{s'}(G)).  A zero residual certifies
    equivalence to the computed order.
    """
    if nu_order < 0:
        raise InvalidArgumentError("nu_order must be non-negative")
    space = s.space
    if mode == "B":
        lhs = s.apply(_product_apply(p1, _as_nu(f, space), _as_nu(g, space)))
        rhs = _product_apply(p2, s.apply(f), s.apply(g))
        return (lhs - rhs).truncate(nu_order)
    if mode == "A":
        fg = f * g
        out = NuObject.zero(space)
        for r in range(nu_order + 1):
            rho = _product_cochain(p1, r, fg)
            if rho.is_zero():
                continue
            for ss in s.orders():
                if r + ss > nu_order:
                    continue
                v = s.operator(ss).apply(rho)
                if not v.is_zero():
                    out = out + NuObject(space, {r + ss: v})
        for ss in s.orders():
            sf = s.operator(ss).apply(f)
            if sf.is_zero():
                continue
            for tt in s.orders():
                if ss + tt > nu_order:
                    continue
                sg = s.operator(tt).apply(g)
                if sg.is_zero():
                    continue
                prod = sf * sg
                for r in range(nu_order + 1 - ss - tt):
                    rho = _product_cochain(p2, r, prod)
                    if not rho.is_zero():
                        out = out - NuObject(space, {r + ss + tt: rho})
        return out.truncate(nu_order)
    raise InvalidArgumentError("mode must be 'A' or 'B'")
