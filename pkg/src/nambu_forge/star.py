"""Star products: full and partial Moyal, a standard-ordering product, and
the invariant (covariant) star product on su(2)*.

All products are exact on polynomials: the nu-series terminates because every
cochain lowers the total derivative order, so no truncation is involved.  The
sign conventions are pinned by two testable constraints: the antisymmetrized
first cochain equals twice the Poisson bivector, and the su(2) product closes
on L_i * L_j = L_i L_j + nu eps_ijk L_k + 2 nu^2 delta_ij.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import InvalidArgumentError
from .poly import (
    NuObject,
    Poly,
    TSeries,
    VarSpace,
    grlex_key,
    poisson_power,
    su2_lift_space,
    su2_space,
)

__all__ = [
    "StarProduct",
    "moyal_product",
    "partial_moyal_product",
    "standard_ordering_product",
    "su2_product",
    "star_mul",
    "su2_left_mul",
    "star_commutator",
    "star_exponential",
]

_EPS = {
    (0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
    (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1,
}


@dataclass(frozen=True)
class StarProduct:
    """A star-product rule tagged with its variable space.

    kind is one of ``moyal``, ``partial_moyal``, ``standard_ordering``,
    ``su2``; ``pairs`` are the active symplectic pairs for the first three.
    """

    kind: str
    space: VarSpace
    pairs: tuple = ()


def moyal_product(space: VarSpace) -> StarProduct:
    if not space.pairs:
        raise InvalidArgumentError("Moyal product needs at least one symplectic pair")
    return StarProduct("moyal", space, space.pairs)


def partial_moyal_product(space: VarSpace, pairs=None) -> StarProduct:
    pairs = tuple(pairs) if pairs is not None else space.pairs
    if not pairs:
        raise InvalidArgumentError("partial Moyal product needs at least one active pair")
    return StarProduct("partial_moyal", space, pairs)


def standard_ordering_product(space: VarSpace) -> StarProduct:
    if len(space.pairs) != 1:
        raise InvalidArgumentError("standard-ordering product is defined on one pair")
    return StarProduct("standard_ordering", space, space.pairs)


def su2_product() -> StarProduct:
    return StarProduct("su2", su2_space())


def _as_nu(x, space: VarSpace) -> NuObject:
    if isinstance(x, NuObject):
        return x
    if isinstance(x, Poly):
        return NuObject.from_poly(x)
    if isinstance(x, (int, Fraction)):
        return NuObject.from_poly(Poly.const(space, x))
    raise InvalidArgumentError(f"cannot interpret {type(x).__name__} as a star operand")


def _pair_degree(f: Poly, pairs) -> int:
    idx = {i for p in pairs for i in p}
    if not f.terms:
        return 0
    return max(sum(e[i] for i in idx) for e in f.terms)


def _moyal_poly(f: Poly, g: Poly, pairs) -> NuObject:
    rmax = min(_pair_degree(f, pairs), _pair_degree(g, pairs))
    coeffs = {}
    for r in range(rmax + 1):
        term = poisson_power(f, g, r, pairs)
        if not term.is_zero():
            coeffs[r] = term * Fraction(1, factorial(r))
    return NuObject(f.space, coeffs)


def _standard_poly(f: Poly, g: Poly, pair) -> NuObject:
    # f *_S g = sum_r (-2 nu)^r / r! (d^r f / dp^r)(d^r g / dq^r); the sign is
    # forced by C1(f,g) - C1(g,f) = 2 P(f,g) and matches the ordering with all
    # q-operators to the left under nu = i hbar / 2.
    a, b = pair
    coeffs = {}
    df, dg = f, g
    r = 0
    while not (df.is_zero() or dg.is_zero()):
        term = df * dg
        if not term.is_zero():
            coeffs[r] = term * Fraction((-2) ** r, factorial(r))
        df = df.diff(b)
        dg = dg.diff(a)
        r += 1
    return NuObject(f.space, coeffs)


# -- su(2)* covariant product ------------------------------------------------

_L_SPACE = su2_space()
_R6 = su2_lift_space()


def su2_generators() -> tuple:
    """The lifts L_i = sum eps_ijk p_j q_k as polynomials on R^6."""
    gens = []
    for i in range(3):
        terms = {}
        for (i2, j, k), s in _EPS.items():
            if i2 != i:
                continue
            e = [0] * 6
            e[j] += 1      # p_j
            e[3 + k] += 1  # q_k
            terms[tuple(e)] = Fraction(s)
        gens.append(Poly(_R6, terms))
    return tuple(gens)


_L_GENS = su2_generators()


def su2_lift(f: Poly) -> Poly:
    """Substitute L_i -> eps_ijk p_j q_k, mapping L-polynomials onto R^6."""
    if f.space != _L_SPACE:
        raise InvalidArgumentError("su2_lift expects a polynomial in L1, L2, L3")
    return f.compose(_L_GENS, _R6)


_L_MONOMIALS: dict = {}


def _l_monomials(d: int) -> list:
    got = _L_MONOMIALS.get(d)
    if got is None:
        got = []
        for a in range(d + 1):
            for b in range(d + 1 - a):
                got.append((a, b, d - a - b))
        got.sort(key=grlex_key, reverse=True)
        _L_MONOMIALS[d] = got
    return got


_SU2_CACHE: dict = {}


def _su2_right_linear(f: Poly, g: Poly) -> NuObject:
    """f * g for g of degree <= 1 via the closed covariant product formula.

    L_i * F = L_i F + nu eps_ijk L_k dF/dL_j + nu^2 (2 dF/dL_i
              + sum_j L_j d2F/dL_i dL_j); the mirror product F * L_i flips the
    sign of the nu^1 term.
    """
    out = NuObject.from_poly(f * g)
    for i in range(3):
        ci = g.terms.get(tuple(1 if k == i else 0 for k in range(3)))
        if not ci:
            continue
        nu1 = Poly.zero(_L_SPACE)
        for j in range(3):
            for k in range(3):
                s = _EPS.get((i, j, k))
                if s:
                    nu1 = nu1 + Poly.variable(_L_SPACE, k) * f.diff(j) * s
        nu2 = 2 * f.diff(i)
        for j in range(3):
            nu2 = nu2 + Poly.variable(_L_SPACE, j) * f.diff(i).diff(j)
        out = out + NuObject(_L_SPACE, {1: -nu1 * ci, 2: nu2 * ci})
    return out


def su2_left_mul(i: int, f: Poly) -> NuObject:
    """L_i * f on su(2)*, computed from the closed covariant formula."""
    if not 1 <= i <= 3:
        raise InvalidArgumentError("axis index must be 1, 2 or 3")
    if f.space != _L_SPACE:
        raise InvalidArgumentError("su2_left_mul expects a polynomial in L1, L2, L3")
    i = i - 1
    nu1 = Poly.zero(_L_SPACE)
    for j in range(3):
        for k in range(3):
            s = _EPS.get((i, j, k))
            if s:
                nu1 = nu1 + Poly.variable(_L_SPACE, k) * f.diff(j) * s
    nu2 = 2 * f.diff(i)
    for j in range(3):
        nu2 = nu2 + Poly.variable(_L_SPACE, j) * f.diff(i).diff(j)
    return NuObject(
        _L_SPACE,
        {0: Poly.variable(_L_SPACE, i) * f, 1: nu1, 2: nu2},
    )


_SM_CACHE: dict = {}


def _left_var_mul(i: int, x: NuObject) -> NuObject:
    out = NuObject.zero(_L_SPACE)
    for k, p in x.coeffs.items():
        out = out + su2_left_mul(i + 1, p).nu_shift(k)
    return out


def _right_var_mul(x: NuObject, i: int) -> NuObject:
    var = Poly.variable(_L_SPACE, i)
    out = NuObject.zero(_L_SPACE)
    for k, p in x.coeffs.items():
        out = out + _su2_right_linear(p, var).nu_shift(k)
    return out


def _star_monomial(e: tuple) -> NuObject:
    """L_{i1} * (L_{i2} * (...)) for the word of the exponent tuple.

    Its classical part is exactly the plain monomial; every other term has
    strictly smaller total degree, which makes the basis triangular.
    """
    got = _SM_CACHE.get(e)
    if got is None:
        i = next((j for j, k in enumerate(e) if k), None)
        if i is None:
            got = NuObject.one(_L_SPACE)
        else:
            rest = tuple(k - (1 if j == i else 0) for j, k in enumerate(e))
            got = _left_var_mul(i, _star_monomial(rest))
        _SM_CACHE[e] = got
    return got


def _to_star_coefficients(g: Poly) -> list:
    """Write g as sum of nu^k c * star-monomials, by descending degree."""
    residual = NuObject.from_poly(g)
    out = []
    while not residual.is_zero():
        level = max(p.total_degree() for p in residual.coeffs.values())
        batch = []
        for k, poly in residual.coeffs.items():
            for e, c in poly.terms.items():
                if sum(e) == level:
                    batch.append((e, k, c))
        sub = NuObject.zero(_L_SPACE)
        for e, k, c in batch:
            out.append((e, k, c))
            sub = sub + _star_monomial(e).nu_shift(k) * c
        residual = residual - sub
    return out


def _su2_mul_poly(f: Poly, g: Poly) -> NuObject:
    """Covariant product by star-monomial decomposition of the right factor.

    Each summand folds the closed-form linear multiplications, so the whole
    product stays on three variables; the R^6 lift below serves as an
    independent oracle for this route.
    """
    key = (f, g)
    got = _SU2_CACHE.get(key)
    if got is not None:
        return got
    if g.total_degree() <= 1:
        out = _su2_right_linear(f, g)
    elif f.total_degree() <= 1:
        # mirror of the right-linear case: swap and flip odd cochains
        mirrored = _su2_right_linear(g, f)
        out = NuObject(
            _L_SPACE,
            {k: (p if k % 2 == 0 else -p) for k, p in mirrored.coeffs.items()},
        )
    else:
        out = NuObject.zero(_L_SPACE)
        for e, k, c in _to_star_coefficients(g):
            acc = NuObject.from_poly(f)
            for i, count in enumerate(e):
                for _ in range(count):
                    acc = _right_var_mul(acc, i)
            out = out + acc.nu_shift(k) * c
    _SU2_CACHE[key] = out
    return out


def su2_star_via_lift(f: Poly, g: Poly) -> NuObject:
    """Reference route: Moyal product of the R^6 lifts, re-expressed in L."""
    lift = _moyal_poly(su2_lift(f), su2_lift(g), _R6.pairs)
    return NuObject(_L_SPACE, {k: _su2_project(p) for k, p in lift.coeffs.items()})


def _su2_project(f: Poly) -> Poly:
    """Express an R^6 polynomial in the image of the L-substitution exactly."""
    if f.is_zero():
        return Poly.zero(_L_SPACE)
    blocks: dict = {}
    for e, c in f.terms.items():
        pdeg, qdeg = sum(e[:3]), sum(e[3:])
        if pdeg != qdeg:
            raise InvalidArgumentError("su2 product left the L-image (unbalanced block)")
        blocks.setdefault(pdeg, {})[e] = c
    out = Poly.zero(_L_SPACE)
    for d, terms in blocks.items():
        out = out + _solve_block(d, terms)
    return out


_BLOCK_SOLVERS: dict = {}

# fixed rational probe points on R^6 certify each solve exactly; a failed
# probe means the product left the span of the L-monomial lifts (a bug)
_PROBES = (
    (Fraction(2), Fraction(-3), Fraction(5), Fraction(7), Fraction(1, 2), Fraction(-4)),
    (Fraction(1, 3), Fraction(2), Fraction(-1), Fraction(3), Fraction(5, 2), Fraction(1)),
)


def _block_solver(d: int):
    """Pivot-row inverse for expressing degree-d lifts in the L-monomials."""
    got = _BLOCK_SOLVERS.get(d)
    if got is None:
        monos = _l_monomials(d)
        images = [su2_lift(Poly.monomial(_L_SPACE, e)) for e in monos]
        valid_rows = {e for img in images for e in img.terms}
        ncols = len(monos)
        # square up: greedily pick independent rows
        pivot_rows = []
        matrix = []  # rows of the growing square system, reduced copy
        reduced: list = []
        for e in sorted(valid_rows, key=grlex_key, reverse=True):
            if len(pivot_rows) == ncols:
                break
            row = [img.terms.get(e, Fraction(0)) for img in images]
            work = list(row)
            for prow, pc in reduced:
                fac = work[pc]
                if fac:
                    work = [a - fac * b for a, b in zip(work, prow)]
            pcol = next((i for i, v in enumerate(work) if v), None)
            if pcol is None:
                continue
            inv = Fraction(1) / work[pcol]
            work = [v * inv for v in work]
            reduced.append((work, pcol))
            pivot_rows.append(e)
            matrix.append(row)
        if len(pivot_rows) != ncols:
            raise InvalidArgumentError("su2 monomial lifts degenerate (bug)")
        # invert the square pivot matrix once
        n = ncols
        aug = [list(matrix[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for col in range(n):
            sel = next(r for r in range(col, n) if aug[r][col])
            aug[col], aug[sel] = aug[sel], aug[col]
            inv = Fraction(1) / aug[col][col]
            aug[col] = [v * inv for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    fac = aug[r][col]
                    aug[r] = [a - fac * b for a, b in zip(aug[r], aug[col])]
        inverse = [row[n:] for row in aug]
        probe_l = []
        for pt in _PROBES:
            lvals = [g.evaluate(pt) for g in _L_GENS]
            powers = [[v**k for k in range(2 * d + 1)] for v in pt]
            probe_l.append(
                (powers, [lvals[0] ** a * lvals[1] ** b * lvals[2] ** c for a, b, c in monos])
            )
        got = (monos, {e: i for i, e in enumerate(pivot_rows)}, valid_rows, inverse, probe_l)
        _BLOCK_SOLVERS[d] = got
    return got


def _solve_block(d: int, terms: dict) -> Poly:
    monos, pivot_index, valid_rows, inverse, probe_l = _block_solver(d)
    rhs = [Fraction(0)] * len(monos)
    for e, c in terms.items():
        if e not in valid_rows:
            raise InvalidArgumentError("su2 product left the L-image (unknown monomial)")
        idx = pivot_index.get(e)
        if idx is not None:
            rhs[idx] = c
    solution = [
        sum(row[i] * rhs[i] for i in range(len(rhs)) if rhs[i]) for row in inverse
    ]
    # exact probe check covers the rows not used by the solve
    for powers, mono_values in probe_l:
        direct = Fraction(0)
        for e, c in terms.items():
            term = c
            for var, k in enumerate(e):
                if k:
                    term *= powers[var][k]
            direct += term
        recon = sum(s * mv for s, mv in zip(solution, mono_values) if s)
        if direct != recon:
            raise InvalidArgumentError("su2 product left the L-image (inconsistent block)")
    coeffs = {}
    for col, v in enumerate(solution):
        if v:
            coeffs[monos[col]] = v
    return Poly(_L_SPACE, coeffs)


# -- public operations -------------------------------------------------------


def star_mul(s: StarProduct, f, g) -> NuObject:
    """Exact star product of two polynomials or nu-objects."""
    fo = _as_nu(f, s.space)
    go = _as_nu(g, s.space)
    if fo.space != s.space or go.space != s.space:
        raise InvalidArgumentError("star operands must live on the product's space")
    out = NuObject.zero(s.space)
    for a, fp in sorted(fo.coeffs.items()):
        for b, gp in sorted(go.coeffs.items()):
            if s.kind in ("moyal", "partial_moyal"):
                part = _moyal_poly(fp, gp, s.pairs)
            elif s.kind == "standard_ordering":
                part = _standard_poly(fp, gp, s.pairs[0])
            elif s.kind == "su2":
                part = _su2_mul_poly(fp, gp)
            else:
                raise InvalidArgumentError(f"unknown star product kind {s.kind!r}")
            out = out + part.nu_shift(a + b)
    return out


def star_commutator(s: StarProduct, f, g) -> NuObject:
    """[f, g] = (f * g - g * f) / (2 nu)."""
    diff = star_mul(s, f, g) - star_mul(s, g, f)
    return diff.nu_shift(-1) * Fraction(1, 2)


def star_power(s: StarProduct, h: Poly, r: int) -> NuObject:
    out = NuObject.one(s.space)
    for _ in range(r):
        out = star_mul(s, out, h)
    return out


def star_exponential(s: StarProduct, h: Poly, t_order: int) -> TSeries:
    """Star exponential as a t-series: sum_r (1/r!)(t/2nu)^r h*...*h."""
    if t_order < 0:
        raise InvalidArgumentError("t_order must be non-negative")
    coeffs = [NuObject.one(s.space)]
    for r in range(1, t_order + 1):
        nxt = star_mul(s, coeffs[-1], h).nu_shift(-1) * Fraction(1, 2 * r)
        coeffs.append(nxt)
    return TSeries(t_order, tuple(coeffs))
