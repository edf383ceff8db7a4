"""Exact sparse multivariate polynomials over the rationals, Laurent objects
in the formal deformation parameter nu, and the basic differential machinery
(partial derivatives, Poisson bivector powers, Jacobian determinants).

A polynomial is a map from dense exponent tuples to nonzero Fractions; the
empty map is the zero polynomial.  All values are immutable after
construction and hashable, so they can serve as dictionary keys and multiset
members throughout the package.

Monomial order is graded lexicographic with the first variable largest:
compare total degree, then the exponent tuples componentwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping, Sequence, Union

from .errors import InvalidArgumentError

Exponent = tuple  # tuple[int, ...], one entry per variable
Scalar = Union[int, Fraction]

__all__ = [
    "VarSpace",
    "Poly",
    "NuObject",
    "TSeries",
    "grlex_key",
    "poisson_power",
    "jacobian_det",
    "leading_monomial",
    "qp_space",
    "coordinate_space",
    "su2_space",
    "su2_lift_space",
]


def grlex_key(e: Exponent):
    """Sort key realising graded-lex order (largest key = leading monomial)."""
    return (sum(e), e)


@dataclass(frozen=True)
class VarSpace:
    """An ordered set of variables plus its symplectic pairing.

    ``pairs`` lists index pairs (a, b); the Poisson bivector acts as
    d/dx_a (x) d/dx_b  -  d/dx_b (x) d/dx_a on each pair.  Indices not in any
    pair are central.
    """

    names: tuple
    pairs: tuple = ()

    def __post_init__(self):
        seen = set()
        for a, b in self.pairs:
            for i in (a, b):
                if not 0 <= i < len(self.names):
                    raise InvalidArgumentError(f"pair index {i} out of range")
                if i in seen:
                    raise InvalidArgumentError(f"variable index {i} appears in two pairs")
                seen.add(i)

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def central(self) -> tuple:
        paired = {i for p in self.pairs for i in p}
        return tuple(i for i in range(self.nvars) if i not in paired)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InvalidArgumentError(
                f"unknown variable {name!r}; expected one of {', '.join(self.names)}"
            ) from None


def qp_space() -> VarSpace:
    """One canonical pair (q, p)."""
    return VarSpace(("q", "p"), ((0, 1),))


def coordinate_space(n: int, paired: int = 0) -> VarSpace:
    """Variables x1..xn with the first ``paired`` consecutive couples paired."""
    names = tuple(f"x{i + 1}" for i in range(n))
    pairs = tuple((2 * i, 2 * i + 1) for i in range(paired))
    return VarSpace(names, pairs)


def su2_space() -> VarSpace:
    """The angular-momentum variables L1, L2, L3 (no symplectic pairs)."""
    return VarSpace(("L1", "L2", "L3"))


def su2_lift_space() -> VarSpace:
    """R^6 with coordinates p1..p3, q1..q3 paired as (p_i, q_i).

    The pair order is chosen so that the lifted functions
    L_i = sum eps_{ijk} p_j q_k close onto [L1, L2] = L3 under the Moyal
    commutator built from this space.
    """
    names = ("p1", "p2", "p3", "q1", "q2", "q3")
    return VarSpace(names, ((0, 3), (1, 4), (2, 5)))


class Poly:
    """Immutable sparse polynomial over Fraction coefficients."""

    __slots__ = ("space", "terms", "_hash")

    def __init__(self, space: VarSpace, terms: Mapping[Exponent, Scalar]):
        clean = {}
        for e, c in terms.items():
            if type(c) is not Fraction:
                c = Fraction(c)
            if c:
                clean[e if type(e) is tuple else tuple(e)] = c
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):  # pragma: no cover - guard rail
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, space: VarSpace) -> "Poly":
        return cls(space, {})

    @classmethod
    def const(cls, space: VarSpace, c: Scalar) -> "Poly":
        return cls(space, {(0,) * space.nvars: Fraction(c)})

    @classmethod
    def variable(cls, space: VarSpace, i: int) -> "Poly":
        e = [0] * space.nvars
        e[i] = 1
        return cls(space, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, space: VarSpace, e: Exponent, c: Scalar = 1) -> "Poly":
        return cls(space, {tuple(e): Fraction(c)})

    # -- basic queries -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.space.nvars, Fraction(0))

    def total_degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def variables_used(self) -> tuple:
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(i)
        return tuple(sorted(used))

    def leading_monomial(self) -> Exponent:
        if not self.terms:
            raise InvalidArgumentError("the zero polynomial has no leading monomial")
        return max(self.terms, key=grlex_key)

    def leading_coeff(self) -> Fraction:
        return self.terms[self.leading_monomial()]

    def sort_key(self):
        """Canonical total order on polynomials of one space (leading first)."""
        return tuple(
            (e, c) for e, c in sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)
        )

    # -- arithmetic --------------------------------------------------------
    def _check_space(self, other: "Poly") -> None:
        if self.space != other.space:
            raise InvalidArgumentError("polynomials live on different variable spaces")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.space, other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_space(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            cur = out.get(e)
            s = c if cur is None else cur + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.space, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.space, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return Poly.zero(self.space)
            return Poly(self.space, {e: k * c for e, k in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_space(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(map(int.__add__, e1, e2))
                cur = out.get(e)
                prod = c1 * c2
                out[e] = prod if cur is None else cur + prod
        return Poly(self.space, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise InvalidArgumentError("negative polynomial powers are not defined")
        out = Poly.const(self.space, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Poly):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    def __hash__(self):
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash((self.space, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    # -- calculus ----------------------------------------------------------
    def diff(self, i: int) -> "Poly":
        if not 0 <= i < self.space.nvars:
            raise InvalidArgumentError(f"variable index {i} out of range")
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return Poly(self.space, out)

    def diff_multi(self, orders: Sequence[int]) -> "Poly":
        p = self
        for i, k in enumerate(orders):
            for _ in range(k):
                if p.is_zero():
                    return p
                p = p.diff(i)
        return p

    def evaluate(self, values: Sequence[Scalar]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, k in zip(values, e):
                if k:
                    term *= Fraction(v) ** k
            total += term
        return total

    def evaluate_float(self, values: Sequence[float]) -> float:
        total = 0.0
        for e, c in self.terms.items():
            term = float(c)
            for v, k in zip(values, e):
                if k == 1:
                    term *= v
                elif k:
                    term *= v**k
            total += term
        return total

    def compose(self, images: Sequence["Poly"], target: VarSpace) -> "Poly":
        """Substitute each variable by the corresponding polynomial in ``target``."""
        if len(images) != self.space.nvars:
            raise InvalidArgumentError("compose needs one image per variable")
        powers: list[dict] = [dict() for _ in images]

        def power(i: int, k: int) -> Poly:
            cache = powers[i]
            if k not in cache:
                cache[k] = images[i] ** k
            return cache[k]

        out = Poly.zero(target)
        for e, c in self.terms.items():
            term = Poly.const(target, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    # -- rendering ---------------------------------------------------------
    def __str__(self) -> str:
        return render_poly(self)

    def __repr__(self) -> str:
        return f"Poly({render_poly(self)})"


def _render_monomial(names: Sequence[str], e: Exponent) -> str:
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def _render_terms(parts: list) -> str:
    """Assemble (sign, body) pairs into canonical text."""
    if not parts:
        return "0"
    out = []
    for i, (neg, body) in enumerate(parts):
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def _term_text(c: Fraction, mono: str) -> tuple:
    neg = c < 0
    mag = -c if neg else c
    if mono and mag == 1:
        return neg, mono
    body = str(mag) if not mono else f"{mag}*{mono}"
    return neg, body


def render_poly(f: Poly) -> str:
    parts = []
    for e in sorted(f.terms, key=grlex_key, reverse=True):
        parts.append(_term_text(f.terms[e], _render_monomial(f.space.names, e)))
    return _render_terms(parts)


class NuObject:
    """Finite Laurent object in nu with Poly coefficients.

    Ordinary polynomials embed at nu-power 0; negative powers appear only in
    star-exponential coefficients.
    """

    __slots__ = ("space", "coeffs", "_hash")

    def __init__(self, space: VarSpace, coeffs: Mapping[int, Poly]):
        clean = {}
        for k, p in coeffs.items():
            if not isinstance(p, Poly):
                raise InvalidArgumentError("NuObject coefficients must be Poly values")
            if p.space != space:
                raise InvalidArgumentError("NuObject coefficient on a different space")
            if not p.is_zero():
                clean[int(k)] = p
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("NuObject is immutable")

    @classmethod
    def from_poly(cls, p: Poly) -> "NuObject":
        return cls(p.space, {0: p})

    @classmethod
    def zero(cls, space: VarSpace) -> "NuObject":
        return cls(space, {})

    @classmethod
    def one(cls, space: VarSpace) -> "NuObject":
        return cls(space, {0: Poly.const(space, 1)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def classical(self) -> Poly:
        """The nu^0 coefficient."""
        return self.coeffs.get(0, Poly.zero(self.space))

    def min_power(self) -> int:
        if not self.coeffs:
            raise InvalidArgumentError("zero object has no lowest nu power")
        return min(self.coeffs)

    def coefficient(self, k: int) -> Poly:
        return self.coeffs.get(k, Poly.zero(self.space))

    def nu_shift(self, k: int) -> "NuObject":
        return NuObject(self.space, {r + k: p for r, p in self.coeffs.items()})

    def truncate(self, max_power: int) -> "NuObject":
        return NuObject(self.space, {r: p for r, p in self.coeffs.items() if r <= max_power})

    @staticmethod
    def _coerce(other, space) -> "NuObject":
        if isinstance(other, NuObject):
            return other
        if isinstance(other, Poly):
            return NuObject.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return NuObject.from_poly(Poly.const(space, other))
        return None

    def __add__(self, other):
        o = self._coerce(other, self.space)
        if o is None:
            return NotImplemented
        out = dict(self.coeffs)
        for k, p in o.coeffs.items():
            s = out.get(k, Poly.zero(self.space)) + p
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return NuObject(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return NuObject(self.space, {k: -p for k, p in self.coeffs.items()})

    def __sub__(self, other):
        o = self._coerce(other, self.space)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NuObject(self.space, {k: p * other for k, p in self.coeffs.items()})
        o = self._coerce(other, self.space)
        if o is None:
            return NotImplemented
        out: dict = {}
        for a, p in self.coeffs.items():
            for b, q in o.coeffs.items():
                k = a + b
                s = out.get(k)
                pq = p * q
                out[k] = pq if s is None else s + pq
        return NuObject(self.space, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Poly):
            other = NuObject.from_poly(other)
        if not isinstance(other, NuObject):
            return NotImplemented
        return self.space == other.space and self.coeffs == other.coeffs

    def __hash__(self):
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash((self.space, frozenset((k, p) for k, p in self.coeffs.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self) -> str:
        return render_nuobject(self)

    def __repr__(self) -> str:
        return f"NuObject({render_nuobject(self)})"


def render_nuobject(x: NuObject) -> str:
    parts = []
    for k in sorted(x.coeffs):
        poly = x.coeffs[k]
        nu = "" if k == 0 else ("nu" if k == 1 else f"nu^{k}")
        for e in sorted(poly.terms, key=grlex_key, reverse=True):
            mono = _render_monomial(x.space.names, e)
            body = "*".join(s for s in (nu, mono) if s)
            parts.append(_term_text(poly.terms[e], body))
    return _render_terms(parts)


@dataclass(frozen=True)
class TSeries:
    """Truncated formal series in t with NuObject coefficients."""

    truncation_order: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.truncation_order + 1:
            raise InvalidArgumentError("TSeries needs truncation_order + 1 coefficients")

    def coefficient(self, r: int) -> NuObject:
        return self.coeffs[r]

    def __str__(self) -> str:
        lines = [f"t^{r}: {render_nuobject(c)}" for r, c in enumerate(self.coeffs)]
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Poisson bivector powers and Jacobians


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


class _DerivativeCache:
    """Mixed partial derivatives of one polynomial, computed on demand."""

    def __init__(self, f: Poly):
        self.cache = {(0,) * f.space.nvars: f}

    def get(self, orders: tuple) -> Poly:
        got = self.cache.get(orders)
        if got is not None:
            return got
        i = next(j for j, k in enumerate(orders) if k)
        lower = list(orders)
        lower[i] -= 1
        got = self.get(tuple(lower)).diff(i)
        self.cache[orders] = got
        return got


def poisson_power(f: Poly, g: Poly, r: int, pairs: Iterable = None) -> Poly:
    """r-th power of the Poisson bivector applied to (f, g).

    The bivector is sum over pairs (a, b) of d/da (x) d/db - d/db (x) d/da,
    so on one pair P(f, g) = f_a g_b - f_b g_a and P(q, p) = 1.
    """
    if f.space != g.space:
        raise InvalidArgumentError("poisson_power arguments live on different spaces")
    if r < 0:
        raise InvalidArgumentError("poisson_power needs r >= 0")
    if r == 0:
        return f * g
    pairs = tuple(pairs) if pairs is not None else f.space.pairs
    if not pairs:
        raise InvalidArgumentError("poisson_power needs at least one symplectic pair")
    nv = f.space.nvars
    df, dg = _DerivativeCache(f), _DerivativeCache(g)
    out = Poly.zero(f.space)
    for comp in _compositions(r, len(pairs)):
        base = factorial(r)
        for s in comp:
            base //= factorial(s)
        ranges = [range(s + 1) for s in comp]
        for ks in itertools.product(*ranges):
            coeff = base
            left = [0] * nv
            right = [0] * nv
            for (a, b), s, k in zip(pairs, comp, ks):
                coeff *= comb(s, k) * (-1) ** (s - k)
                left[a] += k
                left[b] += s - k
                right[b] += k
                right[a] += s - k
            lf = df.get(tuple(left))
            if lf.is_zero():
                continue
            rg = dg.get(tuple(right))
            if rg.is_zero():
                continue
            out = out + (lf * rg) * coeff
    return out


_PERM_CACHE: dict = {}


def _signed_permutations(n: int):
    got = _PERM_CACHE.get(n)
    if got is None:
        got = []
        for perm in itertools.permutations(range(n)):
            sign = 1
            seen = [False] * n
            for i in range(n):
                if seen[i]:
                    continue
                j, length = i, 0
                while not seen[j]:
                    seen[j] = True
                    j = perm[j]
                    length += 1
                if length % 2 == 0:
                    sign = -sign
            got.append((perm, sign))
        _PERM_CACHE[n] = got
    return got


def jacobian_det(fs: Sequence[Poly], var_indices: Sequence[int]) -> Poly:
    """Determinant of the matrix of partials d f_i / d x_{var_indices[j]}."""
    fs = list(fs)
    idx = list(var_indices)
    if len(fs) != len(idx):
        raise InvalidArgumentError("jacobian_det needs as many variables as functions")
    if len(set(idx)) != len(idx):
        raise InvalidArgumentError("jacobian_det variable indices must be distinct")
    space = fs[0].space
    for f in fs:
        if f.space != space:
            raise InvalidArgumentError("jacobian_det arguments live on different spaces")
    n = len(fs)
    partials = [[f.diff(i) for i in idx] for f in fs]
    out = Poly.zero(space)
    for perm, sign in _signed_permutations(n):
        term = Poly.const(space, sign)
        for i in range(n):
            p = partials[i][perm[i]]
            if p.is_zero():
                term = None
                break
            term = term * p
        if term is not None:
            out = out + term
    return out


def leading_monomial(f: Poly) -> Exponent:
    """Graded-lex maximal exponent tuple of a nonzero polynomial."""
    return f.leading_monomial()
