"""Exact special-number sequences: Euler numbers, Bernoulli numbers and
falling factorials, all over the rationals.

Conventions (frozen here and relied upon by the sun-product coefficient
tables):

* Euler numbers use the secant convention, ``sec t = sum E_{2k} t^{2k}/(2k)!``,
  so every even-index value is positive: E_0=1, E_2=1, E_4=5, E_6=61.
* Bernoulli numbers use B_1 = -1/2, hence B_2 = 1/6, B_4 = -1/30.
* ``tangent_coefficient(n)`` is the t^{2n+1} coefficient of tan t, i.e. the
  all-positive normalisation 2^{2n+2}(2^{2n+2}-1)|B_{2n+2}|/(2n+2)!.  The
  absolute value is deliberate: with signed B_{2n+2} the expression would
  alternate, and the coefficient tables built on top of it would disagree
  with their defining recursion already at the first mixed entry.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

from .errors import InvalidArgumentError

__all__ = [
    "euler_number",
    "bernoulli_number",
    "falling_factorial",
    "secant_coefficient",
    "tangent_coefficient",
    "reset_caches",
]

# sec-series coefficients s_k = [t^{2k}] sec t; E_{2k} = s_k (2k)!
_sec_cache: list[Fraction] = [Fraction(1)]
_bernoulli_cache: list[Fraction] = [Fraction(1)]


def reset_caches() -> None:
    """Drop memoised sequences; used to test deterministic regeneration."""
    del _sec_cache[1:]
    del _bernoulli_cache[1:]


def _extend_sec(k: int) -> None:
    # Invert cos t = sum (-1)^i t^{2i}/(2i)! exactly: sum_j s_j c_{k-j} = [k=0].
    while len(_sec_cache) <= k:
        m = len(_sec_cache)
        acc = Fraction(0)
        for j in range(m):
            c = Fraction((-1) ** (m - j), factorial(2 * (m - j)))
            acc += _sec_cache[j] * c
        _sec_cache.append(-acc)


def _extend_bernoulli(n: int) -> None:
    # sum_{k=0}^{n} C(n+1,k) B_k = 0 for n >= 1, with B_0 = 1.
    while len(_bernoulli_cache) <= n:
        m = len(_bernoulli_cache)
        acc = sum(
            Fraction(comb(m + 1, k)) * _bernoulli_cache[k] for k in range(m)
        )
        _bernoulli_cache.append(-acc / (m + 1))


def euler_number(n: int) -> Fraction:
    """E_n in the secant (all-positive) convention; ``n`` must be even."""
    if n < 0 or n % 2 != 0:
        raise InvalidArgumentError(f"Euler numbers are defined for even n >= 0, got {n}")
    k = n // 2
    _extend_sec(k)
    return _sec_cache[k] * factorial(n)


def bernoulli_number(n: int) -> Fraction:
    """B_n with the B_1 = -1/2 convention."""
    if n < 0:
        raise InvalidArgumentError(f"Bernoulli numbers are defined for n >= 0, got {n}")
    _extend_bernoulli(n)
    return _bernoulli_cache[n]


def falling_factorial(a: int, r: int) -> int:
    """a(a-1)...(a-r+1); equals 1 when r == 0."""
    if r < 0:
        raise InvalidArgumentError(f"falling_factorial needs r >= 0, got {r}")
    out = 1
    for i in range(r):
        out *= a - i
    return out


def secant_coefficient(n: int) -> Fraction:
    """gamma_n = E_{2n}/(2n)! = [t^{2n}] sec t."""
    _extend_sec(n)
    return _sec_cache[n]


def tangent_coefficient(n: int) -> Fraction:
    """tau_n = [t^{2n+1}] tan t, via Bernoulli numbers (all positive)."""
    b = bernoulli_number(2 * n + 2)
    value = Fraction(2 ** (2 * n + 2) * (2 ** (2 * n + 2) - 1)) * b / factorial(2 * n + 2)
    # sign(B_{2n+2}) = (-1)^n, so this is exactly the absolute value
    return value if n % 2 == 0 else -value
