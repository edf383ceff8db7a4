"""Factorization: contract examples, round-trips, multiplicativity."""

from fractions import Fraction

import pytest

from nambu_forge.errors import InvalidArgumentError, ResourceLimitError
from nambu_forge.factor import Factorization, factorize, is_irreducible, normalize, poly_divide_exact
from nambu_forge.poly import Poly, coordinate_space

from conftest import random_poly

X3 = coordinate_space(3)
x1, x2, x3 = (Poly.variable(X3, i) for i in range(3))


def random_irreducible(rng, degree=3):
    while True:
        p = random_poly(X3, rng, degree=degree, terms=rng.randint(2, 4))
        if p.is_zero() or p.is_constant():
            continue
        if is_irreducible(p):
            return p


def test_difference_of_squares():
    fac = factorize(x1 * x1 - x2 * x2)
    assert fac.unit == 1
    assert {str(g) for g, m in fac.factors} == {"x1 - x2", "x1 + x2"}
    assert all(m == 1 for _, m in fac.factors)
    assert fac.expand() == x1 * x1 - x2 * x2


def test_sum_of_squares_is_irreducible():
    fac = factorize(x1 * x1 + x2 * x2)
    assert len(fac.factors) == 1 and fac.factors[0][1] == 1
    assert is_irreducible(x1 * x1 + x2 * x2)


def test_monomial_with_content():
    fac = factorize(6 * x1)
    assert fac.unit == 6
    assert fac.factors == ((x1, 1),)


def test_is_irreducible_examples():
    assert not is_irreducible(x1 * x1 - 1)
    assert is_irreducible(x1 * x2 + 1)
    with pytest.raises(InvalidArgumentError):
        is_irreducible(Poly.const(X3, 2))


def test_normalize():
    u, g = normalize(3 * x1 * x1)
    assert u == 3 and g == x1 * x1
    u, g = normalize(-x2 + 2)
    assert u == -1 and g == x2 - 2
    u, g = normalize(Poly.zero(X3))
    assert u == 1 and g.is_zero()
    # idempotence
    u2, g2 = normalize(g)
    assert u2 == 1 and g2 == g


def test_degree_bound():
    with pytest.raises(ResourceLimitError) as err:
        factorize(x1**13)
    assert "12" in str(err.value)


def test_zero_rejected():
    with pytest.raises(InvalidArgumentError):
        factorize(Poly.zero(X3))


def test_rational_coefficients():
    f = (x1 * Fraction(1, 2) + x2) * (x1 - x2 * Fraction(3, 4))
    fac = factorize(f)
    assert fac.expand() == f


def test_multiplicities():
    f = (x1 - x2) ** 3 * (x1 + x2 + 1) ** 2
    fac = factorize(f)
    assert sorted(m for _, m in fac.factors) == [2, 3]
    assert fac.expand() == f


def test_round_trip_random_products(rng):
    for _ in range(40):
        k = rng.randint(1, 3)
        prod = Poly.const(X3, Fraction(rng.choice([-2, -1, 1, 2, 3])))
        for _ in range(k):
            prod = prod * random_irreducible(rng)
        fac = factorize(prod)
        assert fac.expand() == prod


def test_idempotence_on_irreducible_factors(rng):
    for _ in range(10):
        p = random_irreducible(rng)
        _, g = normalize(p)
        fac = factorize(g)
        assert fac.unit == 1
        assert fac.factors == ((g, 1),)


def test_multiplicativity(rng):
    for _ in range(10):
        f = random_irreducible(rng, degree=2)
        g = random_irreducible(rng, degree=2)
        ff, fg, fp = factorize(f), factorize(g), factorize(f * g)
        assert fp.unit == ff.unit * fg.unit
        assert sorted(fp.factor_multiset(), key=lambda p: p.sort_key()) == sorted(
            ff.factor_multiset() + fg.factor_multiset(), key=lambda p: p.sort_key()
        )


def test_exact_division():
    f = (x1 + x2) * (x1 - x3) * 3
    assert poly_divide_exact(f, x1 + x2) == (x1 - x3) * 3
    assert poly_divide_exact(f, x1 + 1) is None


def test_univariate_path():
    f = (x3 - 1) * (x3 + 2) ** 2
    fac = factorize(f)
    assert fac.expand() == f
    assert sorted(m for _, m in fac.factors) == [1, 2]
