"""Sun products, coefficient tables, triviality and spectral statements."""

import json
import pathlib
from fractions import Fraction

import pytest

from nambu_forge.errors import InvalidArgumentError, ResourceLimitError
from nambu_forge.numbers import falling_factorial
from nambu_forge.poly import NuObject, Poly, qp_space, su2_space
from nambu_forge.star import star_exponential, star_mul, su2_product
from nambu_forge.sun import (
    USUAL_PRODUCT,
    DiffOp,
    a_closed_form,
    a_recursion,
    apply_equivalence,
    big_a,
    eta_operator,
    fi_residual_sun,
    identity_series,
    quantized_nambu_sun,
    sun_closed_form,
    sun_coefficients,
    sun_exponential,
    sun_homogeneous_form,
    sun_lift,
    sun_moyal_standard,
    sun_mul,
    sun_su2,
    weak_leibniz_residual,
    weak_trivializer,
    z_coefficient,
)

from conftest import random_poly

GOLDEN = pathlib.Path(__file__).parent / "golden"
L = su2_space()
QP = qp_space()
L1, L2, L3 = (Poly.variable(L, i) for i in range(3))
SU = sun_su2()
MS = sun_moyal_standard()


def monomials_up_to(d):
    return [(a, b, c) for a in range(d + 1) for b in range(d + 1 - a) for c in range(d + 1 - a - b)]


# -- products ------------------------------------------------------------------


def test_su2_displays():
    assert sun_mul(SU, L1, L2) == NuObject.from_poly(L1 * L2)
    assert sun_mul(SU, L3, L3) == NuObject(L, {0: L3 * L3, 2: Poly.const(L, 2)})
    for i in range(3):
        for j in range(3):
            li, lj = Poly.variable(L, i), Poly.variable(L, j)
            expected = {0: li * lj}
            if i == j:
                expected[2] = Poly.const(L, 2)
            assert sun_mul(SU, li, lj) == NuObject(L, expected)


def test_ms_displays():
    q, p = Poly.variable(QP, 0), Poly.variable(QP, 1)
    assert sun_mul(MS, q, p) == NuObject(QP, {0: q * p, 1: Poly.const(QP, 1)})
    assert sun_mul(MS, q, q) == NuObject.from_poly(q * q)
    # matches q^a * p^b recombination on composite monomials
    assert sun_mul(MS, q * p, q) == star_mul(MS.star, q * q, p)


def test_sun_is_abelian_and_associative(rng):
    for sp, space in ((SU, L), (MS, QP)):
        for _ in range(6):
            f = random_poly(space, rng, degree=3, terms=3)
            g = random_poly(space, rng, degree=3, terms=3)
            h = random_poly(space, rng, degree=2, terms=2)
            assert sun_mul(sp, f, g) == sun_mul(sp, g, f)
            lhs = sun_mul(sp, sun_mul(sp, f, g), h)
            rhs = sun_mul(sp, f, sun_mul(sp, g, h))
            assert lhs == rhs


def test_sun_annihilates_nu_powers():
    x = NuObject(L, {0: L1, 1: L2})
    assert sun_mul(SU, x, L3) == sun_mul(SU, L1, L3)
    assert sun_mul(SU, NuObject(L, {1: L1}), L3).is_zero()


def test_sun_lift_not_order_preserving_invertible():
    # the evaluation map kills nu x1 while fixing 0: it has no formal inverse
    witness = NuObject(L, {1: L1})
    assert sun_lift(SU, witness).is_zero()
    assert not witness.is_zero()


def test_symmetrization_bound():
    sp = sun_moyal_standard()
    # the MS split has no closed-form fallback: high degrees must not be
    # silently accepted for the coordinate-monomial kind on other stars
    from nambu_forge.star import partial_moyal_product
    from nambu_forge.sun import SunProduct
    from nambu_forge.zariski import zariski_space, zariski_star

    cm = SunProduct(zariski_star(3), "coordinate_monomial")
    x1 = Poly.variable(cm.space, 0)
    with pytest.raises(ResourceLimitError):
        sun_lift(cm, x1**8)


# -- coefficient tables ----------------------------------------------------------


def test_base_cases():
    for n in range(11):
        assert a_recursion(n, 0) == 1
    for r in range(6):
        assert a_recursion(0, r) == 1


def test_pinned_value():
    assert a_recursion(2, 1) == 1
    assert a_closed_form(2, 1) == 1


def test_tables_agree():
    table = sun_coefficients(10, 5)
    assert table.agree()
    assert table.gamma[0] == 1 and table.tau[0] == 1


def test_closed_form_domain():
    with pytest.raises(InvalidArgumentError):
        a_closed_form(1, 1)


def test_theorem_coefficient_identity():
    # a(m, r) = A_r + sum_p z_{p,r} ff(m - 2r, p): ties the z-table to the
    # recursion on homogeneous degrees
    for r in range(1, 5):
        for m in range(2 * r, 11):
            expect = big_a(r) + sum(
                z_coefficient(p, r) * falling_factorial(m - 2 * r, p) for p in range(1, r + 1)
            )
            assert a_recursion(m, r) == expect, (m, r)


def test_su2_diagonal_pins_a21():
    # L3 sun L3 = L3^2 + nu^2 a(2,1) Delta(L3^2) requires a(2,1) = 1
    got = sun_mul(SU, L3, L3).coefficient(2)
    assert got == Poly.const(L, 2)
    assert a_recursion(2, 1) * 2 == 2


# -- closed form -----------------------------------------------------------------


def test_closed_form_equals_brute_on_monomials():
    for m1 in monomials_up_to(3):
        for m2 in monomials_up_to(3):
            if sum(m1) + sum(m2) > 3:
                continue
            f, g = Poly.monomial(L, m1), Poly.monomial(L, m2)
            assert sun_mul(SU, f, g) == sun_closed_form(f, g), (m1, m2)


def test_closed_form_inhomogeneous(rng):
    for _ in range(5):
        f = random_poly(L, rng, degree=3, terms=3)
        g = random_poly(L, rng, degree=2, terms=3)
        assert sun_closed_form(f, g) == sun_mul(SU, f, g)


def test_homogeneous_display(rng):
    f = L1 * L1 + L2 * L3
    g = L2 * L2 - L1 * L3
    assert sun_homogeneous_form(f, g) == sun_mul(SU, f, g)
    with pytest.raises(InvalidArgumentError):
        sun_homogeneous_form(L1 + L2 * L2, L3)


def test_eta_operator_shape():
    op = eta_operator(1)
    # on degree-2 homogeneous input: (A_1 + z_11 D) Delta = a(4,1)-type action
    f = L1 * L2
    assert op.apply(f).is_zero()  # Delta kills L1 L2
    g = L3 * L3
    assert op.apply(g) == Poly.const(L, 2)


# -- quantized Nambu bracket ------------------------------------------------------


def test_quantized_bracket_examples():
    assert quantized_nambu_sun(L1, L2, L3, SU) == NuObject.one(L)
    assert quantized_nambu_sun(L1 * L1, L2, L3, SU) == NuObject.from_poly(2 * L1)
    f = L1 * L1 + L2
    assert quantized_nambu_sun(f, f, L3, SU).is_zero()


def test_quantized_bracket_fi(rng):
    for _ in range(4):
        fs = [random_poly(L, rng, degree=2, terms=3) for _ in range(5)]
        assert fi_residual_sun(SU, fs).is_zero()


def test_weak_leibniz(rng):
    for _ in range(4):
        f, g, h = (random_poly(L, rng, degree=2, terms=3) for _ in range(3))
        for axis in range(3):
            assert weak_leibniz_residual(SU, f, g, h, axis).is_zero()


# -- equivalence and triviality -----------------------------------------------------


def test_identity_series_reflexive(rng):
    s = identity_series(L)
    for _ in range(4):
        f = random_poly(L, rng, degree=2, terms=2)
        g = random_poly(L, rng, degree=2, terms=2)
        assert apply_equivalence(s, "A", SU, SU, f, g, 6).is_zero()
        assert apply_equivalence(s, "B", SU, SU, f, g, 6).is_zero()
        assert apply_equivalence(s, "B", USUAL_PRODUCT, USUAL_PRODUCT, f, g, 6).is_zero()


def test_weak_trivializer(rng):
    s = weak_trivializer(3)
    for _ in range(6):
        f = random_poly(L, rng, degree=3, terms=3)
        g = random_poly(L, rng, degree=3, terms=3)
        residual = apply_equivalence(s, "B", USUAL_PRODUCT, SU, f, g, 6)
        assert residual.is_zero(), str(residual)


def test_strong_triviality_refuted():
    # the direct criterion: the product differs from the usual one at nu^2
    diff = sun_mul(SU, L3, L3) - NuObject.from_poly(L3 * L3)
    assert diff == NuObject(L, {2: Poly.const(L, 2)})
    resA = apply_equivalence(identity_series(L), "A", SU, USUAL_PRODUCT, L3, L3, 4)
    assert resA.coefficient(2) == Poly.const(L, 2)


def test_ms_is_weakly_nontrivial_at_nu1():
    q, p = Poly.variable(QP, 0), Poly.variable(QP, 1)
    diff = sun_mul(MS, q, p) - NuObject.from_poly(q * p)
    assert diff == NuObject(QP, {1: Poly.const(QP, 1)})


# -- exponentials -----------------------------------------------------------------


def test_exponential_coincides_for_linear():
    e_sun = sun_exponential(SU, L3, 6)
    e_star = star_exponential(su2_product(), L3, 6)
    for r in range(7):
        assert e_sun.coefficient(r) == e_star.coefficient(r)


def test_exponential_differs_for_h1_golden():
    golden = json.loads((GOLDEN / "sun_exp_h1_divergence.json").read_text())
    h1 = (L1 * L1 + L2 * L2 + L3 * L3) * Fraction(1, 2)
    e_sun = sun_exponential(SU, h1, 6)
    e_star = star_exponential(su2_product(), h1, 6)
    first = next(
        (r for r in range(7) if e_sun.coefficient(r) != e_star.coefficient(r)), None
    )
    assert first == golden["first_differing_t_order"]
