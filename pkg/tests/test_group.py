import math
import random
from collections import defaultdict
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from carnot.catalog import engel, heisenberg
from carnot.group import (
    GroupElement,
    adjoint,
    bch,
    conjugate,
    dilate_group,
    dynkin_coefficients,
    exp,
    identity,
    inverse,
    multiply,
    power_coords,
)
from carnot.hall import free_nilpotent
from carnot.lie_algebra import bracket, dilate_vector, random_vector
from carnot.linalg import Matrix, vadd, vscale

from conftest import rationals

H1 = heisenberg(1)


# Independent oracle: log(e^x e^y) in the truncated free associative algebra.
def _mul(a, b, cap):
    out = defaultdict(Fraction)
    for wa, ca in a.items():
        for wb, cb in b.items():
            if len(wa) + len(wb) <= cap:
                out[wa + wb] += ca * cb
    return {w: c for w, c in out.items() if c}


def _add(a, b, scale=1):
    out = defaultdict(Fraction, a)
    for w, c in b.items():
        out[w] += scale * c
    return {w: c for w, c in out.items() if c}


def _exp_letter(letter, cap):
    return {(letter,) * k: Fraction(1, math.factorial(k)) for k in range(cap + 1)}


def _log_one_plus(w, cap):
    out, power = {}, {(): Fraction(1)}
    for k in range(1, cap + 1):
        power = _mul(power, w, cap)
        out = _add(out, power, Fraction((-1) ** (k + 1), k))
    return out


def _nested_poly(word):
    poly = {(word[-1],): Fraction(1)}
    for letter in reversed(word[:-1]):
        left = {(letter,): Fraction(1)}
        poly = _add(_mul(left, poly, 99), _mul(poly, left, 99), -1)
    return poly


@pytest.mark.parametrize("cap", [2, 3, 4, 5])
def test_dynkin_words_reproduce_associative_log(cap):
    prod = _mul(_exp_letter(0, cap), _exp_letter(1, cap), cap)
    expected = _log_one_plus(_add(prod, {(): Fraction(1)}, -1), cap)
    got = {}
    for word, c in dynkin_coefficients(cap):
        got = _add(got, _nested_poly(word), c)
    assert got == expected


def test_bch_identity_element(catalog_algebra):
    rng = random.Random(1)
    x = random_vector(catalog_algebra, rng)
    zero = catalog_algebra.zero()
    assert bch(catalog_algebra, x, zero) == x
    assert bch(catalog_algebra, zero, x) == x


def test_heisenberg_closed_form_symbolic():
    xs, ys = sympy.symbols("x1:4"), sympy.symbols("y1:4")
    z = bch(H1, xs, ys)
    half_bracket = [sympy.Rational(1, 2) * c for c in bracket(H1, xs, ys)]
    expected = [a + b + c for a, b, c in zip(xs, ys, half_bracket)]
    assert all(sympy.expand(u - v) == 0 for u, v in zip(z, expected))


@pytest.mark.parametrize("alg", [engel(), free_nilpotent(2, 3)], ids=["engel", "free_2_3"])
def test_step3_terms(alg):
    rng = random.Random(2)
    for _ in range(30):
        x, y = random_vector(alg, rng), random_vector(alg, rng)
        xy = bracket(alg, x, y)
        expected = vadd(vadd(x, y), vscale(Fraction(1, 2), xy))
        expected = vadd(expected, vscale(Fraction(1, 12), bracket(alg, x, xy)))
        expected = vadd(expected, vscale(Fraction(1, 12), bracket(alg, y, bracket(alg, y, x))))
        assert bch(alg, x, y) == expected


def test_bch_associative(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(3)
    for _ in range(40):
        x, y, z = (random_vector(alg, rng) for _ in range(3))
        assert bch(alg, bch(alg, x, y), z) == bch(alg, x, bch(alg, y, z))


def test_bch_associative_step5():
    alg = free_nilpotent(2, 5)
    rng = random.Random(4)
    for _ in range(10):
        x, y, z = (random_vector(alg, rng) for _ in range(3))
        assert bch(alg, bch(alg, x, y), z) == bch(alg, x, bch(alg, y, z))


def test_group_axioms(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(5)
    for _ in range(10):
        g = exp(alg, random_vector(alg, rng))
        assert multiply(g, inverse(g)) == identity(alg)
        assert multiply(inverse(g), g) == identity(alg)
        assert multiply(g, g) == exp(alg, vscale(2, g.log_coords))
        assert inverse(g).log_coords == vscale(-1, g.log_coords)


def test_heisenberg_product_example():
    g = multiply(exp(H1, (1, 0, 0)), exp(H1, (0, 1, 0)))
    assert g.log_coords == (1, 1, Fraction(1, 2))


@pytest.mark.parametrize("p", [1, 2, 3, 5])
def test_powers_are_one_parameter(catalog_algebra, p):
    rng = random.Random(6)
    x = random_vector(catalog_algebra, rng)
    assert power_coords(catalog_algebra, x, p) == vscale(p, x)
    assert (exp(catalog_algebra, x) ** p).log_coords == vscale(p, x)


def test_dilate_group_examples():
    assert dilate_group(2, exp(H1, (0, 0, 1))) == exp(H1, (0, 0, 4))
    g = exp(H1, (Fraction(1, 3), 2, -1))
    assert dilate_group(1, g) == g


def test_dilation_is_homomorphism(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(7)
    for _ in range(20):
        g, h = exp(alg, random_vector(alg, rng)), exp(alg, random_vector(alg, rng))
        lam = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
        assert dilate_group(lam, g * h) == dilate_group(lam, g) * dilate_group(lam, h)


def test_adjoint_examples():
    assert adjoint(H1, H1.zero()) == Matrix.identity(3)
    assert adjoint(H1, (1, 0, 0)).apply((0, 1, 0)) == (0, 1, 1)


def test_adjoint_is_conjugation(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(8)
    for _ in range(15):
        x, y = random_vector(alg, rng, bound=2), random_vector(alg, rng, bound=2)
        assert adjoint(alg, x).apply(y) == conjugate(alg, x, y)
        assert adjoint(alg, x) @ adjoint(alg, vscale(-1, x)) == Matrix.identity(alg.dim)


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=4, max_size=4), st.lists(rationals, min_size=4, max_size=4), rationals)
def test_dilation_commutes_with_bch(x, y, lam):
    alg = engel()
    assert dilate_vector(alg, lam, bch(alg, x, y)) == bch(alg, dilate_vector(alg, lam, x), dilate_vector(alg, lam, y))


def test_algebra_mismatch():
    with pytest.raises(ValueError):
        multiply(identity(H1), identity(engel()))
    with pytest.raises(ValueError):
        GroupElement(H1, (1, 2))
