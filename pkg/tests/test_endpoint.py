import random
from fractions import Fraction

import pytest

from carnot.catalog import heisenberg
from carnot.endpoint import PiecewiseConstantControl, endpoint, multiexp
from carnot.group import dilate_group, exp
from carnot.lie_algebra import NotHorizontalError, random_horizontal
from carnot.linalg import vscale

H1 = heisenberg(1)


def random_control(alg, rng, pieces=None):
    pieces = pieces or rng.randint(1, 4)
    cuts = sorted({Fraction(rng.randint(1, 23), 24) for _ in range(pieces - 1)})
    bps = (Fraction(0), *cuts, Fraction(1))
    vals = tuple(random_horizontal(alg, rng, nonzero=False) for _ in range(len(bps) - 1))
    return PiecewiseConstantControl(alg, bps, vals)


def split(control, tau):
    """Restrictions to [0, tau] and [tau, 1], each rescaled to [0, 1]."""
    c = control.refine(tau)
    k = c.breakpoints.index(tau)
    first = PiecewiseConstantControl(
        c.algebra, tuple(t / tau for t in c.breakpoints[: k + 1]), tuple(vscale(tau, v) for v in c.values[:k])
    )
    rest = 1 - tau
    second = PiecewiseConstantControl(
        c.algebra, tuple((t - tau) / rest for t in c.breakpoints[k:]), tuple(vscale(rest, v) for v in c.values[k:])
    )
    return first, second


def test_zero_control_gives_straight_line(catalog_algebra):
    rng = random.Random(1)
    x = random_horizontal(catalog_algebra, rng)
    assert endpoint(x, PiecewiseConstantControl.zero(catalog_algebra)) == exp(catalog_algebra, x)


def test_heisenberg_two_piece_example():
    control = PiecewiseConstantControl(H1, (0, Fraction(1, 2), 1), ((1, 0, 0), (0, 1, 0)))
    assert endpoint(H1.zero(), control).log_coords == (Fraction(1, 2), Fraction(1, 2), Fraction(1, 8))


def test_homogeneity(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(2)
    for _ in range(15):
        x, y = random_horizontal(alg, rng), random_control(alg, rng)
        lam = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        assert dilate_group(lam, endpoint(x, y)) == endpoint(vscale(lam, x), y.scaled(lam))


def test_multiexp_basic(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(3)
    y = random_horizontal(alg, rng)
    assert multiexp(alg, [y]) == exp(alg, y)
    for p in range(1, 5):
        assert multiexp(alg, [y] * p) == exp(alg, vscale(p, y))


def test_multiexp_puts_last_factor_on_the_left():
    e1, e2 = (1, 0, 0), (0, 1, 0)
    # exp(e2) exp(e1) = exp(e1 + e2 - 1/2 e3)
    assert multiexp(H1, [e1, e2]).log_coords == (1, 1, Fraction(-1, 2))


def test_multiexp_matches_dilated_endpoint(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(4)
    for _ in range(10):
        p = rng.randint(1, 5)
        ys = [random_horizontal(alg, rng, nonzero=False) for _ in range(p)]
        control = PiecewiseConstantControl.uniform(alg, list(reversed(ys)))
        assert multiexp(alg, ys) == dilate_group(p, endpoint(alg.zero(), control))


def test_concatenation(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(5)
    for _ in range(10):
        control = random_control(alg, rng)
        tau = Fraction(rng.randint(1, 9), 10)
        first, second = split(control, tau)
        zero = alg.zero()
        assert endpoint(zero, control) == endpoint(zero, first) * endpoint(zero, second)


def test_refinement_invariance(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(6)
    for _ in range(10):
        x, control = random_horizontal(alg, rng), random_control(alg, rng)
        t = Fraction(rng.randint(1, 30), 31)
        assert endpoint(x, control.refine(t)) == endpoint(x, control)


def test_control_validation():
    with pytest.raises(NotHorizontalError):
        PiecewiseConstantControl(H1, (0, 1), ((0, 0, 1),))
    with pytest.raises(ValueError):
        PiecewiseConstantControl(H1, (0, Fraction(1, 2), Fraction(1, 2), 1), ((1, 0, 0),) * 3)
    with pytest.raises(ValueError):
        PiecewiseConstantControl(H1, (0, Fraction(1, 2)), ((1, 0, 0),))
    with pytest.raises(NotHorizontalError):
        endpoint((0, 0, 1), PiecewiseConstantControl.zero(H1))
    with pytest.raises(NotHorizontalError):
        multiexp(H1, [(1, 0, 0), (0, 0, 1)])


def test_control_json_round_trip():
    rng = random.Random(7)
    control = random_control(H1, rng, pieces=3)
    pieces = [
        (Fraction(p["until"]["num"], p["until"]["den"]), [Fraction(v["num"], v["den"]) for v in p["value"]])
        for p in control.to_json()
    ]
    assert PiecewiseConstantControl.from_pieces(H1, pieces) == control
