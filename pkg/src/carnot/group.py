"""Carnot group law in exponential coordinates of the first kind."""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from carnot.lie_algebra import StratifiedAlgebra, ad_matrix, bracket, dilate_vector, format_vector
from carnot.linalg import Matrix, Vector, vscale


def _blocks(total: int, n: int):
    """Sequences of n pairs (r, s) with r + s >= 1 and sum of all entries = total."""
    if n == 0:
        if total == 0:
            yield ()
        return
    for size in range(1, total - (n - 1) + 1):
        for r in range(size + 1):
            for rest in _blocks(total - size, n - 1):
                yield ((r, size - r),) + rest


@lru_cache(maxsize=None)
def dynkin_coefficients(max_weight: int) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    """Dynkin series of log(e^x e^y) as right-nested bracket words.

    Returns ``(word, coefficient)`` with letters 0 = x and 1 = y; the word
    ``(a1, ..., am)`` stands for ``[a1, [a2, [..., am]]]``. Words whose
    nested bracket vanishes identically (last two letters equal) are dropped.
    """
    acc: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    for weight in range(1, max_weight + 1):
        for n in range(1, weight + 1):
            sign = Fraction((-1) ** (n - 1), n)
            for blocks in _blocks(weight, n):
                denom = weight
                word: list[int] = []
                for r, s in blocks:
                    denom *= math.factorial(r) * math.factorial(s)
                    word.extend([0] * r + [1] * s)
                acc[tuple(word)] += sign / denom
    out = []
    for word, c in sorted(acc.items(), key=lambda wc: (len(wc[0]), wc[0])):
        if not c:
            continue
        if len(word) >= 2 and word[-1] == word[-2]:
            continue
        out.append((word, c))
    return tuple(out)


def bch(alg: StratifiedAlgebra, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vector:
    """z with exp(z) = exp(x) exp(y), Dynkin series truncated at the step."""
    alg.check_vector(x)
    alg.check_vector(y)
    x, y = tuple(x), tuple(y)
    if not any(x):
        return y
    if not any(y):
        return x
    letters = (x, y)
    suffix: dict[tuple[int, ...], Vector] = {}

    def nested(word: tuple[int, ...]) -> Vector:
        if word in suffix:
            return suffix[word]
        if len(word) == 1:
            val = letters[word[0]]
        else:
            tail = nested(word[1:])
            val = bracket(alg, letters[word[0]], tail) if any(tail) else tail
        suffix[word] = val
        return val

    out = [Fraction(0)] * alg.dim
    for word, c in dynkin_coefficients(alg.step):
        term = nested(word)
        for k, t in enumerate(term):
            if t:
                out[k] += c * t
    return tuple(out)


@dataclass(frozen=True)
class GroupElement:
    """exp(log_coords) in the simply connected group of `algebra`."""

    algebra: StratifiedAlgebra
    log_coords: Vector

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.log_coords)
        self.algebra.check_vector(coords)
        object.__setattr__(self, "log_coords", coords)

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)

    def __pow__(self, p: int) -> GroupElement:
        if p < 0:
            return inverse(self) ** (-p)
        out = identity(self.algebra)
        for _ in range(p):
            out = multiply(out, self)
        return out

    def __repr__(self) -> str:
        return f"exp{format_vector(self.log_coords)}"


def exp(alg: StratifiedAlgebra, x: Sequence[Fraction]) -> GroupElement:
    return GroupElement(alg, tuple(x))


def log(g: GroupElement) -> Vector:
    return g.log_coords


def identity(alg: StratifiedAlgebra) -> GroupElement:
    return GroupElement(alg, alg.zero())


def _same_algebra(g: GroupElement, h: GroupElement) -> None:
    if g.algebra != h.algebra:
        raise ValueError(f"group elements from different algebras: {g.algebra.name!r} vs {h.algebra.name!r}")


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    _same_algebra(g, h)
    return GroupElement(g.algebra, bch(g.algebra, g.log_coords, h.log_coords))


def product(alg: StratifiedAlgebra, factors: Sequence[GroupElement]) -> GroupElement:
    """Left-to-right product of the factors."""
    acc = alg.zero()
    for f in factors:
        acc = bch(alg, acc, f.log_coords)
    return GroupElement(alg, acc)


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.algebra, vscale(-1, g.log_coords))


def dilate_group(lam, g: GroupElement) -> GroupElement:
    return GroupElement(g.algebra, dilate_vector(g.algebra, lam, g.log_coords))


def exp_series(m: Matrix, order: int) -> Matrix:
    """sum_{k < order} m^k / k! for a nilpotent matrix m."""
    out = Matrix.identity(m.nrows)
    term = Matrix.identity(m.nrows)
    for k in range(1, order):
        term = (term @ m).scale(Fraction(1, k))
        if term.is_zero():
            break
        out = out + term
    return out


def adjoint(alg: StratifiedAlgebra, x: Sequence[Fraction]) -> Matrix:
    """Matrix of Ad_{exp(x)} = e^{ad_x}; the series stops at the step."""
    return exp_series(ad_matrix(alg, x), alg.step)


def conjugate(alg: StratifiedAlgebra, x: Vector, y: Vector) -> Vector:
    """log(exp(x) exp(y) exp(-x))."""
    return bch(alg, bch(alg, x, y), vscale(-1, x))


def power_coords(alg: StratifiedAlgebra, x: Vector, p: int) -> Vector:
    acc = alg.zero()
    for _ in range(p):
        acc = bch(alg, acc, x)
    return acc

