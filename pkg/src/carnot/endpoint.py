"""Endpoint map on piecewise-constant horizontal controls and the multiexponential map.

Left-invariant dynamics integrate to right products in time order:
a control equal to V_i on (t_{i-1}, t_i) ends at
exp(D_1 V_1) exp(D_2 V_2) ... exp(D_p V_p), with D_i = t_i - t_{i-1}.
The multiexponential map puts its last argument on the left:
multiexp(Y_1, ..., Y_p) = exp(Y_p) ... exp(Y_1).
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from carnot.group import GroupElement, bch
from carnot.lie_algebra import StratifiedAlgebra, vector_json
from carnot.linalg import Vector, vadd, vscale


@dataclass(frozen=True)
class PiecewiseConstantControl:
    """Horizontal control on [0, 1] with rational breakpoints.

    ``values[i]`` is the value on ``(breakpoints[i], breakpoints[i + 1])``.
    """

    algebra: StratifiedAlgebra
    breakpoints: tuple[Fraction, ...]
    values: tuple[Vector, ...]

    def __post_init__(self):
        bps = tuple(Fraction(t) for t in self.breakpoints)
        vals = tuple(tuple(Fraction(x) for x in v) for v in self.values)
        if len(vals) < 1:
            raise ValueError("a control needs at least one piece")
        if len(bps) != len(vals) + 1:
            raise ValueError(f"{len(bps)} breakpoints for {len(vals)} pieces")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        for v in vals:
            self.algebra.check_horizontal(v)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    @classmethod
    def uniform(cls, alg: StratifiedAlgebra, values: Sequence[Vector]) -> PiecewiseConstantControl:
        p = len(values)
        return cls(alg, tuple(Fraction(i, p) for i in range(p + 1)), tuple(values))

    @classmethod
    def constant(cls, alg: StratifiedAlgebra, value: Vector) -> PiecewiseConstantControl:
        return cls(alg, (Fraction(0), Fraction(1)), (tuple(value),))

    @classmethod
    def zero(cls, alg: StratifiedAlgebra) -> PiecewiseConstantControl:
        return cls.constant(alg, alg.zero())

    @property
    def pieces(self) -> int:
        return len(self.values)

    @property
    def durations(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.breakpoints, self.breakpoints[1:]))

    def scaled(self, lam) -> PiecewiseConstantControl:
        return PiecewiseConstantControl(self.algebra, self.breakpoints, tuple(vscale(lam, v) for v in self.values))

    def refine(self, t) -> PiecewiseConstantControl:
        """Insert a breakpoint at t without changing the control."""
        t = Fraction(t)
        if t in self.breakpoints:
            return self
        if not 0 < t < 1:
            raise ValueError("refinement point must lie in (0, 1)")
        i = next(k for k, b in enumerate(self.breakpoints) if b > t)
        bps = self.breakpoints[:i] + (t,) + self.breakpoints[i:]
        vals = self.values[:i] + (self.values[i - 1],) + self.values[i:]
        return PiecewiseConstantControl(self.algebra, bps, vals)

    def to_json(self) -> list[dict]:
        return [
            {"until": {"num": t.numerator, "den": t.denominator}, "value": vector_json(v[: self.algebra.horizontal_dim])}
            for t, v in zip(self.breakpoints[1:], self.values)
        ]

    @classmethod
    def from_pieces(cls, alg: StratifiedAlgebra, pieces: Sequence[tuple[object, Sequence]]) -> PiecewiseConstantControl:
        """Build from ``[(until, layer-1 coordinates), ...]`` as in the CLI format."""
        bps = [Fraction(0)] + [Fraction(until) for until, _ in pieces]
        vals = [alg.horizontal(v) for _, v in pieces]
        return cls(alg, tuple(bps), tuple(vals))


def _flow_product(alg: StratifiedAlgebra, steps: Sequence[Vector]) -> Vector:
    acc = alg.zero()
    for v in steps:
        acc = bch(alg, acc, v)
    return acc


def endpoint(x: Vector, control: PiecewiseConstantControl) -> GroupElement:
    """E_X(Y): endpoint of the control X + Y started at the identity."""
    alg = control.algebra
    alg.check_horizontal(x)
    steps = [vscale(d, vadd(x, v)) for d, v in zip(control.durations, control.values)]
    return GroupElement(alg, _flow_product(alg, steps))


def multiexp(alg: StratifiedAlgebra, tuple_: Sequence[Vector]) -> GroupElement:
    """exp(Y_p) ... exp(Y_1) for horizontal Y_1, ..., Y_p."""
    if not tuple_:
        raise ValueError("multiexp needs at least one vector")
    for y in tuple_:
        alg.check_horizontal(y)
    return GroupElement(alg, _flow_product(alg, list(reversed(tuple_))))
