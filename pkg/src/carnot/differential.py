"""Exact left-trivialized differentials of exp, the multiexponential map and the endpoint map.

Every Jacobian pulls tangent vectors back to the Lie algebra through the
differential of left translation by the base point's image.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from fractions import Fraction

import numpy as np

from carnot.endpoint import PiecewiseConstantControl
from carnot.group import adjoint, bch
from carnot.lie_algebra import StratifiedAlgebra, ad_matrix, dilation_matrix
from carnot.linalg import Matrix, Vector, rank, vadd, vscale


def dexp_left(alg: StratifiedAlgebra, x: Sequence[Fraction]) -> Matrix:
    """exp(x)^-1 d exp(x)[.] = sum_k (-1)^k ad_x^k / (k+1)!, finite by nilpotency."""
    ad = ad_matrix(alg, x)
    out = Matrix.identity(alg.dim)
    term = Matrix.identity(alg.dim)
    for k in range(1, alg.step):
        term = (term @ ad).scale(Fraction(-1, k + 1))
        if term.is_zero():
            break
        out = out + term
    return out


def _horizontal_columns(alg: StratifiedAlgebra, m: Matrix) -> Matrix:
    return m.select_columns(range(alg.horizontal_dim))


def dmultiexp(alg: StratifiedAlgebra, tuple_: Sequence[Vector]) -> Matrix:
    """Jacobian of (Y_1..Y_p) -> exp(Y_p)...exp(Y_1), shape n x (p * d1).

    Block i is Ad_{P_{i-1}}^{-1} F(ad_{Y_i}) on horizontal directions, with
    P_{i-1} = exp(Y_{i-1})...exp(Y_1).
    """
    for y in tuple_:
        alg.check_horizontal(y)
    blocks = []
    prefix = alg.zero()
    for y in tuple_:
        ad_inv = adjoint(alg, vscale(-1, prefix))
        blocks.append(ad_inv @ _horizontal_columns(alg, dexp_left(alg, y)))
        prefix = bch(alg, y, prefix)
    return blocks[0].hstack(*blocks[1:])


def dendpoint(x: Vector, control: PiecewiseConstantControl) -> Matrix:
    """Jacobian of E_X with respect to the piece values of `control`.

    Column block i differentiates in the direction Y chi_{(t_{i-1}, t_i)}:
    Ad_{B_i}^{-1} F(ad_{D_i (X + V_i)}) D_i, where B_i is the product of the
    later flow factors.
    """
    alg = control.algebra
    alg.check_horizontal(x)
    steps = [vscale(d, vadd(x, v)) for d, v in zip(control.durations, control.values)]
    blocks = []
    suffix = alg.zero()
    for step, d in zip(reversed(steps), reversed(control.durations)):
        ad_inv = adjoint(alg, vscale(-1, suffix))
        block = (ad_inv @ _horizontal_columns(alg, dexp_left(alg, step))).scale(d)
        blocks.append(block)
        suffix = bch(alg, step, suffix)
    blocks.reverse()
    return blocks[0].hstack(*blocks[1:])


def dendpoint_pc(alg: StratifiedAlgebra, x: Vector, p: int) -> Matrix:
    """dE_X(0) restricted to controls constant on the uniform p-partition."""
    if p < 1:
        raise ValueError("partition size must be positive")
    return dendpoint(x, PiecewiseConstantControl.uniform(alg, [alg.zero()] * p))


def dilated_multiexp_blocks(alg: StratifiedAlgebra, x: Vector, p: int) -> Matrix:
    """(delta_{1/p})_* dGamma^(p)(X, ..., X), blocks reordered by time interval.

    Interval i of the partition drives the factor in slot p + 1 - i of the
    multiexponential map, so its block is taken from that slot.
    """
    d1 = alg.horizontal_dim
    jac = dilation_matrix(alg, Fraction(1, p)) @ dmultiexp(alg, [x] * p)
    order = [j for i in range(1, p + 1) for j in range((p - i) * d1, (p - i + 1) * d1)]
    return jac.select_columns(order)


def multiexp_rank(alg: StratifiedAlgebra, x: Vector, p: int) -> int:
    return rank(dmultiexp(alg, [x] * p))


def fd_jacobian(
    fn: Callable[[np.ndarray], np.ndarray], point: Sequence[float], h: float = 1e-5
) -> np.ndarray:
    """Central-difference Jacobian of fn at point."""
    if not h > 0:
        raise ValueError("step h must be positive")
    point = np.asarray(point, dtype=float)
    f0 = np.asarray(fn(point), dtype=float)
    jac = np.empty((f0.size, point.size))
    for j in range(point.size):
        e = np.zeros_like(point)
        e[j] = h
        col = (np.asarray(fn(point + e), float) - np.asarray(fn(point - e), float)) / (2 * h)
        jac[:, j] = col.ravel()
    if not np.all(np.isfinite(jac)):
        raise FloatingPointError("finite-difference Jacobian has nonfinite entries")
    return jac
