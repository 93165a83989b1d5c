"""Floating-point group law, used only by finite-difference oracles and the (H) probe."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from carnot.group import dynkin_coefficients
from carnot.lie_algebra import StratifiedAlgebra


def fbracket(tensor: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched bracket; a and b have shape (..., n)."""
    return np.einsum("...i,...j,ijk->...k", a, b, tensor)


def fbch(alg: StratifiedAlgebra, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    tensor = alg.structure_tensor
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    letters = (x, y)
    suffix: dict[tuple[int, ...], np.ndarray] = {}

    def nested(word):
        if word not in suffix:
            if len(word) == 1:
                suffix[word] = letters[word[0]]
            else:
                suffix[word] = fbracket(tensor, letters[word[0]], nested(word[1:]))
        return suffix[word]

    out = np.zeros_like(x)
    for word, c in dynkin_coefficients(alg.step):
        out = out + float(c) * nested(word)
    return out


def fmultiexp(alg: StratifiedAlgebra, factors: Sequence[np.ndarray]) -> np.ndarray:
    """log(exp(Y_p) ... exp(Y_1)) for float vectors in the full algebra."""
    acc = np.zeros_like(np.asarray(factors[0], float))
    for y in reversed(factors):
        acc = fbch(alg, acc, y)
    return acc


def fendpoint(alg: StratifiedAlgebra, x: np.ndarray, durations: Sequence[float], values: Sequence[np.ndarray]) -> np.ndarray:
    acc = np.zeros(alg.dim)
    for d, v in zip(durations, values):
        acc = fbch(alg, acc, d * (np.asarray(x, float) + np.asarray(v, float)))
    return acc


def left_difference(alg: StratifiedAlgebra, base: np.ndarray, g: np.ndarray) -> np.ndarray:
    """log(exp(base)^-1 exp(g))."""
    return fbch(alg, -np.asarray(base, float), g)
