"""Numerical evidence for openness of the multiexponential map at a diagonal tuple.

This is a heuristic. Openness at a critical point has no rank certificate,
so a score of 1.0 here is evidence, never proof.

Images are left-translated back to the identity and measured in
homogeneous coordinates: a layer-k coordinate is divided by r**k, so the
target box ``|z_k| <= r**layer(k)`` becomes the cube [-1, 1]^n. The cube
is cut into ``resolution**n`` cells; a cell counts as covered when some
admissible tuple maps into it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from carnot.lie_algebra import StratifiedAlgebra
from carnot.linalg import Vector
from carnot.numeric import fbch, fmultiexp

MAX_CELLS = 4096


@dataclass(frozen=True)
class ProbeConfig:
    p: int = 2
    eta: float = 0.1
    resolution: int = 2
    box: float | None = None  # homogeneous box radius, default eta / 8
    samples: int = 4000
    seed: int = 0
    refine: bool = True
    restarts: int = 2
    max_iter: int = 25

    def validate(self) -> None:
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        if self.box is not None and not self.box > 0:
            raise ValueError("box radius must be positive")
        if self.samples < 1:
            raise ValueError("samples must be positive")

    @property
    def radius(self) -> float:
        return self.box if self.box is not None else self.eta / 8


@dataclass
class ProbeResult:
    score: float
    covered: int
    cells: int
    samples: int
    box: float
    seed: int
    heuristic: bool = True
    label: str = "heuristic evidence for openness, not a proof"
    uncovered: list[list[int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "covered": self.covered,
            "cells": self.cells,
            "samples": self.samples,
            "box": self.box,
            "seed": self.seed,
            "heuristic": self.heuristic,
            "label": self.label,
        }


def _ball(rng: np.random.Generator, count: int, dim: int, radius: float) -> np.ndarray:
    g = rng.standard_normal((count, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * radius * rng.random((count, 1)) ** (1.0 / dim)


def _gauss_newton(fn, target: np.ndarray, v: np.ndarray, bound: float, iters: int, h: float = 1e-7) -> np.ndarray:
    """Minimum-norm Gauss-Newton steps toward fn(v) = target, clipped to the box."""
    best, best_err = v, np.inf
    for _ in range(iters):
        f = fn(v)
        err = np.max(np.abs(f - target))
        if err < best_err:
            best, best_err = v, err
        if err < 1e-9:
            break
        jac = np.empty((f.size, v.size))
        for j in range(v.size):
            e = np.zeros_like(v)
            e[j] = h
            jac[:, j] = (fn(v + e) - fn(v - e)) / (2 * h)
        step = np.linalg.lstsq(jac, target - f, rcond=None)[0]
        v = np.clip(v + step, -bound, bound)
    return best


def probe_h(alg: StratifiedAlgebra, x: Vector, config: ProbeConfig = ProbeConfig()) -> ProbeResult:
    config.validate()
    alg.check_horizontal(x)
    n, d1, p = alg.dim, alg.horizontal_dim, config.p
    cells = config.resolution**n
    if cells > MAX_CELLS:
        raise ValueError(f"{cells} grid cells exceeds the cap {MAX_CELLS}; lower the resolution")

    r = config.radius
    scale = np.array([r**layer for layer in alg.layer_of])
    xf = np.array([float(c) for c in x])
    base = fmultiexp(alg, [xf] * p)
    pad = np.zeros(n - d1)

    def homogeneous(u: np.ndarray) -> np.ndarray:
        # u has shape (..., p, d1): perturbations of the p factors.
        factors = [xf + np.concatenate([u[..., i, :], np.broadcast_to(pad, u.shape[:-2] + pad.shape)], axis=-1)
                   for i in range(p)]
        return fbch(alg, -base, fmultiexp(alg, factors)) / scale

    def cell_of(z: np.ndarray) -> np.ndarray:
        idx = np.floor((z + 1) / 2 * config.resolution).astype(int)
        inside = np.all((z >= -1) & (z <= 1), axis=-1)
        return np.where(inside[..., None], np.clip(idx, 0, config.resolution - 1), -1)

    rng = np.random.default_rng(config.seed)
    u = _ball(rng, config.samples * p, d1, config.eta).reshape(config.samples, p, d1)
    z = homogeneous(u)
    hit = {tuple(c) for c in cell_of(z) if c[0] >= 0}

    if config.refine:
        # Per-coordinate bound eta/sqrt(d1) keeps every factor inside the eta-ball.
        bound = config.eta / np.sqrt(d1) * (1 - 1e-9)
        flat_u = u.reshape(config.samples, -1)
        for cell in itertools.product(range(config.resolution), repeat=n):
            if cell in hit:
                continue
            target = (np.array(cell) + 0.5) / config.resolution * 2 - 1
            order = np.argsort(np.linalg.norm(z - target, axis=1))
            starts = [np.zeros(p * d1)] + [flat_u[k] for k in order[: config.restarts]]
            for start in starts:
                v = _gauss_newton(lambda w: homogeneous(w.reshape(p, d1)), target, np.clip(start, -bound, bound), bound,
                                  config.max_iter)
                c = cell_of(homogeneous(v.reshape(p, d1)))
                if c[0] >= 0:
                    hit.add(tuple(c))
                if cell in hit:
                    break

    covered = len(hit)
    uncovered = [list(c) for c in itertools.product(range(config.resolution), repeat=n) if c not in hit]
    return ProbeResult(covered / cells, covered, cells, config.samples, r, config.seed, uncovered=uncovered)
