"""Free nilpotent Lie algebras via a Hall basis.

Hall elements are realized as Lie polynomials in the free associative
algebra; brackets of Hall elements are re-expanded in the Hall basis of the
target weight by exact linear solve.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

from sympy import divisors, mobius

from carnot.lie_algebra import StratifiedAlgebra
from carnot.linalg import Matrix, solve

DEFAULT_DIM_CAP = 200

# A Hall tree is either a generator index (int) or a pair (left, right).
HallTree = int | tuple


def witt_dimension(m: int, k: int) -> int:
    """Dimension of the degree-k part of the free Lie algebra on m generators."""
    return sum(int(mobius(d)) * m ** (k // d) for d in divisors(k)) // k


def hall_basis(m: int, s: int) -> list[list[HallTree]]:
    """Hall trees grouped by weight 1..s.

    Order: by weight, and within a weight by generation order. A pair
    ``(u, v)`` is basic when ``u > v`` and, if ``u = (u1, u2)``, ``u2 <= v``.
    """
    by_weight: list[list[HallTree]] = [list(range(m))]
    order: dict[HallTree, int] = {g: g for g in range(m)}
    for w in range(2, s + 1):
        layer = []
        for wu in range(w - 1, 0, -1):
            wv = w - wu
            for u in by_weight[wu - 1]:
                for v in by_weight[wv - 1]:
                    if order[u] <= order[v]:
                        continue
                    if isinstance(u, tuple) and order[u[1]] > order[v]:
                        continue
                    layer.append((u, v))
        for t in layer:
            order[t] = len(order)
        by_weight.append(layer)
    return by_weight


def _expand(tree: HallTree, cache: dict) -> dict[tuple[int, ...], int]:
    """Tree as a noncommutative polynomial {word: coefficient}."""
    if tree in cache:
        return cache[tree]
    if isinstance(tree, int):
        poly = {(tree,): 1}
    else:
        a, b = _expand(tree[0], cache), _expand(tree[1], cache)
        acc: dict[tuple[int, ...], int] = defaultdict(int)
        for wa, ca in a.items():
            for wb, cb in b.items():
                acc[wa + wb] += ca * cb
                acc[wb + wa] -= ca * cb
        poly = {w: c for w, c in acc.items() if c}
    cache[tree] = poly
    return poly


def _label(tree: HallTree) -> str:
    if isinstance(tree, int):
        return f"x{tree + 1}"
    return f"[{_label(tree[0])},{_label(tree[1])}]"


def free_nilpotent(m: int, s: int, dim_cap: int = DEFAULT_DIM_CAP) -> StratifiedAlgebra:
    """Free nilpotent Lie algebra of step s on m generators."""
    if m < 2:
        raise ValueError("free_nilpotent needs at least two generators")
    if s < 1:
        raise ValueError("step must be at least 1")
    dims = [witt_dimension(m, k) for k in range(1, s + 1)]
    if sum(dims) > dim_cap:
        raise ValueError(f"free_nilpotent({m}, {s}) has dimension {sum(dims)} > cap {dim_cap}")

    layers = hall_basis(m, s)
    assert [len(layer) for layer in layers] == dims
    flat = [t for layer in layers for t in layer]
    index = {t: i for i, t in enumerate(flat)}
    weight = {t: w + 1 for w, layer in enumerate(layers) for t in layer}
    cache: dict = {}

    # Per weight: coordinate system of words appearing in the Hall polynomials.
    solvers = {}
    for w, layer in enumerate(layers, start=1):
        polys = [_expand(t, cache) for t in layer]
        words = sorted({word for p in polys for word in p})
        mat = Matrix.from_columns([[p.get(word, 0) for word in words] for p in polys], len(words))
        solvers[w] = (words, mat, layer)

    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for i, a in enumerate(flat):
        for j in range(i + 1, len(flat)):
            b = flat[j]
            w = weight[a] + weight[b]
            if w > s:
                continue
            pa, pb = _expand(a, cache), _expand(b, cache)
            prod: dict[tuple[int, ...], int] = defaultdict(int)
            for wa, ca in pa.items():
                for wb, cb in pb.items():
                    prod[wa + wb] += ca * cb
                    prod[wb + wa] -= ca * cb
            if not any(prod.values()):
                continue
            words, mat, layer = solvers[w]
            rhs = [prod.get(word, 0) for word in words]
            stray = any(c and word not in words for word, c in prod.items())
            coeffs = None if stray else solve(mat, rhs)
            if coeffs is None:
                raise ArithmeticError(f"bracket of {_label(a)} and {_label(b)} escaped the Hall span")
            terms = {index[layer[k]]: c for k, c in enumerate(coeffs) if c}
            if terms:
                brackets[(i, j)] = terms
    return StratifiedAlgebra.from_brackets(
        dims, brackets, name=f"free_nilpotent({m},{s})", basis_labels=[_label(t) for t in flat]
    )
