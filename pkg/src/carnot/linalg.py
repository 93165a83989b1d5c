"""Exact rational matrices and Gaussian elimination."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from fractions import Fraction

import numpy as np

Vector = tuple[Fraction, ...]


def as_vector(values: Iterable) -> Vector:
    return tuple(Fraction(v) for v in values)


def zeros(n: int) -> Vector:
    return (Fraction(0),) * n


def vadd(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vsub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vscale(c, a: Sequence[Fraction]) -> Vector:
    c = Fraction(c)
    return tuple(c * x for x in a)


class Matrix:
    """Dense matrix with exact rational entries.

    Instances are immutable; arithmetic returns new matrices.
    """

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        self.rows: tuple[Vector, ...] = tuple(as_vector(r) for r in rows)
        self.nrows = len(self.rows)
        if ncols is None:
            if not self.rows:
                raise ValueError("ncols required for a matrix without rows")
            ncols = len(self.rows[0])
        self.ncols = ncols
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged rows")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Matrix:
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def diagonal(cls, entries: Sequence) -> Matrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> Matrix:
        return cls([[c[i] for c in columns] for i in range(nrows)], len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self.rows[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}: [{body}])"

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> Matrix:
        return Matrix(self.columns(), self.nrows)

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix((vadd(a, b) for a, b in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix((vsub(a, b) for a, b in zip(self.rows, other.rows)), self.ncols)

    def __neg__(self) -> Matrix:
        return self.scale(-1)

    def scale(self, c) -> Matrix:
        return Matrix((vscale(c, r) for r in self.rows), self.ncols)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        out = []
        for r in self.rows:
            nz = [(k, x) for k, x in enumerate(r) if x]
            out.append([sum((x * c[k] for k, x in nz), Fraction(0)) for c in cols])
        return Matrix(out, other.ncols)

    def apply(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for {self.shape} matrix")
        nz = [(k, x) for k, x in enumerate(v) if x]
        return tuple(sum((r[k] * x for k, x in nz), Fraction(0)) for r in self.rows)

    def hstack(self, *others: Matrix) -> Matrix:
        rows = [list(r) for r in self.rows]
        ncols = self.ncols
        for m in others:
            if m.nrows != self.nrows:
                raise ValueError("row count mismatch in hstack")
            for acc, r in zip(rows, m.rows):
                acc.extend(r)
            ncols += m.ncols
        return Matrix(rows, ncols)

    def select_columns(self, idx: Sequence[int]) -> Matrix:
        return Matrix(([r[j] for j in idx] for r in self.rows), len(idx))

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def power(self, k: int) -> Matrix:
        out = Matrix.identity(self.nrows)
        for _ in range(k):
            out = out @ self
        return out

    def rank(self) -> int:
        return rank(self)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows], dtype=float).reshape(
            self.nrows, self.ncols
        )


def row_echelon(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of `rows` and its pivot columns."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(m: Matrix | Sequence[Sequence[Fraction]]) -> int:
    """Exact rank by Gaussian elimination. No tolerance is involved."""
    rows = m.rows if isinstance(m, Matrix) else m
    return len(row_echelon(rows)[1])


def span_rank(vectors: Iterable[Sequence[Fraction]]) -> int:
    vecs = [v for v in vectors]
    return rank(vecs) if vecs else 0


def solve(a: Matrix, b: Sequence[Fraction]) -> Vector | None:
    """One exact solution x of a x = b, or None if inconsistent."""
    aug = [list(r) + [Fraction(bi)] for r, bi in zip(a.rows, b)]
    red, pivots = row_echelon(aug)
    if pivots and pivots[-1] == a.ncols:
        return None
    x = [Fraction(0)] * a.ncols
    for row, c in zip(red, pivots):
        x[c] = row[-1]
    return tuple(x)


def nullspace(a: Matrix) -> list[Vector]:
    """Basis of the right kernel of `a`."""
    red, pivots = row_echelon(a.rows)
    free = [c for c in range(a.ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * a.ncols
        x[f] = Fraction(1)
        for row, c in zip(red, pivots):
            x[c] = -row[f]
        basis.append(tuple(x))
    return basis


def inverse(a: Matrix) -> Matrix:
    n = a.nrows
    if a.ncols != n:
        raise ValueError("inverse of a non-square matrix")
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a.rows)]
    red, pivots = row_echelon(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ValueError("matrix is singular")
    return Matrix((row[n:] for row in red), n)
