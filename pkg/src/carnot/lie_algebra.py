"""Stratified nilpotent Lie algebras given by structure constants.

Basis vectors are ordered layer by layer. Structure constants are stored
sparsely as ``(i, j, k) -> c`` meaning ``[e_i, e_j] = sum_k c e_k``; when only
the ``(i, j)`` entry is stored, ``(j, i)`` is read as its negative.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from carnot.linalg import Matrix, Vector, as_vector, span_rank, zeros


class DimensionError(ValueError):
    """A vector does not live in the algebra it was paired with."""


class NotHorizontalError(ValueError):
    """A vector expected in the first layer has higher-layer components."""


@dataclass(frozen=True)
class StratifiedAlgebra:
    layer_dims: tuple[int, ...]
    constants: tuple[tuple[tuple[int, int, int], Fraction], ...]
    name: str = ""
    basis_labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "layer_dims", tuple(int(d) for d in self.layer_dims))
        consts = tuple(
            sorted(((tuple(int(x) for x in key), Fraction(c)) for key, c in self.constants if c))
        )
        object.__setattr__(self, "constants", consts)
        if not self.basis_labels:
            labels = tuple(f"e{k + 1}" for k in range(sum(self.layer_dims)))
            object.__setattr__(self, "basis_labels", labels)
        else:
            object.__setattr__(self, "basis_labels", tuple(self.basis_labels))

    @classmethod
    def from_brackets(
        cls,
        layer_dims: Sequence[int],
        brackets: Mapping[tuple[int, int], Mapping[int, object]],
        name: str = "",
        basis_labels: Sequence[str] = (),
    ) -> StratifiedAlgebra:
        """Build from canonical 0-based entries ``{(i, j): {k: c}}`` with ``i < j``."""
        entries = []
        for (i, j), terms in brackets.items():
            if i >= j:
                raise ValueError(f"bracket entry ({i}, {j}) is not in i<j canonical form")
            entries.extend(((i, j, k), Fraction(c)) for k, c in terms.items())
        return cls(tuple(layer_dims), tuple(entries), name, tuple(basis_labels))

    @property
    def step(self) -> int:
        return len(self.layer_dims)

    @property
    def dim(self) -> int:
        return sum(self.layer_dims)

    @property
    def horizontal_dim(self) -> int:
        return self.layer_dims[0]

    @cached_property
    def layer_of(self) -> tuple[int, ...]:
        """1-based layer index of every basis vector."""
        return tuple(k + 1 for k, d in enumerate(self.layer_dims) for _ in range(d))

    def layer_indices(self, layer: int) -> range:
        start = sum(self.layer_dims[: layer - 1])
        return range(start, start + self.layer_dims[layer - 1])

    @cached_property
    def _stored(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        out: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j, k), c in self.constants:
            out.setdefault((i, j), {})[k] = c
        return out

    def structure_constant(self, i: int, j: int, k: int) -> Fraction:
        stored = self._stored
        if (i, j) in stored:
            return stored[(i, j)].get(k, Fraction(0))
        if (j, i) in stored:
            return -stored[(j, i)].get(k, Fraction(0))
        return Fraction(0)

    @cached_property
    def _table(self) -> dict[tuple[int, int], tuple[tuple[int, Fraction], ...]]:
        # Full read-side table, antisymmetry synthesized for pairs stored one way.
        table = {}
        for (i, j), terms in self._stored.items():
            table[(i, j)] = tuple(sorted(terms.items()))
            if (j, i) not in self._stored:
                table[(j, i)] = tuple((k, -c) for k, c in sorted(terms.items()))
        return table

    def basis_vector(self, k: int) -> Vector:
        v = [Fraction(0)] * self.dim
        v[k] = Fraction(1)
        return tuple(v)

    def vector(self, values: Iterable) -> Vector:
        v = as_vector(values)
        self.check_vector(v)
        return v

    def horizontal(self, values: Iterable) -> Vector:
        """Embed first-layer coordinates into the full algebra."""
        vals = as_vector(values)
        if len(vals) != self.horizontal_dim:
            raise DimensionError(f"expected {self.horizontal_dim} horizontal coordinates, got {len(vals)}")
        return vals + zeros(self.dim - self.horizontal_dim)

    def zero(self) -> Vector:
        return zeros(self.dim)

    def check_vector(self, v: Sequence) -> None:
        if len(v) != self.dim:
            raise DimensionError(f"vector of length {len(v)} in algebra of dimension {self.dim}")

    def is_horizontal(self, v: Sequence) -> bool:
        self.check_vector(v)
        return not any(v[self.horizontal_dim :])

    def check_horizontal(self, v: Sequence) -> None:
        if not self.is_horizontal(v):
            raise NotHorizontalError(f"vector {format_vector(v)} is not supported on the first layer")

    @cached_property
    def structure_tensor(self) -> np.ndarray:
        """Float array ``C[i, j, k]`` for the numerical probe."""
        t = np.zeros((self.dim, self.dim, self.dim))
        for (i, j), terms in self._table.items():
            for k, c in terms:
                t[i, j, k] = float(c)
        return t


def bracket(alg: StratifiedAlgebra, a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    alg.check_vector(a)
    alg.check_vector(b)
    out = [Fraction(0)] * alg.dim
    table = alg._table
    nz_b = [(j, y) for j, y in enumerate(b) if y]
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in nz_b:
            terms = table.get((i, j))
            if terms:
                xy = x * y
                for k, c in terms:
                    out[k] += xy * c
    return tuple(out)


def nested_bracket(alg: StratifiedAlgebra, vectors: Sequence[Vector]) -> Vector:
    """Right-nested bracket ``[v1, [v2, [..., vm]]]``."""
    acc = vectors[-1]
    for v in reversed(vectors[:-1]):
        if not any(acc):
            break
        acc = bracket(alg, v, acc)
    return acc


def dilate_vector(alg: StratifiedAlgebra, lam, v: Sequence[Fraction]) -> Vector:
    alg.check_vector(v)
    lam = Fraction(lam)
    powers = [lam**layer for layer in range(alg.step + 1)]
    return tuple(x * powers[layer] for x, layer in zip(v, alg.layer_of))


def dilation_matrix(alg: StratifiedAlgebra, lam) -> Matrix:
    lam = Fraction(lam)
    return Matrix.diagonal([lam**layer for layer in alg.layer_of])


def ad_matrix(alg: StratifiedAlgebra, x: Sequence[Fraction]) -> Matrix:
    """Matrix of ``y -> [x, y]`` in the fixed basis."""
    cols = [bracket(alg, x, alg.basis_vector(j)) for j in range(alg.dim)]
    return Matrix.from_columns(cols, alg.dim)


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: tuple[int, ...]  # 1-based, as in algebra files
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} at {self.indices}: {self.detail}"


@dataclass
class ValidationReport:
    algebra: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "valid": self.ok,
            "violations": [
                {"kind": v.kind, "indices": list(v.indices), "detail": v.detail} for v in self.violations
            ],
        }


def validate(alg: StratifiedAlgebra) -> ValidationReport:
    """Check every Carnot-algebra invariant and collect all violations."""
    report = ValidationReport(alg.name)
    add = report.violations.append
    n = alg.dim

    if alg.step < 1 or any(d < 1 for d in alg.layer_dims):
        add(Violation("layers", (), f"layer dimensions must be positive, got {list(alg.layer_dims)}"))
        return report
    if len(alg.basis_labels) != n:
        add(Violation("labels", (), f"{len(alg.basis_labels)} labels for dimension {n}"))
    bad_index = [key for key, _ in alg.constants if not all(0 <= x < n for x in key)]
    for key in bad_index:
        add(Violation("index", tuple(x + 1 for x in key), f"index out of range 1..{n}"))
    if bad_index:
        return report

    pairs = {(min(i, j), max(i, j)) for (i, j, _) in (key for key, _ in alg.constants)}
    for i, j in sorted(pairs):
        ks = sorted({k for (a, b, k), _ in alg.constants if {a, b} == {i, j}})
        for k in ks:
            cij = alg.structure_constant(i, j, k)
            cji = alg.structure_constant(j, i, k)
            if cij != -cji:
                add(Violation("antisymmetry", (i + 1, j + 1, k + 1), f"c[i][j][k]={cij}, c[j][i][k]={cji}"))

    layer = alg.layer_of
    for (i, j, k), c in alg.constants:
        if layer[k] != layer[i] + layer[j]:
            add(
                Violation(
                    "grading",
                    (i + 1, j + 1, k + 1),
                    f"[layer {layer[i]}, layer {layer[j]}] has a component in layer {layer[k]}",
                )
            )

    basis = [alg.basis_vector(k) for k in range(n)]
    for i, j, k in itertools.combinations(range(n), 3):
        ei, ej, ek = basis[i], basis[j], basis[k]
        total = [
            a + b + c
            for a, b, c in zip(
                bracket(alg, ei, bracket(alg, ej, ek)),
                bracket(alg, ej, bracket(alg, ek, ei)),
                bracket(alg, ek, bracket(alg, ei, ej)),
            )
        ]
        if any(total):
            add(Violation("jacobi", (i + 1, j + 1, k + 1), f"Jacobi sum is {format_vector(total)}"))

    for lk in range(1, alg.step):
        images = [
            bracket(alg, basis[a], basis[b]) for a in alg.layer_indices(1) for b in alg.layer_indices(lk)
        ]
        r = span_rank(images)
        target = alg.layer_dims[lk]
        if r != target:
            add(
                Violation(
                    "bracket_generating",
                    (1, lk, lk + 1),
                    f"[g1, g{lk}] spans dimension {r}, layer {lk + 1} has dimension {target}",
                )
            )
    return report


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_vector(v: Sequence[Fraction]) -> str:
    return "(" + ", ".join(format_rational(Fraction(x)) for x in v) + ")"


def rational_json(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def vector_json(v: Sequence[Fraction]) -> list[dict]:
    return [rational_json(x) for x in v]


def to_dict(alg: StratifiedAlgebra) -> dict:
    """Serialize to the structure-constant file schema (1-based, i<j only)."""
    brackets = []
    for (i, j), terms in sorted(alg._stored.items()):
        if i >= j:
            raise ValueError(f"entry ({i + 1}, {j + 1}) cannot be written in i<j form")
        brackets.append(
            {
                "i": i + 1,
                "j": j + 1,
                "terms": [{"k": k + 1, **rational_json(c)} for k, c in sorted(terms.items())],
            }
        )
    out = {"name": alg.name, "step": alg.step, "layer_dims": list(alg.layer_dims), "brackets": brackets}
    default_labels = tuple(f"e{k + 1}" for k in range(alg.dim))
    if alg.basis_labels != default_labels:
        out["basis_labels"] = list(alg.basis_labels)
    return out


class AlgebraFormatError(ValueError):
    pass


def _int_field(obj: Mapping, key: str, where: str) -> int:
    if key not in obj:
        raise AlgebraFormatError(f"{where}: missing field {key!r}")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise AlgebraFormatError(f"{where}.{key}: expected an integer, got {val!r}")
    return val


def from_dict(data: Mapping) -> StratifiedAlgebra:
    """Parse the structure-constant schema. Raises AlgebraFormatError with a JSON path."""
    if not isinstance(data, Mapping):
        raise AlgebraFormatError("$: top level must be an object")
    dims = data.get("layer_dims")
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise AlgebraFormatError("$.layer_dims: expected a list of integers")
    step = _int_field(data, "step", "$")
    if step != len(dims):
        raise AlgebraFormatError(f"$.step: step {step} disagrees with {len(dims)} layer dimensions")
    n = sum(dims)
    entries = []
    seen = set()
    raw = data.get("brackets", [])
    if not isinstance(raw, list):
        raise AlgebraFormatError("$.brackets: expected a list")
    for b, entry in enumerate(raw):
        where = f"$.brackets[{b}]"
        if not isinstance(entry, Mapping):
            raise AlgebraFormatError(f"{where}: expected an object")
        i, j = _int_field(entry, "i", where), _int_field(entry, "j", where)
        if not (1 <= i < j <= n):
            raise AlgebraFormatError(f"{where}: need 1 <= i < j <= {n}, got i={i}, j={j}")
        if (i, j) in seen:
            raise AlgebraFormatError(f"{where}: duplicate entry for ({i}, {j})")
        seen.add((i, j))
        terms = entry.get("terms")
        if not isinstance(terms, list):
            raise AlgebraFormatError(f"{where}.terms: expected a list")
        for t, term in enumerate(terms):
            twhere = f"{where}.terms[{t}]"
            if not isinstance(term, Mapping):
                raise AlgebraFormatError(f"{twhere}: expected an object")
            k = _int_field(term, "k", twhere)
            if not 1 <= k <= n:
                raise AlgebraFormatError(f"{twhere}.k: index {k} outside 1..{n}")
            num = _int_field(term, "num", twhere)
            den = _int_field(term, "den", twhere) if "den" in term else 1
            if den == 0:
                raise AlgebraFormatError(f"{twhere}.den: zero denominator")
            entries.append(((i - 1, j - 1, k - 1), Fraction(num, den)))
    labels = data.get("basis_labels", ())
    if labels and (not isinstance(labels, list) or len(labels) != n):
        raise AlgebraFormatError(f"$.basis_labels: expected {n} strings")
    return StratifiedAlgebra(tuple(dims), tuple(entries), str(data.get("name", "")), tuple(labels))


def random_rational(rng: random.Random, bound: int = 5, max_den: int = 4) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, max_den))


def random_vector(alg: StratifiedAlgebra, rng: random.Random, bound: int = 5, max_den: int = 4) -> Vector:
    return tuple(random_rational(rng, bound, max_den) for _ in range(alg.dim))


def random_horizontal(
    alg: StratifiedAlgebra, rng: random.Random, bound: int = 5, max_den: int = 4, nonzero: bool = True
) -> Vector:
    while True:
        vals = [random_rational(rng, bound, max_den) for _ in range(alg.horizontal_dim)]
        if any(vals) or not nonzero:
            return alg.horizontal(vals)
