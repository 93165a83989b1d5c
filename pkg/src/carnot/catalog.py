"""Built-in Carnot algebras and the structure-constant file loader.

Ground-truth metadata below is data for the test suite to compare against;
the condition checkers never read it.
"""

from __future__ import annotations

import json
import os
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

from carnot.hall import free_nilpotent
from carnot.lie_algebra import (
    AlgebraFormatError,
    StratifiedAlgebra,
    ValidationReport,
    from_dict,
    to_dict,
    validate,
)

CATALOG_PATH_ENV = "CARNOT_CATALOG_PATH"


def heisenberg(m: int = 1) -> StratifiedAlgebra:
    """Heisenberg algebra of dimension 2m+1: [e_{2i-1}, e_{2i}] = e_{2m+1}."""
    if m < 1:
        raise ValueError("heisenberg(m) needs m >= 1")
    brackets = {(2 * i, 2 * i + 1): {2 * m: 1} for i in range(m)}
    return StratifiedAlgebra.from_brackets((2 * m, 1), brackets, name=f"heisenberg({m})")


def engel() -> StratifiedAlgebra:
    return StratifiedAlgebra.from_brackets((2, 1, 1), {(0, 1): {2: 1}, (0, 2): {3: 1}}, name="engel")


def step2_nonmetivier() -> StratifiedAlgebra:
    """Layers (3, 1) with [e1, e2] = e4 only; e3 is central."""
    return StratifiedAlgebra.from_brackets((3, 1), {(0, 1): {3: 1}}, name="step2_nonmetivier")


def abelian(n: int = 2) -> StratifiedAlgebra:
    if n < 1:
        raise ValueError("abelian(n) needs n >= 1")
    return StratifiedAlgebra.from_brackets((n,), {}, name=f"abelian({n})")


class AlgebraFileError(ValueError):
    """An algebra file could not be parsed or does not define a Carnot algebra."""

    def __init__(self, message: str, report: ValidationReport | None = None):
        super().__init__(message)
        self.report = report


def from_file(path: str | os.PathLike, check: bool = True) -> StratifiedAlgebra:
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFileError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    try:
        alg = from_dict(data)
    except AlgebraFormatError as exc:
        raise AlgebraFileError(f"{path}: {exc}") from exc
    if check:
        report = validate(alg)
        if not report.ok:
            lines = "\n".join(f"  {v}" for v in report.violations)
            raise AlgebraFileError(f"{path}: not a valid Carnot algebra:\n{lines}", report)
    return alg


def to_file(alg: StratifiedAlgebra, path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(to_dict(alg), indent=2) + "\n")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: Callable[[], StratifiedAlgebra]
    description: str
    # Known facts, with provenance; indices are 1-based basis labels.
    metivier: str | None = None
    regular_basis: tuple[int, ...] = ()
    abnormal_basis: tuple[int, ...] = ()
    sbh_witness: dict[int, int] = field(default_factory=dict)
    every_direction_abnormal: bool = False

    def metadata(self) -> dict:
        alg = self.build()
        return {
            "name": self.name,
            "description": self.description,
            "step": alg.step,
            "layer_dims": list(alg.layer_dims),
            "dim": alg.dim,
            "metivier": self.metivier,
            "regular_basis": list(self.regular_basis),
            "abnormal_basis": list(self.abnormal_basis),
            "sbh_witness": {str(k): v for k, v in self.sbh_witness.items()},
            "every_direction_abnormal": self.every_direction_abnormal,
        }


CATALOG: dict[str, CatalogEntry] = {
    entry.name: entry
    for entry in [
        CatalogEntry(
            "heisenberg1",
            lambda: heisenberg(1),
            "three-dimensional Heisenberg algebra",
            metivier="yes",  # [DERIVED] the single form is nondegenerate
            regular_basis=(1, 2),
            sbh_witness={1: 2, 2: 2},  # [PAPER] every horizontal X satisfies (SbH) with p=2; minimality [DERIVED]
        ),
        CatalogEntry(
            "heisenberg2",
            lambda: heisenberg(2),
            "five-dimensional Heisenberg algebra",
            metivier="yes",  # [DERIVED] symplectic form on R^4
            regular_basis=(1, 2, 3, 4),
            sbh_witness={1: 2, 3: 2},  # [DERIVED] rank count
        ),
        CatalogEntry(
            "engel",
            engel,
            "Engel algebra: [e1,e2]=e3, [e1,e3]=e4",
            regular_basis=(1,),  # [DERIVED] e1, e2, e3, e4 reached by ad_e1
            abnormal_basis=(2,),  # [DERIVED] ad_e2 g1 = span{e3}, ad_e2 e3 = 0
            sbh_witness={1: 3},  # [DERIVED] rank 2, 3, 4 for p = 1, 2, 3
        ),
        CatalogEntry(
            "step2_nonmetivier",
            step2_nonmetivier,
            "step-2 algebra with layers (3,1) and [e1,e2]=e4; e3 is central",
            metivier="no",  # [DERIVED] ad_e3 g1 = 0
            regular_basis=(1, 2),  # [DERIVED]
            abnormal_basis=(3,),  # [PAPER] non-Metivier step-2 groups have abnormal lines; e3 [DERIVED]
            sbh_witness={1: 2},  # [DERIVED]
        ),
        CatalogEntry(
            "abelian2",
            lambda: abelian(2),
            "abelian algebra R^2 (step 1)",
            regular_basis=(1, 2),  # [TRIVIAL] E is linear and onto
            sbh_witness={1: 1, 2: 1},  # [TRIVIAL]
        ),
        CatalogEntry(
            "free_2_2",
            lambda: free_nilpotent(2, 2),
            "free nilpotent algebra, 2 generators, step 2 (isomorphic to heisenberg1)",
            metivier="yes",  # [DERIVED] isomorphic to heisenberg1
            regular_basis=(1, 2),
            sbh_witness={1: 2},
        ),
        CatalogEntry(
            "free_2_3",
            lambda: free_nilpotent(2, 3),
            "free nilpotent algebra, 2 generators, step 3",
            abnormal_basis=(1, 2),  # [DERIVED] iterated brackets reach 2+1+1 < 5 dimensions
            every_direction_abnormal=True,
        ),
        CatalogEntry(
            "free_3_2",
            lambda: free_nilpotent(3, 2),
            "free nilpotent algebra, 3 generators, step 2",
            metivier="no",  # [DERIVED] odd horizontal dimension
            abnormal_basis=(1, 2, 3),  # [DERIVED] ad_X g1 has dimension 2 < 3
            every_direction_abnormal=True,
        ),
    ]
}


def catalog_search_path() -> list[Path]:
    raw = os.environ.get(CATALOG_PATH_ENV, "")
    return [Path(p) for p in raw.split(os.pathsep) if p]


def get(name: str) -> StratifiedAlgebra:
    """Catalog algebra by name, or a ``<name>.json`` file on the catalog path."""
    if name in CATALOG:
        return CATALOG[name].build()
    for directory in catalog_search_path():
        candidate = directory / f"{name}.json"
        if candidate.is_file():
            return from_file(candidate)
    known = ", ".join(sorted(CATALOG))
    raise KeyError(f"unknown catalog algebra {name!r} (built-in: {known}; extra path via ${CATALOG_PATH_ENV})")


def all_algebras() -> list[StratifiedAlgebra]:
    return [entry.build() for entry in CATALOG.values()]
