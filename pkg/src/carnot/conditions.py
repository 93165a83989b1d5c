"""Exact regularity and submersivity checks for horizontal directions.

Regularity of the endpoint map at a constant control X is decided by the
span of iterated brackets ad_X^k(g1), k < step. Submersivity of the
multiexponential map at the diagonal tuple (X, ..., X) is decided by the
exact rank of its Jacobian. The two routes are independent and are
cross-checked by `find_sbh_witness`.
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from carnot.differential import dmultiexp
from carnot.lie_algebra import (
    StratifiedAlgebra,
    ad_matrix,
    format_vector,
    random_horizontal,
    vector_json,
)
from carnot.linalg import Matrix, Vector, nullspace, rank

PROVED_TRUE = "proved_true"
PROVED_FALSE = "proved_false"
PROBE_EVIDENCE = "probe_evidence"
UNKNOWN = "unknown"

IMPLICATION_CHAIN = "(H) implies (P), and (P), (SP), (SH) are equivalent"


class ReportInconsistency(AssertionError):
    """A report contradicts the implication graph between the conditions."""


def reg_matrix(alg: StratifiedAlgebra, x: Vector) -> Matrix:
    """Columns ad_X^k(e_j) for horizontal basis vectors e_j and k < step."""
    alg.check_horizontal(x)
    ad = ad_matrix(alg, x)
    cols = []
    for j in range(alg.horizontal_dim):
        v = alg.basis_vector(j)
        for _ in range(alg.step):
            cols.append(v)
            v = ad.apply(v)
    return Matrix.from_columns(cols, alg.dim)


def check_reg(alg: StratifiedAlgebra, x: Vector) -> bool:
    return rank(reg_matrix(alg, x)) == alg.dim


def check_sbh(alg: StratifiedAlgebra, x: Vector, p: int) -> bool:
    if p < 1:
        raise ValueError("p must be at least 1")
    alg.check_horizontal(x)
    return rank(dmultiexp(alg, [x] * p)) == alg.dim


def find_sbh_witness(alg: StratifiedAlgebra, x: Vector) -> int | None:
    """Least p <= dim with check_sbh(x, p), or None."""
    witness = next((p for p in range(1, alg.dim + 1) if check_sbh(alg, x, p)), None)
    if (witness is not None) != check_reg(alg, x):
        raise ReportInconsistency(
            f"regularity and submersivity disagree at {format_vector(x)} in {alg.name!r}"
        )
    return witness


def check_abnormal_line(alg: StratifiedAlgebra, x: Vector) -> bool:
    return not check_reg(alg, x)


@dataclass
class Status:
    status: str
    reason: str
    score: float | None = None

    def to_dict(self) -> dict:
        out = {"status": self.status, "reason": self.reason}
        if self.score is not None:
            out["score"] = self.score
        return out


@dataclass
class SbhResult:
    holds: bool
    witness_p: int | None
    search_cap: int

    def to_dict(self) -> dict:
        return {"holds": self.holds, "witness_p": self.witness_p, "search_cap": self.search_cap}


@dataclass
class ConditionReport:
    algebra: str
    vector: Vector
    reg: bool
    sbh: SbhResult
    abnormal_line: bool
    h: Status
    implied: dict[str, Status]
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "vector": vector_json(self.vector),
            "reg": self.reg,
            "sbh": self.sbh.to_dict(),
            "abnormal_line": self.abnormal_line,
            "h": self.h.to_dict(),
            "implied": {k: v.to_dict() for k, v in self.implied.items()},
            "notes": list(self.notes),
        }


def report_contradictions(report: ConditionReport) -> list[str]:
    """Violations of the implication graph in a report (empty when consistent)."""
    errs = []
    if report.reg != report.sbh.holds:
        errs.append("(Reg) and (SbH) must coincide")
    if report.abnormal_line == report.reg:
        errs.append("the straight line is abnormal exactly when (Reg) fails")
    if report.sbh.holds and report.h.status != PROVED_TRUE:
        errs.append("(SbH) holds but (H) is not proved")
    statuses = {k: v.status for k, v in report.implied.items()}
    if set(statuses) != {"P", "SP", "SH"}:
        errs.append(f"implied statuses must cover P, SP, SH, got {sorted(statuses)}")
    if report.h.status == PROVED_TRUE and any(s != PROVED_TRUE for s in statuses.values()):
        errs.append("(H) holds but one of (P), (SP), (SH) is not proved")
    if len(set(statuses.values())) > 1:
        errs.append("(P), (SP), (SH) are equivalent but carry different statuses")
    if report.h.status == PROVED_FALSE and report.sbh.holds:
        errs.append("(H) refuted while (SbH) holds")
    if PROVED_FALSE in statuses.values() and report.h.status == PROVED_TRUE:
        errs.append("pliability refuted while (H) holds")
    return errs


def classify(alg: StratifiedAlgebra, x: Vector, probe=None) -> ConditionReport:
    """Condition report for the horizontal direction x.

    `probe` is an optional `ProbeConfig`; it only adds evidence when no
    certificate for (H) is available and never upgrades a status to proved.
    """
    alg.check_horizontal(x)
    x = tuple(Fraction(c) for c in x)
    reg = check_reg(alg, x)
    witness = find_sbh_witness(alg, x)
    sbh = SbhResult(witness is not None, witness, alg.dim)
    notes = []

    if reg:
        h = Status(PROVED_TRUE, f"(SbH) holds with p={witness}, and (SbH) implies (H)")
    elif alg.step <= 2:
        h = Status(PROVED_TRUE, "every direction in a step-2 Carnot group satisfies (H)")
    else:
        h = Status(UNKNOWN, "abnormal straight line in step >= 3: no finite certificate for (H)")
        notes.append(
            f"(SbH) searched for p <= {alg.dim}; the bound is justified for the rank test only, "
            "not for openness"
        )
        if probe is not None:
            from carnot.probe import probe_h

            res = probe_h(alg, x, probe)
            h = Status(PROBE_EVIDENCE, f"heuristic openness probe, p={probe.p}, eta={probe.eta}", res.score)
            notes.append("probe scores are numerical evidence, not proof")

    if h.status == PROVED_TRUE:
        implied = {k: Status(PROVED_TRUE, IMPLICATION_CHAIN) for k in ("P", "SP", "SH")}
    else:
        implied = {
            k: Status(UNKNOWN, "no certificate: (H) not established and no converse is available")
            for k in ("P", "SP", "SH")
        }

    report = ConditionReport(alg.name, x, reg, sbh, not reg, h, implied, notes)
    errs = report_contradictions(report)
    if errs:
        raise ReportInconsistency("; ".join(errs))
    return report


@dataclass
class MetivierResult:
    verdict: str  # "yes", "no" or "probable_yes"
    counterexample: Vector | None
    method: str

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "counterexample": None if self.counterexample is None else vector_json(self.counterexample),
            "method": self.method,
        }


def _second_layer_forms(alg: StratifiedAlgebra) -> list[Matrix]:
    """For each second-layer basis vector e_k, the form (a, b) -> coefficient of e_k in [e_a, e_b]."""
    d1 = alg.horizontal_dim
    forms = []
    for k in alg.layer_indices(2):
        forms.append(Matrix([[alg.structure_constant(a, b, k) for b in range(d1)] for a in range(d1)], d1))
    return forms


def _ad_rank(alg: StratifiedAlgebra, x: Vector) -> int:
    ad = ad_matrix(alg, x)
    rows = [ad.rows[k][: alg.horizontal_dim] for k in alg.layer_indices(2)]
    return rank(rows)


def is_metivier(
    alg: StratifiedAlgebra, trials: int = 200, seed: int = 0, exact_cap: int = 8
) -> MetivierResult:
    """Whether ad_X maps g1 onto g2 for every nonzero horizontal X (step 2 only).

    Exact when the second layer has dimension <= 2 and d1 <= exact_cap
    (nondegeneracy of the pencil of forms), or when a counterexample is
    found; otherwise a randomized verdict.
    """
    if alg.step != 2:
        raise ValueError(f"is_metivier needs a step-2 algebra, got step {alg.step}")
    d1, d2 = alg.layer_dims
    for j in range(d1):
        e = alg.basis_vector(j)
        if _ad_rank(alg, e) < d2:
            return MetivierResult("no", e, "basis vector")

    forms = _second_layer_forms(alg)
    # X fails iff some nonzero functional mu on g2 has X in the kernel of sum mu_k form_k.
    if d1 % 2:
        kernel = nullspace(forms[0])
        return MetivierResult("no", alg.horizontal(kernel[0]), "odd horizontal dimension")

    if d2 == 1:
        kernel = nullspace(forms[0])
        if kernel:
            return MetivierResult("no", alg.horizontal(kernel[0]), "degenerate form")
        return MetivierResult("yes", None, "nondegenerate form")

    if d2 == 2 and d1 <= exact_cap:
        t = sympy.Symbol("t")
        a = sympy.Matrix(d1, d1, lambda i, j: sympy.Rational(str(forms[0][i, j])))
        b = sympy.Matrix(d1, d1, lambda i, j: sympy.Rational(str(forms[1][i, j])))
        kernel = nullspace(forms[0])
        if kernel:
            return MetivierResult("no", alg.horizontal(kernel[0]), "degenerate pencil at mu=(1,0)")
        # Leading coefficient is det(a) != 0.
        det = sympy.Poly((t * a + b).det(), t)
        roots = sympy.real_roots(det)
        if not roots:
            return MetivierResult("yes", None, "pencil determinant has no real root")
        for r in roots:
            if r.is_rational:
                pencil = forms[0].scale(Fraction(str(r))) + forms[1]
                return MetivierResult("no", alg.horizontal(nullspace(pencil)[0]), "rational degenerate pencil")
        return MetivierResult("no", None, "degenerate pencil at an irrational parameter")

    rng = random.Random(seed)
    for _ in range(trials):
        x = random_horizontal(alg, rng, bound=10, max_den=7)
        if _ad_rank(alg, x) < d2:
            return MetivierResult("no", x, "random sample")
    return MetivierResult("probable_yes", None, f"{trials} random samples and all basis vectors")


def sample_vectors(alg: StratifiedAlgebra, k: int, seed: int) -> list[Vector]:
    rng = random.Random(seed)
    return [random_horizontal(alg, rng) for _ in range(k)]


def classify_many(alg: StratifiedAlgebra, vectors: Sequence[Vector], probe=None, workers: int = 1):
    """Classify in input order; workers > 1 uses a process pool."""
    if workers <= 1 or len(vectors) < 2:
        return [classify(alg, x, probe) for x in vectors]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(classify, [alg] * len(vectors), vectors, [probe] * len(vectors)))
