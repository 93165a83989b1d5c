import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carnot.catalog import CATALOG, abelian, engel, heisenberg, step2_nonmetivier
from carnot.conditions import (
    PROBE_EVIDENCE,
    PROVED_TRUE,
    UNKNOWN,
    ReportInconsistency,
    check_abnormal_line,
    check_reg,
    check_sbh,
    classify,
    find_sbh_witness,
    is_metivier,
    report_contradictions,
)
from carnot.differential import dmultiexp
from carnot.hall import free_nilpotent
from carnot.lie_algebra import NotHorizontalError, StratifiedAlgebra, bracket, random_horizontal
from carnot.linalg import rank, span_rank, vscale
from carnot.probe import ProbeConfig

from conftest import rationals

H1 = heisenberg(1)
ENGEL = engel()
NONMET = step2_nonmetivier()


def brute_reg(alg, x):
    # Independent of ad_matrix: grow the span of iterated brackets by repeated bracketing.
    vecs = [alg.basis_vector(j) for j in range(alg.horizontal_dim)]
    frontier = list(vecs)
    for _ in range(alg.step - 1):
        frontier = [bracket(alg, x, v) for v in frontier]
        vecs += frontier
    return span_rank(vecs) == alg.dim


def test_reg_examples():
    assert check_reg(abelian(3), (1, 0, 0))
    assert check_reg(ENGEL, (1, 0, 0, 0))
    assert not check_reg(ENGEL, (0, 1, 0, 0))
    assert not check_reg(NONMET, (0, 0, 1, 0))
    assert check_abnormal_line(ENGEL, (0, 1, 0, 0))
    assert not check_abnormal_line(ENGEL, (1, 0, 0, 0))


def test_reg_matches_brute_force(catalog_algebra):
    rng = random.Random(1)
    for _ in range(20):
        x = random_horizontal(catalog_algebra, rng)
        assert check_reg(catalog_algebra, x) == brute_reg(catalog_algebra, x)


def test_catalog_ground_truth_is_rediscovered():
    for entry in CATALOG.values():
        alg = entry.build()
        for j in entry.regular_basis:
            assert check_reg(alg, alg.basis_vector(j - 1)), (entry.name, j)
        for j in entry.abnormal_basis:
            assert check_abnormal_line(alg, alg.basis_vector(j - 1)), (entry.name, j)
        for j, p in entry.sbh_witness.items():
            assert find_sbh_witness(alg, alg.basis_vector(j - 1)) == p, (entry.name, j)
        if entry.every_direction_abnormal:
            rng = random.Random(2)
            assert not any(check_reg(alg, random_horizontal(alg, rng)) for _ in range(20))
        if entry.metivier is not None:
            assert is_metivier(alg).verdict == entry.metivier


def test_sbh_examples():
    rng = random.Random(3)
    for _ in range(10):
        assert check_sbh(H1, random_horizontal(H1, rng), 2)
    assert check_sbh(abelian(2), (1, 1), 1)
    assert not check_sbh(ENGEL, (0, 1, 0, 0), 4)
    with pytest.raises(ValueError):
        check_sbh(H1, (1, 0, 0), 0)


def test_witness_examples():
    assert find_sbh_witness(H1, (1, 0, 0)) == 2
    assert find_sbh_witness(ENGEL, (0, 1, 0, 0)) is None
    assert find_sbh_witness(abelian(3), (0, 1, 0)) == 1


def test_sbh_false_whenever_reg_false(catalog_algebra):
    alg = catalog_algebra
    for j in range(alg.horizontal_dim):
        x = alg.basis_vector(j)
        if not check_reg(alg, x):
            assert not any(check_sbh(alg, x, p) for p in range(1, alg.dim + 2))


def test_sbh_padding_stability(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(4)
    for _ in range(5):
        x = random_horizontal(alg, rng)
        verdicts = [check_sbh(alg, x, p) for p in range(1, alg.dim + 2)]
        assert all(b for a, b in zip(verdicts, verdicts[1:]) if a)


@settings(max_examples=30, deadline=None)
@given(st.lists(rationals, min_size=2, max_size=2).filter(any), rationals.filter(bool))
def test_classification_is_scale_invariant(coords, lam):
    x = ENGEL.horizontal(coords)
    a, b = classify(ENGEL, x), classify(ENGEL, vscale(lam, x))
    assert (a.reg, a.sbh.holds, a.sbh.witness_p, a.h.status) == (b.reg, b.sbh.holds, b.sbh.witness_p, b.h.status)


def test_classify_heisenberg():
    rep = classify(H1, (1, 0, 0))
    assert rep.reg and rep.sbh.holds and rep.sbh.witness_p == 2 and not rep.abnormal_line
    assert rep.h.status == PROVED_TRUE
    assert all(s.status == PROVED_TRUE for s in rep.implied.values())


def test_classify_step2_abnormal_has_h_without_sbh():
    rep = classify(NONMET, (0, 0, 1, 0))
    assert not rep.reg and not rep.sbh.holds and rep.abnormal_line
    assert rep.h.status == PROVED_TRUE and "step-2" in rep.h.reason
    assert all(s.status == PROVED_TRUE for s in rep.implied.values())


def test_classify_engel_abnormal_does_not_overclaim():
    rep = classify(ENGEL, (0, 1, 0, 0))
    assert rep.h.status == UNKNOWN
    assert all(s.status == UNKNOWN for s in rep.implied.values())
    assert any("p <= 4" in n for n in rep.notes)


def test_classify_with_probe_only_adds_evidence():
    rep = classify(ENGEL, (0, 1, 0, 0), probe=ProbeConfig(p=2, resolution=2, samples=300, restarts=1))
    assert rep.h.status == PROBE_EVIDENCE and 0 <= rep.h.score <= 1
    assert all(s.status == UNKNOWN for s in rep.implied.values())
    # A certificate wins over the probe.
    assert classify(H1, (1, 0, 0), probe=ProbeConfig()).h.status == PROVED_TRUE


def test_classify_rejects_non_horizontal():
    with pytest.raises(NotHorizontalError):
        classify(H1, (0, 0, 1))


def test_consistency_validator_flags_overclaims():
    rep = classify(ENGEL, (0, 1, 0, 0))
    assert report_contradictions(rep) == []
    rep.implied["P"].status = PROVED_TRUE
    assert report_contradictions(rep)
    rep = classify(H1, (1, 0, 0))
    rep.reg = False
    assert report_contradictions(rep)


def test_reports_serialize():
    d = classify(NONMET, (0, 0, 1, 0)).to_dict()
    assert d["vector"][2] == {"num": 1, "den": 1}
    assert d["h"]["status"] == PROVED_TRUE and d["sbh"]["witness_p"] is None


def test_reg_matrix_route_agrees_with_multiexp_rank(catalog_algebra):
    alg = catalog_algebra
    rng = random.Random(5)
    for _ in range(5):
        x = random_horizontal(alg, rng)
        assert check_reg(alg, x) == (rank(dmultiexp(alg, [x] * alg.dim)) == alg.dim)


# Metivier checks


def quaternionic_type():
    # g1 = R^4, g2 = R^2 with forms <J1 a, b>, <J2 a, b> for anticommuting complex structures.
    j1 = {(0, 1): 1, (2, 3): 1}
    j2 = {(0, 2): 1, (3, 1): 1}
    brackets = {}
    for k, form in ((4, j1), (5, j2)):
        for (a, b), c in form.items():
            key, sign = ((a, b), 1) if a < b else ((b, a), -1)
            brackets.setdefault(key, {})[k] = sign * c
    return StratifiedAlgebra.from_brackets((4, 2), brackets, name="quaternionic_type")


def test_metivier_examples():
    assert is_metivier(H1).verdict == "yes"
    res = is_metivier(NONMET)
    assert res.verdict == "no" and res.counterexample == (0, 0, 1, 0)
    assert is_metivier(free_nilpotent(2, 2)).verdict == "yes"
    assert is_metivier(heisenberg(3)).verdict == "yes"


def test_metivier_pencil_cases():
    assert is_metivier(quaternionic_type()).verdict == "yes"
    # [e1,e2] = f1, [e3,e4] = f1, [e1,e3] = f2: mu = (0, 1) gives a degenerate form.
    alg = StratifiedAlgebra.from_brackets((4, 2), {(0, 1): {4: 1}, (2, 3): {4: 1}, (0, 2): {5: 1}})
    res = is_metivier(alg)
    assert res.verdict == "no"
    ad = [bracket(alg, res.counterexample, alg.basis_vector(j)) for j in range(4)]
    assert span_rank(ad) < 2


def test_metivier_counterexample_is_genuine():
    alg = free_nilpotent(3, 2)
    res = is_metivier(alg)
    assert res.verdict == "no"
    images = [bracket(alg, res.counterexample, alg.basis_vector(j)) for j in range(3)]
    assert span_rank(images) < 3


def test_metivier_randomized_branch():
    # d2 = 3 falls outside the exact branch.
    alg = free_nilpotent(3, 2)
    alg_h = heisenberg(1)
    assert is_metivier(alg_h, trials=5).verdict == "yes"
    with pytest.raises(ValueError):
        is_metivier(ENGEL)
    assert is_metivier(alg).verdict == "no"
