import itertools

import pytest

from genesyst.errors import MissingBound
from genesyst.frontend import parse_predicate
from genesyst.lts import discharge
from genesyst.logic.terms import FALSE, TRUE, conj, free_vars
from genesyst.logic.wp import evaluate
from genesyst.oblige import ProofObligation
from genesyst.prover import (
    INVALID, SAT, UNKNOWN, UNSAT, VALID, ProofResult, ProverConfig, check_sat,
    decide, export_obligation, smtlib,
)


def po(hyp, goal, sets=()):
    return ProofObligation("t", "cover", hyp, goal, (), sets)


def test_assumption_matches_goal(parking):
    p = parking
    h = conj(p.properties, p.invariant, p.state("S2"))
    assert decide(po(h, p.state("S2"))).verdict == VALID


def test_tautology():
    r = decide(po(TRUE, TRUE))
    assert r.verdict == VALID and r.counterexample is None


def test_counterexample(parking):
    p = parking
    h = conj(p.properties, p.invariant, parse_predicate("cc=0"))
    goal = parse_predicate("NbVoit<NbPlaces")
    cfg = ProverConfig({"NbPlaces": (1,)}, {"NbVoit": (0, 1)})
    r = decide(po(h, goal), cfg)
    assert r.verdict == INVALID
    assert r.counterexample == {"NbPlaces": 1, "NbVoit": 1, "cc": 0}
    assert evaluate(h, r.counterexample) and not evaluate(goal, r.counterexample)


def test_unknown_without_bounds(parking):
    p = parking
    h = conj(p.properties, p.invariant, parse_predicate("cc=0"))
    assert decide(po(h, parse_predicate("NbVoit<NbPlaces"))).verdict == UNKNOWN


def test_missing_bound_when_enumerating():
    cfg = ProverConfig({}, {"x": (0, 3)})
    with pytest.raises(MissingBound) as exc:
        decide(po(parse_predicate("x : 0..3"), parse_predicate("x < k")), cfg)
    assert exc.value.name == "k"


def test_result_invariants():
    with pytest.raises(ValueError):
        ProofResult(INVALID)
    with pytest.raises(ValueError):
        ProofResult(VALID, {"x": 1})


def test_check_sat_contradiction():
    assert check_sat(parse_predicate("cc=0 & cc=1")).status == UNSAT
    assert check_sat(FALSE).status == UNSAT


def test_check_sat_witness(parking):
    p = conj(parking.invariant, parse_predicate("cc=0 & NbVoit<NbPlaces & 1=1"))
    r = check_sat(p, ProverConfig({"NbPlaces": (1,)}))
    assert r.status == SAT
    assert r.witness == {"NbVoit": 0, "NbPlaces": 1, "cc": 0}
    assert evaluate(p, r.witness)


def test_check_sat_bounded_search_is_not_a_proof():
    # no solution for x in 0..3, but x is unbounded in the formula itself
    p = parse_predicate("x > 10")
    assert check_sat(p, ProverConfig({}, {"x": (0, 3)})).status == UNKNOWN


def test_check_sat_intrinsic_domain():
    p = parse_predicate("x : 0..3 & y : 0..3 & x + y = 7")
    assert check_sat(p).status == UNSAT


def test_deterministic(parking):
    h = conj(parking.properties, parking.invariant, parse_predicate("cc=0"))
    cfg = ProverConfig({"NbPlaces": (1, 2, 3)})
    a = decide(po(h, parse_predicate("NbVoit>0")), cfg)
    b = decide(po(h, parse_predicate("NbVoit>0")), cfg)
    assert a == b


# ------------------------------------------------------------- soundness


def _instances(p, n_max=3):
    names = sorted(free_vars(p))
    ranges = {"NbPlaces": range(1, n_max + 1), "NbVoit": range(0, n_max + 1),
              "cc": range(-1, 2), "feu": ("vert", "rouge")}
    for vals in itertools.product(*(ranges[n] for n in names)):
        yield dict(zip(names, vals))


def _all_obligations(parking_build, refined_build):
    return parking_build.report + refined_build.report


def test_valid_verdicts_withstand_enumeration(parking_build, refined_build):
    checked = 0
    for o, r in _all_obligations(parking_build, refined_build):
        if r.verdict != VALID:
            continue
        q = o.query()
        for v in _instances(q):
            assert not evaluate(q, v), (o.id, v)
        checked += 1
    assert checked > 50


def test_counterexamples_reevaluate(parking_build, refined_build):
    for o, r in _all_obligations(parking_build, refined_build):
        if r.verdict == INVALID:
            assert evaluate(o.hypothesis, r.counterexample), o.id
            assert not evaluate(o.goal, r.counterexample), o.id


def test_larger_bounds_never_flip_valid(parking_build):
    big = ProverConfig({"NbPlaces": tuple(range(1, 6))})
    for o, r in parking_build.report:
        if r.verdict == VALID:
            assert discharge(o, big).verdict == VALID


# ---------------------------------------------------------------- export


def test_export_cover(parking, tmp_path):
    from genesyst.oblige import cover_obligation
    path = export_obligation(cover_obligation(parking), tmp_path)
    text = open(path).read()
    assert path.endswith("cover.smt2")
    for n in ("NbPlaces", "NbVoit", "cc"):
        assert "(declare-const %s Int)" % n in text
    assert "(assert (not (or (= cc (- 1)) (= cc 0) (= cc 1))))" in text
    assert "(check-sat)" in text


def test_export_enum(linked):
    sets = linked.model.sets
    o = po(parse_predicate("feu : Couleur_feu", sets), parse_predicate("feu=vert", sets), sets)
    text = smtlib(o)
    assert "vert=0, rouge=1" in text
    assert "(assert (and (<= 0 feu) (<= feu 1)))" in text


def test_export_empty_hypothesis():
    text = smtlib(po(TRUE, parse_predicate("x > 0")))
    asserts = [ln for ln in text.splitlines() if ln.startswith("(assert")]
    assert asserts == ["(assert (not (> x 0)))"]
