import re
from pathlib import Path

import pytest

from genesyst.errors import CoverFailed, FormatError, MultipleInitial, OverlappingStates
from genesyst.frontend import parse, resolve_refinement
from genesyst.lts import (
    SymbolicLts, build, build_refined, emit_aut, emit_dot, emit_intermediate,
    parse_intermediate,
)
from genesyst.lts.model import DEFAULT, PROVEN, StateNode, Transition
from genesyst.logic.terms import FALSE, TRUE, show
from genesyst.prover import ProverConfig

GOLDEN = Path(__file__).parent / "data" / "golden"

LOOP = """MACHINE loop
VARIABLES x
INVARIANT x : 0..1
ASSERTIONS (TRUE)
INITIALISATION x := 0
OPERATIONS
  tick = SELECT TRUE THEN skip END
END
"""


def edges(l):
    return {(t.src, t.event, t.dst): ("[]" if t.reduced else "[%s]" % show(t.condition))
            for t in l.transitions}


def test_parking_structure(parking_build):
    l = parking_build.lts
    assert [show(s.predicate) for s in l.states] == ["cc=-1", "cc=0", "cc=1"]
    assert l.initial == [("S1", TRUE)]
    assert edges(l) == {
        ("S1", "entrer", "S2"): "[NbVoit<NbPlaces]",
        ("S2", "controler_entree", "S1"): "[]",
        ("S1", "sortir", "S0"): "[NbVoit>0]",
        ("S0", "controler_sortie", "S1"): "[]",
    }
    assert all(t.provenance == PROVEN for t in l.transitions)
    assert parking_build.warnings == []


def test_parking_golden(parking_build):
    assert emit_intermediate(parking_build.lts) == (GOLDEN / "parking.lts").read_text()


def test_degenerate_self_loop():
    l = build(parse(LOOP)).lts
    assert len(l.states) == 1
    assert [(t.src, t.event, t.dst, t.reduced) for t in l.transitions] == [
        ("S0", "tick", "S0", True)]


def test_unbounded_defaults(parking):
    res = build(parking)
    assert len(res.lts.transitions) == 4
    assert all(t.provenance == DEFAULT for t in res.lts.transitions)


def test_cover_failure(parking_text):
    m = parse(parking_text.replace(" or (cc = 1)", ""))
    with pytest.raises(CoverFailed) as exc:
        build(m, ProverConfig({"NbPlaces": (1, 2, 3)}))
    assert exc.value.counterexample["cc"] == 1


def test_never_means_no_transition(parking_build, parking, cfg):
    from genesyst.oblige import enabledness_pair
    from genesyst.prover import VALID, decide
    for s in parking.state_predicates:
        for e in parking.events:
            _, never = enabledness_pair(s, e, parking)
            if decide(never, cfg).verdict == VALID:
                assert not any(t.src == s[0] and t.event == e.name
                               for t in parking_build.lts.transitions)


def test_reduced_iff_both_valid(parking_build, refined_build):
    for res in (parking_build, refined_build):
        verdicts = {o.id: r.verdict for o, r in res.report}
        for t in res.lts.transitions:
            pre = t.src[:t.src.rfind(".") + 1]
            src, dst = t.src[len(pre):], t.dst[len(pre):]
            always = verdicts["%senabled_always.%s.%s" % (pre, src, t.event)]
            total = verdicts["%sreach_total.%s.%s.%s" % (pre, src, t.event, dst)]
            assert t.reduced == (always == "Valid" and total == "Valid")


def test_refined_structure(refined_build):
    l = refined_build.lts
    parents = {s.name: s.parent for s in l.states if s.level == "concrete"}
    assert parents == {
        "parking_r1.S0": "parking.S1", "parking_r1.S1": "parking.S1",
        "parking_r1.S2": "parking.S2", "parking_r1.S3": "parking.S0",
        "parking_r1.S4": "parking.S0",
    }
    e = edges(l)
    assert [k for k in e if k[1] == "entrer"] == [("parking_r1.S0", "entrer", "parking_r1.S2")]
    assert e[("parking_r1.S2", "controler_entree", "parking_r1.S1")] == "[NbVoit=NbPlaces]"
    assert e[("parking_r1.S2", "controler_entree", "parking_r1.S0")] == "[NbVoit<NbPlaces]"
    assert l.initial == [("parking_r1.S0", TRUE)]
    # every concrete move has an abstract counterpart
    assert refined_build.warnings == []


def test_refined_golden(refined_build):
    assert emit_intermediate(refined_build.lts) == (GOLDEN / "parking_r1.lts").read_text()


def test_overlapping_abstract_states(parking_text, linked, cfg):
    overlapping = parse(parking_text.replace("(cc = -1) or (cc = 0) or (cc = 1)",
                                             "(cc = -1) or (cc >= 0) or (cc = 1)"))
    pair = resolve_refinement(linked.concrete, overlapping)
    with pytest.raises(OverlappingStates):
        build_refined(pair, build(overlapping, cfg).lts, cfg)


# ------------------------------------------------------------- round trip

def test_round_trip(parking_build, refined_build):
    for l in (parking_build.lts, refined_build.lts):
        assert parse_intermediate(emit_intermediate(l)) == l


def test_empty_lts():
    text = emit_intermediate(SymbolicLts("nothing"))
    assert text == "LTS nothing\n"
    assert parse_intermediate(text) == SymbolicLts("nothing")


def test_flags_round_trip():
    l = SymbolicLts("f", states=[StateNode("A", FALSE, empty=True), StateNode("B", TRUE)],
                    initial=[("B", TRUE)],
                    transitions=[Transition("B", "go", TRUE, True, DEFAULT, "A")])
    text = emit_intermediate(l)
    assert "STATE A PRED FALSE EMPTY" in text
    assert "TRANS B go COND TRUE REDUCED DEFAULT -> A" in text
    assert parse_intermediate(text) == l


@pytest.mark.parametrize("bad", [
    "STATE S0 PRED cc=0\n",
    "LTS x\nSTATE S0 cc=0\n",
    "LTS x\nSTATE S0 PRED cc=\n",
    "LTS x\nSTATE S0 PRED TRUE\nTRANS S0 e COND TRUE -> S9\n",
    "LTS x\nSTATE S0 PRED TRUE\nTRANS S0 e COND x>0 REDUCED -> S0\n",
    "LTS x\nBOGUS\n",
])
def test_format_errors(bad):
    with pytest.raises(FormatError):
        parse_intermediate(bad)


# ---------------------------------------------------------------- DOT/AUT

def test_dot_flat(parking_build):
    dot = emit_dot(parking_build.lts)
    assert len(re.findall(r'^  "S\d" \[label=', dot, re.M)) == 3
    assert dot.count("shape=point") == 1
    labels = re.findall(r'-> "S\d" \[label="([^"]*)"', dot)
    assert sorted(labels) == sorted(["entrer [NbVoit<NbPlaces]", "sortir [NbVoit>0]",
                                     "controler_entree []", "controler_sortie []"])


def test_dot_clusters(refined_build):
    dot = emit_dot(refined_build.lts)
    blocks = re.findall(r'subgraph "cluster_\d+" \{(.*?)\n  \}', dot, re.S)
    assert len(blocks) == 3
    nodes = [re.findall(r'^\s+"(parking_r1\.S\d)" \[', b, re.M) for b in blocks]
    assert sorted(n for ns in nodes for n in ns) == ["parking_r1.S%d" % i for i in range(5)]


def test_dot_dashed_default(parking):
    dot = emit_dot(build(parking).lts)
    assert dot.count("style=dashed") == 4


def test_dot_grey_empty():
    l = SymbolicLts("g", states=[StateNode("A", FALSE, empty=True)])
    assert "fillcolor=grey" in emit_dot(l)


def test_aut_parking(parking_build):
    aut = emit_aut(parking_build.lts).splitlines()
    assert aut[0] == "des (1, 4, 3)"
    assert '(1, "entrer [NbVoit<NbPlaces]", 2)' in aut
    assert '(0, "controler_sortie []", 1)' in aut


def test_aut_single_state():
    l = SymbolicLts("one", states=[StateNode("A", TRUE)], initial=[("A", TRUE)])
    assert emit_aut(l) == "des (0, 0, 1)\n"


def test_aut_refined_flattened(refined_build):
    aut = emit_aut(refined_build.lts).splitlines()
    assert aut[0] == "des (0, 7, 5)"


def test_aut_multiple_initial():
    l = SymbolicLts("two", states=[StateNode("A", TRUE), StateNode("B", TRUE)],
                    initial=[("A", TRUE), ("B", TRUE)])
    with pytest.raises(MultipleInitial):
        emit_aut(l)
    assert emit_aut(l, allow_multiple_initial=True).startswith("des (0, 0, 2)")
