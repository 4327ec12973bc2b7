import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from genesyst.errors import IncompleteValuation, SortMismatch
from genesyst.frontend import parse_predicate
from genesyst.logic.simplify import simplify
from genesyst.logic.terms import (
    TRUE, And, Assign, Cmp, EnumLit, If, Implies, Int, Not, Parallel, Select,
    Skip, Var, show, substitute,
)
from genesyst.logic.wp import evaluate, execute, wp

from strategies import exprs, parallel_ok, preds, substitutions, valuations

COLOURS = (("Couleur_feu", ("vert", "rouge")),)


def P(text):
    return parse_predicate(text, COLOURS)


# ------------------------------------------------------------ substitute

def test_substitute_literal():
    assert substitute(P("cc=1"), {"cc": Int(0)}) == Cmp("=", Int(0), Int(1))


def test_substitute_expression():
    got = substitute(P("NbVoit<NbPlaces"), {"NbVoit": P("NbVoit+1=0").left})
    assert show(got) == "NbVoit+1<NbPlaces"


def test_substitute_is_simultaneous():
    assert substitute(P("x=y"), {"x": Var("y"), "y": Var("x")}) == P("y=x")


def test_substitute_rejects_sort_clash():
    with pytest.raises(SortMismatch):
        substitute(P("cc=1"), {"cc": EnumLit("vert")})


@given(preds)
def test_swap_twice_is_identity(p):
    swap = {"x": Var("y"), "y": Var("x")}
    assert substitute(substitute(p, swap), swap) == p


# -------------------------------------------------------------------- wp

def test_wp_parallel_assignment():
    s = Parallel((Assign("NbVoit", P("NbVoit+1=0").left), Assign("cc", Int(1))))
    assert wp(s, P("cc=1")) == Cmp("=", Int(1), Int(1))


def test_wp_if_in_parallel():
    s = Parallel((If(P("NbVoit=NbPlaces"), Assign("feu", EnumLit("rouge"))),
                  Assign("cc", Int(0))))
    got = wp(s, P("cc=0 & feu=rouge"))
    # (NbVoit=NbPlaces => 0=0 & rouge=rouge) & (not(NbVoit=NbPlaces) => 0=0 & feu=rouge)
    want = And((
        Implies(P("NbVoit=NbPlaces"), And((Cmp("=", Int(0), Int(0)),
                                           Cmp("=", EnumLit("rouge"), EnumLit("rouge"))))),
        Implies(Not(P("NbVoit=NbPlaces")), And((Cmp("=", Int(0), Int(0)), P("feu=rouge")))),
    ))
    assert got == want


def test_wp_skip():
    assert wp(Skip(), P("NbVoit>0")) == P("NbVoit>0")


def test_wp_select():
    assert wp(Select(P("cc=1"), Assign("cc", Int(0))), P("cc=0")) == \
        Implies(P("cc=1"), Cmp("=", Int(0), Int(0)))


@settings(max_examples=300, deadline=None)
@given(substitutions(), preds)
def test_wp_exec_coherence(s, post):
    assume(parallel_ok(s))
    pre = wp(s, post)
    for v in valuations():
        after = execute(s, v)
        if after is not None:
            assert evaluate(pre, v) == evaluate(post, after)


# ------------------------------------------------------------- evaluate

def test_evaluate_and_execute():
    v = {"NbVoit": 0, "NbPlaces": 3, "cc": 0}
    assert evaluate(P("NbVoit<NbPlaces"), v)
    s = Parallel((Assign("NbVoit", P("NbVoit+1=0").left), Assign("cc", Int(1))))
    assert execute(s, v) == {"NbVoit": 1, "cc": 1, "NbPlaces": 3}
    assert execute(Select(P("cc=1"), Assign("cc", Int(0))), v) is None


def test_evaluate_needs_every_identifier():
    with pytest.raises(IncompleteValuation):
        evaluate(P("x<y"), {"x": 1})


def test_evaluate_nat_and_enum():
    assert evaluate(P("n : NAT"), {"n": 0})
    assert not evaluate(P("n : NAT"), {"n": -1})
    assert evaluate(P("feu=vert"), {"feu": "vert"})


# -------------------------------------------------------------- simplify

INV = P("NbVoit : 0..NbPlaces & cc : -1..1 & (cc = -1 => NbVoit < NbPlaces)"
        " & (cc = 1 => NbVoit > 0)")


def test_simplify_constant_fold():
    assert simplify(P("1=1 & NbVoit<NbPlaces")) == P("NbVoit<NbPlaces")


def test_simplify_context_absorption():
    assert simplify(P("cc=0"), And((P("cc=0"), INV))) == TRUE


def test_simplify_interval():
    ctx = P("NbVoit : 0..NbPlaces & NbVoit<NbPlaces")
    p = P("NbVoit+1 : 0..NbPlaces")
    assert simplify(p, ctx) == TRUE
    # bounded check of the claim
    for n in range(6):
        for k in range(n + 1):
            v = {"NbVoit": k, "NbPlaces": n}
            if evaluate(ctx, v):
                assert evaluate(p, v)


def test_simplify_if_targets():
    ctx = And((P("cc=1 & feu=vert & feu : Couleur_feu"), INV))
    s = Parallel((If(P("NbVoit=NbPlaces"), Assign("feu", EnumLit("rouge"))),
                  Assign("cc", Int(0))))
    assert show(simplify(wp(s, P("cc=0 & feu=rouge")), ctx)) == "NbVoit=NbPlaces"
    assert show(simplify(wp(s, P("cc=0 & feu=vert")), ctx)) == "NbVoit<NbPlaces"


WIDE = range(-2, 5)


@settings(max_examples=200, deadline=None)
@given(preds, preds)
def test_simplify_sound(p, ctx):
    q = simplify(p, ctx)
    for v in valuations(WIDE):
        if evaluate(ctx, v):
            assert evaluate(p, v) == evaluate(q, v), show(q)


@settings(max_examples=200, deadline=None)
@given(preds, st.one_of(st.just(TRUE), preds))
def test_simplify_idempotent(p, ctx):
    once = simplify(p, ctx)
    assert simplify(once, ctx) == once
