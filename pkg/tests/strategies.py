"""Random terms over three integer variables for property tests."""

import itertools

from hypothesis import strategies as st

from genesyst.logic.terms import (
    Add, And, Assign, Cmp, CMP_OPS, If, Implies, Int, Interval, Member, Not, Or,
    Parallel, Select, Skip, Sub, Var, read_vars, written_vars,
)

NAMES = ("x", "y", "z")
DOMAIN = range(4)


def valuations(domain=DOMAIN):
    for vals in itertools.product(domain, repeat=len(NAMES)):
        yield dict(zip(NAMES, vals))


leaf = st.one_of(st.sampled_from([Var(n) for n in NAMES]),
                 st.integers(-2, 4).map(Int))
exprs = st.recursive(
    leaf,
    lambda sub: st.one_of(st.builds(Add, sub, sub), st.builds(Sub, sub, sub)),
    max_leaves=4,
)
atoms = st.one_of(
    st.builds(Cmp, st.sampled_from(CMP_OPS), exprs, exprs),
    st.builds(lambda e, lo, hi: Member(e, Interval(lo, hi)), exprs, leaf, leaf),
)
preds = st.recursive(
    atoms,
    lambda sub: st.one_of(
        st.lists(sub, min_size=2, max_size=3).map(lambda a: And(tuple(a))),
        st.lists(sub, min_size=2, max_size=3).map(lambda a: Or(tuple(a))),
        st.builds(Not, sub),
        st.builds(Implies, sub, sub),
    ),
    max_leaves=6,
)


def _assign(name):
    return exprs.map(lambda e: Assign(name, e))


@st.composite
def substitutions(draw, depth=2):
    kind = draw(st.sampled_from(["skip", "assign", "parallel", "if", "select"]
                                if depth else ["skip", "assign"]))
    if kind == "skip":
        return Skip()
    if kind == "assign":
        return draw(_assign(draw(st.sampled_from(NAMES))))
    if kind == "if":
        then = draw(substitutions(depth - 1))
        orelse = draw(st.one_of(st.none(), substitutions(depth - 1)))
        return If(draw(preds), then, orelse)
    if kind == "select":
        return Select(draw(preds), draw(substitutions(depth - 1)))
    # parallel: branches over disjoint written variables, no cross reads
    names = draw(st.permutations(NAMES))
    k = draw(st.integers(2, 3))
    branches = []
    for n in names[:k]:
        if draw(st.booleans()):
            branches.append(Assign(n, draw(exprs)))
        else:
            branches.append(If(draw(preds), Assign(n, draw(exprs)), None))
    return Parallel(tuple(branches))


def parallel_ok(s) -> bool:
    """Disjoint writes, and no cross reads unless every branch is an assignment."""
    if isinstance(s, Parallel):
        bs = s.branches
        simple = all(isinstance(b, (Assign, Skip)) for b in bs)
        for i, a in enumerate(bs):
            for j, b in enumerate(bs):
                if i != j and written_vars(a) & written_vars(b):
                    return False
                if i != j and not simple and written_vars(a) & read_vars(b):
                    return False
        return all(parallel_ok(b) for b in bs)
    if isinstance(s, If):
        return parallel_ok(s.then) and (s.orelse is None or parallel_ok(s.orelse))
    if isinstance(s, Select):
        return parallel_ok(s.body)
    return True
