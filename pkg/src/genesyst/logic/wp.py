"""Weakest preconditions and the executable semantics used as their oracle."""

from __future__ import annotations

from typing import Mapping, Optional, Union

from genesyst.errors import IncompleteValuation, UnsupportedSubstitution
from genesyst.logic.terms import (
    Add, And, Assign, Bool, Cmp, EnumLit, If, Implies, Int, Interval, Member,
    Nat, Not, Or, Parallel, Pred, Select, SetRef, Skip, Sub, Subst, Var,
    substitute,
)

Value = Union[int, str]
Valuation = Mapping[str, Value]


def _flatten(s: Parallel):
    for b in s.branches:
        if isinstance(b, Parallel):
            yield from _flatten(b)
        else:
            yield b


def wp(s: Subst, post: Pred) -> Pred:
    match s:
        case Skip():
            return post
        case Assign(name, e):
            return substitute(post, {name: e}, check_sorts=False)
        case Parallel():
            branches = list(_flatten(s))
            if all(isinstance(b, (Assign, Skip)) for b in branches):
                return substitute(post, {b.name: b.expr for b in branches
                                         if isinstance(b, Assign)},
                                  check_sorts=False)
            # no branch reads what another writes, so any sequential order works
            for b in reversed(branches):
                post = wp(b, post)
            return post
        case If(cond, then, orelse):
            other = post if orelse is None else wp(orelse, post)
            return And((Implies(cond, wp(then, post)), Implies(Not(cond), other)))
        case Select(guard, body):
            return Implies(guard, wp(body, post))
    raise UnsupportedSubstitution("no wp rule for %r" % (s,))


# -------------------------------------------------------------- evaluation


def eval_expr(e, v: Valuation) -> Value:
    match e:
        case Int(n):
            return n
        case EnumLit(n):
            return n
        case Var(n):
            try:
                return v[n]
            except KeyError:
                raise IncompleteValuation(n) from None
        case Add(l, r):
            return eval_expr(l, v) + eval_expr(r, v)
        case Sub(l, r):
            return eval_expr(l, v) - eval_expr(r, v)
    raise TypeError("not an expression: %r" % (e,))


_CMP = {
    "=": lambda a, b: a == b,
    "/=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def evaluate(p: Pred, v: Valuation) -> bool:
    match p:
        case Bool(b):
            return b
        case Cmp(op, l, r):
            return _CMP[op](eval_expr(l, v), eval_expr(r, v))
        case Member(e, Interval(lo, hi)):
            x = eval_expr(e, v)
            return eval_expr(lo, v) <= x <= eval_expr(hi, v)
        case Member(e, Nat()):
            x = eval_expr(e, v)
            return isinstance(x, int) and x >= 0
        case Member(e, SetRef(_, elements)):
            return eval_expr(e, v) in elements
        case And(args):
            return all(evaluate(a, v) for a in args)
        case Or(args):
            return any(evaluate(a, v) for a in args)
        case Not(a):
            return not evaluate(a, v)
        case Implies(l, r):
            return (not evaluate(l, v)) or evaluate(r, v)
    raise TypeError("not a predicate: %r" % (p,))


def _updates(s: Subst, v: Valuation) -> Optional[dict]:
    # writes computed against the pre-state; None when a guard blocks
    match s:
        case Skip():
            return {}
        case Assign(name, e):
            return {name: eval_expr(e, v)}
        case Parallel(branches):
            out = {}
            for b in branches:
                u = _updates(b, v)
                if u is None:
                    return None
                out.update(u)
            return out
        case If(cond, then, orelse):
            if evaluate(cond, v):
                return _updates(then, v)
            return {} if orelse is None else _updates(orelse, v)
        case Select(guard, body):
            if not evaluate(guard, v):
                return None
            return _updates(body, v)
    raise UnsupportedSubstitution("cannot execute %r" % (s,))


def execute(s: Subst, v: Valuation) -> Optional[dict]:
    """Run ``s`` from ``v``; returns the successor valuation, or None if blocked."""
    u = _updates(s, v)
    if u is None:
        return None
    out = dict(v)
    out.update(u)
    return out
