"""Three-valued discharge of proof obligations.

``decide`` answers Valid only through equivalence-preserving reasoning
(context simplification, then refutation of ``hypothesis & not(goal)`` by
case splitting over residual disjunctions and small finite domains, with
Fourier-Motzkin on the linear part).  Bounded enumeration can only produce
counterexamples.  ``check_sat`` is the dual used for existence questions.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

from genesyst.errors import IoError, MissingBound
from genesyst.logic.simplify import Facts, negate, simplify
from genesyst.logic.terms import (
    FALSE, TRUE, Add, And, Bool, Cmp, EnumLit, Implies, Int, Interval, Member,
    Nat, Not, Or, Pred, SetRef, Sub, Var, conj, conjuncts, free_vars,
    sort_check,
)
from genesyst.logic.wp import eval_expr, evaluate

VALID = "Valid"
INVALID = "Invalid"
UNKNOWN = "Unknown"

SAT = "Sat"
UNSAT = "Unsat"

MAX_SPLIT_DEPTH = 24
MAX_NODES = 2_000_000


@dataclass(frozen=True)
class ProofResult:
    verdict: str
    counterexample: Optional[Dict[str, object]] = None
    method: str = "simplifier"

    def __post_init__(self):
        if self.verdict == INVALID and self.counterexample is None:
            raise ValueError("an Invalid verdict needs a counterexample")
        if self.verdict == VALID and self.counterexample is not None:
            raise ValueError("a Valid verdict carries no counterexample")


@dataclass(frozen=True)
class SatResult:
    status: str
    witness: Optional[Dict[str, object]] = None
    method: str = "simplifier"


@dataclass(frozen=True)
class ProverConfig:
    """Finite bounds used by enumeration.

    ``constant_bounds`` maps a constant to its candidate values,
    ``variable_bounds`` maps a variable to an inclusive ``(lo, hi)``.
    When both are empty, enumeration still runs if the formula itself
    confines every identifier; otherwise the answer is Unknown instead of
    MissingBound.
    """
    constant_bounds: Mapping[str, Tuple[int, ...]] = field(default_factory=dict)
    variable_bounds: Mapping[str, Tuple[int, int]] = field(default_factory=dict)
    time_budget: float = 10.0
    external_export_dir: Optional[str] = None

    @property
    def enumeration_enabled(self) -> bool:
        return bool(self.constant_bounds or self.variable_bounds)


class _Timeout(Exception):
    pass


class _Clock:
    def __init__(self, budget):
        self.deadline = time.monotonic() + budget
        self.ticks = 0

    def tick(self):
        self.ticks += 1
        if self.ticks % 256 == 0 and time.monotonic() > self.deadline:
            raise _Timeout()


# ---------------------------------------------------------------- refutation


def _split_var(facts: Facts) -> Optional[str]:
    names = set()
    for r in facts.residual:
        names |= free_vars(r)
    best = None
    for n in sorted(names):
        dom = facts.finite_domain(n)
        if dom is not None and len(dom) <= 8:
            if best is None or len(dom) < best[0]:
                best = (len(dom), n)
    return None if best is None else best[1]


def _cases(r: Pred):
    if isinstance(r, Or):
        return list(r.args)
    if isinstance(r, Implies):
        return [negate(r.left), r.right]
    return None


def _refute(facts: Facts, depth: int, clock: _Clock) -> bool:
    clock.tick()
    if facts.inconsistent:
        return True
    if depth == 0 or not facts.residual:
        return False
    v = _split_var(facts)
    if v is not None:
        values = facts.finite_domain(v)
        return all(_refute(facts.extended(Cmp("=", Var(v), _lit(x))), depth - 1, clock)
                   for x in values)
    r = facts.residual[0]
    cases = _cases(r)
    if cases is None:
        return _refute(facts.without_residual(r), depth, clock)
    base = facts.without_residual(r)
    return all(_refute(base.extended(c), depth - 1, clock) for c in cases)


def refute(p: Pred, clock: Optional[_Clock] = None) -> bool:
    """True when ``p`` is proven unsatisfiable."""
    clock = clock or _Clock(10.0)
    return _refute(Facts.of(p), MAX_SPLIT_DEPTH, clock)


def _lit(x):
    return Int(x) if isinstance(x, int) else EnumLit(x)


# --------------------------------------------------------------- enumeration


def _literal_sets(sets) -> Dict[str, Tuple[str, ...]]:
    out = {}
    for _, elems in sets:
        for e in elems:
            out[e] = tuple(elems)
    return out


class _Search:
    """Depth-first search for a model of a conjunction over finite domains."""

    def __init__(self, formula: Pred, cfg: ProverConfig, clock: _Clock, sets=()):
        self.parts = conjuncts(formula)
        self.cfg = cfg
        self.clock = clock
        self.names = sorted(free_vars(formula))
        self.hints = {n: [] for n in self.names}
        self.enum_dom = {}
        lit_sets = _literal_sets(sets)
        for p in self.parts:
            match p:
                case Member(Var(n), d):
                    self.hints[n].append(d)
                case Cmp("=", Var(n), e) if n not in free_vars(e):
                    self.hints[n].append(("eq", e))
                case Cmp("=", e, Var(n)) if n not in free_vars(e):
                    self.hints[n].append(("eq", e))
        self._enum_from_literals(formula, lit_sets)
        self.nodes = 0
        self.exhaustive = True
        self.all_intrinsic = True
        self.intrinsic = {}

    def _enum_from_literals(self, node, lit_sets):
        # an identifier compared with an enum literal ranges over its set
        def walk(n):
            match n:
                case Cmp(_, Var(v), EnumLit(e)) | Cmp(_, EnumLit(e), Var(v)):
                    if e in lit_sets:
                        self.enum_dom.setdefault(v, lit_sets[e])
                case And(args) | Or(args):
                    for a in args:
                        walk(a)
                case Not(a):
                    walk(a)
                case Implies(a, b):
                    walk(a)
                    walk(b)
        walk(node)

    def domain(self, name, env):
        """(values, intrinsic) for ``name`` given the current assignment."""
        cfg = self.cfg
        if name in cfg.constant_bounds:
            return list(cfg.constant_bounds[name]), False
        if name in cfg.variable_bounds:
            lo, hi = cfg.variable_bounds[name]
            return list(range(lo, hi + 1)), False
        for h in self.hints[name]:
            match h:
                case Interval(lo, hi):
                    deps = free_vars(lo) | free_vars(hi)
                    if deps <= env.keys():
                        a, b = eval_expr(lo, env), eval_expr(hi, env)
                        if isinstance(a, int) and isinstance(b, int):
                            return list(range(a, b + 1)), all(self.intrinsic[d] for d in deps)
                case SetRef(_, elements) if elements:
                    return list(elements), True
                case ("eq", e):
                    deps = free_vars(e)
                    if deps <= env.keys():
                        return [eval_expr(e, env)], all(self.intrinsic[d] for d in deps)
        if name in self.enum_dom:
            return list(self.enum_dom[name]), True
        return None

    def run(self) -> Optional[dict]:
        """Returns a model, or None.  ``exhaustive`` tells whether the whole
        space was covered; raises MissingBound or leaves ``exhaustive`` False
        when some identifier has no domain."""
        return self._go({}, list(self.parts))

    def _go(self, env, pending):
        self.clock.tick()
        self.nodes += 1
        if self.nodes > MAX_NODES:
            raise _Timeout()
        rest = []
        for p in pending:
            if free_vars(p) <= env.keys():
                if not evaluate(p, env):
                    return None
            else:
                rest.append(p)
        todo = [n for n in self.names if n not in env]
        if not todo:
            return dict(env)
        for n in todo:
            d = self.domain(n, env)
            if d is not None:
                break
        else:
            if self.cfg.enumeration_enabled:
                raise MissingBound(todo[0])
            self.exhaustive = False
            return None
        values, intrinsic = d
        self.intrinsic[n] = intrinsic
        if not intrinsic:
            self.all_intrinsic = False
        for x in values:
            env[n] = x
            found = self._go(env, rest)
            if found is not None:
                del env[n]
                return found
            del env[n]
        return None


def _search(formula, cfg, clock, sets):
    s = _Search(formula, cfg, clock, sets)
    found = s.run()
    return found, s.exhaustive, s.all_intrinsic


# ------------------------------------------------------------------- public


def decide(po, cfg: Optional[ProverConfig] = None) -> ProofResult:
    """Discharge ``hypothesis |- goal``."""
    cfg = cfg or ProverConfig()
    if cfg.external_export_dir:
        export_obligation(po, cfg.external_export_dir)
    clock = _Clock(cfg.time_budget)
    method = "simplifier"
    try:
        if po.goal == TRUE:
            return ProofResult(VALID)
        facts = Facts.of(po.hypothesis)
        if facts.inconsistent or simplify(po.goal, facts) == TRUE:
            return ProofResult(VALID)
        if _refute(facts.extended(Not(po.goal)), MAX_SPLIT_DEPTH, clock):
            return ProofResult(VALID)
        method = "enumeration"
        cex, _, _ = _search(conj(po.hypothesis, Not(po.goal)), cfg, clock, getattr(po, "sets", ()))
        if cex is not None:
            return ProofResult(INVALID, cex, "enumeration")
    except _Timeout:
        pass
    return ProofResult(UNKNOWN, None, method)


def check_sat(p: Pred, cfg: Optional[ProverConfig] = None, sets=()) -> SatResult:
    """Satisfiability of ``p``.

    Unsat is claimed from enumeration only when every identifier's domain
    comes from the formula itself (no configured bound was involved), so an
    exhaustive search is a proof rather than a desk-scale sample.
    """
    cfg = cfg or ProverConfig()
    clock = _Clock(cfg.time_budget)
    method = "simplifier"
    try:
        if simplify(p) == FALSE:
            return SatResult(UNSAT)
        facts = Facts.of(p)
        if _refute(facts, MAX_SPLIT_DEPTH, clock):
            return SatResult(UNSAT)
        method = "enumeration"
        w, exhaustive, intrinsic = _search(p, cfg, clock, sets)
        if w is not None:
            return SatResult(SAT, w, "enumeration")
        if exhaustive and intrinsic:
            return SatResult(UNSAT, None, "enumeration")
    except _Timeout:
        pass
    return SatResult(UNKNOWN, None, method)


# ------------------------------------------------------------------ export


def _smt_expr(e, enum_index):
    match e:
        case Int(n):
            return str(n) if n >= 0 else "(- %d)" % -n
        case Var(n):
            return n
        case EnumLit(n):
            return str(enum_index[n])
        case Add(l, r):
            return "(+ %s %s)" % (_smt_expr(l, enum_index), _smt_expr(r, enum_index))
        case Sub(l, r):
            return "(- %s %s)" % (_smt_expr(l, enum_index), _smt_expr(r, enum_index))
    raise TypeError(e)


_SMT_OPS = {"=": "=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def _smt_pred(p, enum_index):
    def ex(e):
        return _smt_expr(e, enum_index)

    match p:
        case Bool(b):
            return "true" if b else "false"
        case Cmp("/=", l, r):
            return "(not (= %s %s))" % (ex(l), ex(r))
        case Cmp(op, l, r):
            return "(%s %s %s)" % (_SMT_OPS[op], ex(l), ex(r))
        case Member(e, Interval(lo, hi)):
            return "(and (<= %s %s) (<= %s %s))" % (ex(lo), ex(e), ex(e), ex(hi))
        case Member(e, Nat()):
            return "(<= 0 %s)" % ex(e)
        case Member(e, SetRef(_, elements)):
            return "(and (<= 0 %s) (<= %s %d))" % (ex(e), ex(e), len(elements) - 1)
        case And(args):
            return "(and %s)" % " ".join(_smt_pred(a, enum_index) for a in args)
        case Or(args):
            return "(or %s)" % " ".join(_smt_pred(a, enum_index) for a in args)
        case Not(a):
            return "(not %s)" % _smt_pred(a, enum_index)
        case Implies(l, r):
            return "(=> %s %s)" % (_smt_pred(l, enum_index), _smt_pred(r, enum_index))
    raise TypeError(p)


def smtlib(po) -> str:
    """SMT-LIB 2 text asserting ``hypothesis & not(goal)`` (unsat iff valid).

    Enumerated sets become integer ranges ``0..k-1`` in declaration order.
    """
    sets = tuple(getattr(po, "sets", ()))
    lit_set = {e: name for name, elems in sets for e in elems}
    enum_index = {e: i for _, elems in sets for i, e in enumerate(elems)}
    whole = conj(po.hypothesis, po.goal) if po.hypothesis != TRUE else po.goal
    sorts = sort_check(whole, None, lit_set)
    lines = ["; PO %s (%s)" % (po.id, po.kind),
             "; unsat <=> the obligation is valid"]
    for name, elems in sets:
        lines.append("; enum %s: %s" % (name, ", ".join(
            "%s=%d" % (e, i) for i, e in enumerate(elems))))
    lines.append("(set-logic QF_LIA)")
    names = sorted(free_vars(whole))
    for n in names:
        lines.append("(declare-const %s Int)" % n)
    sizes = dict((name, len(elems)) for name, elems in sets)
    for n in names:
        s = sorts.get(n)
        if s in sizes:
            lines.append("(assert (and (<= 0 %s) (<= %s %d))) ; %s : %s"
                         % (n, n, sizes[s] - 1, n, s))
    if po.hypothesis != TRUE:
        lines.append("(assert %s)" % _smt_pred(po.hypothesis, enum_index))
    lines.append("(assert (not %s))" % _smt_pred(po.goal, enum_index))
    lines.append("(check-sat)")
    lines.append("(exit)")
    return "\n".join(lines) + "\n"


def export_obligation(po, directory) -> str:
    path = os.path.join(str(directory), "%s.smt2" % po.id)
    try:
        os.makedirs(str(directory), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(smtlib(po))
    except OSError as e:
        raise IoError("cannot write %s: %s" % (path, e)) from e
    return path
