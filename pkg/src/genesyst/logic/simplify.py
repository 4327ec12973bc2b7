"""Context-aware simplification.

``simplify(p, context)`` returns ``p'`` with ``context & p <=> context & p'``.
The context is digested into a :class:`Facts` base: literal bindings,
linear integer constraints (decided with Fourier-Motzkin), enum
domains/exclusions, and residual disjunctive facts that get re-examined
whenever new atoms are learnt.  The simplifier is best-effort: it never
claims an equivalence it cannot justify, but it may leave reducible
formulas untouched.
"""

from __future__ import annotations

from typing import Dict, List, Optional

from genesyst.logic import linear
from genesyst.logic.terms import (
    FALSE, MIRRORED_OP, NEGATED_OP, TRUE, Add, And, Bool, Cmp, EnumLit,
    Implies, Int, Interval, Member, Nat, Not, Or, Pred, SetRef, Sub, Var,
    rename,
)

MAX_ROUNDS = 16


class Facts:
    """What is known to hold.  Mutated only while being built."""

    def __init__(self):
        self.bindings: Dict[str, object] = {}
        self.linear: List[linear.Constraint] = []
        self.diseqs = set()
        self.enum_domain: Dict[str, frozenset] = {}
        self.enum_excluded: Dict[str, set] = {}
        self.int_ranges: Dict[str, tuple] = {}
        self.residual: List[Pred] = []
        self.inconsistent = False
        self._cache = {}

    @classmethod
    def of(cls, *preds: Pred) -> "Facts":
        f = cls()
        for p in preds:
            f.add(p)
        f.saturate()
        return f

    def copy(self) -> "Facts":
        f = Facts.__new__(Facts)
        f.bindings = dict(self.bindings)
        f.linear = list(self.linear)
        f.diseqs = set(self.diseqs)
        f.enum_domain = dict(self.enum_domain)
        f.enum_excluded = {k: set(v) for k, v in self.enum_excluded.items()}
        f.int_ranges = dict(self.int_ranges)
        f.residual = list(self.residual)
        f.inconsistent = self.inconsistent
        f._cache = {}
        return f

    def extended(self, *preds: Pred) -> "Facts":
        f = self.copy()
        for p in preds:
            f.add(p)
        f.saturate()
        return f

    def without_residual(self, r: Pred) -> "Facts":
        f = self.copy()
        f.residual.remove(r)
        return f

    # ------------------------------------------------------------ learning

    def add(self, p: Pred):
        if self.inconsistent:
            return
        self._cache.clear()
        match p:
            case Bool(True):
                pass
            case Bool(False):
                self.inconsistent = True
            case And(args):
                for a in args:
                    self.add(a)
            case Cmp():
                self._add_cmp(p)
            case Member(e, d):
                self._add_member(e, d)
            case Not(a):
                self._add_negation(a)
            case Or() | Implies():
                if p not in self.residual:
                    self.residual.append(p)

    def _add_negation(self, a: Pred):
        match a:
            case Bool(b):
                self.add(Bool(not b))
            case Cmp(op, l, r):
                self.add(Cmp(NEGATED_OP[op], l, r))
            case Not(b):
                self.add(b)
            case Or(args):
                for x in args:
                    self.add(Not(x))
            case Implies(l, r):
                self.add(l)
                self.add(Not(r))
            case And(args):
                self.add(Or(tuple(Not(x) for x in args)))
            case Member(e, Interval(lo, hi)):
                self.add(Or((Cmp("<", e, lo), Cmp(">", e, hi))))
            case Member(e, Nat()):
                self.add(Cmp("<", e, Int(0)))
            case _:
                # x /: S for an enum-sorted x carries no usable information
                pass

    def _is_enum(self, e) -> bool:
        if isinstance(e, EnumLit):
            return True
        if isinstance(e, Var):
            n = e.name
            return (n in self.enum_domain or n in self.enum_excluded
                    or isinstance(self.bindings.get(n), str))
        return False

    def _bind(self, name, value):
        old = self.bindings.get(name)
        if old is not None and old != value:
            self.inconsistent = True
            return
        if isinstance(value, str):
            if value in self.enum_excluded.get(name, ()):
                self.inconsistent = True
                return
            dom = self.enum_domain.get(name)
            if dom is not None and value not in dom:
                self.inconsistent = True
                return
        self.bindings[name] = value

    def _add_cmp(self, c: Cmp):
        op, l, r = c.op, c.left, c.right
        if self._is_enum(l) or self._is_enum(r):
            if isinstance(l, EnumLit) and isinstance(r, Var):
                l, r = r, l
            if isinstance(l, EnumLit) and isinstance(r, EnumLit):
                if (l.name == r.name) != (op == "="):
                    self.inconsistent = True
            elif isinstance(l, Var) and isinstance(r, EnumLit):
                if op == "=":
                    self._bind(l.name, r.name)
                else:
                    ex = self.enum_excluded.setdefault(l.name, set())
                    ex.add(r.name)
                    if self.bindings.get(l.name) == r.name:
                        self.inconsistent = True
                    dom = self.enum_domain.get(l.name)
                    if dom is not None:
                        left = dom - ex
                        if not left:
                            self.inconsistent = True
                        elif len(left) == 1:
                            self._bind(l.name, next(iter(left)))
            return
        ll, rl = linear.linearize(l), linear.linearize(r)
        if ll is None or rl is None:
            return
        if op == "/=":
            d = linear.lin_sub(ll, rl)
            self.diseqs.add(_lin_key(d))
            self.residual.append(Or((Cmp("<", l, r), Cmp(">", l, r))))
            return
        if op == "=":
            if isinstance(l, Var) and isinstance(r, Int):
                self._bind(l.name, r.value)
            elif isinstance(r, Var) and isinstance(l, Int):
                self._bind(r.name, l.value)
        self.linear.extend(linear.comparison(op, ll, rl))

    def _add_member(self, e, d):
        match d:
            case Interval(lo, hi):
                self._add_cmp(Cmp(">=", e, lo))
                self._add_cmp(Cmp("<=", e, hi))
                if isinstance(e, Var):
                    a, b = linear.linearize(lo), linear.linearize(hi)
                    if a is not None and b is not None and not a[0] and not b[0]:
                        old = self.int_ranges.get(e.name)
                        rng = (a[1], b[1])
                        if old is not None:
                            rng = (max(old[0], rng[0]), min(old[1], rng[1]))
                        self.int_ranges[e.name] = rng
            case Nat():
                self._add_cmp(Cmp(">=", e, Int(0)))
            case SetRef(_, elements):
                if not elements:
                    return
                if isinstance(e, EnumLit):
                    if e.name not in elements:
                        self.inconsistent = True
                elif isinstance(e, Var):
                    dom = frozenset(elements)
                    old = self.enum_domain.get(e.name)
                    dom = dom if old is None else dom & old
                    self.enum_domain[e.name] = dom
                    b = self.bindings.get(e.name)
                    left = dom - self.enum_excluded.get(e.name, set())
                    if (b is not None and b not in dom) or not left:
                        self.inconsistent = True
                    elif b is None and len(left) == 1:
                        self._bind(e.name, next(iter(left)))

    def saturate(self):
        """Re-simplify residual facts against the atomic ones until stable."""
        for _ in range(MAX_ROUNDS):
            if self.inconsistent:
                return
            if self.linear and linear.infeasible(self._linear_with_bindings()):
                self.inconsistent = True
                return
            pending, self.residual = self.residual, []
            atomic = self.copy()
            changed = False
            for r in pending:
                r2 = _simp(r, atomic)
                if r2 == r:
                    self.residual.append(r)
                    continue
                changed = True
                self.add(r2)
                if self.inconsistent:
                    return
            if not changed:
                return

    # ------------------------------------------------------------ queries

    def _linear_with_bindings(self):
        out = list(self.linear)
        for n, v in self.bindings.items():
            if isinstance(v, int):
                out.append(linear.make(({n: 1}, -v), "eq"))
        return out

    def refutes(self, extra: List[linear.Constraint]) -> bool:
        """True when the linear facts plus ``extra`` have no integer model."""
        key = tuple(extra)
        hit = self._cache.get(key)
        if hit is None:
            hit = linear.infeasible(self._linear_with_bindings() + list(extra))
            self._cache[key] = hit
        return hit

    def decide(self, atom: Pred) -> Optional[bool]:
        """Truth value of an atom implied by the facts, or None."""
        if self.inconsistent:
            return True
        match atom:
            case Cmp(op, l, r):
                if self._is_enum(l) or self._is_enum(r):
                    return self._decide_enum(op, l, r)
                ll, rl = linear.linearize(l), linear.linearize(r)
                if ll is None or rl is None:
                    return None
                pos = linear.comparison(op, ll, rl) if op != "/=" else None
                neg = linear.comparison(NEGATED_OP[op], ll, rl) if op != "=" else None
                if op == "=":
                    d = linear.lin_sub(ll, rl)
                    if _lin_key(d) in self.diseqs or _lin_key(linear.lin_neg(d)) in self.diseqs:
                        return False
                    if self.refutes(linear.comparison("<", ll, rl)) and \
                            self.refutes(linear.comparison(">", ll, rl)):
                        return True
                    if self.refutes(pos):
                        return False
                    return None
                if op == "/=":
                    d = linear.lin_sub(ll, rl)
                    if _lin_key(d) in self.diseqs or _lin_key(linear.lin_neg(d)) in self.diseqs:
                        return True
                    if self.refutes(neg):
                        return True
                    if self.refutes(linear.comparison("<", ll, rl)) and \
                            self.refutes(linear.comparison(">", ll, rl)):
                        return False
                    return None
                if self.refutes(neg):
                    return True
                if self.refutes(pos):
                    return False
                return None
            case Member(e, Interval(lo, hi)):
                a = self.decide(Cmp(">=", e, lo))
                b = self.decide(Cmp("<=", e, hi))
                if a is False or b is False:
                    return False
                if a and b:
                    return True
                return None
            case Member(e, Nat()):
                return self.decide(Cmp(">=", e, Int(0)))
            case Member(e, SetRef(_, elements)):
                if not elements:
                    return None
                if isinstance(e, EnumLit):
                    return e.name in elements
                if isinstance(e, Var):
                    b = self.bindings.get(e.name)
                    if isinstance(b, str):
                        return b in elements
                    dom = self.enum_domain.get(e.name)
                    if dom is not None:
                        left = dom - self.enum_excluded.get(e.name, set())
                        if left <= set(elements):
                            return True
                        if not (left & set(elements)):
                            return False
                return None
        return None

    def _decide_enum(self, op, l, r) -> Optional[bool]:
        if op not in ("=", "/="):
            return None
        lv = self._enum_value(l)
        rv = self._enum_value(r)
        eq = None
        if lv is not None and rv is not None:
            eq = lv == rv
        else:
            if lv is not None and isinstance(r, Var):
                l, r, lv, rv = r, l, rv, lv
            if rv is not None and isinstance(l, Var):
                if rv in self.enum_excluded.get(l.name, ()):
                    eq = False
                else:
                    dom = self.enum_domain.get(l.name)
                    if dom is not None:
                        left = dom - self.enum_excluded.get(l.name, set())
                        if rv not in left:
                            eq = False
                        elif left == {rv}:
                            eq = True
        if eq is None:
            return None
        return eq if op == "=" else not eq

    def _enum_value(self, e):
        if isinstance(e, EnumLit):
            return e.name
        if isinstance(e, Var):
            v = self.bindings.get(e.name)
            return v if isinstance(v, str) else None
        return None

    def finite_domain(self, name: str):
        """Candidate values when the facts confine ``name`` to a small
        literal range or enum set; None otherwise."""
        if name in self.bindings:
            return None
        dom = self.enum_domain.get(name)
        if dom is not None:
            return sorted(dom - self.enum_excluded.get(name, set()))
        rng = self.int_ranges.get(name)
        if rng is not None and rng[1] - rng[0] < 64:
            return list(range(rng[0], rng[1] + 1))
        return None


def _lin_key(d):
    return linear.make(d, "eq")


# ------------------------------------------------------------ rewriting


def _fold(e):
    match e:
        case Add(l, r) | Sub(l, r):
            l2, r2 = _fold(l), _fold(r)
            if isinstance(l2, Int) and isinstance(r2, Int):
                v = l2.value + r2.value if isinstance(e, Add) else l2.value - r2.value
                return Int(v)
            if isinstance(r2, Int) and r2.value == 0:
                return l2
            if isinstance(l2, Int) and l2.value == 0 and isinstance(e, Add):
                return r2
            return type(e)(l2, r2)
    return e


def _ground(e) -> bool:
    match e:
        case Int() | EnumLit():
            return True
        case Var():
            return False
        case Add(l, r) | Sub(l, r):
            return _ground(l) and _ground(r)
    return False


def _instantiate(atom: Pred, facts: Facts) -> Pred:
    if not facts.bindings:
        return atom
    mapping = {}
    for n, v in facts.bindings.items():
        mapping[n] = Int(v) if isinstance(v, int) else EnumLit(v)
    return rename(atom, mapping)


def _simp_atom(atom: Pred, facts: Facts) -> Pred:
    atom = _instantiate(atom, facts)
    match atom:
        case Cmp(op, l, r):
            atom = Cmp(op, _fold(l), _fold(r))
            if _ground(atom.left) and _ground(atom.right):
                from genesyst.logic.wp import evaluate
                return Bool(evaluate(atom, {}))
        case Member(e, Interval(lo, hi)):
            atom = Member(_fold(e), Interval(_fold(lo), _fold(hi)))
            if _ground(atom.elem) and _ground(atom.domain.lo) and _ground(atom.domain.hi):
                from genesyst.logic.wp import evaluate
                return Bool(evaluate(atom, {}))
        case Member(e, d):
            atom = Member(_fold(e), d)
            if isinstance(atom.elem, Int) and isinstance(d, Nat):
                return Bool(atom.elem.value >= 0)
            if isinstance(atom.elem, EnumLit) and isinstance(d, SetRef) and d.elements:
                return Bool(atom.elem.name in d.elements)
    verdict = facts.decide(atom)
    if verdict is not None:
        return Bool(verdict)
    if isinstance(atom, Cmp) and not facts._is_enum(atom.left) and not facts._is_enum(atom.right):
        atom = _tighten(atom, facts)
    return atom


def _tighten(c: Cmp, facts: Facts) -> Cmp:
    """Use one-sided bounds to turn ``/=`` into ``<``/``>`` and ``<=``/``>=``
    into ``=``."""
    op, l, r = c.op, c.left, c.right
    if op == "/=":
        if facts.decide(Cmp("<=", l, r)):
            return Cmp("<", l, r)
        if facts.decide(Cmp(">=", l, r)):
            return Cmp(">", l, r)
    elif op in ("<=", ">="):
        if facts.decide(Cmp(MIRRORED_OP[op], l, r)):
            return Cmp("=", l, r)
    return c


def negate(p: Pred) -> Pred:
    match p:
        case Bool(b):
            return Bool(not b)
        case Cmp(op, l, r):
            return Cmp(NEGATED_OP[op], l, r)
        case Not(a):
            return a
    return Not(p)


def _simp(p: Pred, facts: Facts) -> Pred:
    if facts.inconsistent:
        return TRUE
    match p:
        case Bool():
            return p
        case Cmp() | Member():
            return _simp_atom(p, facts)
        case Not(a):
            a2 = _simp(a, facts)
            if isinstance(a2, (Bool, Cmp, Not)):
                return _simp(negate(a2), facts) if isinstance(a2, Cmp) else negate(a2)
            return Not(a2)
        case And(args):
            out = []
            f = facts
            for a in args:
                a2 = _simp(a, f)
                if a2 == FALSE:
                    return FALSE
                parts = a2.args if isinstance(a2, And) else (a2,)
                for q in parts:
                    if q != TRUE and q not in out:
                        out.append(q)
                        f = f.extended(q)
                        if f.inconsistent:
                            return FALSE
            if not out:
                return TRUE
            return out[0] if len(out) == 1 else And(tuple(out))
        case Or(args):
            out = []
            for a in args:
                a2 = _simp(a, facts)
                if a2 == TRUE:
                    return TRUE
                parts = a2.args if isinstance(a2, Or) else (a2,)
                for q in parts:
                    if q != FALSE and q not in out:
                        out.append(q)
            if not out:
                return FALSE
            return out[0] if len(out) == 1 else Or(tuple(out))
        case Implies(l, r):
            l2 = _simp(l, facts)
            if l2 == FALSE:
                return TRUE
            if l2 == TRUE:
                return _simp(r, facts)
            f = facts.extended(l2)
            if f.inconsistent:
                return TRUE
            r2 = _simp(r, f)
            if r2 == TRUE:
                return TRUE
            if r2 == FALSE:
                return _simp(Not(l2), facts)
            return Implies(l2, r2)
    raise TypeError("not a predicate: %r" % (p,))


def simplify(p: Pred, context: Pred = TRUE) -> Pred:
    """Simplify ``p`` assuming ``context``; iterates to a fixpoint."""
    facts = context if isinstance(context, Facts) else Facts.of(context)
    if facts.inconsistent:
        return TRUE
    for _ in range(MAX_ROUNDS):
        q = _simp(p, facts)
        if q == p:
            return q
        p = q
    return p
