"""Term language: expressions, predicates and generalized substitutions.

All nodes are frozen dataclasses, so structural equality and hashing come
for free.  The printer emits the ASCII concrete syntax accepted by
``genesyst.frontend``; printing then re-parsing is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Tuple, Union

from genesyst.errors import SortMismatch

# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class EnumLit:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


Expr = Union[Int, Var, EnumLit, Add, Sub]

# ----------------------------------------------------------------- predicates


@dataclass(frozen=True)
class Bool:
    value: bool


TRUE = Bool(True)
FALSE = Bool(False)

CMP_OPS = ("=", "/=", "<", "<=", ">", ">=")
NEGATED_OP = {"=": "/=", "/=": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}
MIRRORED_OP = {"=": "=", "/=": "/=", "<": ">", ">": "<", "<=": ">=", ">=": "<="}


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Interval:
    lo: Expr
    hi: Expr


@dataclass(frozen=True)
class SetRef:
    """An enumerated set; ``elements`` is empty until the name is resolved."""
    name: str
    elements: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Nat:
    pass


Domain = Union[Interval, SetRef, Nat]


@dataclass(frozen=True)
class Member:
    elem: Expr
    domain: Domain


@dataclass(frozen=True)
class And:
    args: Tuple["Pred", ...]


@dataclass(frozen=True)
class Or:
    args: Tuple["Pred", ...]


@dataclass(frozen=True)
class Not:
    arg: "Pred"


@dataclass(frozen=True)
class Implies:
    left: "Pred"
    right: "Pred"


Pred = Union[Bool, Cmp, Member, And, Or, Not, Implies]

# -------------------------------------------------------------- substitutions


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    name: str
    expr: Expr


@dataclass(frozen=True)
class Parallel:
    branches: Tuple["Subst", ...]


@dataclass(frozen=True)
class If:
    cond: Pred
    then: "Subst"
    orelse: Optional["Subst"] = None


@dataclass(frozen=True)
class Select:
    guard: Pred
    body: "Subst"


Subst = Union[Skip, Assign, Parallel, If, Select]

# ------------------------------------------------------------ smart builders


def conj(*preds: Pred) -> Pred:
    """Flattening conjunction; drops TRUE, collapses on FALSE."""
    out = []
    for p in preds:
        parts = p.args if isinstance(p, And) else (p,)
        for q in parts:
            if q == FALSE:
                return FALSE
            if q != TRUE and q not in out:
                out.append(q)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*preds: Pred) -> Pred:
    out = []
    for p in preds:
        parts = p.args if isinstance(p, Or) else (p,)
        for q in parts:
            if q == TRUE:
                return TRUE
            if q != FALSE and q not in out:
                out.append(q)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def conjuncts(p: Pred) -> Tuple[Pred, ...]:
    """Top-level conjuncts, recursively flattened."""
    if isinstance(p, And):
        out = []
        for a in p.args:
            out.extend(conjuncts(a))
        return tuple(out)
    if p == TRUE:
        return ()
    return (p,)


# -------------------------------------------------------------------- printer


def _show_expr(e: Expr) -> str:
    match e:
        case Int(v):
            return str(v)
        case Var(n) | EnumLit(n):
            return n
        case Add(l, r):
            rs = _show_expr(r)
            if isinstance(r, (Add, Sub)):
                rs = "(%s)" % rs
            return "%s+%s" % (_show_expr(l), rs)
        case Sub(l, r):
            rs = _show_expr(r)
            if isinstance(r, (Add, Sub)):
                rs = "(%s)" % rs
            return "%s-%s" % (_show_expr(l), rs)
    raise TypeError("not an expression: %r" % (e,))


def _show_domain(d: Domain) -> str:
    match d:
        case Interval(lo, hi):
            return "%s..%s" % (_show_expr(lo), _show_expr(hi))
        case SetRef(name, _):
            return name
        case Nat():
            return "NAT"
    raise TypeError("not a domain: %r" % (d,))


def _show_operand(p: Pred) -> str:
    s = _show_pred(p)
    if isinstance(p, (And, Or, Implies)):
        return "(%s)" % s
    return s


def _show_pred(p: Pred) -> str:
    match p:
        case Bool(True):
            return "TRUE"
        case Bool(False):
            return "FALSE"
        case Cmp(op, l, r):
            return "%s%s%s" % (_show_expr(l), op, _show_expr(r))
        case Member(e, d):
            return "%s : %s" % (_show_expr(e), _show_domain(d))
        case And(args):
            return " & ".join(_show_operand(a) for a in args)
        case Or(args):
            return " or ".join(_show_operand(a) for a in args)
        case Not(a):
            return "not(%s)" % _show_pred(a)
        case Implies(l, r):
            return "%s => %s" % (_show_operand(l), _show_operand(r))
    raise TypeError("not a predicate: %r" % (p,))


def _show_subst(s: Subst, indent: str) -> str:
    match s:
        case Skip():
            return "skip"
        case Assign(n, e):
            return "%s := %s" % (n, _show_expr(e))
        case Parallel(branches):
            return " || ".join(_show_subst(b, indent) for b in branches)
        case If(c, t, None):
            return "IF %s THEN %s END" % (_show_pred(c), _show_subst(t, indent))
        case If(c, t, f):
            return "IF %s THEN %s ELSE %s END" % (
                _show_pred(c), _show_subst(t, indent), _show_subst(f, indent))
        case Select(g, b):
            return "SELECT %s THEN %s END" % (_show_pred(g), _show_subst(b, indent))
    raise TypeError("not a substitution: %r" % (s,))


def show(node) -> str:
    """Render any term in the ASCII input syntax."""
    if isinstance(node, (Int, Var, EnumLit, Add, Sub)):
        return _show_expr(node)
    if isinstance(node, (Skip, Assign, Parallel, If, Select)):
        return _show_subst(node, "")
    return _show_pred(node)


# -------------------------------------------------------------- traversals


def free_vars(node) -> frozenset:
    """Identifiers (not enum literals) occurring in a term."""
    out = set()
    _collect(node, out)
    return frozenset(out)


def _collect(node, out):
    match node:
        case Var(n):
            out.add(n)
        case Int() | EnumLit() | Bool() | Nat() | SetRef() | Skip():
            pass
        case Add(l, r) | Sub(l, r) | Implies(l, r) | Cmp(_, l, r) | Interval(l, r):
            _collect(l, out)
            _collect(r, out)
        case Member(e, d):
            _collect(e, out)
            _collect(d, out)
        case And(args) | Or(args) | Parallel(args):
            for a in args:
                _collect(a, out)
        case Not(a):
            _collect(a, out)
        case Assign(n, e):
            out.add(n)
            _collect(e, out)
        case If(c, t, f):
            _collect(c, out)
            _collect(t, out)
            if f is not None:
                _collect(f, out)
        case Select(g, b):
            _collect(g, out)
            _collect(b, out)
        case _:
            raise TypeError("unknown node %r" % (node,))


def enum_literals(node) -> frozenset:
    out = set()

    def walk(n):
        match n:
            case EnumLit(name):
                out.add(name)
            case SetRef(_, elements):
                out.update(elements)
            case Int() | Var() | Bool() | Nat() | Skip():
                pass
            case _:
                for child in _children(n):
                    walk(child)
    walk(node)
    return frozenset(out)


def _children(node):
    match node:
        case Add(l, r) | Sub(l, r) | Implies(l, r) | Cmp(_, l, r) | Interval(l, r):
            return (l, r)
        case Member(e, d):
            return (e, d)
        case And(args) | Or(args) | Parallel(args):
            return args
        case Not(a):
            return (a,)
        case Assign(_, e):
            return (e,)
        case If(c, t, f):
            return (c, t) if f is None else (c, t, f)
        case Select(g, b):
            return (g, b)
    return ()


def written_vars(s: Subst) -> frozenset:
    match s:
        case Skip():
            return frozenset()
        case Assign(n, _):
            return frozenset([n])
        case Parallel(branches):
            return frozenset().union(*(written_vars(b) for b in branches))
        case If(_, t, f):
            return written_vars(t) | (frozenset() if f is None else written_vars(f))
        case Select(_, b):
            return written_vars(b)
    raise TypeError("not a substitution: %r" % (s,))


def read_vars(s: Subst) -> frozenset:
    match s:
        case Skip():
            return frozenset()
        case Assign(_, e):
            return free_vars(e)
        case Parallel(branches):
            return frozenset().union(*(read_vars(b) for b in branches))
        case If(c, t, f):
            out = free_vars(c) | read_vars(t)
            return out if f is None else out | read_vars(f)
        case Select(g, b):
            return free_vars(g) | read_vars(b)
    raise TypeError("not a substitution: %r" % (s,))


def rename(node, mapping: Mapping[str, object]):
    """Rebuild a term, replacing each ``Var`` whose name is in ``mapping``.

    Values may be expressions (plain replacement) or callables taking the
    Var and returning the replacement node.
    """
    match node:
        case Var(n):
            if n in mapping:
                r = mapping[n]
                return r(node) if callable(r) else r
            return node
        case Int() | EnumLit() | Bool() | Nat() | Skip():
            return node
        case SetRef():
            r = mapping.get(("set", node.name))
            return node if r is None else r
        case Add(l, r):
            return Add(rename(l, mapping), rename(r, mapping))
        case Sub(l, r):
            return Sub(rename(l, mapping), rename(r, mapping))
        case Cmp(op, l, r):
            return Cmp(op, rename(l, mapping), rename(r, mapping))
        case Interval(l, r):
            return Interval(rename(l, mapping), rename(r, mapping))
        case Member(e, d):
            return Member(rename(e, mapping), rename(d, mapping))
        case And(args):
            return And(tuple(rename(a, mapping) for a in args))
        case Or(args):
            return Or(tuple(rename(a, mapping) for a in args))
        case Not(a):
            return Not(rename(a, mapping))
        case Implies(l, r):
            return Implies(rename(l, mapping), rename(r, mapping))
        case Assign(n, e):
            return Assign(n, rename(e, mapping))
        case Parallel(bs):
            return Parallel(tuple(rename(b, mapping) for b in bs))
        case If(c, t, f):
            return If(rename(c, mapping), rename(t, mapping),
                      None if f is None else rename(f, mapping))
        case Select(g, b):
            return Select(rename(g, mapping), rename(b, mapping))
    raise TypeError("unknown node %r" % (node,))


# ------------------------------------------------------------------- sorts

INT = "int"
ENUM = "enum"


def sort_check(node, env: Optional[Mapping[str, str]] = None,
               literal_sets: Optional[Mapping[str, str]] = None) -> dict:
    """Infer identifier sorts and raise SortMismatch on ill-sorted terms.

    ``env`` pre-assigns sorts: ``"int"`` or the name of an enumerated set.
    ``literal_sets`` maps enum literals to their set; without it all enum
    literals share one anonymous enum sort.  Returns the inferred sorts.
    """
    sorts = dict(env or {})
    lits = literal_sets or {}

    def lit_sort(name):
        return lits.get(name, ENUM)

    def compatible(a, b):
        if a is None or b is None:
            return True
        if a == b:
            return True
        # anonymous enum sort unifies with any named set
        return INT not in (a, b) and ENUM in (a, b)

    def unify(e, want, ctx):
        got = expr_sort(e)
        if not compatible(got, want):
            raise SortMismatch("%s: %s is %s, expected %s" % (show(ctx), show(e), got, want))
        if isinstance(e, Var) and want is not None and got in (None, ENUM):
            sorts[e.name] = want

    def expr_sort(e):
        match e:
            case Int():
                return INT
            case EnumLit(n):
                return lit_sort(n)
            case Var(n):
                return sorts.get(n)
            case Add(l, r) | Sub(l, r):
                unify(l, INT, e)
                unify(r, INT, e)
                return INT
        raise TypeError(e)

    def walk(n):
        match n:
            case Cmp(op, l, r):
                if op in ("=", "/="):
                    sl, sr = expr_sort(l), expr_sort(r)
                    if sl is not None:
                        unify(r, sl, n)
                    elif sr is not None:
                        unify(l, sr, n)
                else:
                    unify(l, INT, n)
                    unify(r, INT, n)
            case Member(e, Interval(lo, hi)):
                unify(e, INT, n)
                unify(lo, INT, n)
                unify(hi, INT, n)
            case Member(e, Nat()):
                unify(e, INT, n)
            case Member(e, SetRef(name, elements)):
                unify(e, name, n)
                if isinstance(e, EnumLit) and elements and e.name not in elements:
                    raise SortMismatch("%s: %s is not an element of %s"
                                       % (show(n), e.name, name))
            case Assign(name, e):
                s = sorts.get(name)
                es = expr_sort(e)
                if not compatible(s, es):
                    raise SortMismatch("%s: cannot assign %s value to %s variable"
                                       % (show(n), es, s))
                if s is None and es is not None:
                    sorts[name] = es
            case _:
                for c in _children(n):
                    walk(c)

    # two passes so that sorts learnt late propagate to earlier occurrences
    walk(node)
    walk(node)
    return sorts


# ------------------------------------------------------------ substitution


def substitute(p, bindings: Mapping[str, Expr], check_sorts: bool = True):
    """Simultaneously replace free identifiers by expressions.

    The fragment is quantifier-free, so capture cannot occur.
    """
    if not bindings:
        return p
    out = rename(p, dict(bindings))
    if check_sorts:
        sort_check(out)
    return out
