"""Parser for the ASCII event-B subset and the machine model it produces.

Grammar (keywords are case-sensitive)::

    machine  := ("MACHINE" | "REFINEMENT") ident ["REFINES" ident]
                ["SETS" setdef (";" setdef)*] ["CONSTANTS" identlist]
                ["PROPERTIES" pred] "VARIABLES" identlist "INVARIANT" pred
                "ASSERTIONS" states "INITIALISATION" subst
                "OPERATIONS" event (";" event)* "END"
    setdef   := ident "=" "{" ident ("," ident)* "}"
    states   := statepred ("or" statepred)*
    statepred:= [ident "@"] "(" pred ")"
    event    := ident "=" "SELECT" pred "THEN" subst "END"

A refinement may mention constants and sets of the machine it refines
without redeclaring them; such names stay unresolved (``imports``) until
:func:`resolve_refinement` links the two models.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from genesyst.errors import (
    BSyntaxError, DuplicateIdentifier, EventSetMismatch, MissingAssertions,
    NameMismatch, ParallelWriteConflict, SortMismatch, UnboundIdentifier,
    UnsupportedRefinement, UnsupportedSubstitution,
)
from genesyst.logic.terms import (
    TRUE, Add, And, Assign, Bool, Cmp, EnumLit, If, Implies, Int, Interval,
    Member, Nat, Not, Or, Parallel, Pred, Select, SetRef, Skip, Sub, Subst,
    Var, conj, conjuncts, free_vars, read_vars, rename, show, sort_check,
    written_vars,
)

KEYWORDS = frozenset("""
    MACHINE REFINEMENT REFINES SETS CONSTANTS PROPERTIES VARIABLES INVARIANT
    ASSERTIONS INITIALISATION OPERATIONS END SELECT THEN IF ELSE TRUE FALSE
    NAT skip or not
""".split())

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>/\*.*?\*/)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>:=|\.\.|=>|/=|<=|>=|\|\||[&=<>:+\-(),;{}@])
""", re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class Token:
    kind: str        # "int", "ident", "kw", "sym", "eof"
    value: str
    line: int
    col: int


def tokenize(source: str) -> List[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            if source.startswith("/*", pos):
                raise BSyntaxError(line, col, "'*/' closing the comment", "/*")
            raise BSyntaxError(line, col, "a token", source[pos])
        kind = m.lastgroup
        text = m.group()
        if kind == "ident" and text in KEYWORDS:
            kind = "kw"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = m.start() + text.rindex("\n") + 1
        pos = m.end()
    # EOF sits on the last character so positions stay inside the text
    if source:
        last = len(source) - 1
        line = source.count("\n", 0, last) + 1
        col = last - (source.rfind("\n", 0, last) + 1) + 1
        tokens.append(Token("eof", "", line, col))
    else:
        tokens.append(Token("eof", "", 1, 1))
    return tokens


# ------------------------------------------------------------------ model


@dataclass(frozen=True)
class Event:
    name: str
    guard: Pred
    action: Subst


@dataclass(frozen=True)
class MachineModel:
    name: str
    kind: str                                   # "machine" | "refinement"
    refines: Optional[str]
    sets: Tuple[Tuple[str, Tuple[str, ...]], ...]
    constants: Tuple[str, ...]
    properties: Pred
    variables: Tuple[str, ...]
    invariant: Pred
    state_predicates: Tuple[Tuple[str, Pred], ...]
    initialisation: Subst
    events: Tuple[Event, ...]
    imports: frozenset = frozenset()
    positions: Dict[str, Tuple[int, int]] = field(default_factory=dict, compare=False,
                                                  hash=False, repr=False)

    @property
    def set_elements(self) -> Dict[str, str]:
        return {e: name for name, elems in self.sets for e in elems}

    def event(self, name: str) -> Event:
        for e in self.events:
            if e.name == name:
                return e
        raise KeyError(name)

    def state(self, name: str) -> Pred:
        return dict(self.state_predicates)[name]

    @property
    def sorts(self) -> Dict[str, str]:
        """Sort of every variable and constant: "int" or an enum set name."""
        env = {n: "int" for n in self.constants + self.variables}
        for c in conjuncts(self.properties) + conjuncts(self.invariant):
            if isinstance(c, Member) and isinstance(c.elem, Var) \
                    and isinstance(c.domain, SetRef) and c.elem.name in env:
                env[c.elem.name] = c.domain.name
        return env


# ----------------------------------------------------------------- parser


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0
        self.sets: Dict[str, Tuple[str, ...]] = {}
        self.elements: Dict[str, str] = {}
        self.refs: List[Tuple[str, int, int]] = []
        self.positions: Dict[str, Tuple[int, int]] = {}

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, value: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "sym") and t.value == value

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def fail(self, expected: str):
        t = self.tok
        raise BSyntaxError(t.line, t.col, expected,
                           "end of input" if t.kind == "eof" else t.value)

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.fail(repr(value))
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail("an identifier")
        return self.advance()

    def ident_list(self) -> List[Token]:
        out = [self.ident()]
        while self.at(","):
            self.advance()
            out.append(self.ident())
        return out

    def clause(self, name: str) -> bool:
        if self.at(name):
            t = self.advance()
            self.positions[name] = (t.line, t.col)
            return True
        return False

    # -- machine

    def machine(self) -> MachineModel:
        if self.clause("MACHINE"):
            kind = "machine"
        elif self.clause("REFINEMENT"):
            kind = "refinement"
        else:
            self.fail("'MACHINE' or 'REFINEMENT'")
        name = self.ident().value
        refines = None
        if kind == "refinement":
            if not self.clause("REFINES"):
                self.fail("'REFINES'")
            refines = self.ident().value
        elif self.at("REFINES"):
            self.fail("'SETS', 'CONSTANTS', 'PROPERTIES' or 'VARIABLES' (a MACHINE refines nothing)")

        declared: List[Tuple[str, Token]] = []
        sets = []
        if self.clause("SETS"):
            while True:
                st = self.ident()
                self.expect("=")
                self.expect("{")
                elems = self.ident_list()
                self.expect("}")
                declared.append((st.value, st))
                declared.extend((e.value, e) for e in elems)
                names = tuple(e.value for e in elems)
                sets.append((st.value, names))
                self.sets[st.value] = names
                for e in names:
                    self.elements[e] = st.value
                if not self.at(";"):
                    break
                self.advance()
        constants = []
        if self.clause("CONSTANTS"):
            constants = self.ident_list()
        properties = TRUE
        if self.clause("PROPERTIES"):
            properties = self.pred()
        if not self.clause("VARIABLES"):
            self.fail("'VARIABLES'")
        variables = self.ident_list()
        if not self.clause("INVARIANT"):
            self.fail("'INVARIANT'")
        invariant = self.pred()
        if not self.clause("ASSERTIONS"):
            if self.at("INITIALISATION") or self.tok.kind == "eof":
                raise MissingAssertions(self.tok.line, self.tok.col)
            self.fail("'ASSERTIONS'")
        states = self.states()
        if not self.clause("INITIALISATION"):
            self.fail("'INITIALISATION'")
        init = self.subst()
        if not self.clause("OPERATIONS"):
            self.fail("'OPERATIONS'")
        events = [self.event()]
        while self.at(";"):
            self.advance()
            events.append(self.event())
        self.expect("END")
        if self.tok.kind != "eof":
            self.fail("end of input")

        declared.extend((t.value, t) for t in constants)
        declared.extend((t.value, t) for t in variables)
        seen = set()
        for n, _ in declared:
            if n in seen:
                raise DuplicateIdentifier(n)
            seen.add(n)
        for group in (states, events):
            names = [x[0] if isinstance(x, tuple) else x.name for x in group]
            for n in names:
                if names.count(n) > 1:
                    raise DuplicateIdentifier(n)

        var_names = tuple(t.value for t in variables)
        imports = set()
        for n, line, col in self.refs:
            if n not in seen:
                if kind == "machine":
                    raise UnboundIdentifier(n, (line, col))
                imports.add(n)
        for ev in events:
            for v in written_vars(ev.action):
                if v not in var_names:
                    raise UnboundIdentifier(v, self.positions.get("event " + ev.name))
        for v in written_vars(init):
            if v not in var_names:
                raise UnboundIdentifier(v, self.positions.get("INITIALISATION"))

        return MachineModel(
            name=name, kind=kind, refines=refines, sets=tuple(sets),
            constants=tuple(t.value for t in constants), properties=properties,
            variables=var_names, invariant=invariant,
            state_predicates=tuple(states), initialisation=init,
            events=tuple(events), imports=frozenset(imports),
            positions=dict(self.positions))

    def states(self):
        out = []
        while True:
            label = None
            if self.tok.kind == "ident" and self.peek().value == "@":
                label = self.advance().value
                self.advance()
            t = self.expect("(")
            p = self.pred()
            self.expect(")")
            name = label if label is not None else "S%d" % len(out)
            self.positions["state " + name] = (t.line, t.col)
            out.append((name, p))
            if not self.at("or"):
                return out
            self.advance()

    def event(self) -> Event:
        t = self.ident()
        self.positions["event " + t.value] = (t.line, t.col)
        self.expect("=")
        if not self.at("SELECT"):
            self.fail("'SELECT' (event bodies are SELECT guard THEN action END)")
        self.advance()
        guard = self.pred()
        self.expect("THEN")
        action = self.subst()
        self.expect("END")
        return Event(t.value, guard, action)

    # -- substitutions

    def subst(self) -> Subst:
        branches = [self.subst_atom()]
        while self.at("||"):
            self.advance()
            branches.append(self.subst_atom())
        return branches[0] if len(branches) == 1 else Parallel(tuple(branches))

    def subst_atom(self) -> Subst:
        if self.at("skip"):
            self.advance()
            return Skip()
        if self.at("IF"):
            self.advance()
            c = self.pred()
            self.expect("THEN")
            t = self.subst()
            f = None
            if self.at("ELSE"):
                self.advance()
                f = self.subst()
            self.expect("END")
            return If(c, t, f)
        if self.at("SELECT"):
            self.fail("a substitution (SELECT only opens an event body)")
        if self.tok.kind == "ident":
            t = self.advance()
            if t.value in self.elements:
                raise BSyntaxError(t.line, t.col, "a variable", t.value)
            self.expect(":=")
            return Assign(t.value, self.expr())
        self.fail("a substitution")

    # -- predicates

    def pred(self) -> Pred:
        left = self.disjunction()
        if self.at("=>"):
            self.advance()
            return Implies(left, self.pred())
        return left

    def disjunction(self) -> Pred:
        args = [self.conjunction()]
        while self.at("or"):
            self.advance()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self) -> Pred:
        args = [self.unary()]
        while self.at("&"):
            self.advance()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Pred:
        if self.at("not"):
            self.advance()
            self.expect("(")
            p = self.pred()
            self.expect(")")
            return Not(p)
        if self.at("TRUE"):
            self.advance()
            return TRUE
        if self.at("FALSE"):
            self.advance()
            return Bool(False)
        if self.at("("):
            # "(" opens either a predicate or an arithmetic term
            save = self.i
            self.advance()
            try:
                p = self.pred()
                self.expect(")")
            except BSyntaxError:
                self.i = save
                return self.comparison()
            if self.tok.kind == "sym" and self.tok.value in ("=", "/=", "<", "<=", ">", ">=", ":", "+", "-"):
                self.i = save
                return self.comparison()
            return p
        return self.comparison()

    def comparison(self) -> Pred:
        left = self.expr()
        t = self.tok
        if t.kind == "sym" and t.value in ("=", "/=", "<", "<=", ">", ">="):
            self.advance()
            return Cmp(t.value, left, self.expr())
        if self.at(":"):
            self.advance()
            if self.at("NAT"):
                self.advance()
                return Member(left, Nat())
            if self.tok.kind == "ident" and self.peek().value not in ("..", "+", "-"):
                name = self.advance().value
                if name not in self.sets:
                    self.refs.append((name, self.tokens[self.i - 1].line,
                                      self.tokens[self.i - 1].col))
                return Member(left, SetRef(name, self.sets.get(name, ())))
            lo = self.expr()
            self.expect("..")
            return Member(left, Interval(lo, self.expr()))
        self.fail("a comparison operator or ':'")

    def expr(self):
        left = self.term()
        while self.tok.kind == "sym" and self.tok.value in ("+", "-"):
            op = self.advance().value
            right = self.term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Int(int(t.value))
        if self.at("-"):
            self.advance()
            if self.tok.kind == "int":
                return Int(-int(self.advance().value))
            return Sub(Int(0), self.term())
        if t.kind == "ident":
            self.advance()
            if t.value in self.elements:
                return EnumLit(t.value)
            if t.value in self.sets:
                raise BSyntaxError(t.line, t.col, "an expression (sets only follow ':')", t.value)
            self.refs.append((t.value, t.line, t.col))
            return Var(t.value)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.fail("an expression")


def parse(source: str) -> MachineModel:
    """Parse and validate a machine or refinement text."""
    m = _Parser(source).machine()
    _check_events(m)
    if m.kind == "machine":
        check_sorts(m)
    return m


def parse_predicate(text: str, sets=()) -> Pred:
    """Parse a stand-alone predicate; ``sets`` resolves enum literals."""
    p = _Parser(text)
    for name, elems in sets:
        p.sets[name] = tuple(elems)
        for e in elems:
            p.elements[e] = name
    pred = p.pred()
    if p.tok.kind != "eof":
        p.fail("end of predicate")
    return pred


def _check_parallel(s: Subst, event: str):
    match s:
        case Parallel(branches):
            seen = set()
            plain = all(isinstance(b, (Assign, Skip)) for b in branches)
            for b in branches:
                w = written_vars(b)
                clash = w & seen
                if clash:
                    raise ParallelWriteConflict(sorted(clash)[0], event)
                seen |= w
            if not plain:
                # sequentialised wp is only valid without cross reads
                for i, b in enumerate(branches):
                    others = set()
                    for j, o in enumerate(branches):
                        if j != i:
                            others |= written_vars(o)
                    cross = read_vars(b) & others
                    if cross:
                        raise ParallelWriteConflict(
                            sorted(cross)[0], event,
                            "read by one branch and written by another")
            for b in branches:
                _check_parallel(b, event)
        case If(_, t, f):
            _check_parallel(t, event)
            if f is not None:
                _check_parallel(f, event)
        case Select():
            raise UnsupportedSubstitution("event %s: nested SELECT" % event)
        case _:
            pass


def _check_events(m: MachineModel):
    _check_parallel(m.initialisation, "INITIALISATION")
    for ev in m.events:
        _check_parallel(ev.action, ev.name)


def check_sorts(m: MachineModel):
    env = m.sorts
    lits = m.set_elements
    parts = [m.properties, m.invariant] + [p for _, p in m.state_predicates]
    parts.append(m.initialisation)
    for ev in m.events:
        parts.extend((ev.guard, ev.action))
    for p in parts:
        sorts = sort_check(p, env, lits)
        for n, s in sorts.items():
            if n in env and env[n] != s and not (env[n] == "int" and s is None):
                raise SortMismatch("%s is used as %s but declared %s" % (n, s, env[n]))


# -------------------------------------------------------------- printing


def format_machine(m: MachineModel) -> str:
    """Pretty-print a model in the input syntax (round-trips through parse)."""
    lines = []
    head = "MACHINE" if m.kind == "machine" else "REFINEMENT"
    lines.append("%s %s" % (head, m.name))
    if m.refines:
        lines.append("REFINES %s" % m.refines)
    if m.sets:
        lines.append("SETS")
        lines.append(";\n".join("  %s = {%s}" % (n, ", ".join(es)) for n, es in m.sets))
    if m.constants:
        lines.append("CONSTANTS %s" % ", ".join(m.constants))
    if m.properties != TRUE:
        lines.append("PROPERTIES %s" % show(m.properties))
    lines.append("VARIABLES %s" % ", ".join(m.variables))
    lines.append("INVARIANT %s" % show(m.invariant))
    lines.append("ASSERTIONS")
    lines.append("    " + "\n  or ".join("%s@(%s)" % (n, show(p)) for n, p in m.state_predicates))
    lines.append("INITIALISATION %s" % show(m.initialisation))
    lines.append("OPERATIONS")
    lines.append(";\n".join("  %s = SELECT %s THEN %s END"
                            % (e.name, show(e.guard), show(e.action)) for e in m.events))
    lines.append("END")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ refinement


@dataclass(frozen=True)
class LinkedRefinement:
    """A refinement attached to the machine it refines.

    ``gluing`` is the refinement's own INVARIANT clause.  ``model`` is the
    self-contained concrete model used for generation: it inherits the
    abstract constants, properties and sets, and its invariant is the
    abstract invariant conjoined with the gluing invariant.
    """
    concrete: MachineModel
    abstract: MachineModel
    gluing: Pred
    model: MachineModel


def resolve_refinement(concrete: MachineModel, abstract: MachineModel) -> LinkedRefinement:
    if concrete.kind != "refinement":
        raise NameMismatch("%s is a MACHINE, not a REFINEMENT" % concrete.name)
    if concrete.refines != abstract.name:
        raise NameMismatch("%s refines %r, not %r"
                           % (concrete.name, concrete.refines, abstract.name))
    abs_events = {e.name for e in abstract.events}
    con_events = {e.name for e in concrete.events}
    if abs_events != con_events:
        raise EventSetMismatch(con_events - abs_events, abs_events - con_events)
    dropped = set(abstract.variables) - set(concrete.variables)
    if dropped:
        raise UnsupportedRefinement(
            "abstract variables %s are not kept by %s (only superset data "
            "refinement is supported)" % (sorted(dropped), concrete.name))

    sets = dict(abstract.sets)
    for n, es in concrete.sets:
        if n in sets:
            raise DuplicateIdentifier(n)
        sets[n] = es
    lits = {e: n for n, es in sets.items() for e in es}
    clash = (set(concrete.constants) | set(concrete.variables)) & \
        (set(abstract.constants) | set(lits))
    if clash:
        raise DuplicateIdentifier(sorted(clash)[0])
    known = set(abstract.constants) | set(lits) | set(sets)
    for n in sorted(concrete.imports):
        if n not in known:
            raise UnboundIdentifier(n, None)

    mapping = {}
    for e in lits:
        mapping[e] = EnumLit(e)
    for n, es in sets.items():
        mapping[("set", n)] = SetRef(n, es)

    def fix(node):
        return rename(node, mapping)

    gluing = fix(concrete.invariant)
    model = replace(
        concrete,
        sets=tuple(sets.items()),
        constants=abstract.constants + concrete.constants,
        properties=conj(abstract.properties, fix(concrete.properties)),
        invariant=conj(abstract.invariant, gluing),
        state_predicates=tuple((n, fix(p)) for n, p in concrete.state_predicates),
        initialisation=fix(concrete.initialisation),
        events=tuple(Event(e.name, fix(e.guard), fix(e.action)) for e in concrete.events),
        imports=frozenset(),
    )
    check_sorts(model)
    return LinkedRefinement(concrete=concrete, abstract=abstract, gluing=gluing, model=model)
