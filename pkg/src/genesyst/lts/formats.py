"""Textual renderings of a symbolic LTS: intermediate format, DOT, AUT.

Intermediate format (one record per line)::

    LTS <machine-name>
    SET <set-name> <element> ...
    STATE <name> [PARENT <name>] PRED <predicate> [EMPTY]
    INIT <state-name> COND <predicate>
    TRANS <src> <event> COND <predicate> [REDUCED] [DEFAULT] -> <dst>

``SET`` lines are only present when the machine declares enumerated sets;
they let the reader resolve enum literals in predicates.
"""

from __future__ import annotations

from typing import List

from genesyst.errors import BSyntaxError, FormatError, MultipleInitial, SpecError
from genesyst.frontend import parse_predicate
from genesyst.lts.model import (
    ABSTRACT, CONCRETE, DEFAULT, PROVEN, StateNode, SymbolicLts, Transition,
)
from genesyst.logic.terms import TRUE, show


def condition_label(t: Transition) -> str:
    return "[]" if t.reduced else "[%s]" % show(t.condition)


# ------------------------------------------------------------- intermediate


def emit_intermediate(l: SymbolicLts) -> str:
    out = ["LTS %s" % l.name]
    for name, elems in l.sets:
        out.append("SET %s %s" % (name, " ".join(elems)))
    for s in l.states:
        line = "STATE %s" % s.name
        if s.parent is not None:
            line += " PARENT %s" % s.parent
        line += " PRED %s" % show(s.predicate)
        if s.empty:
            line += " EMPTY"
        out.append(line)
    for name, cond in l.initial:
        out.append("INIT %s COND %s" % (name, show(cond)))
    for t in l.transitions:
        line = "TRANS %s %s COND %s" % (t.src, t.event, show(t.condition))
        if t.reduced:
            line += " REDUCED"
        if t.provenance == DEFAULT:
            line += " DEFAULT"
        out.append(line + " -> %s" % t.dst)
    return "\n".join(out) + "\n"


def _pred(text, sets, line_no):
    try:
        return parse_predicate(text, sets)
    except SpecError as exc:
        raise FormatError(line_no, "bad predicate %r (%s)" % (text, exc)) from None


def _strip_flags(text, flags):
    found = set()
    words = text.split()
    while words and words[-1] in flags and words[-1] not in found:
        found.add(words.pop())
    return " ".join(words), found


def parse_intermediate(text: str) -> SymbolicLts:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not lines or not lines[0][1].startswith("LTS "):
        raise FormatError(lines[0][0] if lines else 1, "expected 'LTS <name>' header")
    l = SymbolicLts(lines[0][1][4:].strip())
    sets = []
    raw_states = []
    for no, ln in lines[1:]:
        kind, _, rest = ln.partition(" ")
        if kind == "SET":
            parts = rest.split()
            if len(parts) < 2:
                raise FormatError(no, "SET needs a name and elements")
            sets.append((parts[0], tuple(parts[1:])))
        elif kind == "STATE":
            name, _, rest = rest.partition(" ")
            parent = None
            if rest.startswith("PARENT "):
                parent, _, rest = rest[7:].partition(" ")
            if not rest.startswith("PRED "):
                raise FormatError(no, "expected PRED in STATE record")
            pred, flags = _strip_flags(rest[5:], {"EMPTY"})
            raw_states.append((name, parent, _pred(pred, sets, no), "EMPTY" in flags))
        elif kind == "INIT":
            name, _, rest = rest.partition(" ")
            if not rest.startswith("COND "):
                raise FormatError(no, "expected COND in INIT record")
            l.initial.append((name, _pred(rest[5:], sets, no)))
        elif kind == "TRANS":
            head, arrow, dst = rest.rpartition(" -> ")
            parts = head.split(" ", 3)
            if not arrow or len(parts) < 4 or parts[2] != "COND" or not dst.strip():
                raise FormatError(no, "malformed TRANS record")
            src, event, _, cond = parts
            cond, flags = _strip_flags(cond, {"REDUCED", "DEFAULT"})
            pred = _pred(cond, sets, no)
            reduced = "REDUCED" in flags
            if reduced and pred != TRUE:
                raise FormatError(no, "REDUCED transition must have condition TRUE")
            l.transitions.append(Transition(src, event, pred, reduced,
                                            DEFAULT if "DEFAULT" in flags else PROVEN,
                                            dst.strip()))
        else:
            raise FormatError(no, "unknown record %r" % kind)
    l.sets = tuple(sets)
    hierarchical = any(p is not None for _, p, _, _ in raw_states)
    for name, parent, pred, empty in raw_states:
        level = ABSTRACT if hierarchical and parent is None else CONCRETE
        l.states.append(StateNode(name, pred, parent, level, empty))
    try:
        l.validate()
    except ValueError as exc:
        raise FormatError(lines[-1][0], str(exc)) from None
    return l


# ---------------------------------------------------------------------- DOT


def _q(s: str) -> str:
    return '"%s"' % s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def _node(s: StateNode, indent: str) -> str:
    attrs = ["label=%s" % _q("%s\n%s" % (s.name, show(s.predicate)))]
    if s.empty:
        attrs.append("style=filled, fillcolor=grey")
    return "%s%s [%s];" % (indent, _q(s.name), ", ".join(attrs))


def emit_dot(l: SymbolicLts) -> str:
    out = ["digraph %s {" % _q(l.name), "  node [shape=box];"]
    if l.hierarchical:
        for i, a in enumerate(s for s in l.states if s.level == ABSTRACT):
            out.append("  subgraph %s {" % _q("cluster_%d" % i))
            out.append("    label=%s;" % _q("%s\n%s" % (a.name, show(a.predicate))))
            if a.empty:
                out.append("    style=filled; fillcolor=grey;")
            kids = l.children(a.name)
            for c in kids:
                out.append(_node(c, "    "))
            if not kids:
                out.append("    %s [shape=point, style=invis];" % _q(a.name))
            out.append("  }")
    else:
        for s in l.states:
            out.append(_node(s, "  "))
    for i, (name, cond) in enumerate(l.initial):
        init = _q("__init%d" % i)
        out.append("  %s [shape=point];" % init)
        label = "" if cond == TRUE else " [label=%s]" % _q("[%s]" % show(cond))
        out.append("  %s -> %s%s;" % (init, _q(name), label))
    for t in l.transitions:
        attrs = ["label=%s" % _q("%s %s" % (t.event, condition_label(t)))]
        if t.provenance == DEFAULT:
            attrs.append("style=dashed")
        out.append("  %s -> %s [%s];" % (_q(t.src), _q(t.dst), ", ".join(attrs)))
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------- AUT


def emit_aut(l: SymbolicLts, allow_multiple_initial: bool = False) -> str:
    """Aldebaran text. States are numbered in declaration order at the level
    transitions are drawn at; with several initial states the first one is
    the root, which must be allowed explicitly."""
    states = l.level_states()
    index = {s.name: i for i, s in enumerate(states)}
    inits = [n for n, _ in l.initial if n in index]
    if len(inits) > 1 and not allow_multiple_initial:
        raise MultipleInitial("AUT has a single root but %d states are initial: %s"
                              % (len(inits), ", ".join(inits)))
    i0 = index[inits[0]] if inits else 0
    out: List[str] = ["des (%d, %d, %d)" % (i0, len(l.transitions), len(states))]
    for t in l.transitions:
        label = "%s %s" % (t.event, condition_label(t))
        out.append('(%d, "%s", %d)' % (index[t.src], label.replace('"', "'"), index[t.dst]))
    return "\n".join(out) + "\n"
