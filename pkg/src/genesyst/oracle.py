"""Explicit-state ground truth for a finite instantiation of a machine.

``explore`` runs the event system breadth-first from its initialisation;
``conformance`` maps every explicit valuation to its symbolic state and
checks that each explicit edge is matched by a symbolic transition.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from genesyst.errors import (
    BadInstantiation, InvariantViolation, MapNotUnique, SoundnessViolation,
    StateLimitExceeded,
)
from genesyst.frontend import MachineModel
from genesyst.lts.model import SymbolicLts
from genesyst.logic.wp import evaluate, execute

Key = Tuple[Tuple[str, object], ...]


@dataclass
class ExplicitLts:
    nodes: List[Dict[str, object]]
    initial: Dict[str, object]
    edges: List[Tuple[Dict[str, object], str, Dict[str, object]]]
    constants: Dict[str, object] = field(default_factory=dict)


def _key(v: Mapping[str, object], names) -> Key:
    return tuple((n, v[n]) for n in names)


def explore(m: MachineModel, constants: Mapping[str, object],
            max_states: int = 100_000) -> ExplicitLts:
    consts = dict(constants)
    missing = [c for c in m.constants if c not in consts]
    if missing:
        raise BadInstantiation("no value given for constant %s" % ", ".join(missing))
    if not evaluate(m.properties, consts):
        raise BadInstantiation("instantiation %s violates the properties" % consts)

    names = m.variables

    def project(full):
        return {n: full[n] for n in names}

    def admit(full, event):
        if not evaluate(m.invariant, full):
            raise InvariantViolation(project(full), event)
        if len(seen) >= max_states:
            raise StateLimitExceeded("more than %d reachable states" % max_states)

    seen: Dict[Key, Dict[str, object]] = {}
    start = execute(m.initialisation, consts)
    admit(start, "INITIALISATION")
    init = project(start)
    seen[_key(init, names)] = init
    queue = deque([init])
    edges = []
    while queue:
        v = queue.popleft()
        full = {**consts, **v}
        for e in m.events:
            if not evaluate(e.guard, full):
                continue
            nxt = execute(e.action, full)
            if nxt is None:
                continue
            w = project(nxt)
            k = _key(w, names)
            if k not in seen:
                admit(nxt, e.name)
                seen[k] = w
                queue.append(w)
            edges.append((v, e.name, seen[k]))
    return ExplicitLts(list(seen.values()), init, edges, consts)


def _fmt(v: Mapping[str, object]) -> str:
    return ",".join("%s=%s" % kv for kv in v.items())


@dataclass
class ConformanceReport:
    checks: List[Tuple[str, str, str]] = field(default_factory=list)
    witnessed: Set[Tuple[str, str, str]] = field(default_factory=set)
    unwitnessed: List[Tuple[str, str, str]] = field(default_factory=list)
    errors: List[Exception] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def lines(self) -> List[str]:
        return ["CHECK %s %s %s" % c for c in self.checks]

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


def conformance(x: ExplicitLts, s: SymbolicLts, m: MachineModel,
                raise_on_failure: bool = False) -> ConformanceReport:
    rep = ConformanceReport()
    states = s.level_states()
    consts = x.constants

    def fail(kind, exc):
        if raise_on_failure:
            raise exc
        rep.errors.append(exc)
        rep.checks.append((kind, "FAIL", str(exc)))

    qmap: Dict[Key, Optional[str]] = {}
    for v in x.nodes:
        full = {**consts, **v}
        hits = [st.name for st in states if evaluate(st.predicate, full)]
        k = _key(v, v)
        qmap[k] = hits[0] if len(hits) == 1 else None
        if len(hits) != 1:
            fail("map", MapNotUnique(_fmt(v), hits))
    if all(q is not None for q in qmap.values()):
        rep.checks.append(("map", "PASS", "%d valuations map to unique states" % len(x.nodes)))

    q0 = qmap[_key(x.initial, x.initial)]
    init_ok = any(n == q0 and evaluate(c, {**consts, **x.initial}) for n, c in s.initial)
    if q0 is not None:
        if init_ok:
            rep.checks.append(("initial", "PASS", "%s is initial" % q0))
        else:
            fail("initial", SoundnessViolation((_fmt(x.initial), "INITIALISATION", q0)))

    by_key = {}
    for t in s.transitions:
        by_key.setdefault(t.key, []).append(t)
    bad = 0
    for v, e, w in x.edges:
        src, dst = qmap[_key(v, v)], qmap[_key(w, w)]
        if src is None or dst is None:
            continue
        full = {**consts, **v}
        if any(evaluate(t.condition, full) for t in by_key.get((src, e, dst), ())):
            rep.witnessed.add((src, e, dst))
        else:
            bad += 1
            fail("soundness", SoundnessViolation((_fmt(v), e, _fmt(w))))
    if not bad:
        rep.checks.append(("soundness", "PASS", "%d explicit edges matched" % len(x.edges)))

    for t in s.transitions:
        if t.key not in rep.witnessed and t.key not in rep.unwitnessed:
            rep.unwitnessed.append(t.key)
            rep.checks.append(("coverage", "WARN", "%s --%s--> %s not witnessed" % t.key))
    if not rep.unwitnessed:
        rep.checks.append(("coverage", "PASS", "all %d symbolic transitions witnessed"
                           % len(by_key)))

    sources = {id(v) for v, _, _ in x.edges}
    for v in x.nodes:
        if id(v) not in sources:
            rep.checks.append(("deadlock", "WARN", "no event enabled at %s" % _fmt(v)))
    return rep


def coverage_union(reports: Iterable[ConformanceReport], s: SymbolicLts):
    """Symbolic transitions witnessed by none of the instantiations."""
    seen = set()
    for r in reports:
        seen |= r.witnessed
    return [t.key for t in s.transitions if t.key not in seen]
