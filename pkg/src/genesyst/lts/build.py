"""Assembly of the symbolic LTS from prover verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

from genesyst.errors import CoverFailed, OverlappingStates
from genesyst.frontend import LinkedRefinement, MachineModel
from genesyst.lts.model import (
    ABSTRACT, CONCRETE, DEFAULT, PROVEN, StateNode, SymbolicLts, Transition,
)
from genesyst.logic.simplify import simplify
from genesyst.logic.terms import TRUE, conj
from genesyst.logic.wp import wp
from genesyst.oblige import (
    ProofObligation, cover_obligation, disjoint_obligations, enabledness_pair,
    init_obligations, placement_obligations, reach_obligations, state_hypothesis,
)
from genesyst.prover import (
    INVALID, SAT, UNKNOWN, UNSAT, VALID, ProofResult, ProverConfig, check_sat,
    decide,
)

EXISTENTIAL = ("reach_exists", "init_reach", "disjoint")


def discharge(po: ProofObligation, cfg: Optional[ProverConfig] = None) -> ProofResult:
    """Verdict for any obligation kind.

    Existential kinds go through ``check_sat`` on ``hypothesis & not(goal)``
    so that Unsat (Valid) can also come from an exhaustive intrinsic search;
    a Sat witness is the counterexample.
    """
    if po.kind not in EXISTENTIAL:
        return decide(po, cfg)
    if cfg is not None and cfg.external_export_dir:
        from genesyst.prover import export_obligation
        export_obligation(po, cfg.external_export_dir)
    r = check_sat(po.query(), cfg, po.sets)
    if r.status == UNSAT:
        return ProofResult(VALID, None, r.method)
    if r.status == SAT:
        return ProofResult(INVALID, r.witness, r.method)
    return ProofResult(UNKNOWN, None, r.method)


@dataclass
class BuildResult:
    lts: SymbolicLts
    report: List[Tuple[ProofObligation, ProofResult]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def default_transitions(self) -> List[Transition]:
        return [t for t in self.lts.transitions if t.provenance == DEFAULT]


def _states(m: MachineModel, cfg, prefix="") -> List[StateNode]:
    out = []
    for name, p in m.state_predicates:
        r = check_sat(state_hypothesis(m, p), cfg, m.sets)
        out.append(StateNode(prefix + name, p, None, CONCRETE, r.status == UNSAT))
    return out


def build(m: MachineModel, cfg: Optional[ProverConfig] = None,
          allow_uncovered: bool = False, prefix: str = "") -> BuildResult:
    """Symbolic LTS of ``m``; state names are prefixed with ``prefix``."""
    cfg = cfg or ProverConfig()
    res = BuildResult(SymbolicLts(m.name, sets=m.sets))
    lts = res.lts

    def run(po):
        if prefix:
            po = replace(po, id=prefix + po.id)
        r = discharge(po, cfg)
        res.report.append((po, r))
        return r

    cover = run(cover_obligation(m))
    if cover.verdict != VALID:
        if not allow_uncovered:
            raise CoverFailed(cover.counterexample)
        res.warnings.append("cover obligation is %s; generating anyway" % cover.verdict)

    for po in disjoint_obligations(m):
        if run(po).verdict != VALID:
            res.warnings.append("states %s and %s may overlap" % po.subject)

    lts.states = _states(m, cfg, prefix)
    for s in lts.states:
        if s.empty:
            res.warnings.append("state %s is empty under the invariant" % s.name)

    for po in init_obligations(m):
        r = run(po)
        if r.verdict != VALID:
            (name,) = po.subject
            cond = simplify(wp(m.initialisation, m.state(name)), m.properties)
            lts.initial.append((prefix + name, cond))

    for src in m.state_predicates:
        hyp = state_hypothesis(m, src[1])
        for e in m.events:
            always_po, never_po = enabledness_pair(src, e, m)
            always = run(always_po)
            if always.verdict == VALID:
                enabled_known = True
            else:
                never = run(never_po)
                if never.verdict == VALID:
                    continue
                enabled_known = always.verdict == INVALID and never.verdict == INVALID
            for dst in m.state_predicates:
                exists_po, total_po = reach_obligations(src, e, dst, m)
                exists = run(exists_po)
                if exists.verdict == VALID:
                    continue
                total = run(total_po)
                reduced = always.verdict == VALID and total.verdict == VALID
                cond = TRUE if reduced else simplify(conj(e.guard, wp(e.action, dst[1])), hyp)
                default = not enabled_known or UNKNOWN in (exists.verdict, total.verdict)
                lts.transitions.append(Transition(
                    prefix + src[0], e.name, cond, reduced,
                    DEFAULT if default else PROVEN, prefix + dst[0]))
    for s in lts.states:
        if not s.empty and not any(t.src == s.name for t in lts.transitions):
            res.warnings.append("state %s has no outgoing transition" % s.name)
    return res


def build_refined(linked: LinkedRefinement, abstract_lts: SymbolicLts,
                  cfg: Optional[ProverConfig] = None,
                  allow_uncovered: bool = False) -> BuildResult:
    """Concrete LTS nested inside the abstract states.

    State names are qualified with their machine name; transitions are drawn
    at the concrete level only.
    """
    cfg = cfg or ProverConfig()
    abstract = linked.abstract
    for po in disjoint_obligations(abstract):
        if discharge(po, cfg).verdict != VALID:
            raise OverlappingStates(
                "abstract states %s and %s are not proven disjoint; sub-state "
                "placement needs them to be" % po.subject)

    model = linked.model
    cprefix = model.name + "."
    aprefix = abstract.name + "."
    res = build(model, cfg, allow_uncovered, prefix=cprefix)
    props = conj(model.properties, model.invariant)
    placed = []
    for s, (name, p) in zip(res.lts.states, model.state_predicates):
        parent, pos, results = placement_obligations(
            (name, p), abstract.state_predicates, linked.gluing, props, model.sets, cfg)
        res.report.extend((replace(po, id=cprefix + po.id), r) for po, r in zip(pos, results))
        placed.append(replace(s, parent=aprefix + parent))

    abstract_nodes = []
    for a in abstract_lts.states:
        abstract_nodes.append(StateNode(aprefix + a.name, a.predicate, None, ABSTRACT, a.empty))
    res.lts.states = abstract_nodes + placed
    res.lts.validate()

    parent = res.lts.parent_map()
    abstract_keys = {t.key for t in abstract_lts.transitions}
    strip = len(aprefix)
    for t in res.lts.transitions:
        key = (parent[t.src][strip:], t.event, parent[t.dst][strip:])
        if key not in abstract_keys:
            res.warnings.append("concrete transition %s --%s--> %s has no abstract "
                                "counterpart %s --%s--> %s" % ((t.src, t.event, t.dst) + key))
    return res
