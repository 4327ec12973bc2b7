"""Proof obligations that define the symbolic transition system.

Existence questions (``reach_exists``, ``init_reach``, ``disjoint``) are
encoded with the negated condition as goal: the obligation is Valid exactly
when the condition is unsatisfiable under the hypothesis, and
``hypothesis & not(goal)`` is the satisfiability query.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from genesyst.errors import AmbiguousParent, NoParent
from genesyst.frontend import Event, MachineModel
from genesyst.logic.terms import TRUE, Not, Pred, conj, disj, show
from genesyst.logic.wp import wp
from genesyst.prover import VALID, ProverConfig, decide

KINDS = ("cover", "disjoint", "enabled_always", "enabled_never", "reach_exists",
         "reach_total", "init_reach", "placement")


@dataclass(frozen=True)
class ProofObligation:
    id: str
    kind: str
    hypothesis: Pred
    goal: Pred
    subject: Tuple[str, ...]
    sets: Tuple = ()

    def query(self) -> Pred:
        """The formula whose unsatisfiability proves the obligation."""
        return conj(self.hypothesis, Not(self.goal))

    def to_text(self) -> str:
        return "PO %s %s HYP %s GOAL %s" % (self.id, self.kind, show(self.hypothesis),
                                            show(self.goal))


def state_hypothesis(m: MachineModel, state_pred: Pred) -> Pred:
    return conj(m.properties, m.invariant, state_pred)


def cover_obligation(m: MachineModel) -> ProofObligation:
    return ProofObligation(
        "cover", "cover", conj(m.properties, m.invariant),
        disj(*(p for _, p in m.state_predicates)), (), m.sets)


def disjoint_obligations(m: MachineModel) -> List[ProofObligation]:
    out = []
    states = m.state_predicates
    for i, (a, pa) in enumerate(states):
        for b, pb in states[i + 1:]:
            out.append(ProofObligation(
                "disjoint.%s.%s" % (a, b), "disjoint",
                state_hypothesis(m, pa), Not(pb), (a, b), m.sets))
    return out


def disjointness_check(m: MachineModel, cfg: ProverConfig = None) -> List[str]:
    """Warnings for state pairs not proven mutually exclusive."""
    from genesyst.prover import UNSAT, check_sat
    warnings = []
    for po in disjoint_obligations(m):
        if check_sat(po.query(), cfg, m.sets).status != UNSAT:
            a, b = po.subject
            warnings.append("states %s and %s may overlap" % (a, b))
    return warnings


def enabledness_pair(state: Tuple[str, Pred], e: Event, m: MachineModel):
    name, p = state
    hyp = state_hypothesis(m, p)
    always = ProofObligation("enabled_always.%s.%s" % (name, e.name), "enabled_always",
                             hyp, e.guard, (name, e.name), m.sets)
    never = ProofObligation("enabled_never.%s.%s" % (name, e.name), "enabled_never",
                            hyp, Not(e.guard), (name, e.name), m.sets)
    return always, never


def reach_condition(e: Event, dst_pred: Pred) -> Pred:
    return conj(e.guard, wp(e.action, dst_pred))


def reach_obligations(src: Tuple[str, Pred], e: Event, dst: Tuple[str, Pred],
                      m: MachineModel):
    (s, ps), (d, pd) = src, dst
    w = wp(e.action, pd)
    hyp = state_hypothesis(m, ps)
    key = "%s.%s.%s" % (s, e.name, d)
    exists = ProofObligation("reach_exists." + key, "reach_exists",
                             conj(hyp, e.guard), Not(w), (s, e.name, d), m.sets)
    total = ProofObligation("reach_total." + key, "reach_total",
                            conj(hyp, e.guard), w, (s, e.name, d), m.sets)
    return exists, total


def init_obligations(m: MachineModel) -> List[ProofObligation]:
    out = []
    for name, p in m.state_predicates:
        out.append(ProofObligation("init_reach.%s" % name, "init_reach", m.properties,
                                   Not(wp(m.initialisation, p)), (name,), m.sets))
    return out


def placement_obligations(concrete_state: Tuple[str, Pred],
                          abstract_states: Sequence[Tuple[str, Pred]],
                          gluing: Pred, concrete_props: Pred, sets=(),
                          cfg: ProverConfig = None):
    """Parent of a concrete state: the unique abstract state it entails.

    Returns ``(parent_name, obligations, results)``.
    """
    name, p = concrete_state
    hyp = conj(concrete_props, gluing, p)
    pos, results, parents = [], [], []
    for a, pa in abstract_states:
        po = ProofObligation("placement.%s.%s" % (name, a), "placement", hyp, pa,
                             (name, a), tuple(sets))
        r = decide(po, cfg)
        pos.append(po)
        results.append(r)
        if r.verdict == VALID:
            parents.append(a)
    if not parents:
        raise NoParent("concrete state %s is not contained in any abstract state" % name)
    if len(parents) > 1:
        raise AmbiguousParent("concrete state %s fits abstract states %s"
                              % (name, ", ".join(parents)))
    return parents[0], pos, results
