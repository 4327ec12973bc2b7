"""Symbolic labelled transition systems: construction and serialisation."""

from genesyst.lts.build import EXISTENTIAL, BuildResult, build, build_refined, discharge
from genesyst.lts.formats import emit_aut, emit_dot, emit_intermediate, parse_intermediate
from genesyst.lts.model import StateNode, SymbolicLts, Transition

__all__ = [
    "EXISTENTIAL", "BuildResult", "StateNode", "SymbolicLts", "Transition", "build", "build_refined",
    "discharge", "emit_aut", "emit_dot", "emit_intermediate", "parse_intermediate",
]
