from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from genesyst.logic.terms import TRUE, Pred

ABSTRACT = "abstract"
CONCRETE = "concrete"
PROVEN = "proven"
DEFAULT = "default"


@dataclass(frozen=True)
class StateNode:
    name: str
    predicate: Pred
    parent: Optional[str] = None
    level: str = CONCRETE
    empty: bool = False


@dataclass(frozen=True)
class Transition:
    src: str
    event: str
    condition: Pred
    reduced: bool
    provenance: str
    dst: str

    def __post_init__(self):
        if self.reduced and self.condition != TRUE:
            raise ValueError("a reduced transition must carry the condition TRUE")

    @property
    def key(self) -> Tuple[str, str, str]:
        return self.src, self.event, self.dst


@dataclass
class SymbolicLts:
    name: str
    states: List[StateNode] = field(default_factory=list)
    initial: List[Tuple[str, Pred]] = field(default_factory=list)
    transitions: List[Transition] = field(default_factory=list)
    sets: Tuple[Tuple[str, Tuple[str, ...]], ...] = ()

    def state(self, name: str) -> StateNode:
        for s in self.states:
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def hierarchical(self) -> bool:
        return any(s.parent is not None for s in self.states)

    def level_states(self) -> List[StateNode]:
        """States of the level the transitions are drawn at."""
        if not self.hierarchical:
            return list(self.states)
        return [s for s in self.states if s.level == CONCRETE]

    def children(self, name: str) -> List[StateNode]:
        return [s for s in self.states if s.parent == name]

    def parent_map(self) -> Dict[str, Optional[str]]:
        return {s.name: s.parent for s in self.states}

    def validate(self):
        names = [s.name for s in self.states]
        if len(set(names)) != len(names):
            raise ValueError("duplicate state names")
        known = set(names)
        for s in self.states:
            if s.parent is not None:
                if s.parent not in known:
                    raise ValueError("unknown parent %s" % s.parent)
                if self.state(s.parent).level != ABSTRACT or s.level != CONCRETE:
                    raise ValueError("parent links must go from concrete to abstract")
        for t in self.transitions:
            if t.src not in known or t.dst not in known:
                raise ValueError("transition %s refers to an unknown state" % (t.key,))
        for n, _ in self.initial:
            if n not in known:
                raise ValueError("unknown initial state %s" % n)
