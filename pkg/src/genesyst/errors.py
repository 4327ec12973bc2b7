"""Exception hierarchy.

Errors raised for a faulty input specification derive from SpecError (the
CLI maps them to exit code 1); conformance failures derive from
ConformanceError (exit code 2).
"""


class GenesystError(Exception):
    pass


class SpecError(GenesystError):
    pass


class BSyntaxError(SpecError):
    def __init__(self, line, col, expected, found=None):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        msg = "%d:%d: expected %s" % (line, col, expected)
        if found is not None:
            msg += ", found %r" % found
        super().__init__(msg)


class UnboundIdentifier(SpecError):
    def __init__(self, name, position=None):
        self.name = name
        self.position = position
        where = "" if position is None else "%d:%d: " % position
        super().__init__("%sunbound identifier %r" % (where, name))


class DuplicateIdentifier(SpecError):
    def __init__(self, name):
        self.name = name
        super().__init__("identifier %r declared more than once" % name)


class ParallelWriteConflict(SpecError):
    def __init__(self, variable, event, reason="written by two branches"):
        self.variable = variable
        self.event = event
        super().__init__("event %s: variable %r %s of a parallel composition"
                         % (event, variable, reason))


class MissingAssertions(SpecError):
    def __init__(self, line=None, col=None):
        self.line = line
        self.col = col
        super().__init__("the ASSERTIONS clause (state predicates) is mandatory")


class NameMismatch(SpecError):
    pass


class EventSetMismatch(SpecError):
    def __init__(self, extra, missing):
        self.extra = tuple(sorted(extra))
        self.missing = tuple(sorted(missing))
        super().__init__("event sets differ: extra=%s missing=%s"
                         % (list(self.extra), list(self.missing)))


class UnsupportedRefinement(SpecError):
    pass


class SortMismatch(SpecError):
    pass


class UnsupportedSubstitution(SpecError):
    pass


class IncompleteValuation(GenesystError):
    def __init__(self, name):
        self.name = name
        super().__init__("no value for identifier %r" % name)


class MissingBound(SpecError):
    def __init__(self, name):
        self.name = name
        super().__init__("no enumeration bound for %r (use --bound %s=lo..hi)"
                         % (name, name))


class CoverFailed(SpecError):
    def __init__(self, counterexample=None):
        self.counterexample = counterexample
        if counterexample is None:
            msg = "cover obligation could not be proven"
        else:
            msg = "states do not cover the invariant; counterexample %s" % (
                ", ".join("%s=%s" % kv for kv in sorted(counterexample.items())))
        super().__init__(msg)


class NoParent(SpecError):
    pass


class AmbiguousParent(SpecError):
    pass


class OverlappingStates(SpecError):
    pass


class MultipleInitial(GenesystError):
    pass


class FormatError(SpecError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__("line %d: %s" % (line_no, message))


class BadInstantiation(SpecError):
    pass


class StateLimitExceeded(GenesystError):
    pass


class InvariantViolation(SpecError):
    def __init__(self, valuation, event):
        self.valuation = valuation
        self.event = event
        super().__init__("invariant violated after %s at %s" % (
            event, ", ".join("%s=%s" % kv for kv in sorted(valuation.items()))))


class ConformanceError(GenesystError):
    pass


class MapNotUnique(ConformanceError):
    def __init__(self, valuation, candidates):
        self.valuation = valuation
        self.candidates = tuple(candidates)
        super().__init__("valuation %s matches %d symbolic states %s" % (
            valuation, len(self.candidates), list(self.candidates)))


class SoundnessViolation(ConformanceError):
    def __init__(self, edge):
        self.edge = edge
        src, event, dst = edge
        super().__init__("explicit edge %s --%s--> %s has no symbolic counterpart"
                         % (src, event, dst))


class IoError(GenesystError):
    pass
