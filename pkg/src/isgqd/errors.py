"""Exception hierarchy shared by every module."""


class IsgqdError(Exception):
    """Base class for all errors raised by the package."""


class SemigroupError(IsgqdError, ValueError):
    pass


class NotAssociative(SemigroupError):
    def __init__(self, triple):
        self.triple = tuple(int(i) for i in triple)
        a, b, c = self.triple
        super().__init__(f"(ab)c != a(bc) for (a, b, c) = {self.triple}")


class NoUniqueInverse(SemigroupError):
    def __init__(self, element, candidates):
        self.element = int(element)
        self.candidates = [int(c) for c in candidates]
        super().__init__(
            f"element {self.element} has {len(self.candidates)} inverse candidates {self.candidates}"
        )


class IdempotentsDontCommute(SemigroupError):
    def __init__(self, pair):
        self.pair = tuple(int(i) for i in pair)
        super().__init__(f"idempotents {self.pair} do not commute")


class BadZero(SemigroupError):
    pass


class NotIdempotent(SemigroupError):
    pass


class NotSameDClass(SemigroupError):
    pass


class TooLarge(SemigroupError):
    pass


class GroupAxiomError(SemigroupError):
    pass


class FunctorialityViolated(SemigroupError):
    def __init__(self, triple, detail=""):
        self.triple = tuple(triple)
        super().__init__(f"connecting maps not functorial on {self.triple} {detail}".rstrip())


class NotDescendingChain(SemigroupError):
    def __init__(self, level, witness):
        self.level = level
        self.witness = witness
        super().__init__(f"kernel of level {level} not contained in level {level - 1}: {witness}")


class DegenerateLevel(SemigroupError):
    pass


class DomainViolation(IsgqdError, ValueError):
    pass


class InconsistentEquivalence(IsgqdError, AssertionError):
    pass


class NotBrandt(IsgqdError, ValueError):
    pass


class InfiniteGroupWithFull(IsgqdError, ValueError):
    pass


class WindowTooSmall(IsgqdError, ValueError):
    pass


class UnsupportedWitness(IsgqdError, ValueError):
    pass


class BadIdempotent(IsgqdError, ValueError):
    pass


class ScheduleUnachievable(IsgqdError):
    """Soft failure: a witness could not reach the requested bound."""

    def __init__(self, target, achieved):
        self.target = target
        self.achieved = achieved
        super().__init__(f"schedule bound {target:.3g} not reached; best {achieved:.3g}")


class InjectivityUnverified(IsgqdError, ValueError):
    pass


class InconsistentOnDependencies(IsgqdError, ValueError):
    pass


class NotUnital(IsgqdError, ValueError):
    pass


class SpecInvalid(IsgqdError, ValueError):
    pass


class Unsupported(IsgqdError, ValueError):
    pass
