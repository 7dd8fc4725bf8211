"""Exception hierarchy shared by all srk modules."""


class SrkError(Exception):
    """Base class for every error raised by this package."""


class ShapeMismatch(SrkError):
    """Matrix dimensions do not conform for the requested operation."""


class InvalidPermutation(SrkError):
    """An entry permutation is not a bijection on the expected index set."""


class OddUniverse(SrkError):
    """Balanced partitions require an even number of variables."""


class CapExceeded(SrkError):
    """A configured enumeration cap would be exceeded."""


class UnknownVariable(SrkError):
    """A polynomial mentions a variable outside the given partition."""


class InvalidShape(SrkError):
    """An architecture spec was requested with inadmissible dimensions."""


class InvalidTransposeSet(SrkError):
    """A per-head transpose set is empty or mentions factors outside 1..d."""


class DegreeCapExceeded(SrkError):
    """Symbolic evaluation would exceed the configured degree cap."""


class UnknownRule(SrkError):
    """An elementary bound rule name was not recognized."""


class RegimeViolation(SrkError):
    """A formula was evaluated outside its stated validity regime."""


class PreconditionViolation(SrkError):
    """A stated assumption of a regime check fails; names the assumption."""


class NoFeasibleDepth(SrkError):
    """No depth up to p_max satisfies the depth-selection predicate."""


class InsufficientRange(SrkError):
    """Dominance checking needs more shared curve points than were given."""
