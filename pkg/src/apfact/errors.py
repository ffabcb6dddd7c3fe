"""Exception hierarchy shared by every module of the package."""


class APFactError(Exception):
    """Base class for all package errors."""


# appoly
class NotDominantBinomial(APFactError, ValueError):
    pass


class TruncationBudgetExceeded(APFactError):
    pass


# symbol
class InconsistentDeclaration(APFactError, ValueError):
    pass


class ZeroFrequencyPresent(APFactError, ValueError):
    pass


class NuOutOfInterval(APFactError, ValueError):
    pass


class FormMismatch(APFactError, ValueError):
    pass


# rhsolve
class InvariantViolation(APFactError):
    pass


class NuOutOfRange(APFactError, ValueError):
    pass


class NotBigGap(APFactError, ValueError):
    pass


class ZeroSolution(APFactError, ValueError):
    pass


# corona
class NotBinomial(APFactError, ValueError):
    pass


class CoronaUnsupported(APFactError):
    """No structured rule produces a corona pair for the given vector."""


class CoronaConditionFails(CoronaUnsupported):
    """A cheap certificate shows the vector is not a corona vector at all."""


class DeterminantNotOne(APFactError):
    pass


class SpectrumSignViolation(APFactError):
    pass


# factorize
class ReconstructionFailure(APFactError):
    pass


class NotEquivalent(APFactError):
    pass


# verify
class SingularFactor(APFactError):
    pass


# cli
class ParseError(APFactError, ValueError):
    pass


class ValidationError(APFactError, ValueError):
    pass
