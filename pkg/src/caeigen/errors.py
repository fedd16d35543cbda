"""Exception types shared across the toolkit."""


class CaeigenError(Exception):
    """Base class for all toolkit errors."""


class AlphabetMismatch(CaeigenError):
    """Two objects built over different alphabets were combined."""


class MalformedSpec(CaeigenError):
    """A rule/config/command literal could not be parsed."""


class TableLengthMismatch(MalformedSpec):
    """Rule table length does not match alphabet**neighborhood size."""


class TorusTooSmall(CaeigenError):
    """Torus extents cannot host the requested neighborhood or window."""


class WindowExhausted(CaeigenError):
    """A finite window is too small to determine the requested evolution."""


class DimensionUnsupported(CaeigenError):
    """The operation is restricted to lower lattice dimensions."""


class OrbitBudgetExceeded(CaeigenError):
    """Cycle detection ran past the configured step budget."""


class StateSpaceBudgetExceeded(CaeigenError):
    """A set-valued iteration grew past the configured cap."""


class BudgetExceeded(CaeigenError):
    """Generic enumeration budget exhausted."""


class NotCertified(CaeigenError):
    """An operation required a certified blocking word and none was available."""


class NotFullyBlocking(CaeigenError):
    """The supplied word could not be certified fully blocking."""


class TrivialPeriod(CaeigenError):
    """The forced window sequence has period 1; no nontrivial rotation factor."""


class HypothesisFailed(CaeigenError):
    """An iterated image of the blocking word could not be re-certified."""


class ClassCollision(CaeigenError):
    """Two factor classes share a window pattern; widen the window."""
