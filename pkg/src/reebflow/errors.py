"""Exception hierarchy shared across the package.

Everything that can go wrong numerically (lost brackets, stalled limits,
exhausted dyadic depth) derives from NumericalFailure so the command line
front end can map it to a single exit code.  Bad configuration derives from
ConfigError instead.
"""


class ReebflowError(Exception):
    pass


class ConfigError(ReebflowError):
    """Invalid parameters, malformed scenarios, out-of-domain requests."""


class NumericalFailure(ReebflowError):
    """A solver or limit procedure failed to reach its target accuracy."""


class InversionBracketError(NumericalFailure):
    """Geometric bracket expansion never straddled the target value."""


class RelationError(NumericalFailure):
    """A claimed equivalence relation failed an invariant spot check."""


class DyadicDepthError(NumericalFailure):
    """A time value needs more halving levels than were constructed."""


class FlowResolutionError(NumericalFailure):
    """Dyadic bracketing of a time value stalled above tolerance."""

    def __init__(self, message, achieved_gap=None):
        super().__init__(message)
        self.achieved_gap = achieved_gap


class SectorError(ReebflowError):
    """A sector-only map was applied outside its sector."""


class ClosedFormError(NumericalFailure):
    """The one-crossing orbit formula does not apply to this start."""


class WitnessBracketError(NumericalFailure):
    """No witness point on the transversal maps onto the target."""


class LimitDivergenceError(NumericalFailure):
    """A witness limit failed the Cauchy gap rule within the depth budget."""

    def __init__(self, message, gaps=None):
        super().__init__(message)
        self.gaps = list(gaps) if gaps is not None else []


class TimeBudgetError(NumericalFailure):
    """Locating a fundamental domain exceeded the iteration budget."""
