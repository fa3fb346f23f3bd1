"""Exception hierarchy shared by all phantomnet modules."""


class PhantomNetError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(PhantomNetError):
    """A caller-supplied value violates an operation precondition."""


class UnknownNode(PhantomNetError):
    """A node id does not exist in the network."""


class ConnectivityError(PhantomNetError):
    """More than 1% of deployed nodes cannot reach the sink."""


class SourceIsSink(PhantomNetError):
    """A routing frame was requested for the sink itself."""


class EmptyDomain(PhantomNetError):
    """Every sector of the phantom candidate domain is empty."""


class EmptyRing(PhantomNetError):
    """No node sits at exactly the requested flooding distance."""


class RoutingStuck(PhantomNetError):
    """Greedy forwarding hit a local minimum even after one fallback step.

    Carries the partial trace walked so far in ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class HopBudgetExceeded(PhantomNetError):
    """A routing phase ran out of hop budget before terminating.

    Carries the partial trace walked so far in ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DomainError(PhantomNetError):
    """An analytic formula was evaluated outside its geometric domain."""


class QuadratureFailure(PhantomNetError):
    """Numerical integration could not meet the requested tolerance."""


class ParseError(PhantomNetError):
    """A config file is syntactically malformed."""


class ValidationError(PhantomNetError):
    """A config file parsed but violates an invariant."""


class HarnessError(PhantomNetError):
    """Too many individual simulation runs failed to continue."""
