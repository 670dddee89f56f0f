"""Exception hierarchy shared by all netbelief modules.

Every error carries a stable ``code`` (its class name) so the HTTP layer
can map exceptions to wire-format error bodies without translation tables.
"""


class NetBeliefError(Exception):
    """Base class for all netbelief errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# -- condition/event nets -----------------------------------------------

class UnknownTransition(NetBeliefError):
    pass


class UnknownPlace(NetBeliefError):
    pass


class MarkingLengthMismatch(NetBeliefError):
    pass


class InvalidNet(NetBeliefError):
    pass


# -- dense distributions ------------------------------------------------

class ImpossibleCondition(NetBeliefError):
    """Conditioning event has zero probability mass."""


class EmptyPlaceSet(NetBeliefError):
    """Negative assertion over the empty place set is unsatisfiable."""


class DenseTooLarge(NetBeliefError):
    """Explicit 2^n vector would exceed the dense representation cap."""


# -- stochastic matrices ------------------------------------------------

class TypeMismatch(NetBeliefError):
    """Port counts of composed arrows do not line up."""


class SizeOverflow(NetBeliefError):
    """Matrix arity would exceed the dense-storage cap."""


class InvalidArity(NetBeliefError):
    pass


class InvalidMatrix(NetBeliefError):
    """Entries outside [0, 1] or malformed shape."""


# -- causality graphs ---------------------------------------------------

class NotPathClosed(NetBeliefError):
    """Node set is not closed under directed paths."""


class UnknownNode(NetBeliefError):
    pass


class InvalidGraph(NetBeliefError):
    """Graph violates a structural invariant (acyclicity, arity, wiring)."""


# -- modular Bayesian networks ------------------------------------------

class FrontierOverflow(NetBeliefError):
    """Evaluation frontier grew past the live-wire cap."""


class MissingGenerator(NetBeliefError):
    """A node's generator has no entry in the evaluation table."""


# -- update engine ------------------------------------------------------

class UnknownOutput(NetBeliefError):
    pass


class InvalidK(NetBeliefError):
    pass


class NotPredecessor(NetBeliefError):
    pass


class NotObn(NetBeliefError):
    pass


class NodeHasOutput(NetBeliefError):
    pass


class NodeNotStochastic(NetBeliefError):
    pass


class ImpossibleObservation(NetBeliefError):
    """Observed outcome has zero probability under the current belief."""


# -- workbench ----------------------------------------------------------

class InvalidParams(NetBeliefError):
    pass


class NoFireableBelief(NetBeliefError):
    """Every transition has what-if probability zero."""


class Forbidden(NetBeliefError):
    """Observer is not permitted to fire this transition."""
