"""Exception types shared across the package.

Every fault raised by the library derives from AzuliftError so callers (and
the CLI) can map library faults to exit codes without enumerating modules.
``solve_norm`` signals unsolvability by returning None, not by raising:
an unsolvable norm equation is an answer, not a fault.
"""


class AzuliftError(Exception):
    """Base class for all library faults."""


class NotUnit(AzuliftError):
    """An element required to be invertible is not a unit."""


class Degenerate(AzuliftError):
    """A constructed object collapsed (zero norm pair, singular frame)."""


class SearchExhausted(AzuliftError):
    """A bounded randomized or enumerative search ran out of budget.

    Hitting this on admissible input is a defect, not an expected outcome;
    tests treat it as failure.
    """


class PreconditionViolated(AzuliftError):
    """Caller broke a documented precondition that we check explicitly."""


class SlotNotInBase(AzuliftError):
    """Corestriction rewriting needs its first slot in the base ring."""


class NotSplit(AzuliftError):
    """The algebra is certified non-split, so no rank-one idempotent exists."""


class NotIdempotentResidue(AzuliftError):
    """Hensel lifting was handed something that is not idempotent at residue."""


class NotBrauerEquivalent(AzuliftError):
    """B and its Galois twist lie in different residue Brauer classes."""


class BaseMismatch(AzuliftError):
    """Two objects that must share a base ring do not."""


class NotFree(AzuliftError):
    """A module expected to be free of known rank fails the residue rank test."""


class NoUnitSolution(AzuliftError):
    """A solution space exists but contains no unit where one is required."""


class AssociativityFailure(AzuliftError):
    """Structure constants fail an exact associativity or constructor check."""


class WitnessSearchFailed(AzuliftError):
    """No witness tuple could be derived for an admissible scenario."""


class CheckFailed(AzuliftError):
    """An exact post-construction identity failed; the message names it."""


class FormatError(AzuliftError):
    """A scenario or certificate file violates the documented JSON format."""
