"""Exception taxonomy.

Two families matter to callers: DomainError (a point sits on a singular
locus, pole, branch cut, or otherwise outside an operation's domain) and
ConvergenceError (an iterative process ran out of budget).  The CLI maps
them to exit codes 2 and 3.
"""


class HillfolError(Exception):
    """Base class for all library errors."""


class DomainError(HillfolError):
    """Input lies outside the mathematical domain of the operation."""


class SingularLocusError(DomainError):
    """Evaluation or trajectory hit a declared singular locus."""


class PoleError(DomainError):
    """Evaluation at a pole (gamma at non-positive integers, Y at 0)."""


class NonDivisibleError(DomainError):
    """Exact monomial division failed; carries the offending term."""

    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class DependentPairError(DomainError):
    """Two solutions passed as a basis are linearly dependent."""


class DegenerateFloquetError(DomainError):
    """Monodromy has a nontrivial Jordan block; no Floquet basis exists."""


class ConvergenceError(HillfolError):
    """Series, integrator or Newton iteration failed to converge."""


class BranchCutWarning(UserWarning):
    """Argument is close to the principal branch cut (-inf, 0]."""
