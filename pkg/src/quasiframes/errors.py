"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`QuasiFramesError`. A false certificate verdict is a result, not an
error; exceptions are reserved for violated preconditions and failed
constructions.
"""


class QuasiFramesError(Exception):
    """Base class for all package errors."""


class UsageError(QuasiFramesError, ValueError):
    """Arguments are malformed: wrong shapes, mismatched spaces, bad lengths."""


class ContractionFailure(QuasiFramesError):
    """The contraction constant ``||lam*Q - I||`` is not below one."""

    def __init__(self, msg, alpha=None):
        super().__init__(msg)
        self.alpha = alpha


class NonConvergence(QuasiFramesError):
    """An iteration exhausted its budget before reaching the tolerance."""


class SingularOperator(QuasiFramesError):
    """A direct solve was asked for on a numerically singular operator."""


class KernelMismatch(QuasiFramesError):
    """``ker(synthesis(xi))`` is not contained in the kernel of the difference synthesis."""


class ExtensionMismatch(QuasiFramesError):
    """A supplied extension does not agree with the assembled form on the given subspaces."""


class HypothesisViolated(QuasiFramesError):
    """A closed-form bound or generator was asked for outside its hypotheses."""


class PositivityViolation(HypothesisViolated):
    """A product of weight functions is not bounded away from zero on the nodes."""


class EpsilonOutOfRange(HypothesisViolated):
    """The perturbation size of the alternating-sum family is outside its admissible range."""


class QuadratureUnderresolved(QuasiFramesError):
    """The discrete grid cannot resolve the requested family."""


class StencilOverflow(QuasiFramesError):
    """A spectral differentiation request exceeds the truncated basis."""


class IntegrationDivergence(QuasiFramesError):
    """An integral over the real line did not converge or has non-negligible tails."""


class TaylorTooShort(QuasiFramesError):
    """A Taylor coefficient beyond the stored order was requested."""


class ReciprocalUnderflow(QuasiFramesError):
    """A multiplier comes too close to zero to be inverted safely."""


class SchemaError(QuasiFramesError):
    """A scenario file does not validate against the scenario schema."""
