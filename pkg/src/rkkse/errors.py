"""Exception hierarchy. Every error carries a category used for CLI exit codes."""


class RkkseError(Exception):
    category = "error"


class DomainError(RkkseError):
    """An argument lies outside the operation's domain."""

    category = "domain"


class ContractError(RkkseError):
    """A call violates an interface precondition (unsupported order, empty input)."""

    category = "contract"


class AccuracyError(RkkseError):
    """Adaptive refinement exhausted its node budget before reaching tolerance.

    Carries the best available estimate and the achieved error bound.
    """

    category = "accuracy"

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class DegeneracyError(RkkseError):
    """Gram matrix lost positive definiteness; names the offending index."""

    category = "degeneracy"

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DivergenceError(RkkseError):
    """Picard iteration blew up past the growth guard."""

    category = "divergence"


class ConstructionError(RkkseError):
    """A kernel or basis could not be built (inconsistent constraints)."""

    category = "construction"


EXIT_CODES = {
    "domain": 2,
    "accuracy": 3,
    "degeneracy": 4,
    "divergence": 5,
    "io": 6,
    "contract": 7,
    "construction": 8,
    "error": 1,
}
