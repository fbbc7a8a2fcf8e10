"""
Exception hierarchy for mspe-lab
"""

from typing import Any, Optional


class MspeLabError(Exception):
    """Base class for all errors raised by the lab"""

    exit_code = 1


class DomainError(MspeLabError, ValueError):
    """An argument lies outside the mathematical domain of the operation"""

    exit_code = 2


class OrderTooLargeError(DomainError):
    """Model order violates |m| < n - 1 or a stricter variant of it"""

    def __init__(self, order: int, n: int, limit: Optional[int] = None) -> None:
        self.order = order
        self.n = n
        self.limit = n - 1 if limit is None else limit
        super().__init__(
            f"Model order {order} is too large for n={n} (order must be < {self.limit})"
        )


class UnsupportedKindError(DomainError):
    """The requested criterion kind has no such transform"""


class TooManyBlocksError(DomainError):
    """Exhaustive enumeration requested beyond 20 blocks"""


class EmptyFamilyError(DomainError):
    """Selection over an empty family of records"""


class MissingCriterionError(DomainError):
    """A record lacks the criterion used for selection"""


class DistributionNotGaussianError(DomainError):
    """Distributional-law checks need a Gaussian data-generating process"""


class ConfigError(MspeLabError):
    """Unreadable or invalid configuration, dataset or block specification"""

    exit_code = 2


class RankDeficientError(MspeLabError):
    """Selected design columns are numerically collinear"""

    def __init__(self, rank: int, order: int, mask: Any = None) -> None:
        self.rank = rank
        self.order = order
        self.mask = mask
        super().__init__(
            f"Selected columns are rank deficient: "
            f"numerical rank {rank} < order {order}"
        )


class SingularSubmatrixError(MspeLabError):
    """The covariance submatrix on a mask is not positive definite"""


class ModelFitError(MspeLabError):
    """A fit failed inside a batch; tags the offending mask or search step"""

    def __init__(
        self, message: str, mask: Any = None, step: Optional[int] = None
    ) -> None:
        self.mask = mask
        self.step = step
        super().__init__(message)
