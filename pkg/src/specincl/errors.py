"""Exception types shared across the package."""


class SpecinclError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SpecinclError):
    """An argument is outside the mathematical domain of the operation."""


class PartitionError(SpecinclError):
    """Block partition is inconsistent with the matrix it partitions."""


class PiMethodUnsupported(SpecinclError):
    """Periodised submatrices need a uniform partition (all blocks square,
    same order)."""


class DegenerateError(SpecinclError):
    """The requested quantity is undefined in a degenerate configuration
    (e.g. the root angle when both off-diagonal norms vanish)."""


class GridMismatch(SpecinclError):
    """Region algebra requires operands sampled on the identical grid."""


class EmptyRegionError(SpecinclError):
    """Operation needs a nonempty region mask."""
