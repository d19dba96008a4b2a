"""Exception types raised across the package."""


class ZipEntError(Exception):
    """Base class for all package errors."""


class NonSurjectiveError(ZipEntError, ValueError):
    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__(f"transition map is not surjective; empty fibers over {list(self.missing)}")


class DomainMismatchError(ZipEntError, ValueError):
    pass


class EmptySetError(ZipEntError, ValueError):
    pass


class NotAPartitionError(ZipEntError, ValueError):
    pass


class CapExceededError(ZipEntError, RuntimeError):
    def __init__(self, what, size, cap):
        self.size = size
        self.cap = cap
        super().__init__(f"{what}: {size} exceeds cap {cap}")


class NotGIPError(ZipEntError, ValueError):
    pass


class NotInvariantError(ZipEntError, ValueError):
    pass


class NotSubadditiveError(ZipEntError, ValueError):
    def __init__(self, m, n, excess):
        self.witness = (m, n)
        self.excess = excess
        super().__init__(f"a_{m + n} exceeds a_{m} + a_{n} by {excess:.3e}")


class UnsupportedForbiddenLengthError(ZipEntError, ValueError):
    pass


class OracleDisagreementError(ZipEntError, RuntimeError):
    pass


class HypothesisViolatedError(ZipEntError, ValueError):
    pass


class BoundaryOrbitError(ZipEntError, ValueError):
    pass
