"""Exception types shared across the package."""


class DataError(ValueError):
    """Malformed or inconsistent input data."""


class DegenerateError(ArithmeticError):
    """A numerical procedure has no meaningful answer for the given input
    (zero variance, singular covariance, all-zero eigenvalues)."""
