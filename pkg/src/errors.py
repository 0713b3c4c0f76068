"""
Error hierarchy for treekta

Every error carries the process exit code the CLI reports for it.
"""


class TreeKtaError(Exception):
    """Base class for all treekta errors"""

    exit_code = 2


class UsageError(TreeKtaError):
    """Invalid command line or configuration"""

    exit_code = 1


class ConfigError(UsageError):
    """Configuration failed validation"""


class DataError(TreeKtaError):
    """Input data is missing, malformed or has incompatible shape"""

    exit_code = 2


class NumericalError(TreeKtaError):
    """A numerical routine could not produce a usable result"""

    exit_code = 3


class NotPositiveDefiniteError(NumericalError):
    """Cholesky factorization failed; the ridge search catches this and moves on"""


class KernelUnusableError(NumericalError):
    """No ridge value on the grid made the kernel system solvable"""


class DegenerateDesignError(NumericalError):
    """Landmark design matrix carries no information"""
