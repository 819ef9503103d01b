"""
Exception hierarchy shared by the library, the services and the CLI
"""


class CumulantKitError(Exception):
    """Base class for all library errors"""


class SizeLimitError(CumulantKitError, ValueError):
    """Enumeration size or cumulant order exceeds the documented bound"""


class InvalidParameterError(CumulantKitError, ValueError):
    """Distribution parameters or numerical settings out of range"""


class DataFormatError(CumulantKitError, ValueError):
    """Input file or distribution spec could not be parsed"""


class UsageError(CumulantKitError, ValueError):
    """Inconsistent command-line options"""


class RangeError(CumulantKitError, ValueError):
    """Evaluation point outside the truncated support"""


class ModelError(CumulantKitError):
    """Distribution model misbehaves (non-monotone or constant CDF)"""


class NumericalGuardError(CumulantKitError, ArithmeticError):
    """A guarded denominator or sign check failed"""


class MemoryBudgetError(CumulantKitError):
    """Tensor grid would exceed the configured cell budget"""
