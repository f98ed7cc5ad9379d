"""Exception hierarchy shared by the library and the CLI"""


class FieldGraphError(Exception):
    """Base class for every error raised by fieldgraph"""

    exit_code = 1


class ValidationError(FieldGraphError, ValueError):
    """Invalid input: bad polynomial, reducible modulus, bad flag value"""

    exit_code = 2


class PolynomialSyntaxError(ValidationError):
    """Polynomial text could not be parsed"""


class ReducibleModulusError(ValidationError):
    """The modulus of a field model is not irreducible"""


class MixedModelError(ValidationError):
    """Operands belong to different field models"""


class DirectedGraphError(ValidationError):
    """An undirected graph was required"""


class AsymmetricMatrixError(ValidationError):
    """A symmetric matrix was required"""


class ZeroInversionError(FieldGraphError, ZeroDivisionError):
    """Inverse or order of the zero element requested"""

    exit_code = 2


class DisconnectedGraphError(FieldGraphError):
    """Operation requires a connected graph; carries the component partition"""

    def __init__(self, message, components):
        super().__init__(message)
        self.components = components


class NotEulerianError(FieldGraphError):
    """Eulerian circuit requested on a graph that has none"""


class LimitExceededError(FieldGraphError):
    """Field order above the configured census limit"""

    exit_code = 3


class CacheVerificationError(FieldGraphError):
    """Cached census entries disagree with recomputation"""

    exit_code = 4

    def __init__(self, message, keys):
        super().__init__(message)
        self.keys = keys


class VanishingEigenfunctionError(FieldGraphError):
    """The explicit eigenfunction is identically zero"""


class OracleSizeError(FieldGraphError):
    """Brute-force oracle asked to handle too many vertices"""
