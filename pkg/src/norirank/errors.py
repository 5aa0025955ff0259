"""Exception types shared across the package.

Every error that maps to a CLI exit code lives here; the mapping itself is in
``norirank.cli``.
"""


class NoriRankError(Exception):
    """Base class for all package-specific errors."""


# --- field / matrix construction -------------------------------------------

class NotPrimeError(NoriRankError):
    """Characteristic is not a prime >= 5."""


class DegreeError(NoriRankError):
    """Extension degree must be >= 1."""


class SingularError(NoriRankError):
    """Matrix is not invertible over its field."""


class OrderOverflowError(NoriRankError):
    """Element order exceeds the supplied cap."""


# --- group engine -----------------------------------------------------------

class CapExceededError(NoriRankError):
    """Enumeration or composition oracle ran past its element cap."""

    exit_code = 3


class DomainTooLargeError(NoriRankError):
    """Permutation domain for the stabilizer chain is beyond the configured bound."""


class UnknownFactorError(NoriRankError):
    """A simple composition factor has no catalogue match; reported, never guessed."""

    exit_code = 5

    def __init__(self, order: int):
        super().__init__(f"simple factor of order {order} not in catalogue")
        self.order = order


# --- exp/log and Lie machinery ----------------------------------------------

class NotNilpotentError(NoriRankError):
    """exp input must satisfy x^n = 0."""


class NotUnipotentError(NoriRankError):
    """log input must satisfy (u-1)^n = 0."""


class CharTooSmallError(NoriRankError):
    """The characteristic does not exceed the matrix side, so k! is not invertible."""


# --- tables and certificates --------------------------------------------------

class UnsupportedFamilyError(NoriRankError):
    """No order formula for the requested classical family."""


class MissingAmbientError(NoriRankError):
    """A fullness certificate needs a declared ambient group."""


class CrossCheckError(NoriRankError):
    """Two routes that must agree disagreed; always a hard failure."""


# --- lattice front door -------------------------------------------------------

class NonCompactError(NoriRankError):
    """No stabilized lattice: valuations diverge, the group is unbounded."""

    exit_code = 4


class NotIntegralError(NoriRankError):
    """Entry has negative ell-adic valuation; reduce after stabilizing."""


class SingularReductionError(NoriRankError):
    """Reduction mod ell of a generator is singular."""


# --- CLI ----------------------------------------------------------------------

class SchemaError(NoriRankError):
    """Instance file violates the schema; carries a JSON-pointer location."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"at {pointer}: {message}")
        self.pointer = pointer
