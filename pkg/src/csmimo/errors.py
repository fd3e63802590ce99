"""Exception types shared across the library."""


class CsmimoError(Exception):
    """Base class for all library-specific errors."""


class IndivisibleBitLength(CsmimoError, ValueError):
    """Bit stream length is not a multiple of bits-per-symbol."""


class DimensionMismatch(CsmimoError, ValueError):
    """Vector or matrix dimensions do not match the configured sizes."""


class BadSubblockShape(CsmimoError, ValueError):
    """Sub-block count does not evenly divide the stream counts."""


class DictionaryTooLarge(CsmimoError, ValueError):
    """Requested candidate enumeration exceeds the configured cap."""


class NotAConstellationTuple(CsmimoError, ValueError):
    """Vector entries are not constellation points."""


class IndexOutOfRange(CsmimoError, IndexError):
    """Dictionary column index outside the valid range."""


class RankDeficientChannel(CsmimoError):
    """Channel matrix is (numerically) rank deficient, equalization impossible."""


class TooManyColumns(CsmimoError, ValueError):
    """Matrix has too many columns for a combinatorial search."""
