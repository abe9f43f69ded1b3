"""Exception types shared across the package."""


class OviprobError(ValueError):
    """Base class for all errors raised by this package."""


class SizeLimitError(OviprobError):
    """An input exceeds a configured size cap; the message names the cap."""


class PartitionClassError(OviprobError):
    """A partition does not belong to the class an operation requires."""


class OrderError(OviprobError):
    """Two partitions are not comparable in the required partial order."""


class TruncationError(OviprobError):
    """A series operation would silently lose precision."""


class UnsupportedKindError(OviprobError):
    """The requested independence kind does not support this operation."""


class DivergentTailError(OviprobError):
    """A truncated operator evaluation has no finite tail bound."""
