"""Exception types shared across the package."""


class RelhypError(Exception):
    pass


class BackendMismatch(RelhypError, ValueError):
    """Operands come from different group backends."""


class UnsupportedBackend(RelhypError):
    pass


class CapExceeded(RelhypError):
    """An enumeration would exceed its configured cap."""


class Disconnected(RelhypError):
    pass


class NotATree(RelhypError):
    pass


class TruncationError(RelhypError):
    """A query leaves the truncated region, so the answer is not certified."""


class NotSeparating(RelhypError):
    pass


class NonGeodesic(RelhypError, ValueError):
    pass


class InvalidChain(RelhypError, ValueError):
    pass


class InvariantViolation(RelhypError):
    pass


class ConfigError(RelhypError, ValueError):
    pass
