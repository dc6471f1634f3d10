"""Exception types shared across the package."""


class ThurstonError(Exception):
    """Base class for every error raised by this package."""


class InvalidLetter(ThurstonError):
    pass


class RankMismatch(ThurstonError):
    pass


class IndexOverflow(ThurstonError):
    pass


class NotEssential(ThurstonError):
    pass


class NoEssentialCurves(ThurstonError):
    pass


class UnsupportedCurve(ThurstonError):
    pass


class NotInvariant(ThurstonError):
    pass


class NotUnimodular(ThurstonError):
    pass


class ContractViolation(ThurstonError):
    """An internal postcondition failed; indicates a bug upstream."""


class NotStable(ThurstonError):
    pass


class NotLiftable(ThurstonError):
    pass


class OrbitOverflow(ThurstonError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PresentationError(ThurstonError):
    """A cover presentation violates one of its invariants.

    ``invariant`` names the violated rule, e.g. ``MonodromyProductViolation``.
    """

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class ParseError(ThurstonError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class NotDecomposable(ThurstonError):
    pass
