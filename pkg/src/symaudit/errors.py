"""Exception hierarchy shared by all modules.

Every error raised on a user-facing path derives from :class:`SymauditError`
so the service and CLI can map failures onto the exit-code contract
(1 = input error, 2 = audit failure reported in the output).
"""


class SymauditError(Exception):
    """Base class for all package errors."""


class GrammarError(SymauditError):
    """A spec string (group/symbol/measure/ring/body) failed to parse.

    Carries the offending text and, when known, the position of the
    first bad character.
    """

    def __init__(self, text: str, message: str, position: int | None = None):
        self.text = text
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"cannot parse {text!r}{where}: {message}")


class MalformedElementError(SymauditError):
    """An element is not a valid canonical normal form for its group."""


class BallCapError(SymauditError):
    """Enumerating a ball would exceed the configured element cap."""

    def __init__(self, group_label: str, radius: int, cap: int):
        self.group_label = group_label
        self.radius = radius
        self.cap = cap
        super().__init__(
            f"ball of {group_label} exceeds cap {cap} first at radius {radius}; "
            f"raise the cap (argument or SYMAUDIT_BALL_CAP) to go further"
        )


class DomainError(SymauditError):
    """Inputs are outside the mathematical domain of an operation."""


class DegenerateLengthError(DomainError):
    """A length function vanishes off the base point where positivity is required."""


class NumericError(SymauditError):
    """A numerical routine failed to meet its accuracy contract."""


class NumericDerivativeError(NumericError):
    """Finite-difference derivatives disagreed across step sizes."""


class EigenResidualError(NumericError):
    """An eigendecomposition failed its residual invariant."""


class SymmetryError(DomainError):
    """A symbol violated m(g) == m(g^-1) beyond tolerance."""


class NonConvergenceError(SymauditError):
    """Subsequence selection could not find an admissible index below the horizon."""

    def __init__(self, level: int, horizon: int, blocking_point):
        self.level = level
        self.horizon = horizon
        self.blocking_point = blocking_point
        super().__init__(
            f"no admissible index below horizon {horizon} at selection level {level}; "
            f"blocking point {blocking_point!r}"
        )


class FusionWindowError(SymauditError):
    """A fusion product escapes the declared label window."""

    def __init__(self, label, other, needed, window):
        self.label = label
        self.other = other
        super().__init__(
            f"fusion {label!r} x {other!r} needs label {needed!r} outside window "
            f"(max {window!r}); enlarge the ring window"
        )
