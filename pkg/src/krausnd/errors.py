"""Exception types raised by krausnd."""


class KrausError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(KrausError, ValueError):
    pass


class DimensionMismatch(KrausError, ValueError):
    pass


class IndexOutOfRange(KrausError, IndexError):
    pass


class PreconditionViolated(KrausError, ValueError):
    pass


class NotNormalized(PreconditionViolated):
    """The family fails ``sum_a V_a^* V_a = Id`` within tolerance."""


class NotCommuting(PreconditionViolated):
    def __init__(self, pair, defect):
        self.pair = pair
        self.defect = defect
        super().__init__(
            f"operators {pair[0]} and {pair[1]} do not commute "
            f"(||[V_a, V_b]||_F = {defect:.3e})"
        )


class NotNormal(PreconditionViolated):
    def __init__(self, index, defect):
        self.index = index
        self.defect = defect
        super().__init__(
            f"operator {index} is not normal (||[V, V^*]||_F = {defect:.3e})"
        )


class NotUnitVector(PreconditionViolated):
    pass


class NoConvergence(KrausError, RuntimeError):
    pass


class PropertyViolation(KrausError, RuntimeError):
    """A computed decomposition failed one of its structural properties.

    ``which`` is one of ``"faithful"``, ``"radius"`` or ``"block-zero"``.
    Usually a numerical-rank misjudgment; tightening tolerances may help.
    """

    def __init__(self, which, value, message=None):
        self.which = which
        self.value = value
        super().__init__(message or f"property {which!r} violated (value {value:.3e})")


class RadiusNotLessThanOne(KrausError, ValueError):
    pass


class ExplosionCap(KrausError, ValueError):
    pass


class DegenerateStep(KrausError, RuntimeError):
    pass


class FormatError(KrausError, ValueError):
    """Malformed family or state file. The message names the offending position."""
