"""Exception hierarchy.

Every error carries a short ``code`` string; sweep tables record it in the
``error_code`` column instead of aborting.
"""


class SmallDivisorError(Exception):
    code = "error"


class NotInUnitInterval(SmallDivisorError, ValueError):
    code = "not_in_unit_interval"


class EmptyExpansion(SmallDivisorError, ValueError):
    code = "empty_expansion"


class InsufficientDepth(SmallDivisorError, ValueError):
    code = "insufficient_depth"


class ScheduleOverflow(SmallDivisorError, OverflowError):
    code = "schedule_overflow"

    def __init__(self, reached_depth, message=None):
        self.reached_depth = reached_depth
        super().__init__(message or f"integer budget exceeded after {reached_depth} quotients")


class RingMismatch(SmallDivisorError, TypeError):
    code = "ring_mismatch"


class TruncationTooShort(SmallDivisorError, ValueError):
    code = "truncation_too_short"


class InnerHasConstantTerm(SmallDivisorError, ValueError):
    code = "inner_constant_term"


class DimensionMismatch(SmallDivisorError, ValueError):
    code = "dimension_mismatch"


class ResonantDivisor(SmallDivisorError, ArithmeticError):
    """A divisor vanished (exactly, or below the numeric tolerance)."""

    code = "resonant_divisor"

    def __init__(self, index, component, divisor):
        self.index = tuple(index)
        self.component = component
        self.divisor = divisor
        super().__init__(
            f"resonant divisor at index {self.index}, component {component} (|divisor| = {float(abs(divisor)):.6g})"
        )


class ObstructionNonzero(SmallDivisorError, ArithmeticError):
    code = "obstruction_nonzero"

    def __init__(self, index, component, obstruction):
        self.index = tuple(index)
        self.component = component
        self.obstruction = obstruction
        super().__init__(
            f"obstruction at resonant index {self.index}, component {component} "
            f"does not vanish (|numerator| = {float(abs(obstruction)):.6g})"
        )


class ParamTrackingTooLarge(SmallDivisorError, ValueError):
    code = "param_tracking_too_large"


class TooFewCoefficients(SmallDivisorError, ValueError):
    code = "too_few_coefficients"


class LatticeMismatch(SmallDivisorError, ValueError):
    code = "lattice_mismatch"

    def __init__(self, index, component, message=None):
        self.index = tuple(index)
        self.component = component
        super().__init__(
            message
            or f"vanishing divisor at index {self.index}, component {component} "
            "is not generated by the resonance lattice"
        )


class InversionFailure(SmallDivisorError, ArithmeticError):
    code = "inversion_failure"


class TooFewPoints(SmallDivisorError, ValueError):
    code = "too_few_points"


class UnsupportedDomain(SmallDivisorError, TypeError):
    code = "unsupported_domain"


class ConfigError(SmallDivisorError, ValueError):
    code = "config_invalid"


class PrecisionDisagreement(SmallDivisorError, ArithmeticError):
    code = "precision_disagreement"
