"""Exception types shared across the package."""


class CurvePulseError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CurvePulseError, ValueError):
    """An argument violates a documented precondition."""


class ClosureError(InvalidInputError):
    """A closed curve was required but the endpoints do not meet.

    Carries the measured gap so callers can report how far open the
    curve is.
    """

    def __init__(self, defect, tol):
        self.defect = float(defect)
        self.tol = float(tol)
        super().__init__(
            f"curve is not closed: endpoint gap {self.defect:.3e} exceeds "
            f"tolerance {self.tol:.1e}"
        )


class DiscontinuityError(CurvePulseError):
    """Curvature was evaluated at an undeclared tangent discontinuity."""


class DegenerateSpeedError(CurvePulseError):
    """The parameterization speed vanished, so time cannot be recovered."""


class SolverError(CurvePulseError):
    """A root solve failed; the message carries bracket diagnostics."""


class CalibrationError(CurvePulseError):
    """Slope calibration could not reach the requested budget."""


class AccuracyError(CurvePulseError):
    """A numerical routine could not meet its accuracy target."""


class UnfittableExponentError(AccuracyError):
    """All infidelities sit at the double-precision floor; the scaling
    exponent is not identifiable on the requested window."""
