"""Fastest noise-cancelling single-qubit drives via error-plane geometry.

A drive pulse and a plane curve carry the same information: arc length
is time and signed curvature is the drive amplitude.  Closing the curve
cancels quasistatic transverse noise to first order; a closed curve
with zero net area cancels it to second order.  This package builds the
time-optimal curves (chains of unit-radius arcs), turns them into
pulses, smooths them under rise-time budgets, and verifies every claim
against a direct propagator of the noisy two-level Schrodinger
equation.
"""

from .errors import (
    AccuracyError,
    CalibrationError,
    ClosureError,
    CurvePulseError,
    DegenerateSpeedError,
    DiscontinuityError,
    InvalidInputError,
    SolverError,
    UnfittableExponentError,
)
from .geometry import (
    Arc,
    Line,
    PiecewiseConstantPulse,
    PiecewiseCurve,
    Point2,
    PulseWaveform,
    SampledCurve,
    SampledPulse,
    arc_length,
    closure_defect,
    curvature_at,
    curve_from_pulse,
    pulse_from_curve,
    signed_area,
)
from .qsim import (
    NoisePoint,
    SimReport,
    SweepResult,
    Unitary2,
    fidelity,
    perturbative_coeffs,
    propagate,
    simulate,
    sweep,
)
from .smoothing import (
    SmoothedPulseReport,
    SmoothingParams,
    blend_f,
    calibrate_to_slope,
    default_params,
    direct_smooth,
    extract_smoothed_pulse,
    max_slope,
    rescale_pulse,
    smooth_curve,
)
from .synthesis import (
    FamilyLengths,
    SecondOrderGeometry,
    SynthesisSpec,
    appendix_area,
    family_lengths,
    first_order_curve,
    first_order_pulse,
    second_order_curve,
    second_order_pulse,
    solve_k,
    synthesize_curve,
    synthesize_pulse,
    t_min,
)

__version__ = "0.1.0"
