"""Plane curves in the error plane and the curve <-> pulse maps.

A driving pulse and a plane curve are two views of the same object:
time along the pulse is arc length along the curve, and the drive
amplitude at each instant equals the signed curvature at the matching
point.  Positive amplitude bends the curve counterclockwise.  Closing
the curve cancels the leading-order effect of quasistatic transverse
noise; making its net signed area vanish cancels the next order as
well.

Curves come in two flavors: ``PiecewiseCurve`` (exact chains of
circular arcs and straight lines, used by the synthesizer) and
``SampledCurve`` (dense grids, used by the smoother).  Pulses likewise:
``PiecewiseConstantPulse`` (square composites) and ``SampledPulse``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .errors import (
    ClosureError,
    DegenerateSpeedError,
    DiscontinuityError,
    InvalidInputError,
)

# Geometric tolerances: joint mismatch, closure gap, and agreement of
# supplied derivative arrays with finite differences.
TOL_GEOM = 1e-9
TOL_CLOSE = 1e-8
TOL_DERIV = 1e-5

#: Default dense-grid size for sampled curves; second derivatives by
#: finite differences need at least this density to stay below TOL_DERIV.
DEFAULT_GRID_POINTS = 4096


@dataclass(frozen=True)
class Point2:
    """A point in the dimensionless error plane."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInputError(f"non-finite point ({self.x}, {self.y})")

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Line:
    """Straight segment from ``start`` to ``end``; curvature zero."""

    start: Point2
    end: Point2

    def __post_init__(self):
        if self.length <= 0.0:
            raise InvalidInputError("line segment must have positive length")

    @property
    def length(self) -> float:
        return self.start.distance_to(self.end)

    @property
    def curvature(self) -> float:
        return 0.0

    def tangent_angle(self, s: float) -> float:
        return math.atan2(self.end.y - self.start.y, self.end.x - self.start.x)

    def position(self, s):
        """Point at local arc length ``s``; valid for any real ``s``
        (the analytic extension of the segment)."""
        a = self.tangent_angle(0.0)
        s = np.asarray(s, dtype=float)
        return self.start.x + s * math.cos(a), self.start.y + s * math.sin(a)

    def end_point(self) -> Point2:
        return self.end


@dataclass(frozen=True)
class Arc:
    """Circular arc; ``sweep`` is signed, positive = counterclockwise.

    ``start_angle`` locates the first point as seen from the center.
    The curve's signed curvature on the arc is ``sign(sweep)/radius``.
    """

    center: Point2
    radius: float
    start_angle: float
    sweep: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise InvalidInputError("arc radius must be positive")
        if self.sweep == 0.0:
            raise InvalidInputError("arc sweep must be nonzero")

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    @property
    def curvature(self) -> float:
        return math.copysign(1.0 / self.radius, self.sweep)

    def _angle_at(self, s):
        return self.start_angle + np.sign(self.sweep) * np.asarray(s, dtype=float) / self.radius

    def tangent_angle(self, s: float) -> float:
        # Tangent leads the radius vector by +pi/2 on ccw arcs, lags on cw.
        return float(self._angle_at(s)) + math.copysign(math.pi / 2, self.sweep)

    def position(self, s):
        """Point at local arc length ``s``; any real ``s`` is allowed
        (the analytic extension winds around the full circle)."""
        th = self._angle_at(s)
        return (
            self.center.x + self.radius * np.cos(th),
            self.center.y + self.radius * np.sin(th),
        )

    def end_point(self) -> Point2:
        x, y = self.position(self.length)
        return Point2(float(x), float(y))

    def start_point(self) -> Point2:
        x, y = self.position(0.0)
        return Point2(float(x), float(y))


Segment = Union[Line, Arc]


def _segment_start(seg: Segment) -> Point2:
    return seg.start if isinstance(seg, Line) else seg.start_point()


class PiecewiseCurve:
    """Chain of analytic segments, C0 everywhere and C1 at interior
    joints.  The only tangent discontinuity a curve may carry is the
    declared cusp where its two ends meet (by convention the origin);
    cusps are metadata, never inferred.

    Parameters
    ----------
    segments : sequence of Line | Arc
    origin_cusp : float or None
        Opening angle of the declared start/end cusp, or None when the
        endpoints join smoothly (or do not meet at all).
    validate : bool
        Verify C0/C1 continuity on construction.  Disable only to build
        deliberately broken curves in tests.
    """

    def __init__(self, segments, origin_cusp: Optional[float] = None, validate: bool = True):
        segments = tuple(segments)
        if not segments:
            raise InvalidInputError("curve needs at least one segment")
        self.segments = segments
        self.origin_cusp = origin_cusp
        lengths = [seg.length for seg in segments]
        self.breakpoints = np.concatenate([[0.0], np.cumsum(lengths)])
        if validate:
            self._check_continuity()

    def _check_continuity(self):
        for i in range(len(self.segments) - 1):
            a, b = self.segments[i], self.segments[i + 1]
            gap = a.end_point().distance_to(_segment_start(b))
            if gap > TOL_GEOM:
                raise InvalidInputError(
                    f"segments {i} and {i+1} are disconnected by {gap:.3e}"
                )
            turn = _angle_diff(b.tangent_angle(0.0), a.tangent_angle(a.length))
            if abs(turn) > TOL_GEOM:
                raise InvalidInputError(
                    f"segments {i} and {i+1} join with a kink of {turn:.3e} rad"
                )

    @property
    def total_length(self) -> float:
        return float(self.breakpoints[-1])

    def segment_index_at(self, lam: float) -> int:
        if lam < -TOL_GEOM or lam > self.total_length + TOL_GEOM:
            raise InvalidInputError(
                f"arc-length parameter {lam} outside [0, {self.total_length}]"
            )
        i = bisect_right(self.breakpoints, lam) - 1
        return min(max(i, 0), len(self.segments) - 1)

    def point_at(self, lam: float) -> Point2:
        i = self.segment_index_at(lam)
        x, y = self.segments[i].position(lam - self.breakpoints[i])
        return Point2(float(x), float(y))

    def tangent_angle_at(self, lam: float) -> float:
        i = self.segment_index_at(lam)
        return self.segments[i].tangent_angle(lam - self.breakpoints[i])

    def start_point(self) -> Point2:
        return _segment_start(self.segments[0])

    def end_point(self) -> Point2:
        return self.segments[-1].end_point()

    def sample(self, n: int = DEFAULT_GRID_POINTS) -> "SampledCurve":
        """Evaluate on a uniform arc-length grid (no derivative arrays;
        curvature is discontinuous at joints, so attach derivatives only
        to smooth curves)."""
        lam = np.linspace(0.0, self.total_length, n)
        x = np.empty(n)
        y = np.empty(n)
        idx = np.clip(np.searchsorted(self.breakpoints, lam, side="right") - 1,
                      0, len(self.segments) - 1)
        for i, seg in enumerate(self.segments):
            m = idx == i
            if np.any(m):
                x[m], y[m] = seg.position(lam[m] - self.breakpoints[i])
        return SampledCurve(lam, x, y)


def _angle_diff(a: float, b: float) -> float:
    """Signed difference a - b wrapped to (-pi, pi]."""
    d = (a - b) % (2 * math.pi)
    return d - 2 * math.pi if d > math.pi else d


@dataclass
class SampledCurve:
    """Curve on a strictly increasing parameter grid.

    Derivative arrays are optional; ``with_derivatives`` attaches
    centered fourth-order finite differences (one-sided at the ends),
    which is how curvature is extracted from smoothed curves.
    """

    lam: np.ndarray
    x: np.ndarray
    y: np.ndarray
    dx: Optional[np.ndarray] = None
    dy: Optional[np.ndarray] = None
    d2x: Optional[np.ndarray] = None
    d2y: Optional[np.ndarray] = None

    def __post_init__(self):
        self.lam = np.asarray(self.lam, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.lam.ndim != 1 or len(self.lam) < 16:
            raise InvalidInputError("sampled curve needs a 1-D grid of >= 16 points")
        if len(self.x) != len(self.lam) or len(self.y) != len(self.lam):
            raise InvalidInputError("coordinate arrays must match the grid length")
        if np.any(np.diff(self.lam) <= 0):
            raise InvalidInputError("parameter grid must be strictly increasing")

    @property
    def total_length(self) -> float:
        # lam is arc length for unit-speed curves only; use arc_length()
        # for the geometric length of a general sampled curve.
        return float(self.lam[-1] - self.lam[0])

    def with_derivatives(self) -> "SampledCurve":
        if self.dx is not None and self.d2x is not None:
            return self
        h = self.lam[1] - self.lam[0]
        if not np.allclose(np.diff(self.lam), h, rtol=1e-9, atol=1e-12):
            raise InvalidInputError("finite-difference derivatives need a uniform grid")
        return SampledCurve(
            self.lam, self.x, self.y,
            dx=fd_derivative(self.x, h), dy=fd_derivative(self.y, h),
            d2x=fd_second_derivative(self.x, h), d2y=fd_second_derivative(self.y, h),
        )

    def speed(self) -> np.ndarray:
        c = self.with_derivatives()
        return np.hypot(c.dx, c.dy)

    def curvature(self) -> np.ndarray:
        c = self.with_derivatives()
        sp2 = c.dx * c.dx + c.dy * c.dy
        return (c.dx * c.d2y - c.dy * c.d2x) / sp2 ** 1.5


# Fourth-order finite-difference stencils on uniform grids; the two
# points nearest each end use one-sided stencils of the same order.
_D1_ONESIDED = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_D2_ONESIDED = np.array([15 / 4, -77 / 6, 107 / 6, -13.0, 61 / 12, -5 / 6])


def fd_derivative(f: np.ndarray, h: float) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if len(f) < 6:
        raise InvalidInputError("need at least 6 samples for 4th-order stencils")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    for i in (0, 1):
        d[i] = np.dot(_D1_ONESIDED, f[i:i + 5]) / h
        d[-1 - i] = -np.dot(_D1_ONESIDED, f[len(f) - 1 - i::-1][:5]) / h
    return d


def fd_second_derivative(f: np.ndarray, h: float) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if len(f) < 7:
        raise InvalidInputError("need at least 7 samples for 4th-order stencils")
    d = np.empty_like(f)
    d[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)
    for i in (0, 1):
        d[i] = np.dot(_D2_ONESIDED, f[i:i + 6]) / (h * h)
        d[-1 - i] = np.dot(_D2_ONESIDED, f[len(f) - 1 - i::-1][:6]) / (h * h)
    return d


# ---------------------------------------------------------------------------
# Waveforms


@dataclass
class PiecewiseConstantPulse:
    """Square composite drive: ordered (duration, amplitude) segments."""

    segments: tuple
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        segs = tuple((float(d), float(a)) for d, a in self.segments)
        if not segs:
            raise InvalidInputError("pulse needs at least one segment")
        if any(d <= 0 for d, _ in segs):
            raise InvalidInputError("segment durations must be positive")
        self.segments = segs

    @property
    def total_time(self) -> float:
        return sum(d for d, _ in self.segments)

    @property
    def max_amplitude(self) -> float:
        return max(abs(a) for _, a in self.segments)

    def rotation_angle(self) -> float:
        """Net turning angle: the integral of the drive over time."""
        return sum(d * a for d, a in self.segments)

    def boundaries(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([d for d, _ in self.segments])])

    def phase_at_boundaries(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([d * a for d, a in self.segments])])


@dataclass
class SampledPulse:
    """Drive given on a dense time grid."""

    t: np.ndarray
    omega: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.omega = np.asarray(self.omega, dtype=float)
        if self.t.ndim != 1 or len(self.t) < 16:
            raise InvalidInputError("sampled pulse needs >= 16 time samples")
        if len(self.omega) != len(self.t):
            raise InvalidInputError("omega array must match the time grid")
        if np.any(np.diff(self.t) <= 0):
            raise InvalidInputError("time grid must be strictly increasing")

    @property
    def total_time(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def max_amplitude(self) -> float:
        return float(np.max(np.abs(self.omega)))

    def rotation_angle(self) -> float:
        return float(simpson(self.omega, x=self.t))

    def phase(self) -> np.ndarray:
        """Accumulated turning angle on the grid."""
        return cumulative_simpson(self.omega, x=self.t, initial=0.0)


PulseWaveform = Union[PiecewiseConstantPulse, SampledPulse]


# ---------------------------------------------------------------------------
# Curve functionals


def arc_length(curve) -> float:
    """Total arc length.

    Piecewise curves are summed segment-analytically; sampled curves are
    integrated as ``sqrt(x'^2 + y'^2)`` by composite Simpson quadrature.
    """
    if isinstance(curve, PiecewiseCurve):
        return curve.total_length
    if isinstance(curve, SampledCurve):
        return float(simpson(curve.speed(), x=curve.lam))
    raise InvalidInputError(f"not a curve: {type(curve).__name__}")


def closure_defect(curve) -> float:
    """Euclidean gap between the curve's endpoint and its start
    (synthesized curves start at the origin)."""
    if isinstance(curve, PiecewiseCurve):
        return curve.end_point().distance_to(curve.start_point())
    if isinstance(curve, SampledCurve):
        return math.hypot(curve.x[-1] - curve.x[0], curve.y[-1] - curve.y[0])
    raise InvalidInputError(f"not a curve: {type(curve).__name__}")


def curvature_at(curve, lam: float):
    """Signed curvature at arc-length position ``lam``.

    Returns None at a declared cusp (curvature is undefined there).
    Evaluation at an undeclared kink raises DiscontinuityError.
    """
    if isinstance(curve, SampledCurve):
        kappa = curve.curvature()
        return float(np.interp(lam, curve.lam, kappa))
    if not isinstance(curve, PiecewiseCurve):
        raise InvalidInputError(f"not a curve: {type(curve).__name__}")

    L = curve.total_length
    at_ends = lam <= TOL_GEOM or lam >= L - TOL_GEOM
    if curve.origin_cusp is not None and at_ends:
        return None

    # A joint hit: make sure the tangents actually agree there.
    i = curve.segment_index_at(lam)
    for j, bp in enumerate(curve.breakpoints[1:-1], start=1):
        if abs(lam - bp) <= TOL_GEOM:
            before, after = curve.segments[j - 1], curve.segments[j]
            turn = _angle_diff(after.tangent_angle(0.0),
                               before.tangent_angle(before.length))
            if abs(turn) > TOL_GEOM:
                raise DiscontinuityError(
                    f"tangent jumps by {turn:.3e} rad at lambda={bp:.6f}"
                )
    return curve.segments[i].curvature


def _segment_area(seg: Segment) -> float:
    """Green's-theorem contribution (1/2) int (x dy - y dx), exact."""
    if isinstance(seg, Line):
        return 0.5 * (seg.start.x * seg.end.y - seg.start.y * seg.end.x)
    th0 = seg.start_angle
    th1 = seg.start_angle + seg.sweep
    c, r = seg.center, seg.radius
    cross = c.x * (math.sin(th1) - math.sin(th0)) - c.y * (math.cos(th1) - math.cos(th0))
    return 0.5 * (r * cross + r * r * seg.sweep)


def signed_area(curve, require_closed: bool = True) -> float:
    """Net signed area (1/2) closed-integral (x dy - y dx).

    Counterclockwise loops count positive.  With ``require_closed`` the
    endpoint gap must be below TOL_CLOSE; otherwise the contour is
    closed by the chord back to the start point.
    """
    defect = closure_defect(curve)
    if require_closed and defect > TOL_CLOSE:
        raise ClosureError(defect, TOL_CLOSE)
    if isinstance(curve, PiecewiseCurve):
        area = sum(_segment_area(seg) for seg in curve.segments)
        p0, p1 = curve.start_point(), curve.end_point()
        chord = 0.5 * (p1.x * p0.y - p1.y * p0.x)
    else:
        c = curve.with_derivatives()
        area = 0.5 * simpson(c.x * c.dy - c.y * c.dx, x=c.lam)
        chord = 0.5 * (c.x[-1] * c.y[0] - c.y[-1] * c.x[0])
    return float(area + chord)


# ---------------------------------------------------------------------------
# Curve <-> pulse maps


def pulse_from_curve(curve, amplitude_bound: Optional[float] = None,
                     grid_points: Optional[int] = None) -> PulseWaveform:
    """Extract the drive: amplitude = signed curvature, time = arc length.

    Piecewise curves yield square composites.  Sampled curves yield a
    sampled waveform on the recovered time grid t(lam); such curves need
    not be unit speed, so the time map is re-integrated from the actual
    parameterization speed.  If ``amplitude_bound`` is given and the
    extracted drive exceeds it, the pulse is still returned but carries
    an ``amplitude_warning`` entry in its metadata.
    """
    if isinstance(curve, PiecewiseCurve):
        pulse = PiecewiseConstantPulse(
            tuple((seg.length, seg.curvature) for seg in curve.segments)
        )
    elif isinstance(curve, SampledCurve):
        c = curve.with_derivatives()
        sp = np.hypot(c.dx, c.dy)
        if np.any(sp * sp < 1e-12):
            i = int(np.argmin(sp))
            raise DegenerateSpeedError(
                f"parameterization speed vanishes near lambda={c.lam[i]:.6f}"
            )
        t = cumulative_simpson(sp, x=c.lam, initial=0.0)
        kappa = (c.dx * c.d2y - c.dy * c.d2x) / sp ** 3
        pulse = SampledPulse(t, kappa)
    else:
        raise InvalidInputError(f"not a curve: {type(curve).__name__}")

    if amplitude_bound is not None and pulse.max_amplitude > amplitude_bound:
        pulse.meta["amplitude_warning"] = (
            f"peak amplitude {pulse.max_amplitude:.6g} exceeds bound {amplitude_bound:.6g}"
        )
    return pulse


def curve_from_pulse(pulse: PulseWaveform,
                     grid_points: int = DEFAULT_GRID_POINTS) -> SampledCurve:
    """Reconstruct the error-plane trajectory of a drive.

    With theta(t) the accumulated turning angle, the trajectory is
    x(t) = int cos(theta), y(t) = int sin(theta): unit speed, starting
    at the origin with tangent along +x, and with signed curvature equal
    to the drive amplitude, so a round trip through pulse_from_curve
    reproduces the curvature profile exactly (up to the rigid rotation
    that fixes the starting tangent).
    """
    if isinstance(pulse, PiecewiseConstantPulse):
        t_b = pulse.boundaries()
        th_b = pulse.phase_at_boundaries()
        T = t_b[-1]
        # Put every amplitude jump exactly on the grid, with an even
        # number of intervals per segment: Simpson panels then never
        # straddle a curvature corner and area/length quadrature keeps
        # its full order.
        pieces = [np.array([0.0])]
        for i, (d, _) in enumerate(pulse.segments):
            m = max(2 * int(math.ceil(grid_points * d / T / 2)), 2)
            pieces.append(np.linspace(t_b[i], t_b[i + 1], m + 1)[1:])
        t = np.concatenate(pieces)
        idx = np.clip(np.searchsorted(t_b, t, side="right") - 1, 0,
                      len(pulse.segments) - 1)
        x = np.empty_like(t)
        y = np.empty_like(t)
        dx = np.empty_like(t)
        dy = np.empty_like(t)
        d2x = np.empty_like(t)
        d2y = np.empty_like(t)
        # Per-segment closed forms: with constant amplitude a the angle
        # is linear in time and the integrals are exact trigonometry.
        x0 = y0 = 0.0
        seg_x0 = np.empty(len(pulse.segments))
        seg_y0 = np.empty(len(pulse.segments))
        for i, (d, a) in enumerate(pulse.segments):
            seg_x0[i], seg_y0[i] = x0, y0
            th0, th1 = th_b[i], th_b[i + 1]
            if a == 0.0:
                x0 += math.cos(th0) * d
                y0 += math.sin(th0) * d
            else:
                x0 += (math.sin(th1) - math.sin(th0)) / a
                y0 += (math.cos(th0) - math.cos(th1)) / a
        for i, (d, a) in enumerate(pulse.segments):
            m = idx == i
            if not np.any(m):
                continue
            dt = t[m] - t_b[i]
            th = th_b[i] + a * dt
            dx[m] = np.cos(th)
            dy[m] = np.sin(th)
            d2x[m] = -a * np.sin(th)
            d2y[m] = a * np.cos(th)
            if a == 0.0:
                x[m] = seg_x0[i] + np.cos(th_b[i]) * dt
                y[m] = seg_y0[i] + np.sin(th_b[i]) * dt
            else:
                x[m] = seg_x0[i] + (np.sin(th) - math.sin(th_b[i])) / a
                y[m] = seg_y0[i] + (math.cos(th_b[i]) - np.cos(th)) / a
        return SampledCurve(t, x, y, dx=dx, dy=dy, d2x=d2x, d2y=d2y)

    if isinstance(pulse, SampledPulse):
        th = pulse.phase()
        ct, st = np.cos(th), np.sin(th)
        x = cumulative_simpson(ct, x=pulse.t, initial=0.0)
        y = cumulative_simpson(st, x=pulse.t, initial=0.0)
        # Derivatives are known in closed form from the phase; attaching
        # them keeps area/length quadrature exact on nonuniform grids.
        return SampledCurve(pulse.t, x, y, dx=ct, dy=st,
                            d2x=-pulse.omega * st, d2y=pulse.omega * ct)

    raise InvalidInputError(f"not a pulse: {type(pulse).__name__}")
