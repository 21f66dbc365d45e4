"""Rise-time-limited smoothing of the time-optimal square composites.

Two routes are provided:

* Curve smoothing ("cs"): blend the analytic extensions of the curve's
  segments into a single everywhere-smooth parametric curve, then
  re-extract the pulse from its curvature.  Because the blending happens
  in the error plane, closure (and hence leading-order noise
  cancellation) survives almost exactly; only the zero-area condition
  picks up a small residual.

* Direct smoothing ("ds"): the naive baseline that replaces each
  amplitude jump of the square pulse by a tanh ramp in the time domain,
  on the original [0, T] window.  Nothing protects the error-plane
  geometry, so cancellation degrades as the ramps widen.

Both pipelines end with ``rescale_pulse``: a uniform amplitude factor
restores the net rotation angle, then a duration*amplitude-preserving
rescale pins the peak amplitude back to the allowed maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import expit

from .errors import AccuracyError, CalibrationError, InvalidInputError
from .geometry import (
    PiecewiseConstantPulse,
    PiecewiseCurve,
    PulseWaveform,
    SampledCurve,
    SampledPulse,
    curve_from_pulse,
    pulse_from_curve,
    signed_area,
    closure_defect,
)
from .synthesis import SynthesisSpec, synthesize_curve, synthesize_pulse, t_min

#: Hard ceiling on auto-selected grid sizes.
MAX_GRID = 2 ** 19
#: Grid points per transition width when auto-sizing sample grids.
POINTS_PER_WIDTH = 24


@dataclass(frozen=True)
class SmoothingParams:
    """Sharpness of the blending functions and the sampling density.

    ``p`` shapes the whole-domain envelopes that force the pulse to
    start and end at zero; ``q`` shapes the junction blends.  During
    slope calibration the two are tied as p = q/4 so a single scalar is
    searched (envelopes act on the whole domain and need the gentler
    scale).
    """

    p: float
    q: float
    grid_points: int = 4096
    slope_budget: Optional[float] = None

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise InvalidInputError("sharpness parameters must be positive")
        if self.grid_points < 1024:
            raise InvalidInputError("grid_points must be at least 1024")
        if self.slope_budget is not None and not self.slope_budget > 0:
            raise InvalidInputError("slope budget must be positive")


@dataclass
class SmoothedPulseReport:
    """Final pulse of a smoothing pipeline plus its recomputed
    diagnostics (all residuals are measured on the delivered pulse, not
    carried over from intermediate stages)."""

    pulse: SampledPulse
    max_slope: float
    rotation_angle: float
    residual_area: float
    residual_closure: float
    time_overhead: float


def default_params(curve: PiecewiseCurve, grid_points: int = 4096) -> SmoothingParams:
    """Gentle defaults: envelope scale p = 2/length, junction scale q = 4p."""
    p = 2.0 / curve.total_length
    return SmoothingParams(p=p, q=4.0 * p, grid_points=grid_points)


def blend_f(i: int, sharpness: float, x):
    """The four blending functions.

    f1 = tanh(s x) and f2 = 1 - f1 envelope the domain ends so second
    derivatives (hence the pulse) vanish there; f3 = 1/(1 + exp(-s x))
    and f4 = 1 - f3 hand one segment over to the next smoothly.  All
    four are infinitely differentiable.
    """
    if not sharpness > 0:
        raise InvalidInputError("sharpness must be positive")
    x = np.asarray(x, dtype=float)
    if i == 1:
        return np.tanh(sharpness * x)
    if i == 2:
        return 1.0 - np.tanh(sharpness * x)
    if i == 3:
        return expit(sharpness * x)
    if i == 4:
        return expit(-sharpness * x)
    raise InvalidInputError(f"blend index must be 1..4, got {i}")


def smooth_curve(curve: PiecewiseCurve, params: SmoothingParams) -> SampledCurve:
    """Assemble the everywhere-smooth curve from a piecewise one.

    Each coordinate is built as

        f1(L - lam) * lam * x1'(0) * f2(lam)
        + f1(lam) * xt(lam) * f1(L - lam)
        + f1(lam) * (lam - L) * xn'(L) * f2(L - lam)

    where xt blends the segments' analytic extensions with f3/f4 at the
    junctions.  The linear head/tail terms force the second derivative
    (hence the extracted pulse) to zero at both ends; both endpoint
    values are pinned to the curve's own endpoints, so a closed input
    stays exactly closed.  Derivatives are attached by fourth-order
    finite differences on the uniform grid.
    """
    L = curve.total_length
    bps = curve.breakpoints
    n = len(curve.segments)
    lam = np.linspace(0.0, L, params.grid_points)

    exts_x = []
    exts_y = []
    for i, seg in enumerate(curve.segments):
        xi, yi = seg.position(lam - bps[i])
        exts_x.append(xi)
        exts_y.append(yi)

    def blended(vals):
        if n == 1:
            return vals[0]
        f3 = lambda z: expit(params.q * z)
        f4 = lambda z: expit(-params.q * z)
        tot = vals[0] * f4(lam - bps[1])
        for i in range(1, n - 1):
            tot = tot + vals[i] * f3(lam - bps[i]) * f4(lam - bps[i + 1])
        return tot + vals[n - 1] * f3(lam - bps[n - 1])

    a0 = curve.segments[0].tangent_angle(0.0)
    a1 = curve.segments[-1].tangent_angle(curve.segments[-1].length)
    head = np.tanh(params.p * (L - lam)) * lam * (1.0 - np.tanh(params.p * lam))
    body = np.tanh(params.p * lam) * np.tanh(params.p * (L - lam))
    tail = np.tanh(params.p * lam) * (lam - L) * (1.0 - np.tanh(params.p * (L - lam)))

    x = head * math.cos(a0) + body * blended(exts_x) + tail * math.cos(a1)
    y = head * math.sin(a0) + body * blended(exts_y) + tail * math.sin(a1)

    for arr, name in ((x, "x"), (y, "y")):
        bad = ~np.isfinite(arr)
        if np.any(bad):
            raise AccuracyError(
                f"smoothed {name}(lambda) is non-finite at lambda="
                f"{lam[bad][0]:.6g}"
            )
    return SampledCurve(lam, x, y).with_derivatives()


def extract_smoothed_pulse(curve: SampledCurve) -> SampledPulse:
    """Pulse of a smoothed curve: the curve is no longer unit speed, so
    the time grid is re-integrated from the parameterization speed
    before the curvature is read off."""
    pulse = pulse_from_curve(curve)
    if not isinstance(pulse, SampledPulse):
        raise InvalidInputError("expected a sampled curve")
    return pulse


def rescale_pulse(pulse: PulseWaveform, target_angle: float,
                  amplitude_bound: float) -> PulseWaveform:
    """Restore the rotation and the amplitude limit.

    First a uniform amplitude factor brings the net turning angle to the
    representative of ``target_angle`` (mod 2 pi) nearest the current
    one; then amplitudes and durations are scaled inversely so the peak
    amplitude equals ``amplitude_bound``.  The normalized profile
    omega(t/T)*T is untouched.
    """
    if not amplitude_bound > 0:
        raise InvalidInputError("amplitude bound must be positive")
    theta = pulse.rotation_angle()
    if abs(theta) < 1e-9:
        raise InvalidInputError("cannot rescale a pulse with zero net rotation")
    target = target_angle + 2 * math.pi * round((theta - target_angle) / (2 * math.pi))
    c = target / theta
    peak = pulse.max_amplitude * abs(c)
    s = peak / amplitude_bound
    if abs(c - 1.0) < 1e-15 and abs(s - 1.0) < 1e-15:
        return pulse

    if isinstance(pulse, PiecewiseConstantPulse):
        segs = tuple((d * s, a * c / s) for d, a in pulse.segments)
        return PiecewiseConstantPulse(segs, meta=dict(pulse.meta))
    if isinstance(pulse, SampledPulse):
        return SampledPulse(pulse.t * s, pulse.omega * (c / s),
                            meta=dict(pulse.meta))
    raise InvalidInputError(f"not a pulse: {type(pulse).__name__}")


def direct_smooth(pulse: PiecewiseConstantPulse, rate: float,
                  grid_points: Optional[int] = None) -> SampledPulse:
    """Baseline: replace every level jump a -> b of the square composite
    (including the initial rise from zero and the final fall back)
    by (a+b)/2 + (b-a)/2 * tanh(rate * (t - t0)) centered at the jump
    time, sampled on the original [0, T] window.

    Adjacent ramps that eat more than half of a segment leave an
    ``overlap_warning`` in the metadata.
    """
    if not isinstance(pulse, PiecewiseConstantPulse):
        raise InvalidInputError("direct smoothing expects a square composite")
    if not rate > 0:
        raise InvalidInputError("rate must be positive")
    T = pulse.total_time
    jumps = pulse.boundaries()
    if grid_points is None:
        # Coarse base grid plus fine windows around each ramp: keeps the
        # transitions resolved at any rate without huge uniform grids.
        pieces = [np.linspace(0.0, T, 4097)]
        half = 25.0 / rate
        for t0 in jumps:
            w = np.linspace(t0 - half, t0 + half, 2 * 25 * POINTS_PER_WIDTH + 1)
            pieces.append(w[(w >= 0.0) & (w <= T)])
        t = np.unique(np.concatenate(pieces))
        t = np.concatenate([[t[0]], t[1:][np.diff(t) > 1e-13 * T]])
        if t[-1] < T:
            t = np.append(t, T)
    else:
        t = np.linspace(0.0, T, grid_points)
    levels = [0.0] + [a for _, a in pulse.segments] + [0.0]
    omega = np.zeros_like(t)
    for t0, a, b in zip(jumps, levels[:-1], levels[1:]):
        if a == b:
            continue
        omega += 0.5 * (b - a) * (1.0 + np.tanh(rate * (t - t0)))

    out = SampledPulse(t, omega)
    half_width = math.atanh(0.95) / rate
    for d, _ in pulse.segments:
        if 2 * half_width > 0.5 * d:
            out.meta["overlap_warning"] = (
                f"ramp half-width {half_width:.4g} exceeds half of a "
                f"{d:.4g}-long segment at rate {rate:.6g}"
            )
            break
    return out


# ---------------------------------------------------------------------------
# Slope measurement and calibration


def _lagrange_derivative(t: np.ndarray, f: np.ndarray) -> np.ndarray:
    """df/dt from degree-4 Lagrange interpolation on sliding 5-point
    windows (fourth order, uniform or not).  Interior points are window
    centers; the first and last two reuse the edge windows."""
    n = len(t)
    if n < 5:
        raise InvalidInputError("need at least 5 samples for the slope")

    def weights(nodes, p):
        w = np.zeros((5,) + nodes.shape[1:])
        zp = nodes[p]
        for j in range(5):
            if j == p:
                acc = np.zeros_like(zp)
                for m in range(5):
                    if m != p:
                        acc += 1.0 / (zp - nodes[m])
                w[j] = acc
            else:
                num = np.ones_like(zp)
                den = np.ones_like(zp)
                for m in range(5):
                    if m != j:
                        den *= nodes[j] - nodes[m]
                        if m != p:
                            num *= zp - nodes[m]
                w[j] = num / den
        return w

    d = np.empty(n)
    windows = np.stack([t[i:n - 4 + i] for i in range(5)])  # (5, n-4)
    vals = np.stack([f[i:n - 4 + i] for i in range(5)])
    w = weights(windows, 2)
    d[2:-2] = np.sum(w * vals, axis=0)
    for p in (0, 1):
        d[p] = float(np.dot(weights(t[:5], p), f[:5]))
        d[n - 1 - p] = float(np.dot(weights(t[-5:][::-1], p), f[-5:][::-1]))
    return d


def max_slope(pulse: PulseWaveform) -> float:
    """Peak |d omega / dt| by fourth-order finite differences; a square
    composite has jumps, reported as an infinite slope."""
    if isinstance(pulse, PiecewiseConstantPulse):
        return math.inf
    if isinstance(pulse, SampledPulse):
        return float(np.max(np.abs(_lagrange_derivative(pulse.t, pulse.omega))))
    raise InvalidInputError(f"not a pulse: {type(pulse).__name__}")


def _auto_grid(span: float, sharpness: float) -> int:
    need = int(span * sharpness * POINTS_PER_WIDTH)
    n = 4096
    while n < need and n < MAX_GRID:
        n *= 2
    return n


def _cs_final_pulse(spec: SynthesisSpec, q: float,
                    grid_points: Optional[int]) -> SampledPulse:
    curve = synthesize_curve(spec)
    n = grid_points if grid_points else _auto_grid(curve.total_length, q)
    params = SmoothingParams(p=q / 4.0, q=q, grid_points=n)
    smoothed = smooth_curve(curve, params)
    pulse = extract_smoothed_pulse(smoothed)
    final = rescale_pulse(pulse, spec.rotation_angle, spec.omega_max)
    final.meta.update(method="cs", q=q, p=q / 4.0, grid_points=n)
    return final


def _ds_final_pulse(spec: SynthesisSpec, rate: float,
                    grid_points: Optional[int]) -> SampledPulse:
    square = synthesize_pulse(spec)
    pulse = direct_smooth(square, rate, grid_points=grid_points)
    final = rescale_pulse(pulse, spec.rotation_angle, spec.omega_max)
    if not isinstance(final, SampledPulse):
        raise AccuracyError("direct smoothing produced a non-sampled pulse")
    final.meta.update(method="ds", rate=rate, grid_points=len(final.t))
    return final


def _report_for(pulse: SampledPulse, spec: SynthesisSpec) -> SmoothedPulseReport:
    curve = curve_from_pulse(pulse)
    return SmoothedPulseReport(
        pulse=pulse,
        max_slope=max_slope(pulse),
        rotation_angle=pulse.rotation_angle(),
        residual_area=signed_area(curve, require_closed=False),
        residual_closure=closure_defect(curve),
        time_overhead=pulse.total_time / t_min(spec),
    )


def calibrate_to_slope(method: str, base: SynthesisSpec, budget: float,
                       grid_points: Optional[int] = None,
                       tolerance: float = 0.02) -> SmoothedPulseReport:
    """Tune the smoothing sharpness (q for "cs" with p = q/4; the ramp
    rate for "ds") by bisection until the final pulse's measured peak
    slope matches ``budget`` within ``tolerance`` (relative), and return
    the rescaled pulse with recomputed diagnostics."""
    if method not in ("cs", "ds"):
        raise InvalidInputError(f"method must be 'cs' or 'ds', got {method!r}")
    if not budget > 0:
        raise InvalidInputError("slope budget must be positive")

    build = _cs_final_pulse if method == "cs" else _ds_final_pulse

    def measured(s: float) -> float:
        return max_slope(build(base, s, grid_points))

    lo, hi = budget / 10.0, budget * 10.0
    flo, fhi = measured(lo), measured(hi)
    if not (flo < budget < fhi):
        raise CalibrationError(
            f"budget {budget:.6g} outside the reachable slope range "
            f"[{flo:.6g}, {fhi:.6g}] for method {method!r}"
        )
    # Bisection in log-sharpness; slope grows monotonically with sharpness.
    target_frac = tolerance / 4.0
    s = math.sqrt(lo * hi)
    for _ in range(80):
        m = measured(s)
        if abs(m - budget) <= target_frac * budget:
            break
        if m < budget:
            lo = s
        else:
            hi = s
        s = math.sqrt(lo * hi)
    final = build(base, s, grid_points)
    report = _report_for(final, base)
    if abs(report.max_slope - budget) > tolerance * budget:
        raise CalibrationError(
            f"calibration stalled: reached slope {report.max_slope:.6g} "
            f"for budget {budget:.6g}"
        )
    return report
