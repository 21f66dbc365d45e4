"""Time-optimal noise-cancelling curves and their square pulses.

The fastest drive that performs a z-rotation by ``phi + pi`` while
cancelling quasistatic transverse noise maps to the shortest closed
curve with curvature bounded by the amplitude limit, a cusp of opening
angle ``phi`` at the origin, and (for second-order cancellation) zero
net signed area.  Both optima are chains of unit-radius arcs at the
amplitude bound:

* first order: three arcs, total length ``4 acos(cos(phi/2)/2) - phi + pi``;
* second order: five arcs with one self-crossing, where the height ``k``
  of the two middle arc centers is fixed numerically by the zero-area
  condition.

All curves here are built mirror-symmetric about the x axis, starting
at the origin on the lower leg of the cusp (tangent angle ``-phi/2``)
with the first arc bending clockwise, which reproduces the standard
square composites (-1, +1, -1, ...) at unit amplitude bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInputError, SolverError
from .geometry import (
    Arc,
    PiecewiseConstantPulse,
    PiecewiseCurve,
    Point2,
    signed_area,
)

#: Bisection tolerance for the zero-area solve, in units of k.
K_SOLVE_TOL = 1e-12


@dataclass(frozen=True)
class SynthesisSpec:
    """Target of a synthesis run.

    ``phi`` is the cusp opening angle in [0, pi]; the implemented gate is
    a z-rotation by ``phi + pi``.  ``order`` selects first- or
    second-order noise cancellation.  Durations scale as 1/omega_max and
    amplitudes as omega_max, leaving duration*amplitude profiles fixed.
    """

    phi: float
    order: int = 1
    omega_max: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.phi <= math.pi:
            raise InvalidInputError(f"phi must lie in [0, pi], got {self.phi}")
        if self.order not in (1, 2):
            raise InvalidInputError(f"order must be 1 or 2, got {self.order}")
        if not self.omega_max > 0:
            raise InvalidInputError("omega_max must be positive")

    @property
    def rotation_angle(self) -> float:
        return self.phi + math.pi


@dataclass(frozen=True)
class SecondOrderGeometry:
    """Geometry of the five-arc solution for one value of phi.

    ``k`` is the height of the two middle arc centers above/below the
    symmetry axis (in units of the arc radius); ``psi1`` and ``psi2``
    are the half-sweep angles fixing the segment durations; ``r`` is the
    arc radius, 1 for the time-optimal family.
    """

    k: float
    psi1: float
    psi2: float
    r: float = 1.0


@dataclass(frozen=True)
class FamilyLengths:
    """Lengths of the three tangent three-segment closed-curve families."""

    line_arc_line: float
    arc_line_arc: float
    three_arc: float


def _psi_first(phi: float) -> float:
    return math.acos(0.5 * math.cos(phi / 2))


def _durations_first(phi: float):
    psi = _psi_first(phi)
    return (psi - phi / 2, 2 * psi + math.pi, psi - phi / 2)


def _durations_second(phi: float, geom: SecondOrderGeometry):
    p1, p2 = geom.psi1, geom.psi2
    return (p1 - phi / 2, p1 + p2, 2 * p2 + math.pi, p1 + p2, p1 - phi / 2)


_SIGNS_FIRST = (-1.0, 1.0, -1.0)
_SIGNS_SECOND = (-1.0, 1.0, -1.0, 1.0, -1.0)


def _arcs_from_profile(durations, signs, phi: float, radius: float = 1.0):
    """Chain unit-curvature arcs from the origin, tangent -phi/2, with
    prescribed (duration, sign) per segment.  Zero-length segments (the
    degenerate phi=pi limits) are dropped."""
    arcs = []
    px, py = 0.0, 0.0
    a = -phi / 2
    for d, s in zip(durations, signs):
        if d <= 1e-14:
            continue
        kappa = s / radius
        # center = point + normal/kappa, normal = (-sin a, cos a)
        cx = px - math.sin(a) / kappa
        cy = py + math.cos(a) / kappa
        th0 = math.atan2(py - cy, px - cx)
        sweep = kappa * d
        arcs.append(Arc(Point2(cx, cy), radius, th0, sweep))
        th1 = th0 + sweep
        px = cx + radius * math.cos(th1)
        py = cy + radius * math.sin(th1)
        a += kappa * d
    return arcs


def _scaled_curve(durations, signs, phi: float, omega_max: float,
                  cusp: bool) -> PiecewiseCurve:
    arcs = _arcs_from_profile([d / omega_max for d in durations], signs, phi,
                              radius=1.0 / omega_max)
    return PiecewiseCurve(arcs, origin_cusp=phi if cusp else None)


def first_order_curve(spec: SynthesisSpec) -> PiecewiseCurve:
    """Shortest closed curve cancelling first-order noise: three unit
    arcs joined tangentially, mirror-symmetric about the x axis.  At
    phi=pi the outer arcs vanish and the curve is a single circle."""
    if spec.order != 1:
        raise InvalidInputError("spec.order must be 1 for first_order_curve")
    cusp = spec.phi < math.pi - 1e-12
    return _scaled_curve(_durations_first(spec.phi), _SIGNS_FIRST, spec.phi,
                         spec.omega_max, cusp)


def first_order_pulse(spec: SynthesisSpec) -> PiecewiseConstantPulse:
    """Square composite (-1, +1, -1) * omega_max with durations
    (psi - phi/2, 2 psi + pi, psi - phi/2) / omega_max,
    psi = acos(cos(phi/2)/2).  Net turning angle is phi + pi."""
    if spec.order != 1:
        raise InvalidInputError("spec.order must be 1 for first_order_pulse")
    segs = [
        (d / spec.omega_max, s * spec.omega_max)
        for d, s in zip(_durations_first(spec.phi), _SIGNS_FIRST)
        if d > 1e-14
    ]
    return PiecewiseConstantPulse(tuple(segs))


@lru_cache(maxsize=None)
def _solve_k_cached(phi: float) -> float:
    # Degenerate identity rotation: the curve is two tangent circles of
    # opposite orientation whose areas cancel for any radius, so k = 0.
    if phi >= math.pi - 1e-12:
        return 0.0

    def area_of(k: float) -> float:
        geom = _geometry_for(phi, k)
        curve = PiecewiseCurve(
            _arcs_from_profile(_durations_second(phi, geom), _SIGNS_SECOND, phi),
            origin_cusp=phi,
        )
        return signed_area(curve)

    lo, hi = 0.0, math.cos(phi / 2) * (1.0 - 1e-12)
    flo, fhi = area_of(lo), area_of(hi)
    if flo == 0.0:
        return lo
    if flo * fhi > 0.0:
        # The area is empirically monotone in k; scan for a sign change
        # before giving up.
        grid = np.linspace(lo, hi, 1024)
        vals = [area_of(g) for g in grid]
        bracket = None
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                return float(grid[i])
            if vals[i] * vals[i + 1] < 0.0:
                bracket = (grid[i], grid[i + 1])
                break
        if bracket is None:
            raise SolverError(
                f"no sign change in area over k in [{lo:.3g}, {hi:.3g}] at "
                f"phi={phi:.6g}: area({lo:.3g})={flo:.3e}, area({hi:.3g})={fhi:.3e}"
            )
        lo, hi = bracket
        flo = area_of(lo)

    # Plain bisection: guaranteed convergence, bit-for-bit deterministic.
    while hi - lo > K_SOLVE_TOL:
        mid = 0.5 * (lo + hi)
        fm = area_of(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _geometry_for(phi: float, k: float) -> SecondOrderGeometry:
    return SecondOrderGeometry(
        k=k,
        psi1=math.acos((k + math.cos(phi / 2)) / 2),
        psi2=math.acos(k / 2),
    )


def solve_k(phi: float) -> SecondOrderGeometry:
    """Fix the middle-arc center height k by the zero-net-area condition.

    The area is evaluated segment-analytically on the constructed
    five-arc curve and the root located by bracketed bisection on
    k in [0, cos(phi/2)).
    """
    if not 0.0 <= phi <= math.pi:
        raise InvalidInputError(f"phi must lie in [0, pi], got {phi}")
    return _geometry_for(phi, _solve_k_cached(float(phi)))


def second_order_curve(spec: SynthesisSpec) -> PiecewiseCurve:
    """Shortest closed curve cancelling noise to second order: five unit
    arcs with one self-crossing forming two lobes of opposite
    orientation and zero net area.  At phi=pi the cusp disappears and
    the lobes become two tangent circles."""
    if spec.order != 2:
        raise InvalidInputError("spec.order must be 2 for second_order_curve")
    geom = solve_k(spec.phi)
    cusp = spec.phi < math.pi - 1e-12
    return _scaled_curve(_durations_second(spec.phi, geom), _SIGNS_SECOND,
                         spec.phi, spec.omega_max, cusp)


def second_order_pulse(spec: SynthesisSpec) -> PiecewiseConstantPulse:
    """Square composite (-1, +1, -1, +1, -1) * omega_max; net turning
    angle is phi - pi, the same rotation as phi + pi modulo 2 pi."""
    if spec.order != 2:
        raise InvalidInputError("spec.order must be 2 for second_order_pulse")
    geom = solve_k(spec.phi)
    segs = [
        (d / spec.omega_max, s * spec.omega_max)
        for d, s in zip(_durations_second(spec.phi, geom), _SIGNS_SECOND)
        if d > 1e-14
    ]
    return PiecewiseConstantPulse(tuple(segs))


def synthesize_curve(spec: SynthesisSpec) -> PiecewiseCurve:
    return first_order_curve(spec) if spec.order == 1 else second_order_curve(spec)


def synthesize_pulse(spec: SynthesisSpec) -> PiecewiseConstantPulse:
    return first_order_pulse(spec) if spec.order == 1 else second_order_pulse(spec)


def t_min(spec: SynthesisSpec) -> float:
    """Minimum gate duration at the given amplitude bound.

    First order: [4 acos(cos(phi/2)/2) - phi + pi] / omega_max.
    Second order: [4 psi1 + 4 psi2 - phi + pi] / omega_max with psi1,
    psi2 from the zero-area solve.  Non-increasing in phi for both.
    """
    if spec.order == 1:
        psi = _psi_first(spec.phi)
        return (4 * psi - spec.phi + math.pi) / spec.omega_max
    geom = solve_k(spec.phi)
    return (4 * geom.psi1 + 4 * geom.psi2 - spec.phi + math.pi) / spec.omega_max


def family_lengths(phi: float) -> FamilyLengths:
    """Closed-form lengths of the three candidate three-segment families
    (line-arc-line, arc-line-arc, three tangent arcs).  The all-arc
    family is the shortest everywhere on (0, pi); the line-containing
    families diverge as phi -> 0."""
    if not 0.0 < phi < math.pi:
        if phi == 0.0:
            raise InvalidInputError(
                "line-containing family lengths diverge at phi = 0 (cot(phi/2))"
            )
        raise InvalidInputError(f"phi must lie in (0, pi), got {phi}")
    cot = 1.0 / math.tan(phi / 2)
    return FamilyLengths(
        line_arc_line=math.pi + phi + 2 * cot,
        arc_line_arc=3 * math.pi - phi + 2 * cot,
        three_arc=4 * _psi_first(phi) + math.pi - phi,
    )


def appendix_area(k: float, r: float, phi: float) -> float:
    """Closed-form net area of the two-lobe arc family with inner-lobe
    radius ``r`` and center height ``r*k``.

    Cross-check only: the solver's ground truth is the segment-analytic
    area of the constructed curve.  Note the half-sweep angles here
    follow the closed form's own convention (psi2 = acos(k),
    psi3 = acos(k/2)), which differs from the pulse parameterization.
    """
    if not r > 0:
        raise InvalidInputError("radius must be positive")
    c = math.cos(phi / 2)
    if not -1.0 <= (c + k) / 2 <= 1.0 or not -1.0 <= k <= 1.0:
        raise InvalidInputError(f"(k={k}, phi={phi}) outside the arccos domain")
    psi1 = math.acos((c + k) / 2)
    psi2 = math.acos(k)
    psi3 = math.acos(k / 2)
    inner = (
        math.tan(psi1) * (-2 * k * k + math.cos(phi) + 1)
        - 2 * math.sqrt(max(1 - k * k, 0.0)) * k
        + 2 * psi2 + phi - math.sin(phi)
    )
    outer = (
        math.sin(2 * psi2 - psi3) / math.cos(psi3)
        - 2 * psi2 - math.tan(psi3) - math.pi
    )
    return 0.5 * (r * r * inner + outer)
