"""Acceptance gate: every release criterion at its stated tolerance.

Each test prints one PASS/FAIL line; run with ``pytest -s`` to see them.
"""

import math

import numpy as np
import pytest

from curvepulse import (
    PiecewiseConstantPulse,
    SynthesisSpec,
    curve_from_pulse,
    family_lengths,
    fidelity,
    first_order_pulse,
    perturbative_coeffs,
    propagate,
    second_order_curve,
    second_order_pulse,
    signed_area,
    solve_k,
    sweep,
    synthesize_pulse,
    t_min,
)

from conftest import LEGEND_BUDGETS


def _report(number: int, description: str, passed: bool):
    print(f"acceptance {number} [{'PASS' if passed else 'FAIL'}]: {description}")
    assert passed, f"acceptance criterion {number} failed: {description}"


def test_criterion_1_first_order_minimal_times():
    ok = abs(t_min(SynthesisSpec(phi=math.pi / 3, order=1)) - 6.59) <= 0.01
    ok &= t_min(SynthesisSpec(phi=math.pi, order=1)) == 2 * math.pi
    _report(1, "first-order T_min: 6.59 +/- 0.01 at phi=pi/3, exactly 2*pi at phi=pi", ok)


def test_criterion_2_second_order_phi0_geometry():
    geom = solve_k(0.0)
    ok = abs(geom.k - 0.0374882) <= 1e-5
    curve = second_order_curve(SynthesisSpec(phi=0.0, order=2))
    expected = np.array([1.02542, 3.60288, 9.84858, 12.426, 13.4515])
    ok &= bool(np.all(np.abs(curve.breakpoints[1:] - expected) <= 1e-3))
    ok &= abs(t_min(SynthesisSpec(phi=0.0, order=2)) - 13.4515) <= 1e-3
    _report(2, "phi=0 five-arc solution: k = 0.0374882 +/- 1e-5, "
               "breakpoints and total time +/- 1e-3", ok)


def test_criterion_3_geometric_identity_suite():
    pulses = [PiecewiseConstantPulse(((2 * math.pi, 1.0),))]
    pulses += [first_order_pulse(SynthesisSpec(phi=p, order=1))
               for p in (0.0, math.pi / 3, math.pi)]
    pulses += [second_order_pulse(SynthesisSpec(phi=p, order=2))
               for p in (0.0, math.pi / 2)]
    ok = True
    for pulse in pulses:
        curve = curve_from_pulse(pulse, grid_points=8192)
        _, g2 = perturbative_coeffs(pulse)
        area = signed_area(curve, require_closed=False)
        closure = math.hypot(curve.x[-1], curve.y[-1])
        speed_residual = float(np.max(np.abs(np.hypot(curve.dx, curve.dy) - 1.0)))
        ok &= abs(g2 - 2j * area) <= 1e-8
        ok &= closure < 1e-9
        ok &= speed_residual < 1e-8
    _report(3, "g2 = 2i*area within 1e-8, closure < 1e-9, unit speed < 1e-8 "
               "for circle, order-1 (phi=0, pi/3, pi), order-2 (phi=0, pi/2)", ok)


def test_criterion_4_infidelity_scaling_exponents():
    uncorrected = PiecewiseConstantPulse(((math.pi, 1.0),))
    e0 = sweep(uncorrected, np.geomspace(1e-3, 1e-2, 16), 0.0).fitted_exponent
    e1 = sweep(first_order_pulse(SynthesisSpec(phi=0.0, order=1)),
               np.geomspace(1e-3, 1e-2, 16), 0.0).fitted_exponent
    e2 = sweep(second_order_pulse(SynthesisSpec(phi=0.0, order=2)),
               np.geomspace(3e-3, 3e-2, 16), 0.0).fitted_exponent
    ok = abs(e0 - 2.0) <= 0.2 and abs(e1 - 4.0) <= 0.3 and abs(e2 - 6.0) <= 0.4
    _report(4, f"scaling exponents {e0:.3f}/{e1:.3f}/{e2:.3f} within "
               "2.0+/-0.2, 4.0+/-0.3, 6.0+/-0.4", ok)


def test_criterion_5_family_length_ordering():
    ok = True
    for phi in np.linspace(0.05, math.pi - 0.05, 50):
        fl = family_lengths(phi)
        ok &= fl.three_arc < fl.line_arc_line < fl.arc_line_arc
    _report(5, "three-arc family strictly shortest at 50 angles in "
               "(0.05, pi-0.05)", ok)


def test_criterion_6_smoothing_superiority(calibrated_reports, phi0_spec):
    # Matched slope budgets quoted in time-normalized units
    # (peak slope x total duration); see conftest.LEGEND_BUDGETS.
    ok = True
    ratios = []
    for legend in LEGEND_BUDGETS:
        cs = calibrated_reports[("cs", legend)].pulse
        ds = calibrated_reports[("ds", legend)].pulse
        infid_cs = 1.0 - fidelity(propagate(cs, 1e-2), phi0_spec.phi)
        infid_ds = 1.0 - fidelity(propagate(ds, 1e-2), phi0_spec.phi)
        ratio = infid_ds / infid_cs
        ratios.append(ratio)
        ok &= ratio >= 5.0
        g1_cs, g2_cs = perturbative_coeffs(cs)
        g1_ds, g2_ds = perturbative_coeffs(ds)
        ok &= abs(g1_cs) < abs(g1_ds) and abs(g2_cs) < abs(g2_ds)
    summary = ", ".join(f"{b:.0f}: {r:.1f}x" for b, r in zip(LEGEND_BUDGETS, ratios))
    print(f"  curve-vs-direct infidelity ratios at delta_beta=1e-2 "
          f"({summary}); >= 10x at all budgets: "
          f"{all(r >= 10.0 for r in ratios)}")
    _report(6, "curve smoothing at least 5x below direct smoothing at "
               "every matched budget, with |g1|, |g2| strictly smaller", ok)


def test_criterion_7_zero_noise_correctness(calibrated_reports):
    ok = True
    for phi in np.linspace(0.0, math.pi, 7):
        for order in (1, 2):
            spec = SynthesisSpec(phi=phi, order=order)
            f = fidelity(propagate(synthesize_pulse(spec), 0.0), phi)
            ok &= f >= 1.0 - 1e-9
    for rep in calibrated_reports.values():
        f = fidelity(propagate(rep.pulse, 0.0), 0.0)
        ok &= f >= 1.0 - 1e-9
    _report(7, "all synthesized and smoothed-then-rescaled pulses reach "
               "fidelity 1 - 1e-9 at zero noise", ok)


def test_criterion_8_t_min_monotonicity():
    grid = np.linspace(0.0, math.pi, 100)
    ok = True
    for order in (1, 2):
        vals = [t_min(SynthesisSpec(phi=p, order=order)) for p in grid]
        ok &= bool(np.all(np.diff(vals) <= 1e-10))
    _report(8, "T_min non-increasing in phi on a 100-point grid for both orders", ok)
