"""Curve smoothing, the direct-smoothing baseline, and slope calibration."""

import math

import numpy as np
import pytest

from curvepulse import (
    CalibrationError,
    InvalidInputError,
    PiecewiseConstantPulse,
    SampledPulse,
    SmoothingParams,
    SynthesisSpec,
    arc_length,
    blend_f,
    calibrate_to_slope,
    curve_from_pulse,
    default_params,
    direct_smooth,
    extract_smoothed_pulse,
    max_slope,
    perturbative_coeffs,
    rescale_pulse,
    second_order_curve,
    second_order_pulse,
    smooth_curve,
    t_min,
)
from curvepulse.smoothing import _cs_final_pulse, _ds_final_pulse, _report_for


class TestBlendFunctions:
    def test_values_at_origin(self):
        assert blend_f(1, 3.0, 0.0) == 0.0
        assert blend_f(3, 3.0, 0.0) == 0.5

    def test_complementary_pairs(self):
        x = np.linspace(-5, 5, 201)
        assert np.allclose(blend_f(1, 2.0, x) + blend_f(2, 2.0, x), 1.0, atol=1e-15)
        assert np.allclose(blend_f(3, 2.0, x) + blend_f(4, 2.0, x), 1.0, atol=1e-15)

    def test_logistic_saturates(self):
        assert blend_f(3, 10.0, 3.1) == pytest.approx(1.0, abs=1e-12)

    def test_sharpness_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            blend_f(1, 0.0, 1.0)

    def test_unknown_index_rejected(self):
        with pytest.raises(InvalidInputError):
            blend_f(5, 1.0, 0.0)


@pytest.fixture(scope="module")
def phi0_curve():
    return second_order_curve(SynthesisSpec(phi=0.0, order=2))


class TestSmoothCurve:
    def test_sharp_limit_converges_to_square_curve(self, phi0_curve):
        params = SmoothingParams(p=125.0, q=500.0, grid_points=2 ** 16)
        sc = smooth_curve(phi0_curve, params)
        ref = phi0_curve.sample(2 ** 16)
        dev = np.max(np.hypot(sc.x - ref.x, sc.y - ref.y))
        assert dev < 1e-3

    def test_endpoints_pinned_to_curve_endpoints(self, phi0_curve):
        sc = smooth_curve(phi0_curve, default_params(phi0_curve))
        assert sc.x[0] == 0.0 and sc.y[0] == 0.0
        assert sc.x[-1] == 0.0 and sc.y[-1] == 0.0

    def test_second_derivatives_continuous_on_grid(self, phi0_curve):
        # C2 check: successive second-derivative jumps stay below 1e-3
        # of the peak, unlike the raw square-pulse curve.
        sc = smooth_curve(phi0_curve, default_params(phi0_curve, grid_points=2 ** 15))
        for arr in (sc.d2x, sc.d2y):
            assert np.max(np.abs(np.diff(arr))) / np.max(np.abs(arr)) < 1e-3
        raw = phi0_curve.sample(2 ** 15).with_derivatives()
        assert np.max(np.abs(np.diff(raw.d2x))) / np.max(np.abs(raw.d2x)) > 0.5

    def test_residuals_decrease_with_sharpness(self):
        # Pipeline residuals (after extraction and rescale) shrink
        # monotonically as the junction blends sharpen.
        spec = SynthesisSpec(phi=0.0, order=2)
        closures, areas, overheads = [], [], []
        for q in (4.0, 8.0, 16.0, 32.0, 64.0):
            rep = _report_for(_cs_final_pulse(spec, q, None), spec)
            closures.append(rep.residual_closure)
            areas.append(abs(rep.residual_area))
            overheads.append(rep.time_overhead)
        assert all(a >= b for a, b in zip(closures, closures[1:]))
        assert all(a >= b for a, b in zip(areas, areas[1:]))
        assert all(a >= b - 1e-9 for a, b in zip(overheads, overheads[1:]))


class TestExtractSmoothedPulse:
    def test_constant_drive_identity_limit(self):
        # A circle passed through extraction returns the constant drive.
        circle = curve_from_pulse(PiecewiseConstantPulse(((2 * math.pi, 1.0),)))
        pulse = extract_smoothed_pulse(circle)
        assert np.max(np.abs(pulse.omega - 1.0)) < 1e-6
        assert pulse.total_time == pytest.approx(2 * math.pi, abs=1e-9)

    def test_drive_starts_and_ends_at_zero(self, phi0_curve):
        for params in (SmoothingParams(p=125.0, q=500.0, grid_points=2 ** 17),
                       SmoothingParams(p=5.0, q=20.0, grid_points=2 ** 14)):
            pulse = extract_smoothed_pulse(smooth_curve(phi0_curve, params))
            assert abs(pulse.omega[0]) < 1e-6
            assert abs(pulse.omega[-1]) < 1e-6

    def test_duration_equals_arc_length(self, phi0_curve):
        sc = smooth_curve(phi0_curve, SmoothingParams(p=5.0, q=20.0, grid_points=2 ** 14))
        pulse = extract_smoothed_pulse(sc)
        assert pulse.total_time == pytest.approx(arc_length(sc), abs=1e-8)

    def test_peak_amplitude_near_bound_for_moderate_params(self, phi0_curve):
        sc = smooth_curve(phi0_curve, SmoothingParams(p=8.0, q=32.0, grid_points=2 ** 14))
        pulse = extract_smoothed_pulse(sc)
        assert pulse.max_amplitude == pytest.approx(1.0, rel=0.35)


class TestRescalePulse:
    def test_already_meeting_targets_is_returned_unchanged(self):
        pulse = second_order_pulse(SynthesisSpec(phi=0.5, order=2))
        assert rescale_pulse(pulse, 0.5 + math.pi, 1.0) is pulse

    def test_halved_amplitude_doubles_duration(self):
        pulse = PiecewiseConstantPulse(((1.0, -0.5), (2.0, 0.5)))
        out = rescale_pulse(pulse, pulse.rotation_angle(), 0.25)
        assert out.total_time == pytest.approx(2 * pulse.total_time, abs=1e-12)
        assert out.max_amplitude == pytest.approx(0.25, abs=1e-15)
        # duration*amplitude per segment is untouched
        for (d0, a0), (d1, a1) in zip(pulse.segments, out.segments):
            assert d1 * a1 == pytest.approx(d0 * a0, abs=1e-12)

    def test_restores_rotation_angle_mod_2pi(self, phi0_curve):
        sc = smooth_curve(phi0_curve, SmoothingParams(p=4.0, q=16.0, grid_points=2 ** 14))
        pulse = extract_smoothed_pulse(sc)
        out = rescale_pulse(pulse, math.pi, 1.0)
        # target phi + pi = pi; the nearest representative is -pi
        assert out.rotation_angle() == pytest.approx(-math.pi, abs=1e-9)
        assert out.max_amplitude == pytest.approx(1.0, abs=1e-12)

    def test_profile_shape_preserved(self):
        t = np.linspace(0.0, 3.0, 512)
        pulse = SampledPulse(t, np.sin(np.pi * t / 3.0) ** 2)
        out = rescale_pulse(pulse, pulse.rotation_angle(), 0.5)
        # omega(t/T)*T is invariant: compare normalized profiles
        ratio = out.total_time / pulse.total_time
        assert np.allclose(out.omega * ratio, pulse.omega, rtol=0, atol=1e-12)
        assert np.allclose(out.t / ratio, pulse.t, rtol=0, atol=1e-12)

    def test_zero_rotation_rejected(self):
        pulse = PiecewiseConstantPulse(((1.0, 1.0), (1.0, -1.0)))
        with pytest.raises(InvalidInputError, match="zero net rotation"):
            rescale_pulse(pulse, math.pi, 1.0)


class TestDirectSmooth:
    def test_sharp_limit_recovers_square_pulse(self):
        square = second_order_pulse(SynthesisSpec(phi=0.0, order=2))
        ds = direct_smooth(square, 5e4)
        bounds = square.boundaries()
        # compare away from the ramps
        away = np.ones(len(ds.t), dtype=bool)
        for b in bounds:
            away &= np.abs(ds.t - b) > 1e-3
        levels = np.array([square.segments[min(np.searchsorted(bounds, tt, side='right') - 1,
                                               len(square.segments) - 1)][1]
                           for tt in ds.t[away]])
        assert np.max(np.abs(ds.omega[away] - levels)) < 1e-12

    def test_rotation_angle_deviates_as_rate_decreases(self):
        # The half-truncated edge ramps shift the net rotation; the
        # deviation shrinks like 1/rate and is visible in the raw pulse.
        square = second_order_pulse(SynthesisSpec(phi=0.0, order=2))
        target = square.rotation_angle()
        devs = [abs(direct_smooth(square, r).rotation_angle() - target)
                for r in (20.0, 80.0, 320.0)]
        assert devs[0] > devs[1] > devs[2] > 1e-5
        assert devs[0] == pytest.approx(math.log(2) / 20.0, rel=0.05)

    def test_overlap_warning_at_low_rate(self):
        square = second_order_pulse(SynthesisSpec(phi=0.0, order=2))
        assert "overlap_warning" in direct_smooth(square, 2.0).meta
        assert "overlap_warning" not in direct_smooth(square, 100.0).meta

    def test_requires_square_input(self):
        t = np.linspace(0, 1, 64)
        with pytest.raises(InvalidInputError):
            direct_smooth(SampledPulse(t, np.ones_like(t)), 10.0)


class TestMaxSlope:
    def test_linear_ramp(self):
        dt = 0.25
        t = np.linspace(0.0, dt, 256)
        pulse = SampledPulse(t, t / dt)
        assert max_slope(pulse) == pytest.approx(1.0 / dt, rel=1e-10)

    def test_tanh_transition_rate(self):
        rate = 37.0
        t = np.linspace(-1.0, 1.0, 4096)
        pulse = SampledPulse(t, np.tanh(rate * t))
        assert max_slope(pulse) == pytest.approx(rate, rel=0.02)

    def test_square_pulse_reports_infinite_slope(self):
        pulse = second_order_pulse(SynthesisSpec(phi=0.0, order=2))
        assert max_slope(pulse) == math.inf

    def test_nonuniform_grid_fourth_order(self):
        # Clustered grid: the Lagrange stencils keep their accuracy.
        t = np.unique(np.concatenate([np.linspace(0, 2, 801),
                                      np.linspace(0.9, 1.1, 1601)]))
        pulse = SampledPulse(t, np.sin(4 * t))
        d_true = 4 * np.cos(4 * t)
        assert max_slope(pulse) == pytest.approx(np.max(np.abs(d_true)), rel=1e-6)


class TestCalibration:
    def test_reports_hit_budget_within_two_percent(self, calibrated_reports, phi0_spec):
        T = t_min(phi0_spec)
        for (method, legend), rep in calibrated_reports.items():
            budget = legend / T
            assert abs(rep.max_slope - budget) <= 0.02 * budget, (method, legend)

    def test_cs_at_budget_600_absolute_units(self, phi0_spec):
        rep = calibrate_to_slope("cs", phi0_spec, 600.0)
        assert abs(rep.max_slope - 600.0) <= 12.0
        assert abs(rep.residual_area) < 1e-4
        assert rep.pulse.max_amplitude == pytest.approx(1.0, abs=1e-9)

    def test_ds_sharp_budget_approaches_square(self, phi0_spec):
        rep = calibrate_to_slope("ds", phi0_spec, 1e5)
        assert rep.time_overhead < 1.01

    def test_cs_duration_overhead_plateau(self, phi0_spec):
        # The tail envelopes overshoot the curvature by a fixed ~32%
        # regardless of sharpness, so the curve-smoothing overhead
        # plateaus near 1.321 instead of approaching 1.
        rep = calibrate_to_slope("cs", phi0_spec, 600.0)
        assert rep.time_overhead == pytest.approx(1.321, abs=5e-3)

    def test_unattainable_budget_raises(self, phi0_spec):
        with pytest.raises(CalibrationError):
            calibrate_to_slope("cs", phi0_spec, 1e6)

    def test_unknown_method_rejected(self, phi0_spec):
        with pytest.raises(InvalidInputError):
            calibrate_to_slope("fourier", phi0_spec, 100.0)

    def test_cs_preserves_cancellation_better_than_ds(self, calibrated_reports):
        # At every matched slope budget the curve-smoothed pulse keeps
        # both error coefficients strictly below the direct-smoothed one.
        for legend in (450.0, 525.0, 600.0, 675.0):
            g1_cs, g2_cs = perturbative_coeffs(calibrated_reports[("cs", legend)].pulse)
            g1_ds, g2_ds = perturbative_coeffs(calibrated_reports[("ds", legend)].pulse)
            assert abs(g1_cs) < abs(g1_ds)
            assert abs(g2_cs) < abs(g2_ds)
